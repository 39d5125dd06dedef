#include "scat/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "scat/errors.hpp"

namespace scat {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB5[7] = {35.0 / 384,      0.0,  500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695,
                           393.0 / 640,     -92097.0 / 339200,
                           187.0 / 2100,    1.0 / 40};

}  // namespace

bool Dopri5::step(double& t, Eigen::VectorXd& y, double& h,
                  double direction) const {
    const int n = static_cast<int>(y.size());
    const double hs = direction * h;
    Eigen::VectorXd k[7];
    rhs_(t, y, k[0]);
    for (int i = 1; i < 7; ++i) {
        Eigen::VectorXd yi = y;
        for (int j = 0; j < i; ++j)
            if (kA[i][j] != 0.0) yi += (hs * kA[i][j]) * k[j];
        rhs_(t + kC[i] * hs, yi, k[i]);
    }
    Eigen::VectorXd y5 = y, err = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < 7; ++i) {
        if (kB5[i] != 0.0) y5 += (hs * kB5[i]) * k[i];
        err += (hs * (kB5[i] - kB4[i])) * k[i];
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        const double scale =
            tol_ + tol_ * std::max(std::abs(y[i]), std::abs(y5[i]));
        norm += std::pow(err[i] / scale, 2);
    }
    norm = std::sqrt(norm / n);

    const double factor =
        std::clamp(0.9 * std::pow(std::max(norm, 1e-30), -0.2), 0.2, 5.0);
    if (norm <= 1.0) {
        t += hs;
        y = y5;
        h = std::min(h * factor, maxStep_);
        return true;
    }
    h *= factor;
    return false;
}

void Dopri5::integrate(double t0, double t1, Eigen::VectorXd& y,
                       const Observer& obs) const {
    if (t0 == t1) return;
    const double direction = t1 > t0 ? 1.0 : -1.0;
    double t = t0;
    double h = std::min({std::abs(t1 - t0), maxStep_, 0.1});
    if (obs) obs(t, y);
    // A sub-epsilon remainder after the last accepted step counts as done;
    // only a controller-driven collapse of h is a failure.
    while (direction * (t1 - t) > 1e-14 * (1.0 + std::abs(t1))) {
        h = std::min(h, std::abs(t1 - t));
        if (h < 1e-14 * (1.0 + std::abs(t)))
            throw StepFailure("integrator step size underflow");
        if (step(t, y, h, direction) && obs) obs(t, y);
    }
}

double Dopri5::integrateUntil(
    double t0, double tMax, Eigen::VectorXd& y,
    const std::function<bool(double, const Eigen::VectorXd&)>& stop,
    const Observer& obs) const {
    double t = t0;
    double h = std::min(maxStep_, 0.1);
    if (obs) obs(t, y);
    if (stop(t, y)) return t;
    while (t < tMax) {
        h = std::min(h, tMax - t);
        if (h < 1e-14 * (1.0 + std::abs(t)))
            throw StepFailure("integrator step size underflow");
        const double tPrev = t;
        const Eigen::VectorXd yPrev = y;
        if (!step(t, y, h, 1.0)) continue;
        if (stop(t, y)) {
            // Bisect for the crossing time inside the accepted step.
            double lo = tPrev, hi = t;
            Eigen::VectorXd yLo = yPrev;
            while (hi - lo > 1e-13 * (1.0 + std::abs(hi))) {
                const double mid = 0.5 * (lo + hi);
                Eigen::VectorXd yMid = yLo;
                integrate(lo, mid, yMid);
                if (stop(mid, yMid)) {
                    hi = mid;
                } else {
                    lo = mid;
                    yLo = yMid;
                }
            }
            y = yLo;
            integrate(lo, hi, y);
            if (obs) obs(hi, y);
            return hi;
        }
        if (obs) obs(t, y);
    }
    throw TrappedTrajectory("trajectory did not escape before guard time");
}

VariationalFrame VariationalFrame::identity(int d) {
    VariationalFrame f;
    f.Dxx = Eigen::MatrixXd::Identity(d, d);
    f.Dxxi = Eigen::MatrixXd::Zero(d, d);
    f.Dxix = Eigen::MatrixXd::Zero(d, d);
    f.Dxixi = Eigen::MatrixXd::Identity(d, d);
    return f;
}

Eigen::MatrixXd VariationalFrame::full() const {
    const int d = static_cast<int>(Dxx.rows());
    Eigen::MatrixXd m(2 * d, 2 * d);
    m.topLeftCorner(d, d) = Dxx;
    m.topRightCorner(d, d) = Dxxi;
    m.bottomLeftCorner(d, d) = Dxix;
    m.bottomRightCorner(d, d) = Dxixi;
    return m;
}

double VariationalFrame::symplecticDefect() const {
    const int d = static_cast<int>(Dxx.rows());
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    j.topRightCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
    j.bottomLeftCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd m = full();
    return (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
}

namespace {

// Packed state: [x, xi, vec(M), S, W] with M the 2d x 2d variational matrix
// (column-major), S the Lagrangian action and W the virial quadrature.
int frameStateSize(int d) { return 2 * d + 4 * d * d + 2; }

Eigen::VectorXd packFrameState(const PhasePoint& rho) {
    const int d = static_cast<int>(rho.x.size());
    Eigen::VectorXd y = Eigen::VectorXd::Zero(frameStateSize(d));
    y.head(d) = rho.x;
    y.segment(d, d) = rho.xi;
    Eigen::Map<Eigen::MatrixXd>(y.data() + 2 * d, 2 * d, 2 * d) =
        Eigen::MatrixXd::Identity(2 * d, 2 * d);
    return y;
}

FlowState unpackFrameState(int d, const Eigen::VectorXd& y) {
    FlowState s;
    s.rho.x = y.head(d);
    s.rho.xi = y.segment(d, d);
    const Eigen::Map<const Eigen::MatrixXd> m(y.data() + 2 * d, 2 * d, 2 * d);
    s.frame.Dxx = m.topLeftCorner(d, d);
    s.frame.Dxxi = m.topRightCorner(d, d);
    s.frame.Dxix = m.bottomLeftCorner(d, d);
    s.frame.Dxixi = m.bottomRightCorner(d, d);
    s.actionLagrangian = y[2 * d + 4 * d * d];
    s.actionVirial = y[2 * d + 4 * d * d + 1];
    return s;
}

Dopri5::Rhs frameRhs(const Potential& v) {
    const int d = v.dim();
    return [&v, d](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy.resize(y.size());
        const Eigen::VectorXd x = y.head(d);
        const Eigen::VectorXd xi = y.segment(d, d);
        dy.head(d) = xi;
        dy.segment(d, d) = -v.gradient(x);
        const Eigen::Map<const Eigen::MatrixXd> m(y.data() + 2 * d, 2 * d,
                                                  2 * d);
        Eigen::Map<Eigen::MatrixXd> dm(dy.data() + 2 * d, 2 * d, 2 * d);
        const Eigen::MatrixXd hess = v.hessian(x);
        dm.topRows(d) = m.bottomRows(d);
        dm.bottomRows(d) = -hess * m.topRows(d);
        dy[2 * d + 4 * d * d] = 0.5 * xi.squaredNorm() - v.value(x);
        dy[2 * d + 4 * d * d + 1] = x.dot(v.gradient(x));
    };
}

Dopri5::Rhs pointRhs(const Potential& v) {
    const int d = v.dim();
    return [&v, d](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy.resize(2 * d);
        dy.head(d) = y.tail(d);
        dy.tail(d) = -v.gradient(y.head(d));
    };
}

}  // namespace

PhasePoint flow(const PhasePoint& rho0, double t, const Potential& v,
                double tol) {
    if (v.isZero()) return {rho0.x + t * rho0.xi, rho0.xi};
    const int d = v.dim();
    Eigen::VectorXd y(2 * d);
    y.head(d) = rho0.x;
    y.tail(d) = rho0.xi;
    Dopri5(pointRhs(v), tol).integrate(0.0, t, y);
    return {y.head(d), y.tail(d)};
}

FlowState flowWithFrame(const PhasePoint& rho0, double t, const Potential& v,
                        double tol, const FlowObserver& obs, double maxStep) {
    const int d = static_cast<int>(rho0.x.size());
    Eigen::VectorXd y = packFrameState(rho0);
    Dopri5::Observer wrapped = nullptr;
    if (obs)
        wrapped = [&](double s, const Eigen::VectorXd& ys) {
            obs(s, unpackFrameState(d, ys));
        };
    Dopri5(frameRhs(v), tol, maxStep).integrate(0.0, t, y, wrapped);
    return unpackFrameState(d, y);
}

VariationalFrame variationalFrame(const PhasePoint& rho0, double t,
                                  const Potential& v, double tol) {
    return flowWithFrame(rho0, t, v, tol).frame;
}

PhasePoint incomingPoint(const Eigen::VectorXd& omega,
                         const Eigen::VectorXd& eta, double t0) {
    if (std::abs(omega.norm() - 1.0) > 1e-10)
        throw Error("incomingPoint: omega must be a unit vector");
    if (std::abs(omega.dot(eta)) > 1e-10 * (1.0 + eta.norm()))
        throw NotOrthogonal("incomingPoint: eta must be orthogonal to omega");
    return {-(t0 + 1.0) * omega + eta, omega};
}

ScatteringOutcome scatteringMap(const Eigen::VectorXd& omega,
                                const Eigen::VectorXd& eta, const Potential& v,
                                double tol, double tMaxFactor) {
    const int d = v.dim();
    const double t0 = v.supportRadius();
    const PhasePoint rho0 = incomingPoint(omega, eta, t0);

    Eigen::VectorXd y(2 * d);
    y.head(d) = rho0.x;
    y.tail(d) = rho0.xi;
    const auto escaped = [&](double, const Eigen::VectorXd& ys) {
        const Eigen::VectorXd x = ys.head(d);
        const Eigen::VectorXd xi = ys.tail(d);
        return x.norm() > t0 + 1.0 && x.dot(xi) > 0.0;
    };
    const double tEsc = Dopri5(pointRhs(v), tol)
                            .integrateUntil(0.0, tMaxFactor * (t0 + 1.0), y,
                                            escaped);

    ScatteringOutcome out;
    out.exit = {y.head(d), y.tail(d)};
    out.exitTime = tEsc;
    out.omegaOut = out.exit.xi.normalized();
    out.etaOut =
        out.exit.x - out.exit.x.dot(out.omegaOut) * out.omegaOut;
    // Time delay measured against the incoming-ray parametrization
    // x(s) = s omega + eta, whose s = 0 point sits (t0+1) ahead of the
    // integration origin.
    out.tPrime = tEsc - out.exit.x.dot(out.omegaOut) - (t0 + 1.0);
    return out;
}

ActionIntegral actionIntegral(const PhasePoint& rhoMinus, double t,
                              const Potential& v, double tol) {
    const int d = static_cast<int>(rhoMinus.x.size());
    // Lean state [x, xi, S, W]; no variational block needed here.
    Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * d + 2);
    y.head(d) = rhoMinus.x;
    y.segment(d, d) = rhoMinus.xi;
    auto rhs = [&v, d](double, const Eigen::VectorXd& ys, Eigen::VectorXd& dy) {
        dy.resize(ys.size());
        const Eigen::VectorXd x = ys.head(d);
        const Eigen::VectorXd xi = ys.segment(d, d);
        dy.head(d) = xi;
        dy.segment(d, d) = -v.gradient(x);
        dy[2 * d] = 0.5 * xi.squaredNorm() - v.value(x);
        dy[2 * d + 1] = x.dot(v.gradient(x));
    };
    Dopri5(rhs, tol).integrate(0.0, t, y);

    const double endDot = y.head(d).dot(y.segment(d, d));
    const double startDot = rhoMinus.x.dot(rhoMinus.xi);
    ActionIntegral a;
    a.lagrangian = y[2 * d];
    a.primary = a.lagrangian - 0.5 * (endDot + startDot);
    a.secondary = y[2 * d + 1] + 0.5 * (endDot - startDot) - t;
    return a;
}

EscapeTimes escapeTimes(const Eigen::VectorXd& x0, const Eigen::VectorXd& xi0,
                        const Potential& v, double tol,
                        double clearanceMargin) {
    const int d = v.dim();
    const double r = v.supportRadius() + 1.0;

    // Backward motion is free: solve |x0 - tau xi0| = r for the larger root
    // (closest-approach time when the line misses the ball).
    const double a = xi0.squaredNorm();
    const double b = x0.dot(xi0);
    const double disc = b * b - a * (x0.squaredNorm() - r * r);
    const double tauStar =
        disc > 0.0 ? (b + std::sqrt(disc)) / a : b / a;

    EscapeTimes e;
    e.tMinus = tauStar + clearanceMargin;
    e.rhoMinus = {x0 - e.tMinus * xi0, xi0};

    Eigen::VectorXd y(2 * d);
    y.head(d) = e.rhoMinus.x;
    y.tail(d) = e.rhoMinus.xi;
    const auto escaped = [&](double, const Eigen::VectorXd& ys) {
        const Eigen::VectorXd x = ys.head(d);
        const Eigen::VectorXd xi = ys.tail(d);
        return x.norm() > r && x.dot(xi) > 0.0;
    };
    const double guard = 1e3 * r + 2.0 * e.tMinus;
    const double tEsc =
        Dopri5(pointRhs(v), tol).integrateUntil(0.0, guard, y, escaped);

    // Past the escape surface the motion is free again.
    e.tPlus = tEsc + clearanceMargin;
    e.rhoPlus = {y.head(d) + clearanceMargin * y.tail(d), y.tail(d)};
    return e;
}

}  // namespace scat
