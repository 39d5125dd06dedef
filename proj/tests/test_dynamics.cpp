#include <doctest.h>

#include <cmath>
#include <random>

#include "scat/dynamics.hpp"
#include "scat/potential.hpp"

using namespace scat;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

Potential bumpPotential(double amplitude = 0.3, double radius = 1.0) {
    Bump b;
    b.center = Vector2d::Zero();
    b.radius = radius;
    b.amplitude = amplitude;
    return Potential(2, {b});
}

// Independent fixed-step RK4 oracle for the flow; used with step halving to
// certify the adaptive integrator's trajectories.
PhasePoint rk4Flow(const PhasePoint& rho0, double t, const Potential& v,
                   double dt) {
    const int d = v.dim();
    VectorXd y(2 * d);
    y.head(d) = rho0.x;
    y.tail(d) = rho0.xi;
    auto f = [&](const VectorXd& s) {
        VectorXd ds(2 * d);
        ds.head(d) = s.tail(d);
        ds.tail(d) = -v.gradient(s.head(d));
        return ds;
    };
    const int n = static_cast<int>(std::ceil(std::abs(t) / dt));
    const double h = t / n;
    for (int i = 0; i < n; ++i) {
        VectorXd k1 = f(y);
        VectorXd k2 = f(y + 0.5 * h * k1);
        VectorXd k3 = f(y + 0.5 * h * k2);
        VectorXd k4 = f(y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return {y.head(d), y.tail(d)};
}

}  // namespace

TEST_CASE("potential: closed forms and support") {
    Potential v = bumpPotential();
    CHECK(v.supportRadius() == doctest::Approx(1.0));
    CHECK(v.value(Vector2d::Zero()) == doctest::Approx(0.3));
    CHECK(v.value(Vector2d(1.0, 0.0)) == 0.0);
    CHECK(v.value(Vector2d(2.0, 0.5)) == 0.0);

    // Gradient and Hessian vs central finite differences.
    const Vector2d x(0.5, 0.1);
    const double eps = 1e-5;
    const VectorXd g = v.gradient(x);
    const MatrixXd hess = v.hessian(x);
    for (int j = 0; j < 2; ++j) {
        Vector2d xp = x, xm = x;
        xp[j] += eps;
        xm[j] -= eps;
        CHECK(g[j] ==
              doctest::Approx((v.value(xp) - v.value(xm)) / (2 * eps))
                  .epsilon(1e-6));
        const VectorXd gcol = (v.gradient(xp) - v.gradient(xm)) / (2 * eps);
        for (int i = 0; i < 2; ++i)
            CHECK(hess(i, j) == doctest::Approx(gcol[i]).epsilon(1e-5));
    }

    Bump bad;
    bad.center = Vector2d::Zero();
    bad.radius = 0.0;
    CHECK_THROWS_AS(Potential(2, {bad}), NonPositiveRadius);
}

TEST_CASE("flow: free straight line") {
    Potential v = Potential::free(2);
    PhasePoint rho0{Vector2d(0.0, 0.0), Vector2d(1.0, 0.0)};
    PhasePoint rho = flow(rho0, 3.0, v, 1e-10);
    CHECK((rho.x - Vector2d(3.0, 0.0)).norm() < 1e-12);
    CHECK((rho.xi - Vector2d(1.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("flow: energy conservation through the bump") {
    Potential v = bumpPotential();
    PhasePoint rho0{Vector2d(-3.0, 0.3), Vector2d(1.0, 0.0)};
    const double e0 = rho0.energy(v);
    for (double t : {-5.0, -2.0, 1.0, 2.5, 5.0}) {
        PhasePoint rho = flow(rho0, t, v, 1e-11);
        CHECK(std::abs(rho.energy(v) - e0) < 1e-9);
    }
}

TEST_CASE("flow: group property") {
    Potential v = bumpPotential();
    PhasePoint rho0{Vector2d(-3.0, 0.3), Vector2d(1.0, 0.0)};
    PhasePoint a = flow(flow(rho0, 2.0, v, 1e-11), 1.5, v, 1e-11);
    PhasePoint b = flow(rho0, 3.5, v, 1e-11);
    CHECK((a.x - b.x).norm() < 1e-9);
    CHECK((a.xi - b.xi).norm() < 1e-9);
}

TEST_CASE("flow: agrees with step-halved RK4 oracle") {
    Potential v = bumpPotential();
    PhasePoint rho0{Vector2d(-3.0, 0.3), Vector2d(1.0, 0.0)};
    PhasePoint adaptive = flow(rho0, 6.0, v, 1e-12);
    PhasePoint coarse = rk4Flow(rho0, 6.0, v, 2e-4);
    PhasePoint fine = rk4Flow(rho0, 6.0, v, 1e-4);
    CHECK((coarse.x - fine.x).norm() < 1e-11);  // oracle self-consistency
    CHECK((adaptive.x - fine.x).norm() < 1e-9);
    CHECK((adaptive.xi - fine.xi).norm() < 1e-9);
}

TEST_CASE("variational frame: t = 0 and free case") {
    Potential v = Potential::free(2);
    PhasePoint rho0{Vector2d(0.5, -1.0), Vector2d(0.0, 1.0)};
    VariationalFrame f0 = variationalFrame(rho0, 0.0, v, 1e-10);
    CHECK((f0.full() - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <
          1e-12);
    const double t = 2.7;
    VariationalFrame f = variationalFrame(rho0, t, v, 1e-10);
    CHECK((f.Dxx - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((f.Dxxi - t * MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-9);
    CHECK(f.Dxix.cwiseAbs().maxCoeff() < 1e-10);
    CHECK((f.Dxixi - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("variational frame: symplectic with unit determinant") {
    Potential v = bumpPotential();
    PhasePoint rho0{Vector2d(-3.0, 0.3), Vector2d(1.0, 0.0)};
    VariationalFrame f = variationalFrame(rho0, 6.0, v, 1e-11);
    CHECK(f.symplecticDefect() < 1e-8);
    CHECK(std::abs(f.full().determinant() - 1.0) < 1e-9);
}

TEST_CASE("incoming point: normalization and errors") {
    Vector2d omega(1.0, 0.0), eta(0.0, 0.0);
    PhasePoint rho = incomingPoint(omega, eta, 2.0);
    CHECK((rho.x - Vector2d(-3.0, 0.0)).norm() < 1e-14);
    CHECK((rho.xi - omega).norm() < 1e-14);
    CHECK(rho.energy(Potential::free(2)) == doctest::Approx(0.5));

    CHECK_THROWS_AS(incomingPoint(omega, Vector2d(0.5, 0.0), 2.0),
                    NotOrthogonal);

    std::mt19937 rng(99);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        Vector2d w(n(rng), n(rng));
        w.normalize();
        Vector2d raw(n(rng), n(rng));
        Vector2d e = raw - raw.dot(w) * w;
        PhasePoint r = incomingPoint(w, e, 1.5);
        CHECK((r.x - r.x.dot(w) * w - e).norm() < 1e-12);
    }
}

TEST_CASE("scattering map: free and missing trajectories are the identity") {
    Vector2d omega(1.0, 0.0);
    {
        ScatteringOutcome s =
            scatteringMap(omega, Vector2d(0.0, 0.4), Potential::free(2), 1e-10);
        CHECK((s.omegaOut - omega).norm() < 1e-10);
        CHECK((s.etaOut - Vector2d(0.0, 0.4)).norm() < 1e-10);
        CHECK(std::abs(s.tPrime) < 1e-10);
    }
    {
        // Impact parameter far above the bump: straight line.
        ScatteringOutcome s =
            scatteringMap(omega, Vector2d(0.0, 2.5), bumpPotential(), 1e-10);
        CHECK((s.omegaOut - omega).norm() < 1e-10);
        CHECK((s.etaOut - Vector2d(0.0, 2.5)).norm() < 1e-10);
        CHECK(std::abs(s.tPrime) < 1e-9);
    }
}

TEST_CASE("scattering map: bump deflection vs independent RK4 oracle") {
    Potential v = bumpPotential();
    Vector2d omega(1.0, 0.0), eta(0.0, 0.3);
    ScatteringOutcome s = scatteringMap(omega, eta, v, 1e-12);

    // Oracle: fixed-step RK4 to a time by which the trajectory has surely
    // escaped, then read the free-ray data.
    PhasePoint rho0 = incomingPoint(omega, eta, v.supportRadius());
    PhasePoint far = rk4Flow(rho0, 8.0, v, 1e-4);
    Vector2d omegaRef = far.xi.normalized();
    Vector2d etaRef = far.x - far.x.dot(omegaRef) * omegaRef;
    CHECK((s.omegaOut - omegaRef).norm() < 1e-9);
    CHECK((s.etaOut - etaRef).norm() < 1e-9);
    const double tPrimeRef =
        8.0 - far.x.dot(omegaRef) - (v.supportRadius() + 1.0);
    CHECK(std::abs(tPrimeRef - s.tPrime) < 1e-8);
    // The bump actually deflects this ray.
    CHECK((s.omegaOut - omega).norm() > 1e-3);
}

TEST_CASE("scattering map: time reversal") {
    Potential v = bumpPotential();
    Vector2d omega(1.0, 0.0), eta(0.0, 0.3);
    ScatteringOutcome s = scatteringMap(omega, eta, v, 1e-11);
    // Reverse the outgoing data and scatter again: recovers reversed input.
    ScatteringOutcome back =
        scatteringMap(-s.omegaOut, s.etaOut, v, 1e-11);
    CHECK((back.omegaOut + omega).norm() < 1e-7);
    CHECK((back.etaOut - eta).norm() < 1e-7);
}

TEST_CASE("scattering map: Jacobian determinant one (d = 2)") {
    Potential v = bumpPotential();
    const double theta0 = 0.0, eta0 = 0.3, eps = 1e-5;
    auto image = [&](double theta, double etaVal) {
        Vector2d w(std::cos(theta), std::sin(theta));
        Vector2d perp(-std::sin(theta), std::cos(theta));
        ScatteringOutcome s = scatteringMap(w, etaVal * perp, v, 1e-11);
        const double thetaOut = std::atan2(s.omegaOut[1], s.omegaOut[0]);
        Vector2d perpOut(-std::sin(thetaOut), std::cos(thetaOut));
        return Vector2d(thetaOut, s.etaOut.dot(perpOut));
    };
    Eigen::Matrix2d jac;
    jac.col(0) = (image(theta0 + eps, eta0) - image(theta0 - eps, eta0)) /
                 (2 * eps);
    jac.col(1) = (image(theta0, eta0 + eps) - image(theta0, eta0 - eps)) /
                 (2 * eps);
    CHECK(std::abs(jac.determinant() - 1.0) < 1e-4);
}

TEST_CASE("guard time exceeded raises TrappedTrajectory") {
    // Guard shorter than the actual crossing time: the map must fail loudly
    // rather than report a half-scattered state.
    CHECK_THROWS_AS(scatteringMap(Vector2d(1.0, 0.0), Vector2d(0.0, 0.3),
                                  bumpPotential(), 1e-8, 0.5),
                    TrappedTrajectory);
}

TEST_CASE("action integral: closed forms and constancy") {
    Potential v = bumpPotential();
    PhasePoint rhoMinus{Vector2d(-3.0, 0.3), Vector2d(1.0, 0.0)};

    // t = 0.
    ActionIntegral a0 = actionIntegral(rhoMinus, 0.0, v, 1e-11);
    CHECK(std::abs(a0.primary + rhoMinus.x.dot(rhoMinus.xi)) < 1e-12);

    // Free on-shell: delta_t = -x_-.xi_- for all t.
    ActionIntegral af = actionIntegral(rhoMinus, 4.0, Potential::free(2), 1e-11);
    CHECK(std::abs(af.primary + rhoMinus.x.dot(rhoMinus.xi)) < 1e-9);

    // Constant once the trajectory has left the support.
    ActionIntegral a6 = actionIntegral(rhoMinus, 6.0, v, 1e-11);
    ActionIntegral a7 = actionIntegral(rhoMinus, 7.0, v, 1e-11);
    CHECK(std::abs(a7.primary - a6.primary) < 1e-9);

    // On-shell relation between the two forms: eliminating int |xi|^2 via
    // d/dt (x.xi) and using energy 1/2 gives exactly
    // primary - secondary = t/2 - x_-.xi_-.
    for (double t : {1.0, 3.0, 6.0}) {
        ActionIntegral a = actionIntegral(rhoMinus, t, v, 1e-11);
        CHECK(std::abs(a.primary - a.secondary -
                       (0.5 * t - rhoMinus.x.dot(rhoMinus.xi))) < 1e-9);
    }
}

TEST_CASE("escape times: geometry and recomputation") {
    Potential v = bumpPotential();
    {
        // Free potential: the reported backward point clears the unit ball.
        Potential f = Potential::free(2);
        EscapeTimes e = escapeTimes(Vector2d(0.2, 0.1), Vector2d(1.0, 0.0), f,
                                    1e-10);
        CHECK(e.rhoMinus.x.norm() > f.supportRadius() + 1.0);
    }
    EscapeTimes e = escapeTimes(Vector2d(-3.0, 0.0), Vector2d(1.0, 0.0), v,
                                1e-10);
    CHECK(e.tPlus >= 5.0);  // reaches |x| > 1 only after t = 4, plus margin
    CHECK(e.rhoPlus.x.dot(e.rhoPlus.xi) > 0.0);
    CHECK(e.rhoPlus.x.norm() > v.supportRadius());
    // Reported endpoint really is Phi^{t_+}(rho_-).
    PhasePoint check = flow(e.rhoMinus, e.tPlus, v, 1e-10);
    CHECK((check.x - e.rhoPlus.x).norm() < 1e-7);
    CHECK((check.xi - e.rhoPlus.xi).norm() < 1e-7);
}
