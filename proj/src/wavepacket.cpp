#include "scat/wavepacket.hpp"

#include <cmath>
#include <numbers>

namespace scat {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kOnShellTol = 1e-10;
}  // namespace

Complex WavePacket::evaluate(const Eigen::VectorXd& pt) const {
    const Eigen::VectorXd z = pt - x;
    const Complex quad =
        (z.cast<Complex>().transpose() * gamma.mat() * z.cast<Complex>())(0);
    return poly((z / std::sqrt(h)).eval()) *
           std::exp(Complex(0.0, (pt.dot(xi) + phase) / h) - quad / (2.0 * h));
}

double WavePacket::l2Norm() const {
    const MultiPoly p2 = poly * poly.conjugate();
    const Eigen::MatrixXd a = gamma.mat().real();
    const Complex m = gaussianMomentIntegral(p2, a);
    return std::sqrt(std::abs(m) * std::pow(h, dim() / 2.0));
}

Complex SphereProfile::evaluate(const Eigen::VectorXd& xhat) const {
    const Eigen::VectorXd z = xhat - peak;
    const Complex quad =
        (z.cast<Complex>().transpose() * matrix.mat() * z.cast<Complex>())(0);
    return prefactor * poly((z / std::sqrt(h)).eval()) *
           std::exp(Complex(0.0, -xstar.dot(z) / h) - quad / (2.0 * h));
}

WavePacket freeEvolve(const WavePacket& u, double t) {
    WavePacket out = u;
    out.x = u.x + t * u.xi;
    ComplexSymMatrix b = u.gamma.inverse().plusImagScaledIdentity(t);
    out.gamma = b.inverse();
    MultiPoly img = fourierGaussianPoly(fourierGaussianPoly(u.poly, u.gamma), b);
    out.poly = img.reflect() * std::pow(2.0 * kPi, -u.dim());
    out.phase = u.phase - 0.5 * t * u.xi.squaredNorm();
    return out;
}

ComplexSymMatrix gammaTransport(const ComplexSymMatrix& gamma,
                                const VariationalFrame& frame) {
    const Complex i(0.0, 1.0);
    const Eigen::MatrixXcd g = gamma.mat();
    const Eigen::MatrixXcd a =
        frame.Dxx.cast<Complex>() + i * frame.Dxxi.cast<Complex>() * g;
    if (std::abs(a.fullPivLu().determinant()) < 1e-12)
        throw CausticError("gammaTransport: det(Dxx + i Dxxi Gamma) ~ 0");
    const Eigen::MatrixXcd c =
        frame.Dxix.cast<Complex>() + i * frame.Dxixi.cast<Complex>() * g;
    ComplexSymMatrix out(-i * c * a.inverse());
    out.requirePositiveReal("gammaTransport");
    return out;
}

MultiPoly leadingPolyTransport(const MultiPoly& p, const ComplexSymMatrix& gamma,
                               const VariationalFrame& frame,
                               Complex detFactor) {
    const int d = p.dim();
    const Complex i(0.0, 1.0);
    const ComplexSymMatrix gt = gammaTransport(gamma, frame);

    // Heisenberg image of the recentered position operator: component j acts
    // on an amplitude Q as (B y)_j Q + i (Dxxi^T grad Q)_j with
    // B = Dxixi^T - i Dxxi^T Gamma_t. All components commute.
    const Eigen::MatrixXcd b =
        frame.Dxixi.transpose().cast<Complex>() -
        i * frame.Dxxi.transpose().cast<Complex>() * gt.mat();
    const Eigen::MatrixXcd c = i * frame.Dxxi.transpose().cast<Complex>();

    auto applyOp = [&](const MultiPoly& q, int j) {
        MultiPoly r(d);
        for (int k = 0; k < d; ++k) {
            if (b(j, k) != 0.0) r += q.mulVariable(k) * b(j, k);
            if (c(j, k) != 0.0) r += q.derivative(k) * c(j, k);
        }
        return r;
    };

    MultiPoly result(d);
    for (const auto& [alpha, coeff] : p.terms()) {
        MultiPoly term = MultiPoly::constant(d, coeff);
        for (int j = 0; j < d; ++j)
            for (int rep = 0; rep < alpha[j]; ++rep) term = applyOp(term, j);
        result += term;
    }
    return (result * detFactor).pruned(0.0);
}

MultiPoly leadingPolyTransport(const MultiPoly& p, const ComplexSymMatrix& gamma,
                               const VariationalFrame& frame) {
    const Complex i(0.0, 1.0);
    const Eigen::MatrixXcd a =
        frame.Dxx.cast<Complex>() + i * frame.Dxxi.cast<Complex>() * gamma.mat();
    return leadingPolyTransport(p, gamma, frame,
                                1.0 / sqrtDetPositiveReal(a));
}

WavePacket propagate(const WavePacket& u, double t, const Potential& v,
                     double tol, int order) {
    if (order != 0)
        throw UnsupportedOrder("propagate: only leading order N = 0");
    const Complex i(0.0, 1.0);
    const Eigen::MatrixXcd g = u.gamma.mat();

    BranchTracker tracker;
    FlowObserver obs = [&](double, const FlowState& s) {
        const Eigen::MatrixXcd a =
            s.frame.Dxx.cast<Complex>() + i * s.frame.Dxxi.cast<Complex>() * g;
        tracker.feed(a.fullPivLu().determinant());
    };
    FlowState fs =
        flowWithFrame({u.x, u.xi}, t, v, tol, obs, /*maxStep=*/0.1);

    WavePacket out = u;
    out.x = fs.rho.x;
    out.xi = fs.rho.xi;
    out.gamma = gammaTransport(u.gamma, fs.frame);
    out.poly =
        leadingPolyTransport(u.poly, u.gamma, fs.frame, tracker.invSqrtValue());
    out.phase = u.phase + fs.actionLagrangian - fs.rho.x.dot(fs.rho.xi) +
                u.x.dot(u.xi);
    return out;
}

namespace {

void requireOnShell(const WavePacket& u, const char* who) {
    if (std::abs(u.xi.norm() - 1.0) > kOnShellTol)
        throw OffShell(std::string(who) + ": |xi| must be 1");
}

}  // namespace

SphereProfile farfieldFuture(const WavePacket& u, double /*T*/) {
    requireOnShell(u, "farfieldFuture");
    const int d = u.dim();
    const Complex pref = std::exp(Complex(0.0, (1.0 - d) * kPi / 4.0 +
                                                   u.phase / u.h)) *
                         std::sqrt(kPi) / std::pow(2.0 * kPi, d / 2.0);
    return SphereProfile{u.xi, fourierGaussianPoly(u.poly, u.gamma), u.x,
                         u.gamma.inverse(), pref, u.h};
}

SphereProfile farfieldPast(const WavePacket& u, double /*T*/) {
    requireOnShell(u, "farfieldPast");
    const int d = u.dim();
    const Complex pref = std::exp(Complex(0.0, (d - 1.0) * kPi / 4.0 +
                                                   u.phase / u.h)) *
                         std::sqrt(kPi) / std::pow(2.0 * kPi, d / 2.0);
    // The conjugation derivation of the incoming channel gives Gamma^{-1}
    // for the width matrix (conjugating the outgoing formula applied to the
    // conjugated packet conjugates the matrix back).
    return SphereProfile{-u.xi, fourierGaussianPoly(u.poly, u.gamma).reflect(),
                         -u.x, u.gamma.inverse(), pref, u.h};
}

}  // namespace scat
