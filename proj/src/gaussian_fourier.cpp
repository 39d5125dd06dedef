#include "scat/gaussian_fourier.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>

namespace scat {

namespace {

// One application of the recursion step for variable j: if the current image
// is Q(xi) e^{-xi.B xi/2} with B = Gamma^{-1}, multiplying the source by x_j
// maps Q to i (dQ/dxi_j - (B xi)_j Q).
MultiPoly applyStep(const MultiPoly& q, const Eigen::MatrixXcd& b, int j) {
    const int d = q.dim();
    MultiPoly r = q.derivative(j);
    for (int k = 0; k < d; ++k) {
        if (b(j, k) != 0.0) r += q.mulVariable(k) * (-b(j, k));
    }
    return r * Complex(0.0, 1.0);
}

// Images of all monomials x^alpha with |alpha| <= maxDeg, built bottom-up.
std::map<MultiPoly::Index, MultiPoly> monomialImages(
    int dim, int maxDeg, const ComplexSymMatrix& gamma) {
    gamma.requirePositiveReal("fourierGaussianPoly");
    const Eigen::MatrixXcd b = gamma.inverse().mat();
    const Complex seed = std::pow(2.0 * std::numbers::pi, dim / 2.0) /
                         sqrtDetPositiveReal(gamma.mat());

    std::map<MultiPoly::Index, MultiPoly> images;
    for (const auto& alpha : enumerateIndices(dim, maxDeg)) {
        int total = 0;
        for (int v : alpha) total += v;
        if (total == 0) {
            images.emplace(alpha, MultiPoly::constant(dim, seed));
            continue;
        }
        int j = 0;
        while (alpha[j] == 0) ++j;
        MultiPoly::Index prev = alpha;
        prev[j] -= 1;
        images.emplace(alpha, applyStep(images.at(prev), b, j));
    }
    return images;
}

}  // namespace

MultiPoly fourierGaussianPoly(const MultiPoly& p, const ComplexSymMatrix& gamma) {
    const int d = p.dim();
    const int deg = std::max(0, p.degree());
    auto images = monomialImages(d, deg, gamma);
    MultiPoly result(d);
    for (const auto& [alpha, c] : p.terms()) result += images.at(alpha) * c;
    return result.pruned(0.0);
}

MultiPoly inverseFourierGaussianPoly(const MultiPoly& q,
                                     const ComplexSymMatrix& gamma) {
    const int d = q.dim();
    const int deg = std::max(0, q.degree());
    const auto basis = enumerateIndices(d, deg);
    const int n = static_cast<int>(basis.size());
    auto images = monomialImages(d, deg, gamma);

    // The map is degree-preserving and invertible; solve A c = q in the
    // monomial basis.
    Eigen::MatrixXcd a(n, n);
    for (int col = 0; col < n; ++col) {
        const MultiPoly& img = images.at(basis[col]);
        for (int row = 0; row < n; ++row) a(row, col) = img.coeff(basis[row]);
    }
    Eigen::VectorXcd rhs(n);
    for (int row = 0; row < n; ++row) rhs[row] = q.coeff(basis[row]);
    Eigen::VectorXcd sol = a.fullPivLu().solve(rhs);

    MultiPoly p(d);
    for (int i = 0; i < n; ++i) p.addCoeff(basis[i], sol[i]);
    return p.pruned(1e-300);
}

Complex polyLargeTimeValue(const MultiPoly& p, const ComplexSymMatrix& gamma,
                           const Eigen::VectorXd& xi, double t) {
    ComplexSymMatrix shifted = gamma.plusImagScaledIdentity(t);
    MultiPoly img = fourierGaussianPoly(p, shifted);
    return img((t * xi).eval());
}

Complex polyLargeTimeAsymptote(const MultiPoly& p, const Eigen::VectorXd& xi,
                               double t) {
    const int d = p.dim();
    const Complex phase =
        std::exp(Complex(0.0, -d * std::numbers::pi / 4.0));
    return phase * p((-xi).eval()) *
           std::pow(2.0 * std::numbers::pi / t, d / 2.0);
}

Complex gaussianMomentIntegral(const MultiPoly& p, const Eigen::MatrixXd& a) {
    const int d = p.dim();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw DegenerateMatrix("gaussianMomentIntegral: A not positive definite");
    const Eigen::MatrixXd cov = 0.5 * a.inverse();
    const double norm =
        std::sqrt(std::pow(std::numbers::pi, d) / a.determinant());

    // Wick recursion E[y_j m] = sum_k C_jk E[d_k m], memoized per monomial.
    std::map<MultiPoly::Index, Complex> memo;
    std::function<Complex(const MultiPoly::Index&)> expect =
        [&](const MultiPoly::Index& alpha) -> Complex {
        int total = 0;
        for (int v : alpha) total += v;
        if (total == 0) return 1.0;
        if (total % 2 == 1) return 0.0;
        auto it = memo.find(alpha);
        if (it != memo.end()) return it->second;
        int j = 0;
        while (alpha[j] == 0) ++j;
        MultiPoly::Index rest = alpha;
        rest[j] -= 1;
        Complex sum = 0.0;
        for (int k = 0; k < d; ++k) {
            if (rest[k] == 0 || cov(j, k) == 0.0) continue;
            MultiPoly::Index down = rest;
            down[k] -= 1;
            sum += cov(j, k) * static_cast<double>(rest[k]) * expect(down);
        }
        memo[alpha] = sum;
        return sum;
    };

    Complex total = 0.0;
    for (const auto& [alpha, c] : p.terms()) total += c * expect(alpha);
    return norm * total;
}

}  // namespace scat
