#pragma once

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "scat/errors.hpp"

namespace scat {

using Complex = std::complex<double>;

/// Sparse polynomial in d variables with complex coefficients, stored as a
/// map from multi-indices to coefficients. Degrees are capped (default 16);
/// exceeding the cap is a hard error.
class MultiPoly {
public:
    using Index = std::vector<int>;

    static constexpr int kDegreeCap = 16;

    explicit MultiPoly(int dim) : dim_(dim) {}

    static MultiPoly constant(int dim, Complex c);
    static MultiPoly variable(int dim, int j);  // the monomial x_j

    int dim() const { return dim_; }

    /// Largest |alpha| with a nonzero coefficient; -1 for the zero polynomial
    /// (the spec's "-inf sentinel" mapped to an int).
    int degree() const;

    Complex coeff(const Index& alpha) const;
    void setCoeff(const Index& alpha, Complex c);
    void addCoeff(const Index& alpha, Complex c);

    const std::map<Index, Complex>& terms() const { return coeffs_; }

    Complex operator()(const Eigen::VectorXcd& x) const;
    Complex operator()(const Eigen::VectorXd& x) const;

    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator-(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly operator*(Complex s) const;
    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator*=(Complex s);

    MultiPoly derivative(int j) const;
    MultiPoly mulVariable(int j) const;  // x_j * P

    /// P(L y): substitute each variable by the linear form given by row j of L.
    MultiPoly composeLinear(const Eigen::MatrixXcd& L) const;

    /// P(-y).
    MultiPoly reflect() const;

    /// Complex conjugate of all coefficients (so that conj(P)(y) = conj(P(y))
    /// for real y).
    MultiPoly conjugate() const;

    /// Drop coefficients with |c| <= eps.
    MultiPoly pruned(double eps = 0.0) const;

    double maxAbsCoeff() const;

    /// Max abs coefficient difference; polynomials must share the dimension.
    static double distance(const MultiPoly& a, const MultiPoly& b);

private:
    void checkIndex(const Index& alpha) const;

    int dim_;
    std::map<Index, Complex> coeffs_;
};

/// All multi-indices alpha in d variables with |alpha| <= maxDeg, graded order.
std::vector<MultiPoly::Index> enumerateIndices(int dim, int maxDeg);

}  // namespace scat
