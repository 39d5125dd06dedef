#pragma once

#include "scat/cmatrix.hpp"
#include "scat/poly.hpp"

namespace scat {

/// The polynomial image P_Gamma of the Fourier transform of a polynomial
/// times a Gaussian:
///   F(P(x) e^{-x.Gamma x/2})(xi) = P_Gamma(xi) e^{-xi.Gamma^{-1} xi/2},
/// with F phi(xi) = int e^{-i x.xi} phi(x) dx. Computed by the exact
/// recursion F(x_j f) = i d/dxi_j F(f) seeded with the closed-form Gaussian
/// image (2pi)^{d/2}/sqrt(det Gamma), branch-continuous square root.
MultiPoly fourierGaussianPoly(const MultiPoly& p, const ComplexSymMatrix& gamma);

/// Inverse of the map above: the unique P with fourierGaussianPoly(P, Gamma)
/// = Q, found by an exact linear solve on the monomial coefficient system.
MultiPoly inverseFourierGaussianPoly(const MultiPoly& q,
                                     const ComplexSymMatrix& gamma);

/// Exact value of P_{Gamma + i t Id}(t xi). The large-t asymptote is
/// e^{-d i pi/4} P(-xi) (2pi/t)^{d/2}; callers compare against it.
Complex polyLargeTimeValue(const MultiPoly& p, const ComplexSymMatrix& gamma,
                           const Eigen::VectorXd& xi, double t);

/// The asymptote itself, for convenience in convergence studies.
Complex polyLargeTimeAsymptote(const MultiPoly& p, const Eigen::VectorXd& xi,
                               double t);

/// int P(y) e^{-y.A y} dy for real symmetric positive definite A, via Wick
/// moments with covariance A^{-1}/2.
Complex gaussianMomentIntegral(const MultiPoly& p, const Eigen::MatrixXd& a);

}  // namespace scat
