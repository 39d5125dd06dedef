#pragma once

#include <Eigen/Dense>

#include "scat/smatrix.hpp"

namespace scat {

/// The fixed smooth cutoff: 1 on [0,1/2], 0 on [3/4,inf), exp-based smooth
/// step in between.
double chi(double r);

/// chi~_h(t) = e^{-t^2/2h} chi(t/h^{1/3}); support [0, (3/4)h^{1/3}).
double chiTilde(double t, double h);

/// Sphere-state evaluation
///   chi(|x^-xi0|/h^{1/3}) Q0((x^-xi0)/sqrt h) e^{-(i/h)x0.x^}
///   e^{-(1/2h)(x^-xi0).Gamma0(x^-xi0)};
/// tilde = true drops the cutoff factor.
Complex evalState(const SphereGaussianState& state, const Eigen::VectorXd& xhat,
                  bool tilde = false);

/// Normalization constant of the resolution of identity,
///   c_h^{-1} = (2 pi h)^{d-1} int dxi chi~^2(|omega-xi|) / |cos(omega,xi)|,
/// by adaptive quadrature to relative error 1e-8. The 1/|cos| is the sphere
/// measure of the tangent-plane chart (d omega = dy/cos). Only d = 2.
double resolutionConstant(double h, int d = 2, double omegaAngle = 0.0);

/// Uniform angle grid on the circle, values[i] at angle 2 pi i / n.
struct SphereFunction {
    Eigen::VectorXcd values;

    int size() const { return static_cast<int>(values.size()); }
    double angle(int i) const;
    Eigen::Vector2d point(int i) const;
};

/// Resolution-of-identity reconstruction
///   g(w) = c_h int dxi int_{|x|<=X, x in xi^perp} phi~_{x,xi}(w)
///          int dw' conj(phi~_{x,xi}(w')) f(w'),
/// with the inner x-integral done in closed form (2h sin(Xu/h)/u). Sets
/// *truncationWarning when X < 50h (inner integral far from its delta limit).
SphereFunction reconstruct(const SphereFunction& f, double h, double X,
                           bool* truncationWarning = nullptr);

/// Trace formula Tr A ~ c_h int dw int_{w^perp,|r|<=X} <phi~, A phi~>.
/// kernel(i,j) are samples of the integral kernel of A: (Af)(w_i) =
/// sum_j kernel(i,j) f_j dtheta.
Complex traceEstimate(const Eigen::MatrixXcd& kernel, double h, double X);

}  // namespace scat
