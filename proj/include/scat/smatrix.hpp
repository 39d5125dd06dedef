#pragma once

#include "scat/wavepacket.hpp"

namespace scat {

/// Gaussian state of the sphere:
///   x^ -> chi(|x^-xi0|/h^{1/3}) Q0((x^-xi0)/sqrt h)
///         e^{-(i/h) x0.x^} e^{-(1/2h)(x^-xi0).Gamma0 (x^-xi0)}.
/// Evaluation (with or without the cutoff) lives in sphere.hpp.
struct SphereGaussianState {
    Eigen::VectorXd x0;
    Eigen::VectorXd xi0;  // unit
    ComplexSymMatrix gamma0;
    MultiPoly q0;
    double h = 0.1;

    int dim() const { return static_cast<int>(x0.size()); }
};

struct SphereCotangent {
    Eigen::VectorXd omega;  // unit direction
    Eigen::VectorXd eta;    // impact parameter, eta.omega = 0
};

/// (omega, eta) = (xi, x - (x.xi) xi); requires |xi| = 1.
SphereCotangent sphereCoords(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& xi);

struct ScatteringDiagnostics {
    double tMinus = 0.0;
    double tPlus = 0.0;
    SphereCotangent incoming;
    SphereCotangent outgoing;
    double classicalDiscrepancy = 0.0;  // vs the independent scattering map
};

struct ScatteringResult {
    double delta1 = 0.0;
    SphereGaussianState state;
    ScatteringDiagnostics diagnostics;
};

/// Leading-order action of the scattering matrix on a sphere Gaussian
/// state: recover the packet data (Gamma = Gamma0^{-1}, P the inverse
/// P_Gamma image of Q0), pull back freely to the incoming escape point,
/// propagate through the potential to the outgoing escape point, and read
/// off the outgoing state (x_+, xi_+, Gamma_+^{-1}, (pi_0)_{Gamma_+}) with
/// the action phase delta1. For V = 0, e^{i delta1/h} (output) equals the
/// input identically.
ScatteringResult applyScatteringMatrix(const SphereGaussianState& state,
                                       const Potential& v, double tol = 1e-10);

struct CorrespondenceReport {
    double discrepancy = 0.0;
    bool pass = false;
    SphereCotangent fromSmatrix;
    SphereCotangent fromClassicalMap;
};

/// Runs applyScatteringMatrix and the classical scattering map independently
/// and compares the induced points of T*S^{d-1}; passes iff they agree
/// within 1e-6.
CorrespondenceReport verifyCorrespondence(const SphereGaussianState& state,
                                          const Potential& v,
                                          double tol = 1e-10);

}  // namespace scat
