#pragma once

#include "scat/cmatrix.hpp"
#include "scat/dynamics.hpp"
#include "scat/gaussian_fourier.hpp"
#include "scat/poly.hpp"
#include "scat/potential.hpp"

namespace scat {

/// Gaussian x polynomial state
///   u(y) = P((y-x)/sqrt h) e^{i y.xi/h} e^{-(y-x).Gamma(y-x)/2h} e^{i phase/h}.
struct WavePacket {
    Eigen::VectorXd x;
    Eigen::VectorXd xi;
    ComplexSymMatrix gamma;
    MultiPoly poly;
    double phase = 0.0;
    double h = 0.1;

    int dim() const { return static_cast<int>(x.size()); }
    Complex evaluate(const Eigen::VectorXd& pt) const;
    double l2Norm() const;
};

/// Radiation profile on the sphere:
///   x^ -> prefactor * poly((x^-peak)/sqrt h)
///        * e^{-(i/h) xstar.(x^-peak)} * e^{-(1/2h)(x^-peak).matrix(x^-peak)}.
struct SphereProfile {
    Eigen::VectorXd peak;
    MultiPoly poly;
    Eigen::VectorXd xstar;
    ComplexSymMatrix matrix;
    Complex prefactor = 1.0;
    double h = 0.1;

    Complex evaluate(const Eigen::VectorXd& xhat) const;
};

/// Exact free evolution U_0(t): center -> x + t xi, Gamma -> (Gamma^{-1}+itId)^{-1},
/// poly -> (2pi)^{-d} (P_Gamma)_{Gamma^{-1}+itId}(-.), phase -= t|xi|^2/2
/// (the e^{-it/2h} factor on the unit shell).
WavePacket freeEvolve(const WavePacket& u, double t);

/// Width-matrix transport under the linearized flow:
///   Gamma_t = -i (Dxix + i Dxixi Gamma)(Dxx + i Dxxi Gamma)^{-1},
/// calibrated so the free frame reproduces the exact free evolution.
ComplexSymMatrix gammaTransport(const ComplexSymMatrix& gamma,
                                const VariationalFrame& frame);

/// Leading-order polynomial transport: Heisenberg evolution of the recentered
/// position operator under the linearized flow, applied to the unit amplitude,
/// times the branch value detFactor = det(Dxx + i Dxxi Gamma)^{-1/2}.
MultiPoly leadingPolyTransport(const MultiPoly& p, const ComplexSymMatrix& gamma,
                               const VariationalFrame& frame,
                               Complex detFactor);

/// Overload computing the branch value by homotopy from the identity matrix
/// (valid for frames continuously reachable without caustic crossings, e.g.
/// the free and short-time frames used in tests).
MultiPoly leadingPolyTransport(const MultiPoly& p, const ComplexSymMatrix& gamma,
                               const VariationalFrame& frame);

/// Leading-order (N = 0) semiclassical propagation through the potential:
/// center/momentum by the flow, Gamma by gammaTransport, polynomial by
/// leadingPolyTransport with the branch-tracked determinant along the
/// trajectory, phase += S_t - x_t.xi_t + x_0.xi_0. Orders N >= 1 are
/// rejected with UnsupportedOrder.
WavePacket propagate(const WavePacket& u, double t, const Potential& v,
                     double tol, int order = 0);

/// Outgoing radiation profile of int_T^inf U_0(t) u e^{it/2h} dt (the limit
/// is T-independent).
SphereProfile farfieldFuture(const WavePacket& u, double T = 0.0);

/// Incoming radiation profile of int_{-inf}^T U_0(t) u e^{it/2h} dt, read in
/// the incoming e^{-i|x|/h} channel; peaked at -xi.
SphereProfile farfieldPast(const WavePacket& u, double T = 0.0);

}  // namespace scat
