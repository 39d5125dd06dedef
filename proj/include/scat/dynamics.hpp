#pragma once

#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "scat/potential.hpp"

namespace scat {

struct PhasePoint {
    Eigen::VectorXd x;
    Eigen::VectorXd xi;

    double energy(const Potential& v) const {
        return 0.5 * xi.squaredNorm() + v.value(x);
    }
};

/// Jacobian blocks of the flow map in the ordering
/// (dx_t, dxi_t) = M (dx_0, dxi_0).
struct VariationalFrame {
    Eigen::MatrixXd Dxx, Dxxi, Dxix, Dxixi;

    static VariationalFrame identity(int d);
    Eigen::MatrixXd full() const;           // the 2d x 2d matrix M
    double symplecticDefect() const;        // ||M^T J M - J||_inf
};

/// Adaptive embedded Runge-Kutta 5(4), Dormand-Prince coefficients.
/// Steps a generic first-order system with local error control.
class Dopri5 {
public:
    using Rhs = std::function<void(double, const Eigen::VectorXd&,
                                   Eigen::VectorXd&)>;
    /// Called after each accepted step.
    using Observer = std::function<void(double, const Eigen::VectorXd&)>;

    Dopri5(Rhs rhs, double tol, double maxStep =
                                    std::numeric_limits<double>::infinity())
        : rhs_(std::move(rhs)), tol_(tol), maxStep_(maxStep) {}

    /// Integrate from (t0, y) to t1 (either direction); y is updated in
    /// place. Throws StepFailure on step-size underflow.
    void integrate(double t0, double t1, Eigen::VectorXd& y,
                   const Observer& obs = nullptr) const;

    /// Integrate forward from t0 until stop(t, y) returns true or t exceeds
    /// tMax. Returns the time at which stopping occurred; throws
    /// TrappedTrajectory if tMax was reached first.
    double integrateUntil(
        double t0, double tMax, Eigen::VectorXd& y,
        const std::function<bool(double, const Eigen::VectorXd&)>& stop,
        const Observer& obs = nullptr) const;

private:
    bool step(double& t, Eigen::VectorXd& y, double& h, double direction) const;

    Rhs rhs_;
    double tol_;
    double maxStep_;
};

struct FlowState {
    PhasePoint rho;
    VariationalFrame frame;
    double actionLagrangian = 0.0;  // int (|xi|^2/2 - V) ds
    double actionVirial = 0.0;      // int x . grad V ds
};

using FlowObserver = std::function<void(double, const FlowState&)>;

/// Phi^t(rho0) with adaptive error control; energy drift bounded by
/// 10 tol (1+|t|).
PhasePoint flow(const PhasePoint& rho0, double t, const Potential& v,
                double tol);

/// Joint integration of the flow, the linearized (variational) equations and
/// both action quadratures.
FlowState flowWithFrame(const PhasePoint& rho0, double t, const Potential& v,
                        double tol, const FlowObserver& obs = nullptr,
                        double maxStep =
                            std::numeric_limits<double>::infinity());

VariationalFrame variationalFrame(const PhasePoint& rho0, double t,
                                  const Potential& v, double tol);

/// The incoming representative rho_{omega,eta} = (-(T0+1) omega + eta, omega).
PhasePoint incomingPoint(const Eigen::VectorXd& omega,
                         const Eigen::VectorXd& eta, double t0);

struct ScatteringOutcome {
    Eigen::VectorXd omegaOut;
    Eigen::VectorXd etaOut;
    double tPrime = 0.0;
    double exitTime = 0.0;
    PhasePoint exit;
};

/// Classical scattering map kappa(omega, eta) = (omega', eta'), with the
/// sojourn shift t'. Throws TrappedTrajectory if the guard time is exceeded.
ScatteringOutcome scatteringMap(const Eigen::VectorXd& omega,
                                const Eigen::VectorXd& eta, const Potential& v,
                                double tol,
                                double tMaxFactor = 1e3);

struct ActionIntegral {
    double primary = 0.0;    // int (|xi|^2/2 - V) ds - (x_t.xi_t + x_-.xi_-)/2
    double secondary = 0.0;  // int x.grad V ds + (x_t.xi_t - x_-.xi_-)/2 - t
    double lagrangian = 0.0; // int (|xi|^2/2 - V) ds
};

ActionIntegral actionIntegral(const PhasePoint& rhoMinus, double t,
                              const Potential& v, double tol);

struct EscapeTimes {
    double tMinus = 0.0;
    double tPlus = 0.0;
    PhasePoint rhoMinus;
    PhasePoint rhoPlus;
};

/// Backward free-escape time and forward interaction-escape time for the
/// trajectory through (x0, xi0), both with an extra unit margin; also the
/// escape representatives (x_-, xi_-) = (x0 - t_- xi0, xi0) and
/// (x_+, xi_+) = Phi^{t_+}(x_-, xi_-).
EscapeTimes escapeTimes(const Eigen::VectorXd& x0, const Eigen::VectorXd& xi0,
                        const Potential& v, double tol,
                        double clearanceMargin = 1.0);

}  // namespace scat
