#pragma once

#include <vector>

#include <Eigen/Dense>

#include "scat/errors.hpp"

namespace scat {

/// One radial smooth bump: A * exp(1 - 1/(1 - r^2)) for r = |x-c|/radius < 1,
/// identically zero outside. All derivatives vanish at the support boundary.
struct Bump {
    Eigen::VectorXd center;
    double radius = 1.0;
    double amplitude = 0.0;
};

/// Finite sum of radial smooth bumps: compactly supported, smooth, with
/// closed-form gradient and Hessian. T0 is the smallest R with
/// supp V inside B(0, R).
class Potential {
public:
    Potential(int dim, std::vector<Bump> bumps);

    static Potential free(int dim) { return Potential(dim, {}); }

    int dim() const { return dim_; }
    double supportRadius() const { return t0_; }
    const std::vector<Bump>& bumps() const { return bumps_; }
    bool isZero() const { return bumps_.empty(); }

    double value(const Eigen::VectorXd& x) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

private:
    int dim_;
    std::vector<Bump> bumps_;
    double t0_;
};

}  // namespace scat
