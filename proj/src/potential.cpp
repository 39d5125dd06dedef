#include "scat/potential.hpp"

#include <algorithm>
#include <cmath>

namespace scat {

namespace {

// f(s) = exp(1 - 1/(1-s)) on [0,1), with f' = -f/(1-s)^2 and
// f'' = f [ (1-s)^{-4} - 2 (1-s)^{-3} ].
struct Profile {
    double f = 0.0, fp = 0.0, fpp = 0.0;
};

Profile profile(double s) {
    Profile p;
    if (s >= 1.0) return p;
    const double u = 1.0 - s;
    p.f = std::exp(1.0 - 1.0 / u);
    p.fp = -p.f / (u * u);
    p.fpp = p.f * (1.0 / (u * u * u * u) - 2.0 / (u * u * u));
    return p;
}

}  // namespace

Potential::Potential(int dim, std::vector<Bump> bumps)
    : dim_(dim), bumps_(std::move(bumps)), t0_(0.0) {
    for (const auto& b : bumps_) {
        if (b.radius <= 0.0)
            throw NonPositiveRadius("bump radius must be positive");
        if (b.center.size() != dim_)
            throw Error("bump center dimension mismatch");
        t0_ = std::max(t0_, b.center.norm() + b.radius);
    }
}

double Potential::value(const Eigen::VectorXd& x) const {
    double v = 0.0;
    for (const auto& b : bumps_) {
        const double s = (x - b.center).squaredNorm() / (b.radius * b.radius);
        if (s < 1.0) v += b.amplitude * profile(s).f;
    }
    return v;
}

Eigen::VectorXd Potential::gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
    for (const auto& b : bumps_) {
        const Eigen::VectorXd r = x - b.center;
        const double invR2 = 1.0 / (b.radius * b.radius);
        const double s = r.squaredNorm() * invR2;
        if (s >= 1.0) continue;
        g += (b.amplitude * profile(s).fp * 2.0 * invR2) * r;
    }
    return g;
}

Eigen::MatrixXd Potential::hessian(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
    for (const auto& b : bumps_) {
        const Eigen::VectorXd r = x - b.center;
        const double invR2 = 1.0 / (b.radius * b.radius);
        const double s = r.squaredNorm() * invR2;
        if (s >= 1.0) continue;
        const Profile p = profile(s);
        h += b.amplitude *
             (p.fpp * 4.0 * invR2 * invR2 * (r * r.transpose()) +
              p.fp * 2.0 * invR2 *
                  Eigen::MatrixXd::Identity(dim_, dim_));
    }
    return h;
}

}  // namespace scat
