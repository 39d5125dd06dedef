#include "scat/cmatrix.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace scat {

namespace {
constexpr double kSingularTol = 1e-14;
constexpr double kArgRefine = std::numbers::pi / 4.0;
constexpr double kArgAmbiguous = std::numbers::pi / 2.0;
}  // namespace

ComplexSymMatrix::ComplexSymMatrix(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw Error("ComplexSymMatrix needs a square matrix, d >= 1");
    mat_ = 0.5 * (m + m.transpose());
}

ComplexSymMatrix ComplexSymMatrix::identity(int dim) {
    return ComplexSymMatrix(Eigen::MatrixXcd::Identity(dim, dim));
}

double ComplexSymMatrix::minRealEigenvalue() const {
    Eigen::MatrixXd re = mat_.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(re);
    return es.eigenvalues().minCoeff();
}

bool ComplexSymMatrix::realPartPositiveDefinite() const {
    if (posdefCache_ < 0) posdefCache_ = minRealEigenvalue() > 0.0 ? 1 : 0;
    return posdefCache_ == 1;
}

void ComplexSymMatrix::requirePositiveReal(const char* who) const {
    if (!realPartPositiveDefinite())
        throw DegenerateMatrix(std::string(who) +
                               ": real part not positive definite");
}

ComplexSymMatrix ComplexSymMatrix::inverse() const {
    Eigen::MatrixXcd inv = mat_.fullPivLu().inverse();
    return ComplexSymMatrix(inv);
}

ComplexSymMatrix ComplexSymMatrix::plusImagScaledIdentity(double t) const {
    Eigen::MatrixXcd m = mat_;
    m += Complex(0.0, t) * Eigen::MatrixXcd::Identity(dim(), dim());
    return ComplexSymMatrix(m);
}

ComplexSymMatrix ComplexSymMatrix::conjugate() const {
    return ComplexSymMatrix(mat_.conjugate());
}

double ComplexSymMatrix::symmetryDefect() const {
    return (mat_ - mat_.transpose()).cwiseAbs().maxCoeff();
}

void BranchTracker::feed(Complex det) {
    if (std::abs(det) < kSingularTol)
        throw SingularOnPath("determinant modulus below 1e-14 along path");
    if (!started_) {
        started_ = true;
        last_ = det;
        arg_ = std::arg(det);
        return;
    }
    double jump = std::arg(det / last_);
    if (std::abs(jump) >= kArgAmbiguous)
        throw AmbiguousBranch("determinant argument jump >= pi/2; path too coarse");
    arg_ += jump;
    last_ = det;
}

Complex BranchTracker::sqrtValue() const {
    return std::sqrt(std::abs(last_)) * std::exp(Complex(0.0, arg_ / 2.0));
}

Complex BranchTracker::invSqrtValue() const {
    return 1.0 / sqrtValue();
}

Complex sqrtDetAnalytic(const std::function<Eigen::MatrixXcd(double)>& path) {
    // Sample adaptively: bisect intervals until adjacent determinant
    // arguments differ by < pi/4, then accumulate the continuous argument.
    struct Node {
        double s;
        Complex det;
    };
    auto det = [&](double s) {
        Complex d = path(s).fullPivLu().determinant();
        if (std::abs(d) < kSingularTol)
            throw SingularOnPath("determinant modulus below 1e-14 along path");
        return d;
    };

    // Start from a dense uniform grid: a two-point start can alias a full
    // winding of the argument into an apparently small jump.
    std::vector<Node> nodes;
    constexpr int kInitial = 64;
    nodes.reserve(kInitial + 1);
    for (int i = 0; i <= kInitial; ++i) {
        const double s = static_cast<double>(i) / kInitial;
        nodes.push_back({s, det(s)});
    }
    bool refined = true;
    int guard = 0;
    while (refined) {
        refined = false;
        std::vector<Node> next;
        next.reserve(nodes.size() * 2);
        for (size_t i = 0; i + 1 < nodes.size(); ++i) {
            next.push_back(nodes[i]);
            double jump = std::abs(std::arg(nodes[i + 1].det / nodes[i].det));
            if (jump >= kArgRefine &&
                nodes[i + 1].s - nodes[i].s > 1e-9) {
                double mid = 0.5 * (nodes[i].s + nodes[i + 1].s);
                next.push_back({mid, det(mid)});
                refined = true;
            }
        }
        next.push_back(nodes.back());
        nodes = std::move(next);
        if (++guard > 40)
            throw AmbiguousBranch("branch refinement did not converge");
    }

    BranchTracker tracker;
    if (std::abs(std::arg(nodes.front().det)) > kArgAmbiguous)
        throw AmbiguousBranch("path start does not have a positive-real branch");
    for (const auto& n : nodes) tracker.feed(n.det);
    return tracker.sqrtValue();
}

Complex sqrtDetPositiveReal(const Eigen::MatrixXcd& m) {
    const int d = static_cast<int>(m.rows());
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    return sqrtDetAnalytic(
        [&](double s) -> Eigen::MatrixXcd { return (1.0 - s) * id + s * m; });
}

}  // namespace scat
