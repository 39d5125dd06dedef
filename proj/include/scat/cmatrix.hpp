#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "scat/errors.hpp"

namespace scat {

using Complex = std::complex<double>;

/// Symmetric d x d complex matrix. Symmetry is enforced by construction
/// (the argument is symmetrized); positive definiteness of the real part is
/// validated on demand and cached.
class ComplexSymMatrix {
public:
    explicit ComplexSymMatrix(const Eigen::MatrixXcd& m);

    static ComplexSymMatrix identity(int dim);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Eigen::MatrixXcd& mat() const { return mat_; }
    Complex operator()(int i, int j) const { return mat_(i, j); }

    /// Smallest eigenvalue of the (symmetric real) real part.
    double minRealEigenvalue() const;
    bool realPartPositiveDefinite() const;

    /// Throws DegenerateMatrix unless Re(M) is positive definite.
    void requirePositiveReal(const char* who) const;

    ComplexSymMatrix inverse() const;
    ComplexSymMatrix plusImagScaledIdentity(double t) const;  // M + i t Id
    ComplexSymMatrix conjugate() const;

    double symmetryDefect() const;  // always 0 by construction; kept for audits

private:
    Eigen::MatrixXcd mat_;
    mutable int posdefCache_ = -1;  // -1 unknown, 0 no, 1 yes
};

/// Continuous-argument tracker for det along a deformation path. Feed it
/// successive determinant values; it maintains a winding-aware argument and
/// exposes the branch-continuous square root. The first value must have a
/// real positive branch (argument taken in (-pi, pi]).
class BranchTracker {
public:
    void feed(Complex det);
    bool started() const { return started_; }
    Complex det() const { return last_; }
    double argument() const { return arg_; }
    Complex sqrtValue() const;
    Complex invSqrtValue() const;

private:
    bool started_ = false;
    Complex last_;
    double arg_ = 0.0;
};

/// Branch-continuous square root of det(path(1)), where path(s), s in [0,1],
/// is a continuous family of invertible matrices and path(0) has positive
/// real determinant branch value. The path is sampled adaptively until
/// adjacent determinant arguments differ by < pi/4.
Complex sqrtDetAnalytic(const std::function<Eigen::MatrixXcd(double)>& path);

/// Branch value for a single matrix with positive definite real part, via
/// the homotopy (1-s) Id + s M (all members share the property, hence stay
/// invertible).
Complex sqrtDetPositiveReal(const Eigen::MatrixXcd& m);

}  // namespace scat
