#include "scat/poly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace scat {

namespace {
int indexOrder(const MultiPoly::Index& a) {
    return std::accumulate(a.begin(), a.end(), 0);
}
}  // namespace

MultiPoly MultiPoly::constant(int dim, Complex c) {
    MultiPoly p(dim);
    p.setCoeff(Index(dim, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(int dim, int j) {
    MultiPoly p(dim);
    Index a(dim, 0);
    a[j] = 1;
    p.setCoeff(a, 1.0);
    return p;
}

void MultiPoly::checkIndex(const Index& alpha) const {
    if (static_cast<int>(alpha.size()) != dim_)
        throw Error("multi-index dimension mismatch");
    if (indexOrder(alpha) > kDegreeCap)
        throw DegreeCapExceeded("polynomial degree cap exceeded");
}

int MultiPoly::degree() const {
    int deg = -1;
    for (const auto& [a, c] : coeffs_)
        if (c != 0.0) deg = std::max(deg, indexOrder(a));
    return deg;
}

Complex MultiPoly::coeff(const Index& alpha) const {
    auto it = coeffs_.find(alpha);
    return it == coeffs_.end() ? Complex(0.0) : it->second;
}

void MultiPoly::setCoeff(const Index& alpha, Complex c) {
    checkIndex(alpha);
    if (c == 0.0)
        coeffs_.erase(alpha);
    else
        coeffs_[alpha] = c;
}

void MultiPoly::addCoeff(const Index& alpha, Complex c) {
    checkIndex(alpha);
    auto [it, inserted] = coeffs_.try_emplace(alpha, c);
    if (!inserted) it->second += c;
}

Complex MultiPoly::operator()(const Eigen::VectorXcd& x) const {
    Complex sum = 0.0;
    for (const auto& [a, c] : coeffs_) {
        Complex term = c;
        for (int j = 0; j < dim_; ++j)
            for (int k = 0; k < a[j]; ++k) term *= x[j];
        sum += term;
    }
    return sum;
}

Complex MultiPoly::operator()(const Eigen::VectorXd& x) const {
    return (*this)(x.cast<Complex>().eval());
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    MultiPoly r = *this;
    r += o;
    return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    for (const auto& [a, c] : o.coeffs_) addCoeff(a, c);
    return *this;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
    return *this + o * Complex(-1.0);
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    MultiPoly r(dim_);
    for (const auto& [a, ca] : coeffs_)
        for (const auto& [b, cb] : o.coeffs_) {
            Index s(dim_);
            for (int j = 0; j < dim_; ++j) s[j] = a[j] + b[j];
            r.addCoeff(s, ca * cb);
        }
    return r;
}

MultiPoly MultiPoly::operator*(Complex s) const {
    MultiPoly r(dim_);
    if (s == 0.0) return r;
    for (const auto& [a, c] : coeffs_) r.coeffs_[a] = c * s;
    return r;
}

MultiPoly& MultiPoly::operator*=(Complex s) {
    *this = *this * s;
    return *this;
}

MultiPoly MultiPoly::derivative(int j) const {
    MultiPoly r(dim_);
    for (const auto& [a, c] : coeffs_) {
        if (a[j] == 0) continue;
        Index b = a;
        b[j] -= 1;
        r.addCoeff(b, c * static_cast<double>(a[j]));
    }
    return r;
}

MultiPoly MultiPoly::mulVariable(int j) const {
    MultiPoly r(dim_);
    for (const auto& [a, c] : coeffs_) {
        Index b = a;
        b[j] += 1;
        r.addCoeff(b, c);
    }
    return r;
}

MultiPoly MultiPoly::composeLinear(const Eigen::MatrixXcd& L) const {
    MultiPoly result(dim_);
    // Linear forms l_j(z) = sum_k L(j,k) z_k, multiplied out per monomial.
    std::vector<MultiPoly> forms;
    forms.reserve(dim_);
    for (int j = 0; j < dim_; ++j) {
        MultiPoly f(dim_);
        for (int k = 0; k < dim_; ++k) {
            if (L(j, k) != 0.0) f += variable(dim_, k) * L(j, k);
        }
        forms.push_back(f);
    }
    for (const auto& [a, c] : coeffs_) {
        MultiPoly term = constant(dim_, c);
        for (int j = 0; j < dim_; ++j)
            for (int k = 0; k < a[j]; ++k) term = term * forms[j];
        result += term;
    }
    return result;
}

MultiPoly MultiPoly::reflect() const {
    MultiPoly r(dim_);
    for (const auto& [a, c] : coeffs_) {
        int sign = indexOrder(a) % 2 == 0 ? 1 : -1;
        r.coeffs_[a] = c * static_cast<double>(sign);
    }
    return r;
}

MultiPoly MultiPoly::conjugate() const {
    MultiPoly r(dim_);
    for (const auto& [a, c] : coeffs_) r.coeffs_[a] = std::conj(c);
    return r;
}

MultiPoly MultiPoly::pruned(double eps) const {
    MultiPoly r(dim_);
    for (const auto& [a, c] : coeffs_)
        if (std::abs(c) > eps) r.coeffs_[a] = c;
    return r;
}

double MultiPoly::maxAbsCoeff() const {
    double m = 0.0;
    for (const auto& [a, c] : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

double MultiPoly::distance(const MultiPoly& a, const MultiPoly& b) {
    double m = 0.0;
    for (const auto& [idx, c] : a.terms())
        m = std::max(m, std::abs(c - b.coeff(idx)));
    for (const auto& [idx, c] : b.terms())
        m = std::max(m, std::abs(c - a.coeff(idx)));
    return m;
}

std::vector<MultiPoly::Index> enumerateIndices(int dim, int maxDeg) {
    std::vector<MultiPoly::Index> out;
    MultiPoly::Index cur(dim, 0);
    // Graded enumeration: for each total degree, all compositions.
    for (int deg = 0; deg <= maxDeg; ++deg) {
        std::function<void(int, int)> rec = [&](int pos, int remaining) {
            if (pos == dim - 1) {
                cur[pos] = remaining;
                out.push_back(cur);
                return;
            }
            for (int k = remaining; k >= 0; --k) {
                cur[pos] = k;
                rec(pos + 1, remaining - k);
            }
        };
        rec(0, deg);
    }
    return out;
}

}  // namespace scat
