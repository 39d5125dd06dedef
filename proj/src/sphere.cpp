#include "scat/sphere.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "scat/errors.hpp"

namespace scat {

namespace {
constexpr double kPi = std::numbers::pi;

double smoothStep(double u) {  // 0 at u <= 0, 1 at u >= 1, C^inf
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}
}  // namespace

double chi(double r) {
    return 1.0 - smoothStep((r - 0.5) * 4.0);
}

double chiTilde(double t, double h) {
    return std::exp(-t * t / (2.0 * h)) * chi(t / std::cbrt(h));
}

Complex evalState(const SphereGaussianState& state, const Eigen::VectorXd& xhat,
                  bool tilde) {
    const Eigen::VectorXd z = xhat - state.xi0;
    double cutoff = 1.0;
    if (!tilde) {
        cutoff = chi(z.norm() / std::cbrt(state.h));
        if (cutoff == 0.0) return 0.0;
    }
    const double h = state.h;
    const Complex quad = (z.cast<Complex>().transpose() * state.gamma0.mat() *
                          z.cast<Complex>())(0);
    return cutoff * state.q0((z / std::sqrt(h)).eval()) *
           std::exp(Complex(0.0, -state.x0.dot(xhat) / h) - quad / (2.0 * h));
}

namespace {

// Adaptive Simpson with absolute tolerance.
double adaptSimpson(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol,
                    int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptSimpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptSimpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
    // Seed with a uniform partition so narrow features are not missed.
    const int seed = 64;
    double total = 0.0;
    for (int k = 0; k < seed; ++k) {
        const double x0 = a + (b - a) * k / seed;
        const double x1 = a + (b - a) * (k + 1) / seed;
        const double f0 = f(x0), f1 = f(x1), fm = f(0.5 * (x0 + x1));
        const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += adaptSimpson(f, x0, x1, f0, fm, f1, whole, tol / seed, 40);
    }
    return total;
}

}  // namespace

double resolutionConstant(double h, int d, double omegaAngle) {
    if (d != 2)
        throw ConfigError("resolutionConstant: only d = 2 is supported");
    if (!(h > 0.0 && h <= 0.5))
        throw ConfigError("resolutionConstant: h must lie in (0, 0.5]");

    // Support of chi~(|omega-xi|): chord 2 sin(theta/2) < (3/4) h^{1/3}.
    const double chordMax = 0.75 * std::cbrt(h);
    const double thetaMax = 2.0 * std::asin(std::min(1.0, chordMax / 2.0));

    auto integrand = [&](double alpha) {
        const double theta = alpha - omegaAngle;
        const double t = 2.0 * std::abs(std::sin(theta / 2.0));
        const double c = chiTilde(t, h);
        return c * c / std::abs(std::cos(theta));
    };
    // Crude scale for the absolute tolerance of the quadrature.
    const double scale = std::sqrt(kPi * h);
    const double integral =
        integrate(integrand, omegaAngle - thetaMax, omegaAngle + thetaMax,
                  1e-9 * scale);
    return 1.0 / (2.0 * kPi * h * integral);
}

double SphereFunction::angle(int i) const { return 2.0 * kPi * i / size(); }

Eigen::Vector2d SphereFunction::point(int i) const {
    const double th = angle(i);
    return {std::cos(th), std::sin(th)};
}

namespace {

// Shared geometry of the windowed quadratures on the uniform circle grid.
struct Window {
    int w;                       // half width in grid steps
    std::vector<double> ct;      // chi~(chord(k dth)) for k in [-w, w]
    std::vector<double> p;       // sin(k dth) = xi^perp . omega_k
    double dth;

    Window(int n, double h) {
        dth = 2.0 * kPi / n;
        const double chordMax = 0.75 * std::cbrt(h);
        const double thetaMax = 2.0 * std::asin(std::min(1.0, chordMax / 2.0));
        w = std::min(n / 2 - 1, static_cast<int>(thetaMax / dth) + 2);
        ct.resize(2 * w + 1);
        p.resize(2 * w + 1);
        for (int k = -w; k <= w; ++k) {
            const double th = k * dth;
            ct[k + w] = chiTilde(2.0 * std::abs(std::sin(th / 2.0)), h);
            p[k + w] = std::sin(th);
        }
    }

    // Closed-form inner integral int_{-X}^{X} e^{iru/h} dr.
    double kernel(double u, double X, double h) const {
        if (std::abs(u) < 1e-14) return 2.0 * X;
        return 2.0 * h * std::sin(X * u / h) / u;
    }
};

}  // namespace

SphereFunction reconstruct(const SphereFunction& f, double h, double X,
                           bool* truncationWarning) {
    const int n = f.size();
    if (n < 16) throw ConfigError("reconstruct: grid size must be >= 16");
    if (X <= 0.0) throw ConfigError("reconstruct: X must be positive");
    if (truncationWarning) *truncationWarning = X < 50.0 * h;

    const Window win(n, h);
    const int w = win.w;
    const double ch = resolutionConstant(h, 2);

    // The summand depends on grid indices only through their offsets from
    // the xi node, so the whole double quadrature collapses to a circular
    // convolution g_i = sum_delta T[delta] f_{i+delta} with
    // T[delta] = sum_r ct_r ct_{r+delta} K(p_{r+delta} - p_r).
    std::vector<double> t(4 * w + 1, 0.0);
    for (int delta = -2 * w; delta <= 2 * w; ++delta) {
        double acc = 0.0;
        const int rLo = std::max(-w, -w - delta), rHi = std::min(w, w - delta);
        for (int r = rLo; r <= rHi; ++r) {
            const double cr = win.ct[r + w], cq = win.ct[r + delta + w];
            if (cr == 0.0 || cq == 0.0) continue;
            acc += cr * cq * win.kernel(win.p[r + delta + w] - win.p[r + w],
                                        X, h);
        }
        t[delta + 2 * w] = acc;
    }

    SphereFunction g{Eigen::VectorXcd::Zero(n)};
    const double pref = ch * win.dth * win.dth;
    for (int i = 0; i < n; ++i) {
        Complex acc = 0.0;
        for (int delta = -2 * w; delta <= 2 * w; ++delta) {
            const double tv = t[delta + 2 * w];
            if (tv == 0.0) continue;
            acc += tv * f.values[((i + delta) % n + n) % n];
        }
        g.values[i] = pref * acc;
    }
    return g;
}

Complex traceEstimate(const Eigen::MatrixXcd& kernel, double h, double X) {
    const int n = static_cast<int>(kernel.rows());
    if (n < 16 || kernel.cols() != n)
        throw ConfigError("traceEstimate: kernel must be square, n >= 16");
    if (X <= 0.0) throw ConfigError("traceEstimate: X must be positive");

    const Window win(n, h);
    const int w = win.w;
    const double ch = resolutionConstant(h, 2);

    // Precompute ct_i ct_j K(p_i - p_j) on offsets once; it is the same for
    // every direction node on the uniform grid.
    Eigen::MatrixXd table(2 * w + 1, 2 * w + 1);
    for (int a = 0; a <= 2 * w; ++a)
        for (int b = 0; b <= 2 * w; ++b)
            table(a, b) = win.ct[a] * win.ct[b] *
                          win.kernel(win.p[a] - win.p[b], X, h);

    Complex tr = 0.0;
    for (int c = 0; c < n; ++c) {
        Complex acc = 0.0;
        for (int a = 0; a <= 2 * w; ++a) {
            const int i = ((c + a - w) % n + n) % n;
            for (int b = 0; b <= 2 * w; ++b) {
                const double tv = table(a, b);
                if (tv == 0.0) continue;
                const int j = ((c + b - w) % n + n) % n;
                acc += tv * kernel(i, j);
            }
        }
        tr += acc;
    }
    return tr * ch * win.dth * win.dth * win.dth;
}

}  // namespace scat
