#include "scat/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "scat/dynamics.hpp"

namespace scat {

namespace {
constexpr double kPi = std::numbers::pi;

bool isPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

double GridWavefunction::cellVolume() const {
    return d == 1 ? step() : step() * step();
}

double GridWavefunction::norm() const {
    return std::sqrt(values.squaredNorm() * cellVolume());
}

double GridWavefunction::boundaryRingMass(int width) const {
    const double total = values.squaredNorm();
    if (total == 0.0) return 0.0;
    double ring = 0.0;
    if (d == 1) {
        for (int i = 0; i < n; ++i)
            if (i < width || i >= n - width) ring += std::norm(values[i]);
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                if (ix < width || ix >= n - width || iy < width ||
                    iy >= n - width)
                    ring += std::norm(values[ix * n + iy]);
    }
    return ring / total;
}

void GridWavefunction::validate() const {
    if (d != 1 && d != 2)
        throw ConfigError("GridWavefunction: d must be 1 or 2");
    if (!isPowerOfTwo(n) || n < 256)
        throw ConfigError("GridWavefunction: n must be a power of two >= 256");
    if (L <= 0.0) throw ConfigError("GridWavefunction: L must be positive");
    if (h <= 0.0) throw ConfigError("GridWavefunction: h must be positive");
    const long want = d == 1 ? n : static_cast<long>(n) * n;
    if (values.size() != want)
        throw ConfigError("GridWavefunction: value array size mismatch");
}

GridWavefunction sampleWavePacket(const WavePacket& u, double L, int n) {
    GridWavefunction g{u.dim(), L, n, u.h, {}};
    if (u.dim() == 1) {
        g.values.resize(n);
        Eigen::VectorXd pt(1);
        for (int i = 0; i < n; ++i) {
            pt[0] = g.coord(i);
            g.values[i] = u.evaluate(pt);
        }
    } else {
        g.values.resize(static_cast<long>(n) * n);
        Eigen::VectorXd pt(2);
        for (int ix = 0; ix < n; ++ix) {
            pt[0] = g.coord(ix);
            for (int iy = 0; iy < n; ++iy) {
                pt[1] = g.coord(iy);
                g.values[ix * n + iy] = u.evaluate(pt);
            }
        }
    }
    g.validate();
    return g;
}

namespace {

// FFT transform pair for one grid shape; plans are reused across steps.
class Fourier {
public:
    Fourier(int d, int n) : d_(d), n_(n), size_(d == 1 ? n : (long)n * n) {
        buf_ = fftw_alloc_complex(size_);
        if (d == 1) {
            fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD,
                                    FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
        } else {
            fwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_FORWARD,
                                    FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
        }
    }
    ~Fourier() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    Fourier(const Fourier&) = delete;
    Fourier& operator=(const Fourier&) = delete;

    void forward(Eigen::VectorXcd& v) { run(v, fwd_, 1.0); }
    void backward(Eigen::VectorXcd& v) { run(v, bwd_, 1.0 / size_); }

private:
    void run(Eigen::VectorXcd& v, fftw_plan plan, double scale) {
        std::copy(v.data(), v.data() + size_,
                  reinterpret_cast<Complex*>(buf_));
        fftw_execute(plan);
        const Complex* out = reinterpret_cast<Complex*>(buf_);
        for (long i = 0; i < size_; ++i) v[i] = out[i] * scale;
    }

    int d_, n_;
    long size_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
};

// Frequency of index m on an n-point grid of half-width L.
double freq(int m, int n, double L) {
    const int mm = m < n / 2 ? m : m - n;
    return kPi * mm / L;
}

Eigen::VectorXd kineticSymbol(const GridWavefunction& g) {
    Eigen::VectorXd k2(g.values.size());
    if (g.d == 1) {
        for (int m = 0; m < g.n; ++m) {
            const double k = freq(m, g.n, g.L);
            k2[m] = k * k;
        }
    } else {
        for (int mx = 0; mx < g.n; ++mx) {
            const double kx = freq(mx, g.n, g.L);
            for (int my = 0; my < g.n; ++my) {
                const double ky = freq(my, g.n, g.L);
                k2[mx * g.n + my] = kx * kx + ky * ky;
            }
        }
    }
    return k2;
}

Eigen::VectorXd sampleV(const GridWavefunction& g, const Potential& v) {
    Eigen::VectorXd vv(g.values.size());
    if (g.d == 1) {
        Eigen::VectorXd pt(1);
        for (int i = 0; i < g.n; ++i) {
            pt[0] = g.coord(i);
            vv[i] = v.value(pt);
        }
    } else {
        Eigen::VectorXd pt(2);
        for (int ix = 0; ix < g.n; ++ix) {
            pt[0] = g.coord(ix);
            for (int iy = 0; iy < g.n; ++iy) {
                pt[1] = g.coord(iy);
                vv[ix * g.n + iy] = v.value(pt);
            }
        }
    }
    return vv;
}

// Strang stepper with cached phase factors; audits the boundary ring.
class SplitStepper {
public:
    SplitStepper(GridWavefunction& g, const Potential& v, double dt)
        : g_(g), fft_(g.d, g.n) {
        const Eigen::VectorXd k2 = kineticSymbol(g);
        const Eigen::VectorXd vv = sampleV(g, v);
        halfV_.resize(g.values.size());
        kin_.resize(g.values.size());
        for (long i = 0; i < g.values.size(); ++i) {
            halfV_[i] = std::exp(Complex(0.0, -vv[i] * dt / (2.0 * g.h)));
            kin_[i] = std::exp(Complex(0.0, -g.h * k2[i] * dt / 2.0));
        }
    }

    void advance(int steps) {
        for (int s = 0; s < steps; ++s) {
            g_.values.array() *= halfV_.array();
            fft_.forward(g_.values);
            g_.values.array() *= kin_.array();
            fft_.backward(g_.values);
            g_.values.array() *= halfV_.array();
            if (++count_ % 32 == 0) audit();
        }
    }

    void audit() const {
        if (g_.boundaryRingMass() > 1e-8)
            throw BoxTooSmall("solve: boundary-ring mass exceeds 1e-8");
    }

private:
    GridWavefunction& g_;
    Fourier fft_;
    Eigen::VectorXcd halfV_, kin_;
    long count_ = 0;
};

}  // namespace

GridWavefunction solve(const GridWavefunction& u0, const Potential& v,
                       double T, double dt) {
    u0.validate();
    if (dt <= 0.0) throw ConfigError("solve: dt must be positive");
    GridWavefunction g = u0;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(T) / dt)));
    SplitStepper stepper(g, v, T / steps);
    stepper.audit();
    stepper.advance(steps);
    stepper.audit();
    return g;
}

GridWavefunction applyHamiltonian(const GridWavefunction& u,
                                  const Potential& v) {
    u.validate();
    GridWavefunction out = u;
    Fourier fft(u.d, u.n);
    fft.forward(out.values);
    const Eigen::VectorXd k2 = kineticSymbol(u);
    for (long i = 0; i < out.values.size(); ++i)
        out.values[i] *= 0.5 * u.h * u.h * k2[i];
    fft.backward(out.values);
    const Eigen::VectorXd vv = sampleV(u, v);
    for (long i = 0; i < out.values.size(); ++i)
        out.values[i] += vv[i] * u.values[i];
    return out;
}

double energyExpectation(const GridWavefunction& u, const Potential& v) {
    const GridWavefunction pu = applyHamiltonian(u, v);
    const Complex e = (u.values.dot(pu.values)) * u.cellVolume();
    return e.real() / (u.norm() * u.norm());
}

namespace {

// Composite-Simpson accumulation of grid samples of a time integrand.
class SimpsonAccumulator {
public:
    SimpsonAccumulator(Eigen::VectorXcd& target, int intervals, double stepLen)
        : target_(target), m_(intervals), q_(stepLen) {}

    void add(int k, const Eigen::VectorXcd& sample, Complex factor) {
        double w = (k == 0 || k == m_) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        target_ += (w * q_ / 3.0 * factor) * sample;
    }

private:
    Eigen::VectorXcd& target_;
    int m_;
    double q_;
};

int evenIntervals(double span, double maxStep) {
    return 2 * std::max(1, static_cast<int>(std::ceil(span / (2.0 * maxStep))));
}

}  // namespace

EigenfunctionResult assembleGeneralizedEigenfunction(const WavePacket& uMinus,
                                                     const Potential& v,
                                                     const GridSpec& grid,
                                                     const TimeQuadSpec& quad) {
    const int d = uMinus.dim();
    if (d != 1 && d != 2)
        throw ConfigError("assembleGeneralizedEigenfunction: d must be 1 or 2");
    const double h = uMinus.h;
    const Complex iu(0.0, 1.0);

    const EscapeTimes esc = escapeTimes(uMinus.x, uMinus.xi, v, quad.tol);
    const double tFwd = esc.tPlus - esc.tMinus;

    GridWavefunction base = sampleWavePacket(uMinus, grid.L, grid.n);
    const double uNorm = base.norm();

    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(base.values.size());
    // The two free tails are tracked separately: the residual tests them
    // against the free equation they satisfy (V times these pieces is the
    // content of the resolvent correction E_h^1, which is not assembled).
    Eigen::VectorXcd freeAcc = Eigen::VectorXcd::Zero(base.values.size());
    const double q = quad.stepFactor * h;
    auto kernel = [&](double t) { return std::exp(iu * (0.5 * t / h)); };

    // Incoming free tail, closed form.
    {
        const int m = evenIntervals(quad.tailBackward, q);
        const double qq = quad.tailBackward / m;
        SimpsonAccumulator simpson(freeAcc, m, qq);
        for (int k = 0; k <= m; ++k) {
            const double t = -quad.tailBackward + k * qq;
            simpson.add(k, sampleWavePacket(freeEvolve(uMinus, t), grid.L,
                                            grid.n).values,
                        kernel(t));
        }
    }

    // Interacting piece, split-step solver snapshots.
    {
        const int m = evenIntervals(tFwd, q);
        const double qq = tFwd / m;
        GridWavefunction g = base;
        SplitStepper stepper(g, v, qq / quad.solverSubsteps);
        SimpsonAccumulator simpson(acc, m, qq);
        for (int k = 0; k <= m; ++k) {
            simpson.add(k, g.values, kernel(k * qq));
            if (k < m) stepper.advance(quad.solverSubsteps);
        }
    }

    // Outgoing free tail of the leading-order propagated packet.
    const WavePacket uPlus = propagate(uMinus, tFwd, v, quad.tol);
    {
        const int m = evenIntervals(quad.tailForward, q);
        const double qq = quad.tailForward / m;
        SimpsonAccumulator simpson(freeAcc, m, qq);
        for (int k = 0; k <= m; ++k) {
            const double s = k * qq;
            simpson.add(k, sampleWavePacket(freeEvolve(uPlus, s), grid.L,
                                            grid.n).values,
                        kernel(tFwd + s));
        }
    }

    GridWavefunction efun = base;
    efun.values = acc + freeAcc;

    // (P_h - 1/2) E equals ih [U(t) u e^{it/2h}] at the endpoints plus the
    // parametrix defect at the interior junction t = t_+, plus V times the
    // free tails (the E_h^1 content, subtracted below). Subtract the two
    // known outer endpoint terms; what remains is the h^{(N+1)/2} signal.
    GridWavefunction resid = applyHamiltonian(efun, v);
    resid.values -= 0.5 * efun.values;
    resid.values -= sampleV(base, v).cast<Complex>().cwiseProduct(freeAcc);
    resid.values -=
        (iu * h * kernel(tFwd + quad.tailForward)) *
        sampleWavePacket(freeEvolve(uPlus, quad.tailForward), grid.L, grid.n)
            .values;
    resid.values +=
        (iu * h * kernel(-quad.tailBackward)) *
        sampleWavePacket(freeEvolve(uMinus, -quad.tailBackward), grid.L,
                         grid.n)
            .values;

    const double w =
        quad.windowRadius >= 0.0 ? quad.windowRadius : v.supportRadius() + 2.0;
    double acc2 = 0.0;
    if (d == 1) {
        for (int i = 0; i < resid.n; ++i)
            if (std::abs(resid.coord(i)) <= w)
                acc2 += std::norm(resid.values[i]);
    } else {
        for (int ix = 0; ix < resid.n; ++ix)
            for (int iy = 0; iy < resid.n; ++iy)
                if (std::hypot(resid.coord(ix), resid.coord(iy)) <= w)
                    acc2 += std::norm(resid.values[ix * resid.n + iy]);
    }
    const double residual =
        std::sqrt(acc2 * resid.cellVolume()) / (h * uNorm);
    return {efun, residual, tFwd};
}

PacketParams extractPacketParams(const GridWavefunction& u) {
    u.validate();
    const int d = u.d, n = u.n;

    // Marginal mass profiles per axis.
    std::vector<Eigen::VectorXd> marg(d, Eigen::VectorXd::Zero(n));
    if (d == 1) {
        for (int i = 0; i < n; ++i) marg[0][i] = std::norm(u.values[i]);
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                const double m = std::norm(u.values[ix * n + iy]);
                marg[0][ix] += m;
                marg[1][iy] += m;
            }
    }
    for (int ax = 0; ax < d; ++ax) {
        const double peak = marg[ax].maxCoeff();
        int segments = 0, gap = 1 << 30;
        bool inSeg = false;
        for (int i = 0; i < n; ++i) {
            if (marg[ax][i] > 0.1 * peak) {
                if (!inSeg && (segments == 0 || gap > 4)) ++segments;
                inSeg = true;
                gap = 0;
            } else {
                inSeg = false;
                ++gap;
            }
        }
        if (segments > 1)
            throw Multimodal("extractPacketParams: |u|^2 has separated peaks");
    }

    const double total = u.values.squaredNorm();
    PacketParams out;
    out.center = Eigen::VectorXd::Zero(d);
    out.cov = Eigen::MatrixXd::Zero(d, d);
    for (int ax = 0; ax < d; ++ax)
        for (int i = 0; i < n; ++i)
            out.center[ax] += u.coord(i) * marg[ax][i] / total;
    if (d == 1) {
        for (int i = 0; i < n; ++i) {
            const double z = u.coord(i) - out.center[0];
            out.cov(0, 0) += z * z * marg[0][i] / total;
        }
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                const double m = std::norm(u.values[ix * n + iy]) / total;
                const double zx = u.coord(ix) - out.center[0];
                const double zy = u.coord(iy) - out.center[1];
                out.cov(0, 0) += zx * zx * m;
                out.cov(0, 1) += zx * zy * m;
                out.cov(1, 1) += zy * zy * m;
            }
        out.cov(1, 0) = out.cov(0, 1);
    }

    // Momentum from the discrete Fourier side: mean of h k.
    GridWavefunction spec = u;
    Fourier fft(d, n);
    fft.forward(spec.values);
    const double stot = spec.values.squaredNorm();
    out.momentum = Eigen::VectorXd::Zero(d);
    if (d == 1) {
        for (int m = 0; m < n; ++m)
            out.momentum[0] +=
                u.h * freq(m, n, u.L) * std::norm(spec.values[m]) / stot;
    } else {
        for (int mx = 0; mx < n; ++mx)
            for (int my = 0; my < n; ++my) {
                const double m2 = std::norm(spec.values[mx * n + my]) / stot;
                out.momentum[0] += u.h * freq(mx, n, u.L) * m2;
                out.momentum[1] += u.h * freq(my, n, u.L) * m2;
            }
    }
    return out;
}

}  // namespace scat
