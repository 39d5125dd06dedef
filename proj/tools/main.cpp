#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <typeinfo>
#include <vector>

#include <CLI11.hpp>
#include <cxxabi.h>

#include "scat/config.hpp"
#include "scat/sphere.hpp"

namespace fs = std::filesystem;
using namespace scat;

namespace {

// Minimal ordered JSON emitter with the project-wide %.17g float format
// (byte-identical output for identical configs).
struct Json {
    std::string s;
    bool first = true;

    void sep() {
        if (!first) s += ", ";
        first = false;
    }
    Json& open(const std::string& k = "") {
        sep();
        if (!k.empty()) s += "\"" + k + "\": ";
        s += "{";
        first = true;
        return *this;
    }
    Json& openArr(const std::string& k) {
        sep();
        s += "\"" + k + "\": [";
        first = true;
        return *this;
    }
    Json& close() {
        s += "}";
        first = false;
        return *this;
    }
    Json& closeArr() {
        s += "]";
        first = false;
        return *this;
    }
    Json& put(const std::string& k, const std::string& v) {
        sep();
        s += "\"" + k + "\": \"" + v + "\"";
        return *this;
    }
    Json& put(const std::string& k, double v) {
        sep();
        s += "\"" + k + "\": " + formatDouble(v);
        return *this;
    }
    Json& put(const std::string& k, int v) {
        sep();
        s += "\"" + k + "\": " + std::to_string(v);
        return *this;
    }
    Json& put(const std::string& k, const Eigen::VectorXd& v) {
        openArr(k);
        for (int i = 0; i < v.size(); ++i) {
            sep();
            s += formatDouble(v[i]);
        }
        return closeArr();
    }
    Json& putMat(const std::string& k, const Eigen::MatrixXd& m) {
        openArr(k);
        for (int i = 0; i < m.rows(); ++i) {
            sep();
            s += "[";
            for (int j = 0; j < m.cols(); ++j) {
                if (j) s += ", ";
                s += formatDouble(m(i, j));
            }
            s += "]";
        }
        return closeArr();
    }
    Json& putPoly(const std::string& k, const MultiPoly& p) {
        openArr(k);
        for (const auto& [alpha, c] : p.terms()) {
            open();
            openArr("exponents");
            for (int e : alpha) {
                sep();
                s += std::to_string(e);
            }
            closeArr();
            put("re", c.real());
            put("im", c.imag());
            close();
        }
        return closeArr();
    }
};

void writeAtomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        f << content;
        if (!f) throw ConfigError("cannot write " + path.string());
    }
    fs::rename(tmp, path);
    std::printf("wrote %s\n", path.string().c_str());
}

void putState(Json& j, const std::string& key, const SphereGaussianState& s) {
    j.open(key);
    j.put("x0", s.x0);
    j.put("xi0", s.xi0);
    j.putMat("gamma0_re", s.gamma0.mat().real());
    j.putMat("gamma0_im", s.gamma0.mat().imag());
    j.putPoly("q0", s.q0);
    j.put("h", s.h);
    j.close();
}

void putCotangent(Json& j, const std::string& key, const SphereCotangent& c) {
    j.open(key);
    j.put("omega", c.omega);
    j.put("eta", c.eta);
    j.close();
}

void putPacket(Json& j, const std::string& key, const WavePacket& u) {
    j.open(key);
    j.put("x", u.x);
    j.put("xi", u.xi);
    j.putMat("gamma_re", u.gamma.mat().real());
    j.putMat("gamma_im", u.gamma.mat().imag());
    j.putPoly("poly", u.poly);
    j.put("phase", u.phase);
    j.put("h", u.h);
    j.close();
}

Json header(const ExperimentConfig& cfg, const std::string& cmd) {
    Json j;
    j.open();
    j.put("subcommand", cmd);
    j.put("config_hash", cfg.hash());
    return j;
}

void requireDim2(const ExperimentConfig& cfg, const std::string& what) {
    if (cfg.dim != 2)
        throw ConfigError(what + " output schema is implemented for d = 2 only");
}

// The d = 1 analogue used by the oracle subcommands: each bump is projected
// onto the incoming ray (center -> (center - x0) . xi0), and the packet
// starts at the backward escape point with unit momentum.
Potential rayPotential(const ExperimentConfig& cfg) {
    std::vector<Bump> bumps;
    const Eigen::VectorXd w = cfg.xi0.normalized();
    for (const Bump& b : cfg.bumps) {
        Eigen::VectorXd c(1);
        c[0] = (b.center - cfg.x0).dot(w);
        bumps.push_back({c, b.radius, b.amplitude});
    }
    return Potential(1, bumps);
}

WavePacket rayPacket(double x, double h) {
    Eigen::VectorXd c(1), xi(1);
    c[0] = x;
    xi[0] = 1.0;
    return {c, xi, ComplexSymMatrix(Eigen::MatrixXcd::Identity(1, 1)),
            MultiPoly::constant(1, 1.0), 0.0, h};
}

std::string csvComplexRows(const std::string& head,
                           const std::vector<std::array<double, 3>>& rows) {
    std::string s = head + "\n";
    for (const auto& r : rows)
        s += formatDouble(r[0]) + "," + formatDouble(r[1]) + "," +
             formatDouble(r[2]) + "\n";
    return s;
}

int runSmatrix(const ExperimentConfig& cfg) {
    const Potential v = cfg.potential();
    Json j = header(cfg, "smatrix");
    j.openArr("runs");
    for (double h : cfg.hs) {
        const ScatteringResult r = applyScatteringMatrix(cfg.state(h), v, cfg.tol);
        j.open();
        j.put("h", h);
        j.put("delta1", r.delta1);
        putState(j, "state", r.state);
        j.open("diagnostics");
        j.put("t_minus", r.diagnostics.tMinus);
        j.put("t_plus", r.diagnostics.tPlus);
        putCotangent(j, "incoming", r.diagnostics.incoming);
        putCotangent(j, "outgoing", r.diagnostics.outgoing);
        j.put("classical_discrepancy", r.diagnostics.classicalDiscrepancy);
        j.close();
        j.close();
    }
    j.closeArr().close();
    writeAtomic(fs::path(cfg.outDir) / "smatrix.json", j.s + "\n");
    return 0;
}

int runScatmap(const ExperimentConfig& cfg) {
    requireDim2(cfg, "scatmap");
    const Potential v = cfg.potential();
    const Eigen::VectorXd w = cfg.xi0.normalized();
    Eigen::VectorXd perp(2);
    perp << -w[1], w[0];
    const double etaMax = v.supportRadius() + 1.0;
    std::string csv = "eta,omega_prime_angle,eta_prime,t_prime\n";
    const int n = cfg.sphereGrid;
    for (int k = 0; k < n; ++k) {
        const double eta = etaMax * (n == 1 ? 0.0 : 2.0 * k / (n - 1.0) - 1.0);
        const ScatteringOutcome out = scatteringMap(w, eta * perp, v, cfg.tol);
        Eigen::VectorXd operp(2);
        operp << -out.omegaOut[1], out.omegaOut[0];
        csv += formatDouble(eta) + "," +
               formatDouble(std::atan2(out.omegaOut[1], out.omegaOut[0])) + "," +
               formatDouble(out.etaOut.dot(operp)) + "," +
               formatDouble(out.tPrime) + "\n";
    }
    writeAtomic(fs::path(cfg.outDir) / "scatmap.csv", csv);
    Json j = header(cfg, "scatmap");
    j.put("rows", cfg.sphereGrid);
    j.put("eta_max", etaMax);
    j.close();
    writeAtomic(fs::path(cfg.outDir) / "scatmap.json", j.s + "\n");
    return 0;
}

// Shared pipeline stage: packet data recovered from the sphere state,
// pulled back to the incoming escape point.
struct PacketRun {
    WavePacket uMinus;
    EscapeTimes esc;
};

PacketRun incomingPacket(const ExperimentConfig& cfg, double h,
                         const Potential& v) {
    const SphereGaussianState s = cfg.state(h);
    const ComplexSymMatrix gp = s.gamma0.inverse();
    const WavePacket u0{s.x0, s.xi0, gp, inverseFourierGaussianPoly(s.q0, gp),
                        0.0, h};
    const EscapeTimes esc = escapeTimes(s.x0, s.xi0, v, cfg.tol);
    return {freeEvolve(u0, -esc.tMinus), esc};
}

int runPropagate(const ExperimentConfig& cfg) {
    const Potential v = cfg.potential();
    Json j = header(cfg, "propagate");
    j.openArr("runs");
    for (double h : cfg.hs) {
        const PacketRun in = incomingPacket(cfg, h, v);
        const WavePacket up = propagate(in.uMinus, in.esc.tPlus, v, cfg.tol);
        j.open();
        j.put("h", h);
        j.put("t_minus", in.esc.tMinus);
        j.put("t_plus", in.esc.tPlus);
        putPacket(j, "incoming", in.uMinus);
        putPacket(j, "outgoing", up);
        j.close();
    }
    j.closeArr().close();
    writeAtomic(fs::path(cfg.outDir) / "propagate.json", j.s + "\n");
    return 0;
}

int runFarfield(const ExperimentConfig& cfg) {
    requireDim2(cfg, "farfield");
    const Potential v = cfg.potential();
    Json j = header(cfg, "farfield");
    j.openArr("runs");
    for (double h : cfg.hs) {
        const PacketRun in = incomingPacket(cfg, h, v);
        const WavePacket up = propagate(in.uMinus, in.esc.tPlus, v, cfg.tol);
        const SphereProfile fut = farfieldFuture(up);
        const SphereProfile past = farfieldPast(in.uMinus);
        const std::string tag = "_h" + formatDouble(h);
        for (const auto& [name, prof] :
             {std::pair<std::string, const SphereProfile&>{"future", fut},
              {"past", past}}) {
            std::vector<std::array<double, 3>> rows;
            for (int i = 0; i < cfg.sphereGrid; ++i) {
                const double th =
                    2.0 * std::numbers::pi * i / cfg.sphereGrid;
                Eigen::VectorXd xhat(2);
                xhat << std::cos(th), std::sin(th);
                const Complex val = prof.evaluate(xhat);
                rows.push_back({th, val.real(), val.imag()});
            }
            writeAtomic(fs::path(cfg.outDir) /
                            ("farfield_" + name + tag + ".csv"),
                        csvComplexRows("angle,re,im", rows));
        }
        j.open();
        j.put("h", h);
        j.put("t_plus", in.esc.tPlus);
        j.put("future_peak_angle",
              std::atan2(up.xi.normalized()[1], up.xi.normalized()[0]));
        j.close();
    }
    j.closeArr().close();
    writeAtomic(fs::path(cfg.outDir) / "farfield.json", j.s + "\n");
    return 0;
}

int runResolve(const ExperimentConfig& cfg) {
    requireDim2(cfg, "resolve");
    Json j = header(cfg, "resolve");
    j.openArr("runs");
    for (double h : cfg.hs) {
        const double ch = resolutionConstant(h);
        const double asym =
            std::pow(2.0, 0.5 * (cfg.dim - 1)) *
            std::pow(2.0 * std::numbers::pi * h, -1.5 * (cfg.dim - 1));
        // Reconstruction demo on the third harmonic.
        SphereFunction f;
        f.values.resize(cfg.sphereGrid);
        for (int i = 0; i < cfg.sphereGrid; ++i)
            f.values[i] = std::exp(Complex(0.0, 3.0 * f.angle(i)));
        bool warn = false;
        const SphereFunction g = reconstruct(f, h, cfg.truncationX, &warn);
        double num = 0.0, den = 0.0;
        std::vector<std::array<double, 3>> rows;
        for (int i = 0; i < cfg.sphereGrid; ++i) {
            num += std::norm(g.values[i] - f.values[i]);
            den += std::norm(f.values[i]);
            rows.push_back({f.angle(i), g.values[i].real(), g.values[i].imag()});
        }
        writeAtomic(fs::path(cfg.outDir) /
                        ("resolve_reconstruct_h" + formatDouble(h) + ".csv"),
                    csvComplexRows("angle,re,im", rows));
        j.open();
        j.put("h", h);
        j.put("c_h", ch);
        j.put("asymptotic_ratio", ch / asym);
        j.put("reconstruct_rel_error", std::sqrt(num / den));
        j.put("truncation_warning", warn ? 1 : 0);
        j.close();
    }
    j.closeArr().close();
    writeAtomic(fs::path(cfg.outDir) / "resolve.json", j.s + "\n");
    return 0;
}

int runOracleCompare(const ExperimentConfig& cfg) {
    const Potential v1 = rayPotential(cfg);
    std::string csv = "h,l2_error\n";
    std::vector<double> errs;
    for (double h : cfg.hs) {
        const EscapeTimes esc =
            escapeTimes(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), v1,
                        cfg.tol);
        const WavePacket um = rayPacket(esc.rhoMinus.x[0], h);
        const GridWavefunction ref = solve(
            sampleWavePacket(um, cfg.grid.L, cfg.grid.n), v1, esc.tPlus, cfg.dt);
        const GridWavefunction par = sampleWavePacket(
            propagate(um, esc.tPlus, v1, cfg.tol), cfg.grid.L, cfg.grid.n);
        const double err = (ref.values - par.values).norm() / ref.values.norm();
        errs.push_back(err);
        csv += formatDouble(h) + "," + formatDouble(err) + "\n";
    }
    writeAtomic(fs::path(cfg.outDir) / "oracle_compare.csv", csv);
    Json j = header(cfg, "oracle-compare");
    j.openArr("errors");
    for (double e : errs) {
        j.sep();
        j.s += formatDouble(e);
    }
    j.closeArr();
    j.openArr("consecutive_ratios");
    for (size_t i = 0; i + 1 < errs.size(); ++i) {
        j.sep();
        j.s += formatDouble(errs[i] / errs[i + 1]);
    }
    j.closeArr().close();
    writeAtomic(fs::path(cfg.outDir) / "oracle_compare.json", j.s + "\n");
    return 0;
}

int runEigenfun(const ExperimentConfig& cfg) {
    const Potential v1 = rayPotential(cfg);
    Json j = header(cfg, "eigenfun");
    j.openArr("runs");
    for (double h : cfg.hs) {
        const EscapeTimes esc =
            escapeTimes(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), v1,
                        cfg.tol, 2.0);
        const WavePacket um = rayPacket(esc.rhoMinus.x[0], h);
        TimeQuadSpec quad;
        quad.tol = cfg.tol;
        const EigenfunctionResult res =
            assembleGeneralizedEigenfunction(um, v1, cfg.grid, quad);
        std::vector<std::array<double, 3>> rows;
        for (int i = 0; i < res.efun.n; ++i)
            rows.push_back({res.efun.coord(i), res.efun.values[i].real(),
                            res.efun.values[i].imag()});
        writeAtomic(fs::path(cfg.outDir) /
                        ("eigenfun_h" + formatDouble(h) + ".csv"),
                    csvComplexRows("x,re,im", rows));
        j.open();
        j.put("h", h);
        j.put("residual", res.residual);
        j.put("t_forward", res.tForward);
        j.close();
    }
    j.closeArr().close();
    writeAtomic(fs::path(cfg.outDir) / "eigenfun.json", j.s + "\n");
    return 0;
}

std::string errorType(const Error& e) {
    int status = 0;
    char* dem = abi::__cxa_demangle(typeid(e).name(), nullptr, nullptr, &status);
    std::string name = (status == 0 && dem) ? dem : typeid(e).name();
    std::free(dem);
    const size_t pos = name.rfind("::");
    if (pos != std::string::npos) name = name.substr(pos + 2);
    return name;
}

void reportError(const std::string& type, const std::string& msg) {
    std::fprintf(stderr, "{\"error\": {\"type\": \"%s\", \"message\": \"%s\"}}\n",
                 type.c_str(), msg.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiclassical scattering experiment runner"};
    app.set_help_flag("--help", "print usage");
    app.require_subcommand(1);
    app.fallthrough();

    std::string configPath, outDir;
    std::vector<double> hOverride;
    int gridOverride = -1, dimOverride = -1;
    long seedOverride = -1;

    app.add_option("--config", configPath, "TOML experiment config");
    app.add_option("--out", outDir, "output directory (overrides config)");
    app.add_option("--h", hOverride, "semiclassical parameter (repeatable)");
    app.add_option("--grid", gridOverride, "sphere/sweep grid size");
    app.add_option("--dim", dimOverride, "dimension")
        ->check(CLI::IsMember({2, 3}));
    app.add_option("--seed", seedOverride, "seed for randomized sweeps");

    struct Sub {
        const char* name;
        const char* desc;
        int (*run)(const ExperimentConfig&);
    };
    const Sub subs[] = {
        {"smatrix", "apply the scattering matrix to the configured state",
         runSmatrix},
        {"scatmap", "classical scattering-map sweep over impact parameters",
         runScatmap},
        {"propagate", "semiclassical packet propagation through the potential",
         runPropagate},
        {"farfield", "radiation profiles of the scattered packet", runFarfield},
        {"resolve", "resolution-of-identity constant and reconstruction",
         runResolve},
        {"oracle-compare", "parametrix vs grid-solver L2 errors per h",
         runOracleCompare},
        {"eigenfun", "generalized eigenfunction assembly and residual",
         runEigenfun},
    };
    for (const Sub& s : subs) app.add_subcommand(s.name, s.desc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        reportError("UsageError", e.what());
        return 2;
    }

    try {
        ExperimentConfig cfg =
            configPath.empty() ? defaultConfig() : loadConfig(configPath);
        if (dimOverride > 0) {
            cfg.dim = dimOverride;
            cfg.x0.resize(0);  // re-derive dimension-dependent defaults
            cfg.xi0.resize(0);
            cfg.gamma0.resize(0, 0);
            cfg.q0Terms.clear();
        }
        if (!hOverride.empty()) cfg.hs = hOverride;
        if (gridOverride > 0) cfg.sphereGrid = gridOverride;
        if (seedOverride >= 0) cfg.seed = static_cast<unsigned>(seedOverride);
        if (!outDir.empty()) cfg.outDir = outDir;
        cfg.finalize();
        fs::create_directories(cfg.outDir);

        for (const Sub& s : subs)
            if (app.got_subcommand(s.name)) return s.run(cfg);
        reportError("UsageError", "missing subcommand");
        return 2;
    } catch (const ConfigError& e) {
        reportError("ConfigError", e.what());
        return 2;
    } catch (const Error& e) {
        reportError(errorType(e), e.what());
        return 3;
    }
}
