#include "scat/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace scat {

std::string formatDouble(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

struct Value {
    enum Kind { kNum, kStr, kArr } kind = kNum;
    double num = 0.0;
    std::string str;
    std::vector<Value> arr;
};

// Strip a trailing comment (a '#' outside a quoted string).
std::string stripComment(const std::string& s) {
    bool quoted = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        else if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

Value parseValue(const std::string& s, size_t& pos, int line);

Value parseArray(const std::string& s, size_t& pos, int line) {
    Value v;
    v.kind = Value::kArr;
    ++pos;  // consume '['
    for (;;) {
        while (pos < s.size() && std::isspace(s[pos])) ++pos;
        if (pos >= s.size()) fail(line, "unterminated array");
        if (s[pos] == ']') { ++pos; return v; }
        v.arr.push_back(parseValue(s, pos, line));
        while (pos < s.size() && std::isspace(s[pos])) ++pos;
        if (pos < s.size() && s[pos] == ',') ++pos;
    }
}

Value parseValue(const std::string& s, size_t& pos, int line) {
    while (pos < s.size() && std::isspace(s[pos])) ++pos;
    if (pos >= s.size()) fail(line, "missing value");
    if (s[pos] == '[') return parseArray(s, pos, line);
    Value v;
    if (s[pos] == '"') {
        v.kind = Value::kStr;
        ++pos;
        while (pos < s.size() && s[pos] != '"') v.str += s[pos++];
        if (pos >= s.size()) fail(line, "unterminated string");
        ++pos;
        return v;
    }
    size_t end = pos;
    while (end < s.size() && !std::isspace(s[end]) && s[end] != ',' &&
           s[end] != ']')
        ++end;
    const std::string tok = s.substr(pos, end - pos);
    char* rest = nullptr;
    v.num = std::strtod(tok.c_str(), &rest);
    if (rest == tok.c_str() || *rest != '\0')
        fail(line, "cannot parse number '" + tok + "'");
    if (!std::isfinite(v.num)) fail(line, "non-finite number '" + tok + "'");
    pos = end;
    return v;
}

double asNum(const Value& v, const std::string& key, int line) {
    if (v.kind != Value::kNum) fail(line, key + ": expected a number");
    return v.num;
}

int asInt(const Value& v, const std::string& key, int line) {
    const double d = asNum(v, key, line);
    if (d != std::floor(d)) fail(line, key + ": expected an integer");
    return static_cast<int>(d);
}

Eigen::VectorXd asVector(const Value& v, const std::string& key, int line) {
    if (v.kind != Value::kArr) fail(line, key + ": expected an array");
    Eigen::VectorXd out(v.arr.size());
    for (size_t i = 0; i < v.arr.size(); ++i)
        out[static_cast<int>(i)] = asNum(v.arr[i], key, line);
    return out;
}

Eigen::MatrixXd asMatrix(const Value& v, const std::string& key, int line) {
    if (v.kind != Value::kArr || v.arr.empty())
        fail(line, key + ": expected a nested array");
    const int rows = static_cast<int>(v.arr.size());
    Eigen::MatrixXd out;
    for (int i = 0; i < rows; ++i) {
        const Eigen::VectorXd row = asVector(v.arr[i], key, line);
        if (i == 0) out.resize(rows, row.size());
        if (row.size() != out.cols()) fail(line, key + ": ragged rows");
        out.row(i) = row;
    }
    return out;
}

std::string vecToml(const Eigen::VectorXd& v) {
    std::string s = "[";
    for (int i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += formatDouble(v[i]);
    }
    return s + "]";
}

std::string matToml(const Eigen::MatrixXd& m) {
    std::string s = "[";
    for (int i = 0; i < m.rows(); ++i) {
        if (i) s += ", ";
        s += vecToml(m.row(i));
    }
    return s + "]";
}

}  // namespace

void ExperimentConfig::finalize() {
    if (dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
    if (x0.size() == 0) x0 = Eigen::VectorXd::Zero(dim);
    if (xi0.size() == 0) xi0 = Eigen::VectorXd::Unit(dim, 0);
    if (gamma0.size() == 0) gamma0 = Eigen::MatrixXcd::Identity(dim, dim);
    if (q0Terms.empty()) q0Terms.push_back({std::vector<int>(dim, 0), 1.0});

    if (x0.size() != dim || xi0.size() != dim)
        throw ConfigError("x0/xi0 dimension mismatch");
    if (gamma0.rows() != dim || gamma0.cols() != dim)
        throw ConfigError("gamma0 must be dim x dim");
    if ((gamma0 - gamma0.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ConfigError("gamma0 must be symmetric");
    if (!x0.allFinite() || !xi0.allFinite() || !gamma0.allFinite())
        throw ConfigError("non-finite state entry");
    if (hs.empty()) throw ConfigError("h list is empty");
    for (double h : hs)
        if (!(h > 0.0) || !std::isfinite(h))
            throw ConfigError("h values must be positive and finite");
    for (const Bump& b : bumps) {
        if (b.center.size() != dim)
            throw ConfigError("bump center dimension mismatch");
        if (!(b.radius > 0.0)) throw ConfigError("bump radius must be > 0");
        if (!std::isfinite(b.amplitude) || !b.center.allFinite())
            throw ConfigError("non-finite bump entry");
    }
    for (const auto& [alpha, c] : q0Terms) {
        if (static_cast<int>(alpha.size()) != dim)
            throw ConfigError("q0 exponents dimension mismatch");
        for (int e : alpha)
            if (e < 0) throw ConfigError("q0 exponents must be >= 0");
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw ConfigError("non-finite q0 coefficient");
    }
    if (!(tol > 0.0) || !(dt > 0.0) || !(truncationX > 0.0))
        throw ConfigError("tolerances must be positive");
    if (!(grid.L > 0.0) || grid.n < 16)
        throw ConfigError("grid: box must be > 0 and points >= 16");
    if (sphereGrid < 8) throw ConfigError("sphere_grid must be >= 8");
}

Potential ExperimentConfig::potential() const { return Potential(dim, bumps); }

MultiPoly ExperimentConfig::q0() const {
    MultiPoly p(dim);
    for (const auto& [alpha, c] : q0Terms) p.addCoeff(alpha, c);
    return p;
}

SphereGaussianState ExperimentConfig::state(double h) const {
    return {x0, xi0, ComplexSymMatrix(gamma0), q0(), h};
}

std::string ExperimentConfig::serialize() const {
    std::string s;
    s += "dim = " + std::to_string(dim) + "\n";
    s += "h = [";
    for (size_t i = 0; i < hs.size(); ++i)
        s += (i ? ", " : "") + formatDouble(hs[i]);
    s += "]\n";
    s += "seed = " + std::to_string(seed) + "\n";
    s += "sphere_grid = " + std::to_string(sphereGrid) + "\n";
    s += "out_dir = \"" + outDir + "\"\n";
    s += "\n[tolerances]\n";
    s += "flow = " + formatDouble(tol) + "\n";
    s += "dt = " + formatDouble(dt) + "\n";
    s += "truncation_x = " + formatDouble(truncationX) + "\n";
    s += "\n[grid]\n";
    s += "box = " + formatDouble(grid.L) + "\n";
    s += "points = " + std::to_string(grid.n) + "\n";
    s += "\n[state]\n";
    s += "x0 = " + vecToml(x0) + "\n";
    s += "xi0 = " + vecToml(xi0) + "\n";
    s += "gamma0_re = " + matToml(gamma0.real()) + "\n";
    s += "gamma0_im = " + matToml(gamma0.imag()) + "\n";
    for (const Bump& b : bumps) {
        s += "\n[[potential.bump]]\n";
        s += "center = " + vecToml(b.center) + "\n";
        s += "radius = " + formatDouble(b.radius) + "\n";
        s += "amplitude = " + formatDouble(b.amplitude) + "\n";
    }
    for (const auto& [alpha, c] : q0Terms) {
        s += "\n[[q0]]\n";
        s += "exponents = [";
        for (size_t i = 0; i < alpha.size(); ++i)
            s += (i ? ", " : "") + std::to_string(alpha[i]);
        s += "]\n";
        s += "coeff = [" + formatDouble(c.real()) + ", " +
             formatDouble(c.imag()) + "]\n";
    }
    return s;
}

std::string ExperimentConfig::hash() const {
    const std::string s = serialize();
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig defaultConfig() {
    ExperimentConfig c;
    c.finalize();
    return c;
}

ExperimentConfig parseConfig(const std::string& text, ExperimentConfig base) {
    ExperimentConfig c = std::move(base);
    std::string section;       // "", "tolerances", "grid", "state"
    bool sawBump = false, sawQ0 = false;
    std::istringstream in(text);
    std::string raw;
    int lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        const std::string line = trim(stripComment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.rfind("[[", 0) == 0) {
                if (line == "[[potential.bump]]") {
                    if (!sawBump) c.bumps.clear();  // document replaces base
                    sawBump = true;
                    c.bumps.push_back({});
                    section = "bump";
                } else if (line == "[[q0]]") {
                    if (!sawQ0) c.q0Terms.clear();
                    sawQ0 = true;
                    c.q0Terms.push_back({{}, 0.0});
                    section = "q0";
                } else {
                    fail(lineNo, "unknown table array " + line);
                }
            } else if (line == "[tolerances]" || line == "[grid]" ||
                       line == "[state]") {
                section = line.substr(1, line.size() - 2);
            } else {
                fail(lineNo, "unknown section " + line);
            }
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) fail(lineNo, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        size_t pos = 0;
        const std::string rhs = trim(line.substr(eq + 1));
        const Value v = parseValue(rhs, pos, lineNo);
        if (trim(rhs.substr(pos)) != "")
            fail(lineNo, "trailing characters after value");

        if (section.empty()) {
            if (key == "dim") c.dim = asInt(v, key, lineNo);
            else if (key == "h") {
                c.hs.clear();
                if (v.kind == Value::kArr)
                    for (const Value& e : v.arr)
                        c.hs.push_back(asNum(e, key, lineNo));
                else c.hs.push_back(asNum(v, key, lineNo));
            } else if (key == "seed")
                c.seed = static_cast<unsigned>(asInt(v, key, lineNo));
            else if (key == "sphere_grid") c.sphereGrid = asInt(v, key, lineNo);
            else if (key == "out_dir") {
                if (v.kind != Value::kStr) fail(lineNo, "out_dir: expected a string");
                c.outDir = v.str;
            } else fail(lineNo, "unknown key " + key);
        } else if (section == "tolerances") {
            if (key == "flow") c.tol = asNum(v, key, lineNo);
            else if (key == "dt") c.dt = asNum(v, key, lineNo);
            else if (key == "truncation_x") c.truncationX = asNum(v, key, lineNo);
            else fail(lineNo, "unknown key tolerances." + key);
        } else if (section == "grid") {
            if (key == "box") c.grid.L = asNum(v, key, lineNo);
            else if (key == "points") c.grid.n = asInt(v, key, lineNo);
            else fail(lineNo, "unknown key grid." + key);
        } else if (section == "state") {
            if (key == "x0") c.x0 = asVector(v, key, lineNo);
            else if (key == "xi0") c.xi0 = asVector(v, key, lineNo);
            else if (key == "gamma0_re" || key == "gamma0_im") {
                const Eigen::MatrixXd m = asMatrix(v, key, lineNo);
                if (c.gamma0.rows() != m.rows() || c.gamma0.cols() != m.cols()) {
                    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
                    if (c.gamma0.size() != 0 &&
                        c.gamma0.rows() <= m.rows())
                        g.topLeftCorner(c.gamma0.rows(), c.gamma0.cols()) =
                            c.gamma0;
                    c.gamma0 = g;
                }
                if (key == "gamma0_re")
                    c.gamma0.real() = m;
                else
                    c.gamma0.imag() = m;
            } else fail(lineNo, "unknown key state." + key);
        } else if (section == "bump") {
            Bump& b = c.bumps.back();
            if (key == "center") b.center = asVector(v, key, lineNo);
            else if (key == "radius") b.radius = asNum(v, key, lineNo);
            else if (key == "amplitude") b.amplitude = asNum(v, key, lineNo);
            else fail(lineNo, "unknown key potential.bump." + key);
        } else if (section == "q0") {
            auto& [alpha, coeff] = c.q0Terms.back();
            if (key == "exponents") {
                if (v.kind != Value::kArr) fail(lineNo, "exponents: expected array");
                alpha.clear();
                for (const Value& e : v.arr)
                    alpha.push_back(asInt(e, key, lineNo));
            } else if (key == "coeff") {
                if (v.kind == Value::kArr) {
                    if (v.arr.size() != 2) fail(lineNo, "coeff: expected [re, im]");
                    coeff = Complex(asNum(v.arr[0], key, lineNo),
                                    asNum(v.arr[1], key, lineNo));
                } else {
                    coeff = asNum(v, key, lineNo);
                }
            } else fail(lineNo, "unknown key q0." + key);
        }
    }
    c.finalize();
    return c;
}

ExperimentConfig loadConfig(const std::string& path) {
    ExperimentConfig base = defaultConfig();
    if (const char* alt = std::getenv("GS_DEFAULTS")) {
        std::ifstream f(alt);
        if (!f) throw ConfigError(std::string("cannot open GS_DEFAULTS file ") + alt);
        std::stringstream ss;
        ss << f.rdbuf();
        base = parseConfig(ss.str(), std::move(base));
    }
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parseConfig(ss.str(), std::move(base));
}

}  // namespace scat
