#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scat/grid.hpp"
#include "scat/smatrix.hpp"

namespace scat {

/// Experiment description loaded from a TOML config file. All physical
/// defaults live in defaultConfig() (the documented defaults table); a user
/// config overrides individual keys. See README for the key reference.
struct ExperimentConfig {
    int dim = 2;
    std::vector<double> hs = {0.1};
    std::vector<Bump> bumps;

    Eigen::VectorXd x0;       // sized dim by finalize()
    Eigen::VectorXd xi0;      // unit vector along axis 0 by default
    Eigen::MatrixXcd gamma0;  // identity by default

    /// Q0 terms as (multi-index, coefficient); constant 1 by default.
    std::vector<std::pair<std::vector<int>, Complex>> q0Terms;

    double tol = 1e-10;       // flow / propagation tolerance
    double dt = 1e-3;         // solver step
    double truncationX = 20.0;
    GridSpec grid{40.0, 4096};
    int sphereGrid = 64;
    unsigned seed = 1;
    std::string outDir = ".";

    /// Fill dimension-dependent fields left unset and check invariants.
    /// Throws ConfigError on any violation.
    void finalize();

    Potential potential() const;
    MultiPoly q0() const;
    SphereGaussianState state(double h) const;

    /// Canonical TOML rendering (fixed key order, 17 significant digits).
    /// parse(serialize()) reproduces the same rendering byte for byte.
    std::string serialize() const;

    /// FNV-1a hash of the canonical rendering, as 16 hex digits.
    std::string hash() const;
};

/// The built-in defaults table, already finalized for d = 2.
ExperimentConfig defaultConfig();

/// Parse a TOML document (the subset documented in the README: scalar
/// key = value, [section] headers, [[array-of-table]] headers, strings,
/// numbers, and up to doubly nested numeric arrays) on top of `base`.
ExperimentConfig parseConfig(const std::string& text, ExperimentConfig base);

/// Load from file; honors the GS_DEFAULTS environment variable as an
/// alternate defaults table layered between the built-ins and the file.
ExperimentConfig loadConfig(const std::string& path);

/// %.17g rendering used by all serialized output.
std::string formatDouble(double v);

}  // namespace scat
