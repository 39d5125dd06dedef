#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "scat/config.hpp"

using namespace scat;

namespace {

const char* kSample = R"(# two-bump experiment
dim = 2
h = [0.1, 0.05]
seed = 7
sphere_grid = 128
out_dir = "runs"

[tolerances]
flow = 1e-11
dt = 5e-4
truncation_x = 25.0

[grid]
box = 60.0
points = 8192

[state]
x0 = [0.5, -0.25]
xi0 = [0.0, 1.0]
gamma0_re = [[1.2, 0.1], [0.1, 0.9]]
gamma0_im = [[0.3, 0.0], [0.0, 0.2]]

[[potential.bump]]
center = [0.0, 0.0]
radius = 1.0
amplitude = 0.3

[[potential.bump]]
center = [2.5, 0.0]   # off-axis
radius = 0.5
amplitude = -0.1

[[q0]]
exponents = [0, 0]
coeff = [1.0, 0.0]

[[q0]]
exponents = [1, 0]
coeff = [0.3, 0.1]
)";

}  // namespace

TEST_CASE("config defaults are valid and hash is stable within a run") {
    const ExperimentConfig c = defaultConfig();
    CHECK(c.dim == 2);
    CHECK(c.hs == std::vector<double>{0.1});
    CHECK(c.x0.size() == 2);
    CHECK(c.xi0[0] == 1.0);
    CHECK(c.q0().degree() == 0);
    CHECK(c.hash() == defaultConfig().hash());
    CHECK(c.hash().size() == 16);
}

TEST_CASE("config parses the full schema") {
    const ExperimentConfig c = parseConfig(kSample, defaultConfig());
    CHECK(c.dim == 2);
    CHECK(c.hs == std::vector<double>{0.1, 0.05});
    CHECK(c.seed == 7);
    CHECK(c.sphereGrid == 128);
    CHECK(c.outDir == "runs");
    CHECK(c.tol == 1e-11);
    CHECK(c.dt == 5e-4);
    CHECK(c.truncationX == 25.0);
    CHECK(c.grid.L == 60.0);
    CHECK(c.grid.n == 8192);
    CHECK(c.x0[1] == -0.25);
    CHECK(c.gamma0(0, 0) == Complex(1.2, 0.3));
    CHECK(c.gamma0(1, 1) == Complex(0.9, 0.2));
    REQUIRE(c.bumps.size() == 2);
    CHECK(c.bumps[1].center[0] == 2.5);
    CHECK(c.bumps[1].amplitude == -0.1);
    CHECK(c.q0().coeff({1, 0}) == Complex(0.3, 0.1));
    CHECK(c.potential().supportRadius() == doctest::Approx(3.0));
}

TEST_CASE("config round-trips through serialization identically") {
    const ExperimentConfig c = parseConfig(kSample, defaultConfig());
    const std::string s = c.serialize();
    const ExperimentConfig c2 = parseConfig(s, defaultConfig());
    CHECK(c2.serialize() == s);
    CHECK(c2.hash() == c.hash());
}

TEST_CASE("config hash is sensitive to every physical field") {
    const ExperimentConfig base = parseConfig(kSample, defaultConfig());
    ExperimentConfig m = base;
    m.hs[0] = 0.2;
    CHECK(m.hash() != base.hash());
    m = base;
    m.bumps[0].amplitude += 1e-9;
    CHECK(m.hash() != base.hash());
    m = base;
    m.x0[0] += 1e-12;
    CHECK(m.hash() != base.hash());
}

TEST_CASE("config validation errors") {
    CHECK_THROWS_AS(parseConfig("dim = 4\n", defaultConfig()), ConfigError);
    CHECK_THROWS_AS(parseConfig("h = [-0.1]\n", defaultConfig()), ConfigError);
    CHECK_THROWS_AS(parseConfig("h = [nan]\n", defaultConfig()), ConfigError);
    CHECK_THROWS_AS(parseConfig("junk\n", defaultConfig()), ConfigError);
    CHECK_THROWS_AS(parseConfig("mystery = 1\n", defaultConfig()),
                    ConfigError);
    CHECK_THROWS_AS(parseConfig("[mystery]\nx = 1\n", defaultConfig()),
                    ConfigError);
    CHECK_THROWS_AS(
        parseConfig("[state]\nx0 = [1, 2, 3]\n", defaultConfig()),
        ConfigError);
    CHECK_THROWS_AS(
        parseConfig("[state]\ngamma0_re = [[1, 0], [1, 1]]\n",
                    defaultConfig()),
        ConfigError);
    CHECK_THROWS_AS(
        parseConfig("[[q0]]\nexponents = [-1, 0]\ncoeff = 1.0\n",
                    defaultConfig()),
        ConfigError);
}

TEST_CASE("config document replaces, not appends, inherited bump tables") {
    const ExperimentConfig base = parseConfig(kSample, defaultConfig());
    const ExperimentConfig c = parseConfig(
        "[[potential.bump]]\ncenter = [0, 0]\nradius = 2.0\namplitude = 0.1\n",
        base);
    REQUIRE(c.bumps.size() == 1);
    CHECK(c.bumps[0].radius == 2.0);
    CHECK(c.hs == base.hs);  // untouched keys are inherited
}

TEST_CASE("GS_DEFAULTS layers between built-ins and the config file") {
    const std::string defPath = "/tmp/scat_test_defaults.toml";
    const std::string cfgPath = "/tmp/scat_test_config.toml";
    {
        std::ofstream d(defPath);
        d << "seed = 42\nsphere_grid = 256\n";
        std::ofstream c(cfgPath);
        c << "sphere_grid = 32\n";
    }
    setenv("GS_DEFAULTS", defPath.c_str(), 1);
    const ExperimentConfig c = loadConfig(cfgPath);
    unsetenv("GS_DEFAULTS");
    CHECK(c.seed == 42);        // from alternate defaults
    CHECK(c.sphereGrid == 32);  // config file wins
    CHECK(c.dim == 2);          // built-in default survives
}
