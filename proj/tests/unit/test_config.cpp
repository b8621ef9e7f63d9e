#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "vep/config.hpp"

namespace vep {
namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

TEST(Config, DefaultsAreValid) {
    EXPECT_NO_THROW(default_config().validate());
    EXPECT_NO_THROW(parse_config(""));
}

TEST(Config, CanonicalFormRoundTrips) {
    RunConfig c = default_config();
    c.grid = Grid::make(2, {24, 16, 1}, {6.0, 4.0, 1.0});
    c.material.gamma = 0.1 / 3.0;
    c.verify.triple.box = {0.5, 5.5, 0.5, 3.5};
    c.forcing = {"shear", 0.25, 1.5};
    c.gammas = {0.5, 0.0};
    const std::string text = canonical_config(c);
    const RunConfig back = parse_config(text);
    EXPECT_EQ(canonical_config(back), text);
    EXPECT_EQ(config_hash(back), config_hash(c));
    EXPECT_EQ(back.material.gamma, c.material.gamma);
    EXPECT_EQ(back.grid, c.grid);
}

TEST(Config, HashIgnoresOutputDirectoryButNotPhysics) {
    RunConfig a = default_config(), b = a;
    b.output.dir = "elsewhere";
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.material.gamma *= 2.0;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, ParsesSectionsCommentsAndPairs) {
    const RunConfig c = parse_config(
        "# comment\n[grid]\nn = 16 8\nlength = 4 2   # trailing\n[material]\nnu = 1 3\ngamma = 0.5\n"
        "[time]\nsteps = 3\n[verify]\nbox = 0.5 3.5 0.5 1.5\n");
    EXPECT_EQ(c.grid.n[0], 16);
    EXPECT_EQ(c.grid.n[1], 8);
    EXPECT_EQ(c.grid.length[1], 2.0);
    EXPECT_EQ(c.material.nu.phase2, 3.0);
    EXPECT_EQ(c.material.gamma, 0.5);
    EXPECT_EQ(c.steps, 3);
    EXPECT_DOUBLE_EQ(c.verify.triple.t_support, c.h * 3);
}

TEST(Config, MalformedInputNamesKeyOrLine) {
    EXPECT_NE(error_of("[grid]\nfoo = 1\n").find("grid.foo"), std::string::npos);
    EXPECT_NE(error_of("[grid]\nn = 8\nn = 9\n").find("duplicate"), std::string::npos);
    EXPECT_NE(error_of("[grid\n").find("line 1"), std::string::npos);
    EXPECT_NE(error_of("[time]\nh = abc\n").find("time.h"), std::string::npos);
    EXPECT_NE(error_of("[time]\nsteps\n").find("line 2"), std::string::npos);
    EXPECT_THROW(parse_config("[initial]\nscenario = vortex\n"), ConfigError);
}

TEST(Config, AssumptionViolationsAreNamed) {
    try {
        parse_config("[initial]\nmean = 1\n");
        FAIL() << "mean 1 accepted";
    } catch (const AssumptionViolation& e) {
        EXPECT_NE(std::string(e.what()).find("admissible initial data"), std::string::npos);
    }
    try {
        parse_config("[material]\nnu = 0 1\n");
        FAIL() << "nu = 0 accepted";
    } catch (const AssumptionViolation& e) {
        EXPECT_NE(std::string(e.what()).find("coefficient bounds"), std::string::npos);
    }
    EXPECT_THROW(parse_config("[sweep]\ngammas = 0.1 -1\n"), AssumptionViolation);
}

TEST(Config, VerificationConstraints) {
    EXPECT_THROW(parse_config("[material]\nepsilon = 0.5\n"), ConfigError);
    EXPECT_NO_THROW(parse_config("[material]\nepsilon = 0.5\n[verify]\nenabled = false\n"));
    EXPECT_THROW(parse_config("[verify]\nbox = 0 9 1 2\n"), ConfigError);
    EXPECT_NO_THROW(parse_config("[grid]\ndim = 3\nn = 6\nlength = 1\n[verify]\nenabled = false\n"));
    EXPECT_THROW(parse_config("[grid]\ndim = 3\nn = 6\nlength = 1\n"), ConfigError);
}

TEST(Config, LoadFromFile) {
    const auto path = std::filesystem::temp_directory_path() / "vep_config_test.cfg";
    std::ofstream(path) << "[time]\nsteps = 7\n";
    EXPECT_EQ(load_config(path.string()).steps, 7);
    std::filesystem::remove(path);
    EXPECT_THROW(load_config(path.string()), ConfigError);
}

TEST(Config, ShearForcingIsStepAveraged) {
    const Grid g = Grid::square(8, 2.0);
    EXPECT_FALSE(make_forcing({"none", 1.0, 1.0}));
    const Forcing f = make_forcing({"shear", 2.0, 3.0});
    ASSERT_TRUE(f);
    const VectorField a = f(g, 0.1, 0.3);
    const double avg = (std::sin(3.0 * 0.3) - std::sin(3.0 * 0.1)) / (3.0 * 0.2);
    double peak = 0.0;
    for (double x : a.c[0]) peak = std::max(peak, std::abs(x));
    EXPECT_NEAR(peak, 2.0 * std::abs(avg) * std::sin(std::numbers::pi * 7.0 / 16.0), 1e-14);
    for (double x : a.c[1]) EXPECT_EQ(x, 0.0);
}

}  // namespace
}  // namespace vep
