#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "mfg/errors.hpp"
#include "mfg/scenario_io.hpp"

using namespace mfg;

namespace {

std::string errorOf(const std::string& text) {
    try {
        parseScenario(text, "test.cfg");
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(ScenarioIO, EmptyTextIsTheDefaultScenario) {
    EXPECT_TRUE(sameScenario(parseScenario(""), defaultScenario()));
    EXPECT_TRUE(sameScenario(parseScenario("base = decoupled\n"), decoupledScenario()));
}

TEST(ScenarioIO, FormatRoundTripsExactly) {
    Scenario s = defaultScenario();
    s.T = 0.1 + 0.2;  // not exactly representable in short decimal form
    s.G.kappa.sinCoef = {0.0, -0.125, 1.0 / 3.0};
    s.grid = TorusGrid(48);
    const auto back = parseScenario(formatScenario(s));
    EXPECT_TRUE(sameScenario(s, back));
    EXPECT_EQ(back.T, s.T);
    EXPECT_EQ(back.G.kappa.sinCoef, s.G.kappa.sinCoef);
    EXPECT_EQ(back.grid.cells(), 48u);
}

TEST(ScenarioIO, OverridesCommentsAndLists) {
    const auto s = parseScenario(
        "# comment\n"
        "base = default\n"
        "T = 0.2   # trailing comment\n"
        "grid.cells = 48\n"
        "H.chi.cos = 0, 0.5, 0.25\n"
        "G.kappa.sin = none\n"
        "\n");
    EXPECT_DOUBLE_EQ(s.T, 0.2);
    EXPECT_EQ(s.grid.cells(), 48u);
    EXPECT_EQ(s.H.chi.cosCoef, (std::vector<double>{0.0, 0.5, 0.25}));
    EXPECT_TRUE(s.G.kappa.sinCoef.empty());
}

TEST(ScenarioIO, ErrorsNameTheLineAndKey) {
    EXPECT_NE(errorOf("T = 0.2\nbogus.key = 1\n").find("test.cfg:2"), std::string::npos);
    EXPECT_NE(errorOf("bogus.key = 1\n").find("bogus.key"), std::string::npos);
    EXPECT_NE(errorOf("T = abc\n").find("'T'"), std::string::npos);
    EXPECT_FALSE(errorOf("T = 0.2\nT = 0.3\n").empty());
    EXPECT_FALSE(errorOf("no equals sign\n").empty());
    EXPECT_FALSE(errorOf("base = unknown\n").empty());
    EXPECT_FALSE(errorOf("H.tag = cubic\n").empty());
    EXPECT_FALSE(errorOf("a0 = 0.1*cos(x)\n").empty());
}

TEST(ScenarioIO, AssumptionViolationsAreRejected) {
    EXPECT_FALSE(errorOf("a.base = 0.1\na.amp = 0.2\n").empty());
    EXPECT_FALSE(errorOf("H.q0 = 0.1\nH.q1 = 0.5\n").empty());
    EXPECT_FALSE(errorOf("grid.cells = 4\n").empty());
    EXPECT_FALSE(errorOf("T = -1\n").empty());
}

TEST(ScenarioIO, ShippedScenariosLoad) {
    const std::filesystem::path dir(MFGSPLIT_SCENARIO_DIR);
    EXPECT_TRUE(sameScenario(loadScenario((dir / "default.cfg").string()), defaultScenario()));
    EXPECT_TRUE(sameScenario(loadScenario((dir / "decoupled.cfg").string()), decoupledScenario()));
    const auto study = loadScenario((dir / "splitting-study.cfg").string());
    EXPECT_EQ(study.grid.cells(), 48u);
    EXPECT_DOUBLE_EQ(study.T, 0.2);
    EXPECT_THROW(loadScenario((dir / "missing.cfg").string()), ScenarioError);
}

TEST(ScenarioIO, SaveThenLoad) {
    const auto path = std::filesystem::temp_directory_path() / "mfgsplit_scenario_io_test.cfg";
    Scenario s = decoupledScenario();
    s.name = "saved";
    s.x0grid = TorusGrid(24);
    saveScenario(s, path.string());
    EXPECT_TRUE(sameScenario(loadScenario(path.string()), s));
    std::filesystem::remove(path);
}
