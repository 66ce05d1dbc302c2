#include "wgmfem/checks.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wgmfem;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

} // namespace

TEST(Config, JsonRoundTrip)
{
    ExperimentConfig c;
    c.example = "custom";
    c.k = 2;
    c.kappa = {1e3, 1.0};
    c.levels = {4, 8};
    c.correction = false;
    c.quad_bump = 1;
    c.seed = 99;
    c.taylor = TaylorMode::Explicit;
    c.domain = Box{0.0, 2.0, -1.0, 1.0};
    c.curve = InterfaceCurve::circle(Point(1.0, 0.0), 0.4);
    c.mesh_type = "tri";
    const ExperimentConfig r = config_from_json(nlohmann::json::parse(to_json(c).dump()));
    EXPECT_TRUE(r == c);
    EXPECT_EQ(to_json(r), to_json(c));
}

TEST(Config, DefaultsFromEmptyObject)
{
    const ExperimentConfig c = config_from_json(nlohmann::json::object());
    EXPECT_TRUE(c == ExperimentConfig{});
}

TEST(Config, RejectsInvalid)
{
    auto bad = [](const char* text) { EXPECT_THROW(config_from_json(nlohmann::json::parse(text)), Error) << text; };
    bad(R"({"k": 4})");
    bad(R"({"kappa": [1, 0]})");
    bad(R"({"levels": []})");
    bad(R"({"levels": [16, 8]})");
    bad(R"({"example": "example3"})");
    bad(R"({"example": "custom"})");
    bad(R"({"taylor": "slow"})");
    bad(R"({"mesh": "hex"})");
    bad(R"({"k": "two"})");
    bad(R"({"example": "custom", "domain": [0, 1, 0, 1], "curve": {"kind": "spline"}})");
}

TEST(Config, CurveJson)
{
    for (const auto& c : {InterfaceCurve::circle(Point(0.1, 0.2), 0.3), InterfaceCurve::graph(0.05, 3.0),
                          InterfaceCurve::segment(Point(0, 0), Point(1, 1))}) {
        const auto r = curve_from_json(curve_to_json(c));
        EXPECT_EQ(curve_to_json(r), curve_to_json(c));
    }
}

TEST(Levels, Order3CappedUnlessDeep)
{
    ExperimentConfig c;
    c.k = 3;
    c.levels = {8, 16, 32, 64};
    std::vector<std::string> notes;
    EXPECT_EQ(effective_levels(c, &notes), (std::vector<int>{8, 16, 32}));
    ASSERT_EQ(notes.size(), 1u);
    EXPECT_NE(notes[0].find("64"), std::string::npos);
    c.deep = true;
    notes.clear();
    EXPECT_EQ(effective_levels(c, &notes), c.levels);
    EXPECT_TRUE(notes.empty());
    c.k = 2;
    c.deep = false;
    EXPECT_EQ(effective_levels(c), c.levels);
}

TEST(Run, CsvIsDeterministic)
{
    ExperimentConfig c;
    c.example = "example1";
    c.k = 1;
    c.levels = {4, 8};
    const std::string a = temp_path("wgmfem_run_a.csv"), b = temp_path("wgmfem_run_b.csv");
    c.output = a;
    const ExperimentResult ra = run_experiment(c);
    c.output = b;
    run_experiment(c);
    const std::string text = slurp(a);
    EXPECT_EQ(text, slurp(b));
    EXPECT_EQ(text.substr(0, text.find('\n')), "h,e_u,order_u,e_p,order_p");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
    ASSERT_EQ(ra.levels.size(), 2u);
    for (const auto& l : ra.levels) {
        EXPECT_LT(l.report.residual, 1e-10);
        EXPECT_LT(std::abs(l.p_integral), 1e-10);
    }
    EXPECT_GT(ra.levels[0].e_u, ra.levels[1].e_u);
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}

TEST(Run, PatchIsExact)
{
    ExperimentConfig c;
    c.example = "patch";
    c.k = 2;
    c.levels = {4, 6};
    std::ostringstream log;
    const ExperimentResult r = run_experiment(c, {&log});
    for (const auto& l : r.levels)
        EXPECT_LT(l.e_u + l.e_p, 1e-9);
    EXPECT_NE(log.str().find("level 6"), std::string::npos);
}

TEST(Run, PerturbedMeshIsReproducible)
{
    ExperimentConfig c;
    c.example = "example2";
    c.k = 1;
    c.levels = {8};
    c.seed = 5;
    const auto a = run_experiment(c), b = run_experiment(c);
    EXPECT_EQ(a.levels[0].e_u, b.levels[0].e_u);
    c.seed.reset();
    EXPECT_NE(run_experiment(c).levels[0].e_u, a.levels[0].e_u);
}

TEST(Run, FailureNamesTheLevel)
{
    ExperimentConfig c;
    c.example = "example1";
    c.levels = {4};
    c.mesh_type = "quad"; // the quadrilateral generator needs a graph interface
    try {
        run_experiment(c);
        FAIL() << "expected an ExperimentError";
    } catch (const ExperimentError& e) {
        EXPECT_EQ(e.level(), 4);
        EXPECT_NE(std::string(e.what()).find("level 4"), std::string::npos);
    }
}

TEST(Selfcheck, AllPass)
{
    const auto a = selfcheck();
    ASSERT_GE(a.size(), 5u);
    for (const auto& r : a)
        EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
    const auto b = selfcheck();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].name, b[i].name);
        EXPECT_EQ(a[i].detail, b[i].detail);
    }
}

TEST(Selfcheck, DisabledPullbackIsCaught)
{
    SelfcheckOptions o;
    o.disable_pullback = true;
    for (const auto& r : selfcheck(o)) {
        if (r.name == "taylor trick equivalence")
            EXPECT_FALSE(r.passed) << r.detail;
        else
            EXPECT_TRUE(r.passed) << r.name;
    }
}
