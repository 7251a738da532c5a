#include <doctest.h>

#include "pathdet/airy.hpp"
#include "pathdet/cli.hpp"
#include "pathdet/graph.hpp"
#include "pathdet/graph_io.hpp"
#include "pathdet/hermite.hpp"
#include "pathdet/opid.hpp"
#include "pathdet/opid_io.hpp"
#include "pathdet/report.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace pathdet;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / "pathdet_test_cli" / name;
    fs::create_directories(p.parent_path());
    return p;
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p);
    return {std::istreambuf_iterator<char>(f), {}};
}

std::vector<double> polyline_y(const std::string& svg)
{
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, std::regex("<polyline[^>]*points=\"([^\"]*)\"")));
    std::vector<double> ys;
    std::istringstream in(m[1].str());
    std::string pt;
    while (in >> pt) ys.push_back(std::stod(pt.substr(pt.find(',') + 1)));
    return ys;
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("gue symmetry case reports one half on both sides")
{
    const auto r = call({"gue", "--matrix-size", "1", "--times", "0", "--thresholds", "0"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["results"]["lhs"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(j["results"]["rhs"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(j["results"]["tolerance"].get<double>() == Defaults::gue_tolerance);
    CHECK(j["provenance"]["version"] == PATHDET_VERSION);
    CHECK(j["provenance"]["grid"]["nodes"] == Defaults::gue_nodes);
    CHECK(j["provenance"].contains("wall_clock_seconds"));
}

TEST_CASE("usage errors exit 1 with usage text")
{
    auto r = call({"gue", "--matrix-size", "1", "--times", "0", "--thresholds", "0", "--bogus"});
    CHECK(r.code == 1);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(call({}).code == 1);
    CHECK(call({"frobnicate"}).code == 1);
    r = call({"gue", "--matrix-size", "1", "--times", "0,1", "--thresholds", "0"});
    CHECK(r.code == 1);
    CHECK(r.err.find("one value per time") != std::string::npos);
    CHECK(call({"gue", "--matrix-size", "1", "--times", "1,0", "--thresholds", "0,0"}).code == 1);
    CHECK(call({"mc-gue", "--matrix-size", "1", "--times", "0", "--thresholds", "0", "--samples", "50"}).code == 1);
    CHECK(call({"airy2"}).code == 1);
    CHECK(call({"gue", "--help"}).code == 0);
}

TEST_CASE("suite --quick passes")
{
    const auto r = call({"suite", "--quick"});
    CHECK(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["pass"] == true);
    for (const auto& c : j["results"]["checks"]) {
        CAPTURE(c.dump());
        CHECK(c.contains("tolerance"));
        CHECK(c["pass"] == true);
    }
}

TEST_CASE("identity-check exit codes")
{
    auto g = commuting_family({4, 3, 5, {}, 2, true});
    const fs::path good = scratch("family_good.json");
    write(good, json{{"family", family_to_json(g.family)}, {"q", multipliers_to_json(g.q)}}.dump());
    CHECK(call({"identity-check", "--input", good.string()}).code == 0);

    g.family.K[1](0, 1) += 1e-2;
    const fs::path bad = scratch("family_bad.json");
    write(bad, json{{"family", family_to_json(g.family)}, {"q", multipliers_to_json(g.q)}}.dump());
    const auto r = call({"identity-check", "--input", bad.string()});
    CHECK(r.code == 2);
    CHECK(json::parse(r.out)["pass"] == false);

    const auto missing = call({"identity-check", "--input", "/nonexistent/family.json"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("/nonexistent/family.json") != std::string::npos);

    CHECK(call({"identity-check", "--seed", "9", "--steps", "4", "--dim", "6"}).code == 0);
}

TEST_CASE("lgv-verify on a document and on random instances")
{
    const fs::path doc = scratch("graph.json");
    write(doc, graph_document_to_json(document_from_instance(random_graph_instance(3))).dump());
    const auto r = call({"lgv-verify", "--input", doc.string()});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["results"]["lgv"]["equal"] == true);

    const fs::path broken = scratch("graph_broken.json");
    write(broken, R"({"layers": [[0],[0]], "edges": [[[0,0]]], "bogus": 1})");
    CHECK(call({"lgv-verify", "--input", broken.string()}).code == 1);

    const auto rnd = call({"lgv-verify", "--seed", "100", "--count", "4"});
    CHECK(rnd.code == 0);
    CHECK(json::parse(rnd.out)["results"]["instances"].size() == 4);
}

TEST_CASE("config file replaces flags and rejects unknown keys")
{
    const fs::path cfg = scratch("gue.json");
    write(cfg, R"({"command": "gue", "matrix-size": 2, "times": [0, 0.7], "thresholds": [1.5, -0.5], "nodes": 16})");
    const auto r = call({"--config", cfg.string()});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["inputs"]["nodes"] == 16);
    CHECK(j["inputs"]["thresholds"][1] == -0.5);

    const auto over = call({"gue", "--nodes", "12", "--config", cfg.string()});
    REQUIRE(over.code == 0);
    CHECK(json::parse(over.out)["inputs"]["nodes"] == 12);

    // the echoed inputs reproduce the numbers
    json echo = j["inputs"];
    echo["command"] = "gue";
    const fs::path again = scratch("gue_echo.json");
    write(again, echo.dump());
    const auto rerun = json::parse(call({"--config", again.string()}).out);
    CHECK(rerun["results"] == j["results"]);

    const fs::path unknown = scratch("unknown.json");
    write(unknown, R"({"command": "gue", "matrix-size": 1, "times": [0], "thresholds": [0], "colour": "red"})");
    const auto u = call({"--config", unknown.string()});
    CHECK(u.code == 1);
    CHECK(u.err.find("colour") != std::string::npos);

    const fs::path quick = scratch("suite.json");
    write(quick, R"({"command": "suite", "quick": true})");
    CHECK(call({"--config", quick.string()}).code == 0);
}

TEST_CASE("mc-gue is deterministic in the seed and reports a z-score")
{
    const std::vector<std::string> args = {"mc-gue", "--matrix-size", "2", "--times", "0,0.7", "--thresholds", "1,0.5",
                                           "--samples", "2000", "--seed", "17"};
    const auto a = call(args), b = call(args);
    REQUIRE(a.code != 1);
    auto ja = json::parse(a.out), jb = json::parse(b.out);
    CHECK(ja["results"] == jb["results"]);
    CHECK(ja["inputs"] == jb["inputs"]);
    for (const char* k : {"mean", "stderr", "determinant_reference", "z_score"}) CHECK(ja["results"].contains(k));
    CHECK(ja["provenance"]["seed"] == 17);
}

TEST_CASE("output directory from flag and environment")
{
    const fs::path dir = scratch("out_flag");
    fs::remove_all(dir);
    const auto r = call({"--output-dir", dir.string(), "gue", "--matrix-size", "1", "--times", "0", "--thresholds", "0"});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "gue.json"));

    const fs::path env = scratch("out_env");
    fs::remove_all(env);
    setenv(kOutputDirEnv, env.string().c_str(), 1);
    const auto e = call({"suite", "--quick"});
    unsetenv(kOutputDirEnv);
    CHECK(e.code == 0);
    CHECK(json::parse(slurp(env / "suite.json"))["pass"] == true);
}

TEST_CASE("airy2 reports identity, F2 and continuum values")
{
    const auto r = call({"airy2", "--times", "0", "--thresholds", "0", "--tw", "0", "--continuum", "0"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    const double f2 = j["results"]["tracy_widom"][0]["F2"].get<double>();
    CHECK(j["results"]["identity"]["lhs"].get<double>() == doctest::Approx(f2).epsilon(1e-8));
    CHECK(j["results"]["continuum"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("csv emission")
{
    CHECK(to_csv(Table{{"s", "F2"}, {}}) == "s,F2\r\n");
    Table t{{"name", "value"}, {{"plain", "1"}, {"a,b", "say \"hi\""}, {"two\nlines", "2"}}};
    CHECK(to_csv(t) == "name,value\r\nplain,1\r\n\"a,b\",\"say \"\"hi\"\"\"\r\n\"two\nlines\",2\r\n");
    Table ragged{{"a", "b"}, {{"1"}}};
    CHECK_THROWS_AS(to_csv(ragged), std::invalid_argument);

    Table nums{{"x"}, {}};
    nums.add_row({0.1});
    CHECK(std::stod(nums.rows[0][0]) == 0.1);

    const fs::path p = scratch("empty.csv");
    emit_csv(Table{{"s", "F2"}, {}}, p);
    CHECK(slurp(p) == "s,F2\r\n");
    try {
        emit_csv(t, "/nonexistent/dir/table.csv");
        FAIL("expected an IO error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dir/table.csv") != std::string::npos);
    }
}

TEST_CASE("svg: F2 curve is monotone and the edge-limit study decreases")
{
    Series f2{"F2", {}, {}};
    for (int k = 0; k < 50; ++k) {
        const double s = -5 + 7.0 * k / 49;
        f2.x.push_back(s);
        f2.y.push_back(tracy_widom_marginal(s));
    }
    const std::string svg = to_svg({f2}, {"F2", "s", "F2(s)"});
    CHECK(svg.rfind("<svg", 0) == 0);
    const auto ys = polyline_y(svg);
    REQUIRE(ys.size() == 50);
    // screen y grows downward
    for (std::size_t i = 1; i < ys.size(); ++i) CHECK(ys[i] <= ys[i - 1]);

    Series gaps{"gap", {}, {}};
    for (std::size_t N : {20, 50, 100}) {
        double m = 0;
        for (int i = -2; i <= 2; ++i)
            for (int j = -2; j <= 2; ++j) m = std::max(m, std::abs(rescaled_kernel(N, i, j) - airy2_kernel(i, j)));
        gaps.x.push_back(static_cast<double>(N));
        gaps.y.push_back(m);
    }
    PlotOptions po;
    po.log_y = true;
    po.scatter = true;
    const fs::path p = scratch("edge.svg");
    emit_svg({gaps}, p, po);
    const auto ey = polyline_y(slurp(p));
    REQUIRE(ey.size() == 3);
    CHECK(ey[1] > ey[0]);
    CHECK(ey[2] > ey[1]);

    CHECK_THROWS_AS(to_svg({Series{"bad", {1, 2}, {1}}}), std::invalid_argument);
    CHECK_THROWS_AS(to_svg({Series{"neg", {1}, {-1}}}, po), std::invalid_argument);
}

TEST_CASE("report schema")
{
    RunReport rep;
    rep.command = "x";
    rep.seed = 5;
    const auto j = rep.to_json();
    for (const char* k : {"command", "pass", "inputs", "results", "provenance"}) CHECK(j.contains(k));
    for (const char* k : {"version", "seed", "grid", "tolerances", "wall_clock_seconds"}) CHECK(j["provenance"].contains(k));
    CHECK(defaults_json()["gue"]["tolerance"] == 1e-8);
}

TEST_SUITE_END();
