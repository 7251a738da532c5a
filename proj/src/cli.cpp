#include "pathdet/cli.hpp"

#include "pathdet/airy.hpp"
#include "pathdet/dyson.hpp"
#include "pathdet/graph.hpp"
#include "pathdet/graph_io.hpp"
#include "pathdet/hermite.hpp"
#include "pathdet/opid.hpp"
#include "pathdet/opid_io.hpp"
#include "pathdet/quadrature.hpp"
#include "pathdet/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace pathdet {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw IoError(path, "cannot open for reading");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw IoError(path, std::string("invalid JSON: ") + e.what());
    }
}

void check_times(const std::vector<double>& times, const std::vector<double>& thresholds)
{
    if (times.empty()) throw UsageError("--times needs at least one value");
    if (thresholds.size() != times.size()) throw UsageError("--thresholds needs one value per time");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw UsageError("--times must be strictly increasing");
}

json identity_json(const KernelIdentityReport& r)
{
    return {{"lhs", r.lhs},         {"rhs", r.rhs},
            {"diff", r.diff},       {"tolerance", r.tolerance},
            {"pass", r.pass},       {"refinement_shift", r.refinement_shift},
            {"warnings", r.warnings}};
}

json check_json(const std::string& name, double value, double reference, double tol, bool pass)
{
    return {{"name", name}, {"value", value}, {"reference", reference}, {"tolerance", tol}, {"pass", pass}};
}

json check_json(const std::string& name, double value, double reference, double tol)
{
    return check_json(name, value, reference, tol, std::abs(value - reference) <= tol);
}

// ---- lgv-verify

struct LgvParams {
    std::string input;
    std::uint64_t seed = Defaults::seed;
    std::size_t count = Defaults::random_instances;
};

json lgv_document(const GraphDocument& doc, bool& pass, bool strict)
{
    json r = json::object();
    const auto& g = doc.graph;
    const auto& w = doc.weights;
    if (!doc.sources.empty() && !doc.sinks.empty()) {
        const auto l = lgv_check(g, w, doc.sources, doc.sinks);
        r["lgv"] = {{"determinant", l.determinant.get_str()}, {"enumeration", l.brute_sum.get_str()},
                    {"equal", l.equal}, {"tolerance", 0}};
        pass = pass && l.equal;
    }
    if (doc.boundary) {
        BoundaryData bd;
        try {
            bd = biorthogonalize(*doc.boundary, g, w);
        } catch (const SingularGram& e) {
            if (strict) throw;
            r["skipped"] = e.what();
            return r;
        }
        if (doc.functional) {
            const Rational brute = functional_expectation_bruteforce(bd, g, w, *doc.functional);
            const Rational det = path_integral_determinant(bd, g, w, *doc.functional);
            r["functional"] = {{"enumeration", brute.get_str()}, {"determinant", det.get_str()},
                               {"equal", brute == det}, {"tolerance", 0}};
            pass = pass && brute == det;
        }
        if (doc.q) {
            const auto em = eynard_mehta_check(bd, g, w, *doc.q);
            r["extended_kernel"] = {{"lhs", em.lhs.get_str()}, {"rhs", em.rhs.get_str()},
                                    {"equal", em.equal}, {"tolerance", 0}};
            pass = pass && em.equal;
        }
    }
    return r;
}

RunReport run_lgv(const LgvParams& p)
{
    RunReport rep;
    rep.command = "lgv-verify";
    rep.tolerances = {{"rational", "exact"}};
    if (!p.input.empty()) {
        rep.inputs = {{"input", p.input}};
        const auto doc = graph_document_from_json(read_json_file(p.input));
        bool pass = true;
        rep.results = lgv_document(doc, pass, true);
        if (rep.results.empty()) throw UsageError(p.input + ": needs sources and sinks, or boundary data");
        rep.pass = pass;
        return rep;
    }
    if (p.count == 0) throw UsageError("--count must be positive");
    rep.inputs = {{"seed", p.seed}, {"count", p.count}};
    rep.seed = p.seed;
    bool pass = true;
    std::size_t skipped = 0;
    json instances = json::array();
    for (std::size_t k = 0; k < p.count; ++k) {
        const auto inst = random_graph_instance(p.seed + k);
        json one = lgv_document(document_from_instance(inst), pass, false);
        one["seed"] = inst.seed;
        skipped += one.contains("skipped");
        instances.push_back(std::move(one));
    }
    rep.results = {{"instances", instances}, {"skipped_singular_gram", skipped}};
    rep.pass = pass;
    return rep;
}

// ---- identity-check

struct IdentityParams {
    std::string input;
    std::uint64_t seed = Defaults::seed;
    std::size_t steps = 3;
    std::size_t dim = 6;
    std::size_t rank = 0;
    double tol = Defaults::operator_tolerance;
};

RunReport run_identity(const IdentityParams& p)
{
    RunReport rep;
    rep.command = "identity-check";
    if (!(p.tol > 0)) throw UsageError("--tol must be positive");
    OperatorFamily fam;
    MultiplierFamily q;
    if (!p.input.empty()) {
        rep.inputs = {{"input", p.input}, {"tol", p.tol}};
        const json j = read_json_file(p.input);
        if (!j.is_object() || !j.contains("family") || !j.contains("q"))
            throw UsageError(p.input + ": expected an object with \"family\" and \"q\"");
        fam = family_from_json(j.at("family"));
        q = multipliers_from_json(j.at("q"));
        if (q.size() != fam.size()) throw UsageError(p.input + ": one multiplier per time is required");
    } else {
        if (p.steps == 0 || p.dim == 0) throw UsageError("--steps and --dim must be positive");
        if (p.rank >= p.dim && p.dim > 1) throw UsageError("--rank must be below --dim");
        rep.inputs = {{"seed", p.seed}, {"steps", p.steps}, {"dim", p.dim}, {"rank", p.rank}, {"tol", p.tol}};
        rep.seed = p.seed;
        auto g = commuting_family({p.seed, p.steps, p.dim, {}, p.rank, true});
        fam = std::move(g.family);
        q = std::move(g.q);
    }
    const auto s = verify_structural_assumptions(fam, Defaults::structural_tolerance);
    const auto r = identity_check(fam, q, p.tol);
    double expansion = 0;
    for (std::size_t i = 0; i < fam.size(); ++i)
        expansion = std::max(expansion,
                             (alt_expansion_side(fam, q, i) - telescoped_side(fam, q, i)).cwiseAbs().maxCoeff());
    const bool exp_pass = expansion <= Defaults::expansion_tolerance;
    rep.results = {{"structural", {{"semigroup", s.semigroup}, {"right_invertibility", s.right_invertibility},
                                   {"reversibility", s.reversibility}, {"tolerance", s.tolerance},
                                   {"pass", s.pass}}},
                   {"identity", {{"lhs", r.lhs}, {"rhs", r.rhs}, {"diff", r.diff}, {"tolerance", r.tolerance},
                                 {"pass", r.pass}}},
                   {"expansion", {{"max_diff", expansion}, {"tolerance", Defaults::expansion_tolerance},
                                  {"pass", exp_pass}}}};
    rep.grid = {{"steps", fam.size()}, {"dim", fam.d}};
    rep.tolerances = {{"structural", Defaults::structural_tolerance}, {"identity", p.tol},
                      {"expansion", Defaults::expansion_tolerance}};
    rep.pass = s.pass && r.pass && exp_pass;
    return rep;
}

// ---- gue

struct GueParams {
    std::size_t matrix_size = 0;
    std::vector<double> times;
    std::vector<double> thresholds;
    std::size_t nodes = Defaults::gue_nodes;
    double domain = Defaults::gue_domain;
    double panel = Defaults::gue_panel;
    double tol = Defaults::gue_tolerance;
};

RunReport run_gue(const GueParams& p)
{
    if (p.matrix_size == 0) throw UsageError("--matrix-size must be positive");
    check_times(p.times, p.thresholds);
    if (p.nodes == 0 || !(p.domain > 0) || !(p.panel > 0) || !(p.tol > 0))
        throw UsageError("--nodes, --domain, --panel and --tol must be positive");
    RunReport rep;
    rep.command = "gue";
    rep.inputs = {{"matrix-size", p.matrix_size}, {"times", p.times}, {"thresholds", p.thresholds},
                  {"nodes", p.nodes}, {"domain", p.domain}, {"panel", p.panel}, {"tol", p.tol}};
    std::vector<GueLevel> levels;
    for (double s : p.thresholds) levels.push_back(GueLevel::indicator_above(s));
    GueGridOptions opts;
    opts.domain = p.domain;
    opts.panel = p.panel;
    opts.nodes = p.nodes;
    rep.grid = {{"domain", p.domain}, {"panel", p.panel}, {"nodes", p.nodes}};
    rep.tolerances = {{"identity", p.tol}};
    try {
        const auto r = gue_identity_check(p.matrix_size, p.times, levels, opts, p.tol);
        rep.results = identity_json(r);
        rep.pass = r.pass;
    } catch (const ResolutionError& e) {
        rep.results = {{"error", e.what()}};
        rep.pass = false;
    }
    return rep;
}

// ---- airy2

struct AiryParams {
    std::vector<double> times;
    std::vector<double> thresholds;
    std::size_t nodes = Defaults::airy_nodes;
    double domain = Defaults::airy_left;
    double right = Defaults::airy_right;
    double panel = Defaults::airy_panel;
    double tol = Defaults::airy_tolerance;
    double shift = 0;
    std::vector<double> tw;
    std::size_t tw_nodes = Defaults::tracy_widom_nodes;
    std::optional<double> continuum;
    std::size_t steps = Defaults::continuum_steps;
};

RunReport run_airy(const AiryParams& p)
{
    const bool identity = !p.times.empty() || !p.thresholds.empty();
    if (!identity && p.tw.empty() && !p.continuum)
        throw UsageError("airy2 needs --times/--thresholds, --tw or --continuum");
    if (identity) check_times(p.times, p.thresholds);
    if (p.nodes == 0 || !(p.domain > 0) || !(p.right > 0) || !(p.panel > 0) || !(p.tol > 0))
        throw UsageError("--nodes, --domain, --right, --panel and --tol must be positive");
    if (p.shift < 0) throw UsageError("--shift must be non-negative");
    if (p.tw_nodes == 0 || p.steps < 2) throw UsageError("--tw-nodes must be positive and --steps at least 2");
    if (p.continuum && *p.continuum < 0) throw UsageError("--continuum must be non-negative");

    RunReport rep;
    rep.command = "airy2";
    rep.inputs = {{"nodes", p.nodes}, {"domain", p.domain}, {"right", p.right}, {"panel", p.panel}, {"tol", p.tol}};
    AiryGridOptions opts;
    opts.left = p.domain;
    opts.right = p.right;
    opts.panel = p.panel;
    opts.nodes = p.nodes;
    rep.grid = {{"left", -p.domain}, {"right", p.right}, {"panel", p.panel}, {"nodes", p.nodes}};
    rep.tolerances = {{"identity", p.tol}};
    bool pass = true;

    if (identity) {
        rep.inputs["times"] = p.times;
        rep.inputs["thresholds"] = p.thresholds;
        std::vector<AiryLevel> levels;
        for (double s : p.thresholds) levels.push_back(AiryLevel::indicator_above(s));
        try {
            const auto r = airy2_identity_check(p.times, levels, opts, p.tol);
            rep.results["identity"] = identity_json(r);
            pass = pass && r.pass;
            if (p.shift > 0) {
                rep.inputs["shift"] = p.shift;
                auto moved = p.times;
                for (auto& t : moved) t += p.shift;
                AiryGridOptions once = opts;
                once.refine = false;
                const double shifted = airy_lhs(moved, levels, once);
                const double base = airy_lhs(p.times, levels, once);
                rep.results["stationarity"] =
                    check_json("time shift", shifted, base, Defaults::stationarity_tolerance);
                rep.tolerances["stationarity"] = Defaults::stationarity_tolerance;
                pass = pass && rep.results["stationarity"]["pass"].get<bool>();
            }
        } catch (const ResolutionError& e) {
            rep.results["identity"] = {{"error", e.what()}};
            pass = false;
        }
    }
    if (!p.tw.empty()) {
        rep.inputs["tw"] = p.tw;
        rep.inputs["tw-nodes"] = p.tw_nodes;
        TracyWidomOptions two;
        two.nodes = p.tw_nodes;
        json rows = json::array();
        for (double s : p.tw) rows.push_back({{"s", s}, {"F2", tracy_widom_marginal(s, two)}});
        rep.results["tracy_widom"] = rows;
        rep.grid["tracy_widom"] = {{"nodes", p.tw_nodes}, {"right", two.right}};
    }
    if (p.continuum) {
        const double c = *p.continuum;
        rep.inputs["continuum"] = c;
        rep.inputs["steps"] = p.steps;
        const TimePotential h = [c](double, double x) { return x > 0 ? c : 0.0; };
        const double v =
            continuum_airy_statistics(Defaults::continuum_left, Defaults::continuum_right, h, p.steps);
        rep.results["continuum"] = {{"potential", "c on x > 0"},
                                    {"c", c},
                                    {"interval", {Defaults::continuum_left, Defaults::continuum_right}},
                                    {"steps", p.steps},
                                    {"value", v}};
    }
    rep.pass = pass;
    return rep;
}

// ---- mc-gue

struct McParams {
    std::size_t matrix_size = 0;
    std::vector<double> times;
    std::vector<double> thresholds;
    std::size_t samples = Defaults::mc_samples;
    std::uint64_t seed = Defaults::seed;
};

RunReport run_mc(const McParams& p)
{
    if (p.matrix_size == 0) throw UsageError("--matrix-size must be positive");
    check_times(p.times, p.thresholds);
    if (p.samples < 100) throw UsageError("--samples must be at least 100");
    RunReport rep;
    rep.command = "mc-gue";
    rep.seed = p.seed;
    rep.inputs = {{"matrix-size", p.matrix_size}, {"times", p.times}, {"thresholds", p.thresholds},
                  {"samples", p.samples}, {"seed", p.seed}};
    std::vector<Multiplier> q;
    std::vector<GueLevel> levels;
    for (double s : p.thresholds) {
        q.push_back([s](double x) { return x > s ? 1.0 : 0.0; });
        levels.push_back(GueLevel::indicator_above(s));
    }
    const auto e = mc_functional_estimate(p.matrix_size, p.times, q, p.samples, p.seed);
    const double ref = gue_lhs(p.matrix_size, p.times, levels, GueGridOptions{});
    const double diff = e.mean - ref;
    // The reference is itself certified only to the GUE tolerance.
    const double allowed = Defaults::mc_sigmas * e.stderr_ + Defaults::gue_tolerance;
    rep.results = {{"mean", e.mean},
                   {"stderr", e.stderr_},
                   {"determinant_reference", ref},
                   {"z_score", e.stderr_ > 0 ? json(diff / e.stderr_) : json(nullptr)},
                   {"tolerance", allowed},
                   {"pass", std::abs(diff) <= allowed}};
    rep.grid = {{"domain", Defaults::gue_domain}, {"panel", Defaults::gue_panel}, {"nodes", Defaults::gue_nodes}};
    rep.tolerances = {{"sigmas", Defaults::mc_sigmas}, {"reference", Defaults::gue_tolerance}};
    rep.pass = std::abs(diff) <= allowed;
    return rep;
}

// ---- suite

double edge_gap(std::size_t N)
{
    double m = 0;
    for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) m = std::max(m, std::abs(rescaled_kernel(N, i, j) - airy2_kernel(i, j)));
    return m;
}

void suite_quick(json& checks)
{
    int lgv_ok = 0, lgv_total = 0;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        bool pass = true;
        lgv_document(document_from_instance(random_graph_instance(s)), pass, false);
        lgv_ok += pass;
        ++lgv_total;
    }
    checks.push_back(check_json("random graphs: exact identities", lgv_ok, lgv_total, 0));

    double worst = 0;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        const auto g = commuting_family({s, 3, 5, {}, 0, true});
        const auto r = identity_check(g.family, g.q, Defaults::operator_tolerance);
        worst = std::max(worst, r.diff / std::max(1.0, std::abs(r.lhs)));
    }
    checks.push_back(check_json("commuting families: relative identity gap", worst, 0, Defaults::operator_tolerance));

    const auto half = gue_identity_check(1, {0}, {GueLevel::indicator_above(0)}, {}, Defaults::gue_tolerance);
    checks.push_back(check_json("GUE N=1 s=0 lhs", half.lhs, 0.5, 1e-9));
    checks.push_back(check_json("GUE N=1 s=0 rhs", half.rhs, 0.5, 1e-9));

    const double f2 = tracy_widom_marginal(0);
    AiryGridOptions once;
    once.refine = false;
    checks.push_back(check_json("Airy n=1 against F2(0)", airy_lhs({0}, {AiryLevel::indicator_above(0)}, once), f2,
                                Defaults::airy_tolerance));

    const auto zero = mc_functional_estimate(2, {0, 0.5}, {[](double) { return 0.0; }, [](double) { return 0.0; }},
                                             100, Defaults::seed);
    checks.push_back(check_json("sampler: q = 0 gives mean 1", zero.mean, 1, 0));

    SeededRng rng(Defaults::seed);
    const auto st = sample_stationary(5, rng);
    double sum = 0;
    for (double l : eigenvalues(st)) sum += l;
    checks.push_back(check_json("eigenvalue sum equals trace", sum, st.trace(), 1e-12));

    const TimePotential none = [](double, double) { return 0.0; };
    checks.push_back(check_json("continuum h = 0", continuum_hermite_statistic(2, 0, 1, none, 16), 1, 1e-8));

    const auto gl = gauss_legendre(5, -1, 2);
    double integral = 0;
    for (std::size_t i = 0; i < gl.size(); ++i) integral += gl.w[i] * std::pow(gl.x[i], 9);
    checks.push_back(check_json("Gauss-Legendre exact on degree 9", integral, (1024.0 - 1.0) / 10, 1e-12));
}

void suite_full(json& checks, json& artifacts, const std::optional<fs::path>& dir)
{
    double gue_worst = 0;
    for (std::size_t N : {1, 2, 5})
        for (std::size_t n = 1; n <= 3; ++n) {
            const auto p = gue_preset(N, n);
            gue_worst = std::max(gue_worst, gue_identity_check(N, p.times, p.levels, {}, Defaults::gue_tolerance).diff);
        }
    checks.push_back(check_json("GUE presets: worst identity gap", gue_worst, 0, Defaults::gue_tolerance));

    double airy_worst = 0;
    for (const auto& c : airy_preset_suite())
        if (c.times.size() <= 2)
            airy_worst = std::max(airy_worst, airy2_identity_check(c.times, c.levels, {}, Defaults::airy_tolerance).diff);
    checks.push_back(check_json("Airy presets (n <= 2): worst identity gap", airy_worst, 0, Defaults::airy_tolerance));

    Table tw{{"s", "F2"}, {}};
    Series curve{"F2", {}, {}};
    bool monotone = true;
    for (int k = 0; k < 50; ++k) {
        const double s = -5 + 7.0 * k / 49;
        const double v = tracy_widom_marginal(s);
        if (!curve.y.empty() && v < curve.y.back()) monotone = false;
        tw.add_row({s, v});
        curve.x.push_back(s);
        curve.y.push_back(v);
    }
    checks.push_back(check_json("Tracy-Widom monotone on 50 points", monotone, 1, 0));

    Table edge{{"N", "max_gap"}, {}};
    Series gaps{"max |K_N - K_Ai|", {}, {}};
    bool decreasing = true;
    for (std::size_t N : {20, 50, 100}) {
        const double g = edge_gap(N);
        if (!gaps.y.empty() && !(g < gaps.y.back())) decreasing = false;
        edge.add_row({static_cast<double>(N), g});
        gaps.x.push_back(static_cast<double>(N));
        gaps.y.push_back(g);
    }
    checks.push_back(check_json("edge scaling gap decreases in N", decreasing, 1, 0));

    for (std::size_t N : {1, 2}) {
        const auto p = gue_preset(N, 2);
        std::vector<Multiplier> q(p.levels.begin(), p.levels.end());
        const auto e = mc_functional_estimate(N, p.times, q, Defaults::mc_samples, Defaults::seed + N);
        const double ref = gue_lhs(N, p.times, p.levels, {});
        checks.push_back(check_json("sampler vs determinant, N=" + std::to_string(N), e.mean, ref,
                                    Defaults::mc_sigmas * e.stderr_ + Defaults::gue_tolerance));
    }

    if (dir) {
        emit_csv(tw, *dir / "tracy_widom.csv");
        emit_svg({curve}, *dir / "tracy_widom.svg", {"Tracy-Widom F2", "s", "F2(s)"});
        emit_csv(edge, *dir / "edge_scaling.csv");
        PlotOptions po{"Edge scaling", "N", "max gap", true, true};
        emit_svg({gaps}, *dir / "edge_scaling.svg", po);
        artifacts = {"tracy_widom.csv", "tracy_widom.svg", "edge_scaling.csv", "edge_scaling.svg"};
    }
}

RunReport run_suite(bool quick, const std::optional<fs::path>& dir)
{
    RunReport rep;
    rep.command = "suite";
    rep.inputs = {{"quick", quick}};
    rep.seed = Defaults::seed;
    rep.grid = defaults_json();
    rep.tolerances = {{"operator", Defaults::operator_tolerance}, {"gue", Defaults::gue_tolerance},
                      {"airy2", Defaults::airy_tolerance}};
    json checks = json::array();
    json artifacts = json::array();
    suite_quick(checks);
    if (!quick) suite_full(checks, artifacts, dir);
    bool pass = true;
    for (const auto& c : checks) pass = pass && c["pass"].get<bool>();
    rep.results = {{"checks", checks}};
    if (!artifacts.empty()) rep.results["artifacts"] = artifacts;
    rep.pass = pass;
    return rep;
}

// ---- config handling

std::string config_value(const std::string& key, const json& v)
{
    switch (v.type()) {
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: return v.dump();
    case json::value_t::number_float: return format_number(v.get<double>());
    case json::value_t::string: return v.get<std::string>();
    case json::value_t::array: {
        std::string s;
        for (const auto& e : v) {
            if (e.is_array() || e.is_object()) throw UsageError("config key " + key + ": nested values not allowed");
            if (!s.empty()) s += ',';
            s += config_value(key, e);
        }
        return s;
    }
    default: throw UsageError("config key " + key + ": unsupported value");
    }
}

bool has_flag(const std::vector<std::string>& tokens, const std::string& flag)
{
    return std::any_of(tokens.begin(), tokens.end(),
                       [&](const std::string& t) { return t == flag || t.rfind(flag + "=", 0) == 0; });
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Path-integral determinant identities: exact graph checks, GUE and Airy2 kernels, Monte-Carlo."};
    app.name("pathdet");
    app.set_version_flag("--version", PATHDET_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    std::string output_dir;
    app.add_option("--output-dir", output_dir, "Write reports here instead of stdout");
    std::string config_path;
    app.add_option("--config", config_path, "JSON file of flag values (keys are flag names)");

    LgvParams lp;
    auto* lgv = app.add_subcommand("lgv-verify", "Exact LGV, functional and extended-kernel checks on layered graphs");
    lgv->add_option("--input", lp.input, "Graph document (JSON)");
    lgv->add_option("--seed", lp.seed, "First seed for random instances");
    lgv->add_option("--count", lp.count, "Number of random instances");

    IdentityParams ip;
    auto* ident = app.add_subcommand("identity-check", "Finite-dimensional determinant identity");
    ident->add_option("--input", ip.input, "JSON with \"family\" and \"q\"");
    ident->add_option("--seed", ip.seed, "Generator seed");
    ident->add_option("--steps", ip.steps, "Number of times");
    ident->add_option("--dim", ip.dim, "Dimension");
    ident->add_option("--rank", ip.rank, "Projector rank (0: random)");
    ident->add_option("--tol", ip.tol, "Relative tolerance");

    GueParams gp;
    auto* gue = app.add_subcommand("gue", "Hermite (GUE Dyson) extended-kernel identity");
    gue->add_option("--matrix-size", gp.matrix_size, "N")->required();
    gue->add_option("--times", gp.times, "Increasing times")->required()->delimiter(',');
    gue->add_option("--thresholds", gp.thresholds, "Indicator thresholds, one per time")->required()->delimiter(',');
    gue->add_option("--nodes", gp.nodes, "Gauss-Legendre nodes per panel");
    gue->add_option("--domain", gp.domain, "Half-width of the window");
    gue->add_option("--panel", gp.panel, "Panel width");
    gue->add_option("--tol", gp.tol, "Identity tolerance");

    AiryParams ap;
    double continuum = 0;
    auto* airy = app.add_subcommand("airy2", "Airy2 identity, Tracy-Widom marginal and continuum statistics");
    airy->add_option("--times", ap.times, "Increasing times")->delimiter(',');
    airy->add_option("--thresholds", ap.thresholds, "Indicator thresholds, one per time")->delimiter(',');
    airy->add_option("--nodes", ap.nodes, "Gauss-Legendre nodes per panel");
    airy->add_option("--domain", ap.domain, "Left cut: the window is [-domain, right]");
    airy->add_option("--right", ap.right, "Right end of the window");
    airy->add_option("--panel", ap.panel, "Panel width");
    airy->add_option("--tol", ap.tol, "Identity tolerance");
    airy->add_option("--shift", ap.shift, "Also compare against the times shifted by this amount");
    airy->add_option("--tw", ap.tw, "Evaluate F2 at these points")->delimiter(',');
    airy->add_option("--tw-nodes", ap.tw_nodes, "Nodes for F2");
    auto* cont = airy->add_option("--continuum", continuum, "Potential height c of h = c on x > 0 over [0, 1]");
    airy->add_option("--steps", ap.steps, "Time steps for --continuum");

    McParams mp;
    auto* mc = app.add_subcommand("mc-gue", "Monte-Carlo estimate from the Hermitian OU process");
    mc->add_option("--matrix-size", mp.matrix_size, "N")->required();
    mc->add_option("--times", mp.times, "Increasing times")->required()->delimiter(',');
    mc->add_option("--thresholds", mp.thresholds, "Indicator thresholds, one per time")->required()->delimiter(',');
    mc->add_option("--samples", mp.samples, "Trajectories");
    mc->add_option("--seed", mp.seed, "Seed");

    bool quick = false;
    auto* suite = app.add_subcommand("suite", "Battery of checks across all modules");
    suite->add_flag("--quick", quick, "Only the fast checks");

    auto usage = [&](const std::string& msg, const CLI::App* sub) {
        err << "error: " << msg << "\n\n" << (sub ? sub->help() : app.help());
        return 1;
    };

    std::vector<std::string> tokens = args;
    const CLI::App* sub = nullptr;
    try {
        // --config is applied here so flags on the command line win over it.
        json config;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (tokens[i] == "--config" && i + 1 < tokens.size()) {
                config = read_json_file(tokens[i + 1]);
                tokens.erase(tokens.begin() + static_cast<long>(i), tokens.begin() + static_cast<long>(i) + 2);
                break;
            }
            if (tokens[i].rfind("--config=", 0) == 0) {
                config = read_json_file(tokens[i].substr(9));
                tokens.erase(tokens.begin() + static_cast<long>(i));
                break;
            }
        }
        for (const auto& t : tokens)
            if (!sub) sub = app.get_subcommand_no_throw(t);
        if (!config.is_null()) {
            if (!config.is_object()) throw UsageError("config must be a JSON object");
            if (!sub && config.contains("command")) {
                const std::string name = config.at("command").get<std::string>();
                sub = app.get_subcommand_no_throw(name);
                if (!sub) throw UsageError("config: unknown command " + name);
                tokens.insert(tokens.begin(), name);
            }
            if (!sub) throw UsageError("config needs a command");
            for (const auto& [key, v] : config.items()) {
                if (key == "command") {
                    if (v.get<std::string>() != sub->get_name()) throw UsageError("config command disagrees with argv");
                    continue;
                }
                const std::string flag = "--" + key;
                const CLI::Option* opt = key == "output-dir" ? app.get_option_no_throw(flag)
                                                             : sub->get_option_no_throw(flag);
                if (!opt) throw UsageError("config: unknown key " + key);
                if (has_flag(tokens, flag)) continue;
                if (v.is_boolean()) {
                    if (opt->get_expected_min() != 0) throw UsageError("config key " + key + ": expects a value");
                    if (v.get<bool>()) tokens.push_back(flag);
                } else {
                    tokens.push_back(flag + "=" + config_value(key, v));
                }
            }
        }
        std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << (sub ? sub->help() : app.help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << PATHDET_VERSION << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        return usage(e.what(), sub);
    } catch (const UsageError& e) {
        return usage(e.what(), sub);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    std::optional<fs::path> dir;
    if (!output_dir.empty())
        dir = output_dir;
    else if (const char* env = std::getenv(kOutputDirEnv); env && *env)
        dir = env;

    const auto start = std::chrono::steady_clock::now();
    RunReport rep;
    try {
        if (lgv->parsed())
            rep = run_lgv(lp);
        else if (ident->parsed())
            rep = run_identity(ip);
        else if (gue->parsed())
            rep = run_gue(gp);
        else if (airy->parsed()) {
            if (cont->count()) ap.continuum = continuum;
            rep = run_airy(ap);
        } else if (mc->parsed())
            rep = run_mc(mp);
        else
            rep = run_suite(quick, dir);
    } catch (const UsageError& e) {
        for (const CLI::App* s : app.get_subcommands()) sub = s;
        return usage(e.what(), sub);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string text = rep.to_json().dump(2) + "\n";
    try {
        if (dir) {
            fs::create_directories(*dir);
            const fs::path file = *dir / (rep.command + ".json");
            write_text(file, text);
            out << file.string() << '\n';
        } else {
            out << text;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return rep.pass ? 0 : 2;
}

int run(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace pathdet
