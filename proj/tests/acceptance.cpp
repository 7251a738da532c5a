// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "pathdet/airy.hpp"
#include "pathdet/dyson.hpp"
#include "pathdet/graph.hpp"
#include "pathdet/hermite.hpp"
#include "pathdet/opid.hpp"
#include "pathdet/quadrature.hpp"
#include "pathdet/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace pathdet;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << (ok ? "" : "FAILED ") << what;
    }
};

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::string fix(double v, int digits = 10)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget, const std::function<void(Outcome&)>& body)
{
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < budget, "runtime " + fix(secs, 1) + " s < " + fix(budget, 0) + " s");
    failures += !o.pass;
    std::printf("%s [%2d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.str().c_str());
    std::fflush(stdout);
}

Multiplier above(double s)
{
    return [s](double x) { return x > s ? 1.0 : 0.0; };
}

// Random instances with an invertible Gram matrix, biorthogonalized; seeds from `first`.
template <class F>
std::size_t nonsingular_instances(std::uint64_t first, std::size_t count, F&& body)
{
    std::size_t done = 0;
    std::uint64_t seed = first;
    while (done < count) {
        const auto inst = random_graph_instance(seed++);
        BoundaryData bd;
        try {
            bd = biorthogonalize(inst.boundary, inst.graph, inst.weights);
        } catch (const SingularGram&) {
            continue;
        }
        body(inst, bd);
        ++done;
    }
    return static_cast<std::size_t>(seed - first);
}

} // namespace

int main()
{
    criterion(1, "LGV exactness", 30, [](Outcome& o) {
        std::size_t equal = 0, nontrivial = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const auto inst = random_graph_instance(seed);
            const auto r = lgv_check(inst.graph, inst.weights, inst.sources, inst.sinks);
            equal += r.equal;
            nontrivial += r.determinant != 0;
        }
        o.require(equal == 100, std::to_string(equal) + "/100 determinant = enumeration (rational)");
        o.detail << " [" << nontrivial << " with nonzero determinant]";
    });

    criterion(2, "functional expectation = path-integral determinant", 60, [](Outcome& o) {
        std::size_t equal = 0;
        const std::size_t tried = nonsingular_instances(1, 100, [&](const GraphInstance& inst, const BoundaryData& bd) {
            equal += functional_expectation_bruteforce(bd, inst.graph, inst.weights, inst.functional) ==
                     path_integral_determinant(bd, inst.graph, inst.weights, inst.functional);
        });
        o.require(equal == 100, std::to_string(equal) + "/100 exact");
        o.detail << " [seeds 1.." << tried << ", singular Gram skipped]";
    });

    criterion(3, "extended-kernel determinant identity", 60, [](Outcome& o) {
        std::size_t equal = 0;
        nonsingular_instances(1, 50, [&](const GraphInstance& inst, const BoundaryData& bd) {
            equal += eynard_mehta_check(bd, inst.graph, inst.weights, inst.q).equal;
        });
        o.require(equal == 50, std::to_string(equal) + "/50 exact");
    });

    criterion(4, "finite-dimensional operator identity", 30, [](Outcome& o) {
        std::mt19937_64 rng(20240601);
        double worst = 0, expansion = 0;
        std::size_t structural = 0;
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 1 + rng() % 5, d = 1 + rng() % 8;
            const auto g = commuting_family({rng(), n, d, {}, 0, trial % 3 != 0});
            structural += verify_structural_assumptions(g.family, Defaults::structural_tolerance).pass;
            const auto r = identity_check(g.family, g.q, Defaults::operator_tolerance);
            worst = std::max(worst, r.diff / std::max(1.0, std::abs(r.lhs)));
            for (std::size_t i = 0; i < n; ++i)
                expansion = std::max(expansion, (alt_expansion_side(g.family, g.q, i) - telescoped_side(g.family, g.q, i))
                                                    .cwiseAbs()
                                                    .maxCoeff());
        }
        o.require(structural == 200, std::to_string(structural) + "/200 families satisfy the structural laws");
        o.require(worst <= Defaults::operator_tolerance, "max relative |lhs-rhs| " + sci(worst) + " <= 1e-10");
        o.require(expansion <= Defaults::expansion_tolerance, "expansion vs telescoped " + sci(expansion) + " <= 1e-12");
    });

    criterion(5, "Hermite identity", 120, [](Outcome& o) {
        double worst = 0;
        int passed = 0;
        for (std::size_t N : {1, 2, 5, 10})
            for (std::size_t n = 1; n <= 3; ++n) {
                const auto p = gue_preset(N, n);
                const auto r = gue_identity_check(N, p.times, p.levels, {}, Defaults::gue_tolerance);
                worst = std::max(worst, r.diff);
                passed += r.pass;
            }
        o.require(passed == 12 && worst <= 1e-8, std::to_string(passed) + "/12 presets, max |lhs-rhs| " + sci(worst));
        const auto half = gue_identity_check(1, {0}, {GueLevel::indicator_above(0)}, {}, Defaults::gue_tolerance);
        o.require(std::abs(half.lhs - 0.5) <= 1e-9 && std::abs(half.rhs - 0.5) <= 1e-9,
                  "N=1 s=0: lhs " + fix(half.lhs, 12) + " rhs " + fix(half.rhs, 12));
    });

    criterion(6, "Airy2 identity", 300, [](Outcome& o) {
        double worst = 0, drift = 0;
        int passed = 0;
        const auto cases = airy_preset_suite();
        AiryGridOptions once;
        once.refine = false;
        for (const auto& c : cases) {
            const auto r = airy2_identity_check(c.times, c.levels, {}, Defaults::airy_tolerance);
            worst = std::max(worst, r.diff);
            passed += r.pass;
            auto moved = c.times;
            for (auto& t : moved) t += 0.7;
            drift = std::max(drift, std::abs(airy_lhs(moved, c.levels, once) - airy_lhs(c.times, c.levels, once)));
            drift = std::max(drift, std::abs(airy_rhs(moved, c.levels, once) - airy_rhs(c.times, c.levels, once)));
        }
        o.require(passed == static_cast<int>(cases.size()) && worst <= Defaults::airy_tolerance,
                  std::to_string(passed) + "/" + std::to_string(cases.size()) + " presets, max |lhs-rhs| " + sci(worst));
        o.require(drift <= Defaults::stationarity_tolerance, "time-shift drift " + sci(drift) + " <= 1e-8");
    });

    criterion(7, "kernel-construction oracles", 120, [](Outcome& o) {
        double mehler = 0;
        for (double x = -4; x <= 4; x += 0.25)
            for (double y = -4; y <= 4; y += 0.25)
                mehler = std::max(mehler, std::abs(mehler_propagator(0.5, x, y) - mehler_spectral(0.5, x, y)));
        for (double t : {0.3, 1.0, 2.5})
            for (double x = -6; x <= 6; x += 0.5)
                for (double y = -6; y <= 6; y += 0.5)
                    mehler = std::max(mehler, std::abs(mehler_propagator(t, x, y) - mehler_spectral(t, x, y, 120)));
        o.require(mehler <= 1e-10, "Mehler vs spectral " + sci(mehler));

        double prop = 0;
        for (double t : {0.3, 1.0, 2.0})
            for (double x = -4; x <= 4; x += 1)
                for (double y = -4; y <= 4; y += 1)
                    prop = std::max(prop, std::abs(airy_propagator(t, x, y) - airy_propagator_spectral(t, x, y)));
        o.require(prop <= 1e-8, "Airy propagator vs spectral " + sci(prop));

        double route = 0;
        for (double x = -6; x <= 4; x += 0.5)
            for (double y = -6; y <= 4; y += 0.5)
                route = std::max(route, std::abs(airy2_kernel(x, y) - airy2_kernel_spectral(x, y)));
        o.require(route <= 1e-9, "Airy2 kernel routes " + sci(route));

        double law = 0;
        const auto g = panel_grid(-10, 10, 1, 20);
        for (std::size_t N : {1, 4}) {
            const auto r = hermite_law_residuals(N, 0.3, 0.5, g);
            law = std::max({law, r.semigroup, r.reversibility, r.commutation});
        }
        o.require(law <= 1e-7, "Hermite law residuals " + sci(law));
        const auto a = airy_law_residuals(0.5, 0.8, {-4, -2, -0.5, 0, 1, 2.5, 4});
        const double alaw = std::max({a.semigroup, a.reversibility, a.commutation});
        o.require(alaw <= 1e-7, "Airy law residuals " + sci(alaw));
    });

    criterion(8, "Tracy-Widom marginal", 60, [](Outcome& o) {
        double prev = 0;
        bool monotone = true;
        for (int i = 0; i < 50; ++i) {
            const double f = tracy_widom_marginal(-8 + 14.0 * i / 49);
            monotone = monotone && f >= prev;
            prev = f;
        }
        o.require(monotone, "monotone on 50 points in [-8, 6]");
        double series = 0, refine = 0;
        for (double s : {-2.0, 0.0, 1.0}) {
            const auto g = gauss_legendre(24, s, 8);
            const auto r = series_determinant([](double x, double y) { return airy2_kernel(x, y); }, g, 8);
            series = std::max(series, std::abs(r.value - tracy_widom_marginal(s)));
            refine = std::max(refine, std::abs(tracy_widom_marginal(s, {40, 8}) - tracy_widom_marginal(s, {80, 8})));
        }
        o.require(series <= 1e-6, "series oracle at s = -2, 0, 1: " + sci(series));
        o.require(refine <= 1e-8, "m 40 -> 80 shift " + sci(refine));
    });

    criterion(9, "continuum discretizations", 180, [](Outcome& o) {
        // 4 significant digits between 64 and 128 steps
        const auto logistic = [](double, double x) { return 0.5 / (1 + std::exp(-4 * x)); };
        for (std::size_t N : {1, 2, 5}) {
            const double a = continuum_hermite_statistic(N, 0, 1, logistic, 64);
            const double b = continuum_hermite_statistic(N, 0, 1, logistic, 128);
            const double rel = std::abs(a - b) / std::abs(b);
            o.require(rel <= 1e-4, "Hermite N=" + std::to_string(N) + " logistic h: n64 " + fix(a) + " n128 " + fix(b) +
                                       " rel " + sci(rel));
        }
        const auto step = [](double, double x) { return x > 0 ? 0.5 : 0.0; };
        const double a = continuum_airy_statistics(0, 1, step, 64), b = continuum_airy_statistics(0, 1, step, 128);
        const double rel = std::abs(a - b) / std::abs(b);
        o.require(rel <= 1e-4, "Airy h=0.5 on x>0: n64 " + fix(a) + " n128 " + fix(b) + " rel " + sci(rel));

        const auto zero = [](double, double) { return 0.0; };
        const double z = std::max(std::abs(continuum_hermite_statistic(3, 0, 1, zero, 64) - 1),
                                  std::abs(continuum_airy_statistics(0, 1, zero, 64) - 1));
        o.require(z <= 1e-8, "h = 0 gives 1 to " + sci(z));

        const double c = 0.5;
        const auto cst = [c](double, double) { return c; };
        // N = 1: the factor is e^{-c (r - l)}
        double err = 0;
        std::size_t n = 64;
        for (; n <= 8192; n *= 2) {
            err = std::abs(continuum_hermite_statistic(1, 0, 1, cst, n) - std::exp(-c));
            if (err <= 1e-4) break;
        }
        o.require(err <= 1e-4, "constant h converges to e^{-c(r-l)}: error " + sci(err) + " at n=" + std::to_string(n));
    });

    criterion(10, "Monte-Carlo concordance", 300, [](Outcome& o) {
        const std::size_t samples = 10000;
        std::uint64_t seed = 20261016;
        int ok = 0, total = 0;
        double worst_z = 0;
        auto judge = [&](double mean, double se, double ref) {
            const double z = se > 0 ? std::abs(mean - ref) / se : (mean == ref ? 0 : HUGE_VAL);
            worst_z = std::max(worst_z, z);
            ok += z <= Defaults::mc_sigmas;
            ++total;
        };
        for (std::size_t N : {1, 2, 3})
            for (std::size_t n : {1, 2}) {
                const auto p = gue_preset(N, n);
                std::vector<Multiplier> q(p.levels.begin(), p.levels.end());
                const auto e = mc_functional_estimate(N, p.times, q, samples, seed++);
                judge(e.mean, e.stderr_, gue_lhs(N, p.times, p.levels, {}));
            }
        o.require(ok == total, "functionals " + std::to_string(ok) + "/" + std::to_string(total) + " within 3 stderr");
        const int functionals = ok;

        for (double s : {-1.0, 0.0, 0.5, 1.2}) {
            const auto e = mc_functional_estimate(1, {0}, {above(s)}, samples, seed++);
            judge(e.mean, e.stderr_, 0.5 * (1 + std::erf(s)));
        }
        for (double lag : {0.2, 0.7, 1.5})
            for (bool off : {false, true}) {
                const auto c = entry_autocovariance(2, lag, off, samples, seed++);
                judge(c.estimate, c.stderr_, c.expected);
            }
        o.require(ok - functionals == 10, "calibration (marginal, e^{-t} autocovariance) " +
                                              std::to_string(ok - functionals) + "/10 within 3 stderr");
        o.detail << " [max |z| " << fix(worst_z, 2) << "]";
    });

    criterion(11, "edge-scaling trend", 60, [](Outcome& o) {
        double prev = HUGE_VAL;
        bool decreasing = true;
        std::string trail;
        for (std::size_t N : {20, 50, 100}) {
            double worst = 0;
            for (int x = -2; x <= 2; ++x)
                for (int y = -2; y <= 2; ++y)
                    worst = std::max(worst, std::abs(rescaled_kernel(N, x, y) - airy2_kernel(x, y)));
            decreasing = decreasing && worst < prev;
            trail += (trail.empty() ? "" : ", ") + ("N=" + std::to_string(N) + ": " + sci(worst));
            prev = worst;
        }
        o.require(decreasing, "max gap strictly decreasing (" + trail + ")");
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures ? 1 : 0;
}
