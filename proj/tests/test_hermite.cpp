#include <doctest.h>

#include "pathdet/hermite.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

using namespace pathdet;

TEST_SUITE_BEGIN("hermite-dyson");

TEST_CASE("oscillator functions")
{
    CHECK(oscillator_fn(0, 0.0) == doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-15));
    CHECK(oscillator_fn(0, 0.0) == doctest::Approx(0.751126).epsilon(1e-6));
    CHECK(oscillator_fn(1, 0.0) == 0.0);
    CHECK(oscillator_fn(0, 1.3) == doctest::Approx(std::pow(std::numbers::pi, -0.25) * std::exp(-0.845)).epsilon(1e-15));

    const auto g = gauss_legendre(200, -12, 12);
    const Eigen::MatrixXd P = oscillator_matrix(31, g.x);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(g.w.data(), 200);
    const Eigen::MatrixXd gram = P * w.asDiagonal() * P.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(31, 31)).cwiseAbs().maxCoeff() < 1e-10);

    double worst = 0;
    for (double x = -8; x <= 8; x += 0.05) {
        const auto v = oscillator_values(41, x);
        for (std::size_t k = 1; k < 40; ++k)
            worst = std::max(worst, std::abs(x * v[k] - std::sqrt((k + 1) / 2.0) * v[k + 1] - std::sqrt(k / 2.0) * v[k - 1]));
    }
    CHECK(worst <= 1e-10);

    // far tails neither overflow nor produce nan
    const auto far = oscillator_values(150, 40.0);
    for (double v : far) CHECK(std::isfinite(v));
    CHECK(far[149] > 0);
}

TEST_CASE("hermite kernel")
{
    CHECK(hermite_kernel(1, 0, 0) == doctest::Approx(1 / std::sqrt(std::numbers::pi)).epsilon(1e-15));
    CHECK(hermite_kernel(7, 0.3, -1.2) == hermite_kernel(7, -1.2, 0.3));
    for (std::size_t N : {1u, 3u, 10u})
        for (double x : {-2.0, 0.1, 3.5})
            for (double y : {-1.0, 0.7, 4.0})
                CHECK(christoffel_darboux(N, x, y) == doctest::Approx(hermite_kernel(N, x, y)).epsilon(1e-11).scale(1));
    for (std::size_t N : {1u, 4u, 10u}) {
        const auto g = gauss_legendre(160, -12, 12);
        double tr = 0;
        for (std::size_t a = 0; a < g.size(); ++a) tr += g.w[a] * hermite_kernel(N, g.x[a], g.x[a]);
        CHECK(std::abs(tr - static_cast<double>(N)) < 1e-8);
    }
}

TEST_CASE("mehler propagator")
{
    double worst = 0;
    for (double x = -4; x <= 4; x += 0.25)
        for (double y = -4; y <= 4; y += 0.25) worst = std::max(worst, std::abs(mehler_propagator(0.5, x, y) - mehler_spectral(0.5, x, y)));
    CHECK(worst <= 1e-10);
    // at t = 0.3 the 60-term tail alone is ~2e-9, so the oracle keeps 120 terms
    worst = 0;
    for (double t : {0.3, 1.0, 2.5})
        for (double x = -6; x <= 6; x += 0.5)
            for (double y = -6; y <= 6; y += 0.5) worst = std::max(worst, std::abs(mehler_propagator(t, x, y) - mehler_spectral(t, x, y, 120)));
    CHECK(worst <= 1e-10);
    CHECK(mehler_propagator(0.4, 1.1, -0.3) == mehler_propagator(0.4, -0.3, 1.1));
    CHECK_THROWS_AS(mehler_propagator(0.0, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(mehler_propagator(-1.0, 0, 0), std::invalid_argument);

    const auto g = panel_grid(-10, 10, 1, 20);
    const auto r = hermite_law_residuals(4, 0.3, 0.5, g);
    CHECK(r.semigroup <= 1e-8);
    CHECK(r.reversibility <= 1e-8);
    CHECK(r.commutation <= 1e-8);
}

TEST_CASE("forward kernel")
{
    CHECK(forward_hermite(0, 5, 0.3, 1.1) == hermite_kernel(5, 0.3, 1.1));
    for (double t : {0.0, 0.5, 3.0}) CHECK(forward_hermite(t, 1, 0.4, -0.9) == doctest::Approx(hermite_kernel(1, 0.4, -0.9)).epsilon(1e-15));
    CHECK(extended_hermite_kernel(3, 0.5, 0.2, 0.5, 0.7) == hermite_kernel(3, 0.2, 0.7));

    // e^{-tD} o (e^{tD} K) = K on the grid
    const auto g = panel_grid(-10, 10, 1, 20);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(g.w.data(), static_cast<Eigen::Index>(g.size()));
    const Eigen::MatrixXd back = mehler_matrix(0.8, g.x, g.x) * w.asDiagonal() * forward_matrix(0.8, 6, g.x, g.x);
    CHECK((back - forward_matrix(0.0, 6, g.x, g.x)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("single-time identity cases")
{
    const auto half = gue_identity_check(1, {0.0}, {GueLevel::indicator_above(0.0)});
    CHECK(half.pass);
    CHECK(std::abs(half.lhs - 0.5) <= 1e-9);
    CHECK(std::abs(half.rhs - 0.5) <= 1e-9);
    for (double s : {-1.5, -0.2, 0.8, 2.0}) {
        const auto r = gue_identity_check(1, {0.0}, {GueLevel::indicator_above(s)});
        CHECK(r.lhs == doctest::Approx(0.5 * (1 + std::erf(s))).epsilon(1e-10));
        CHECK(r.rhs == doctest::Approx(0.5 * (1 + std::erf(s))).epsilon(1e-10));
    }
}

TEST_CASE("two-time identity")
{
    const auto r = gue_identity_check(5, {0.0, 0.7}, {GueLevel::indicator_above(0.5), GueLevel::indicator_above(1.0)});
    CHECK(r.pass);
    CHECK(r.diff <= 1e-8);
    CHECK(r.lhs > 0);
    CHECK(r.warnings.empty());
}

TEST_CASE("property: presets pass and are stationary")
{
    for (std::size_t N : {1u, 2u, 5u, 10u})
        for (std::size_t n = 1; n <= 3; ++n) {
            CAPTURE(N);
            CAPTURE(n);
            auto p = gue_preset(N, n);
            const auto r = gue_identity_check(N, p.times, p.levels);
            CHECK(r.pass);
            CHECK(r.lhs > 1e-6);
            for (auto& t : p.times) t += 2.75;
            const auto s = gue_identity_check(N, p.times, p.levels);
            CHECK(std::abs(s.lhs - r.lhs) <= 1e-10);
            CHECK(std::abs(s.rhs - r.rhs) <= 1e-10);
        }
}

TEST_CASE("smooth multipliers")
{
    const std::vector<GueLevel> lv = {GueLevel::poly_gaussian({0.3, 0.0, 0.2}, 0.25),
                                      GueLevel::poly_gaussian({0.5, -0.1}, 0.5)};
    const auto r = gue_identity_check(3, {0.0, 0.6}, lv);
    CHECK(r.pass);
    CHECK(r.warnings.empty());
    const auto c = gue_identity_check(2, {0.0}, {GueLevel::from_function([](double x) { return 0.4 / (1 + x * x); })});
    CHECK(c.pass);
    CHECK(c.warnings.size() == 1);
}

TEST_CASE("coarse grids are reported")
{
    GueGridOptions coarse;
    coarse.nodes = 3;
    coarse.panel = 4;
    CHECK_THROWS_AS(gue_identity_check(5, {0.0, 0.3}, {GueLevel::indicator_above(2.0), GueLevel::indicator_above(2.5)}, coarse),
                    ResolutionError);
    CHECK_THROWS_AS(gue_lhs(2, {1.0, 0.5}, {GueLevel::indicator_above(0), GueLevel::indicator_above(0)}, {}),
                    std::invalid_argument);
}

TEST_CASE("property: nested indicators are monotone")
{
    for (std::size_t N : {1u, 3u, 6u}) {
        double prev = 0;
        for (double s = -1; s <= 5; s += 0.5) {
            const double d = gue_lhs(N, {0.0}, {GueLevel::indicator_above(s)}, {});
            CHECK(d >= prev - 1e-12);
            prev = d;
        }
    }
}

TEST_CASE("edge rescaling")
{
    CHECK(rescaled_generator_potential(20, 0.0) == 0.0);
    CHECK(rescaled_generator_potential(100, 0.0) == 0.0);
    CHECK(rescaled_generator_potential(8, 2.0) == doctest::Approx(2.5));
    const std::size_t N = 20;
    const double c = std::sqrt(2.0) * std::pow(20.0, 1.0 / 6.0), e = std::sqrt(40.0);
    const auto g = panel_grid((-12 - e) * c, (12 - e) * c, 2, 20);
    double tr = 0;
    for (std::size_t a = 0; a < g.size(); ++a) tr += g.w[a] * rescaled_kernel(N, g.x[a], g.x[a]);
    CHECK(std::abs(tr - 20.0) <= 1e-6);
    CHECK(rescaled_kernel(50, 0.5, -0.3) == doctest::Approx(rescaled_kernel(50, -0.3, 0.5)).epsilon(1e-14));
}

TEST_CASE("continuum operator")
{
    const auto zero = [](double, double) { return 0.0; };
    const Eigen::MatrixXd G = continuum_gamma(0, 1, zero, 16);
    Eigen::VectorXd expect(60);
    for (int k = 0; k < 60; ++k) expect(k) = std::exp(-static_cast<double>(k));
    CHECK((G - Eigen::MatrixXd(expect.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-13);
    for (std::size_t N : {1u, 3u}) CHECK(std::abs(continuum_hermite_statistic(N, 0, 1, zero, 64) - 1) <= 1e-12);

    // on a grid, h = 0 gives the Mehler kernel
    const std::vector<double> xs = {-1.0, 0.0, 0.6, 2.0};
    const Eigen::MatrixXd onGrid = gamma_on_grid(G, xs);
    for (std::size_t a = 0; a < xs.size(); ++a)
        for (std::size_t b = 0; b < xs.size(); ++b)
            CHECK(onGrid(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) ==
                  doctest::Approx(mehler_propagator(1.0, xs[a], xs[b])).epsilon(1e-10));

    const double c = 0.5;
    const auto cst = [c](double, double) { return c; };
    double prev = 1;
    for (std::size_t n : {64u, 256u, 1024u, 8192u}) {
        const double err = std::abs(continuum_hermite_statistic(2, 0, 1, cst, n) - std::exp(-2 * c));
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev <= 1e-4);

    CHECK_THROWS_AS(continuum_gamma(0, 1, [](double, double) { return 40.0; }, 20), std::invalid_argument);
    CHECK_THROWS_AS(continuum_gamma(0, 1, zero, 1), std::invalid_argument);
    CHECK_THROWS_AS(continuum_gamma(0, 1, [](double, double) { return -1.0; }, 8), std::invalid_argument);

    // time-dependent potential takes the general path and differs from its frozen version
    const auto moving = [](double t, double x) { return 0.5 / (1 + std::exp(-4 * (x - t))); };
    const auto frozen = [](double, double x) { return 0.5 / (1 + std::exp(-4 * x)); };
    const double vm = continuum_hermite_statistic(1, 0, 1, moving, 64), vf = continuum_hermite_statistic(1, 0, 1, frozen, 64);
    CHECK(vm > vf);
    CHECK(vf > 0);
    CHECK(vf < 1);
}

TEST_SUITE_END();
