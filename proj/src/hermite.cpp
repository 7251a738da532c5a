#include "pathdet/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pathdet {

namespace {

const double kPiQuarter = std::pow(std::numbers::pi, -0.25);

void require_increasing(const std::vector<double>& times)
{
    if (times.empty()) throw std::invalid_argument("at least one time is required");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("times must be strictly increasing");
}

Eigen::MatrixXd diag_weights(const QuadratureGrid& g)
{
    return Eigen::Map<const Eigen::VectorXd>(g.w.data(), static_cast<Eigen::Index>(g.size())).asDiagonal();
}

} // namespace

std::vector<double> oscillator_values(std::size_t count, double x)
{
    std::vector<double> out(count, 0.0);
    if (count == 0) return out;
    auto value = [](double p, double scale) {
        if (scale > -700 || p == 0) return p * std::exp(scale);
        return std::copysign(std::exp(scale + std::log(std::abs(p))), p);
    };
    // p_k carried with a separate log scale so large |x| neither underflows nor overflows
    double scale = -0.5 * x * x;
    double p0 = kPiQuarter, p1 = std::sqrt(2.0) * x * p0;
    out[0] = value(p0, scale);
    if (count > 1) out[1] = value(p1, scale);
    for (std::size_t k = 1; k + 1 < count; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = std::sqrt(2.0 / (kk + 1)) * x * p1 - std::sqrt(kk / (kk + 1)) * p0;
        p0 = p1;
        p1 = p2;
        if (std::abs(p1) > 1e150) {
            p0 *= 1e-150;
            p1 *= 1e-150;
            scale += 150 * std::numbers::ln10;
        }
        out[k + 1] = value(p1, scale);
    }
    return out;
}

double oscillator_fn(std::size_t k, double x)
{
    return oscillator_values(k + 1, x)[k];
}

Eigen::MatrixXd oscillator_matrix(std::size_t count, const std::vector<double>& xs)
{
    Eigen::MatrixXd m(count, xs.size());
    for (std::size_t a = 0; a < xs.size(); ++a) {
        const auto v = oscillator_values(count, xs[a]);
        for (std::size_t k = 0; k < count; ++k) m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)) = v[k];
    }
    return m;
}

double hermite_kernel(std::size_t N, double x, double y)
{
    return forward_hermite(0.0, N, x, y);
}

double christoffel_darboux(std::size_t N, double x, double y)
{
    if (N == 0) throw std::invalid_argument("christoffel_darboux: N must be positive");
    if (x == y) return hermite_kernel(N, x, y);
    const auto px = oscillator_values(N + 1, x), py = oscillator_values(N + 1, y);
    return std::sqrt(N / 2.0) * (px[N] * py[N - 1] - px[N - 1] * py[N]) / (x - y);
}

double mehler_propagator(double t, double x, double y)
{
    if (!(t > 0)) throw std::invalid_argument("mehler_propagator: t must be positive");
    const double rho = std::exp(-t);
    const double one_m = -std::expm1(-2 * t);
    const double e = ((1 + rho * rho) * (x * x + y * y) - 4 * rho * x * y) / (2 * one_m);
    return std::exp(-e) / std::sqrt(std::numbers::pi * one_m);
}

double mehler_spectral(double t, double x, double y, std::size_t terms)
{
    const auto px = oscillator_values(terms, x), py = oscillator_values(terms, y);
    double s = 0;
    for (std::size_t k = 0; k < terms; ++k) s += std::exp(-t * static_cast<double>(k)) * px[k] * py[k];
    return s;
}

double forward_hermite(double t, std::size_t N, double x, double y)
{
    if (N == 0) throw std::invalid_argument("forward_hermite: N must be positive");
    const auto px = oscillator_values(N, x), py = oscillator_values(N, y);
    double s = 0;
    for (std::size_t k = 0; k < N; ++k) s += std::exp(t * static_cast<double>(k)) * px[k] * py[k];
    return s;
}

double extended_hermite_kernel(std::size_t N, double s, double x, double t, double y)
{
    if (s >= t) return forward_hermite(s - t, N, x, y);
    return -(mehler_propagator(t - s, x, y) - forward_hermite(-(t - s), N, x, y));
}

Eigen::MatrixXd mehler_matrix(double t, const std::vector<double>& xs, const std::vector<double>& ys)
{
    Eigen::MatrixXd m(xs.size(), ys.size());
    for (std::size_t a = 0; a < xs.size(); ++a)
        for (std::size_t b = 0; b < ys.size(); ++b)
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = mehler_propagator(t, xs[a], ys[b]);
    return m;
}

Eigen::MatrixXd forward_matrix(double t, std::size_t N, const std::vector<double>& xs, const std::vector<double>& ys)
{
    const Eigen::MatrixXd px = oscillator_matrix(N, xs), py = oscillator_matrix(N, ys);
    Eigen::VectorXd e(N);
    for (std::size_t k = 0; k < N; ++k) e(static_cast<Eigen::Index>(k)) = std::exp(t * static_cast<double>(k));
    return px.transpose() * e.asDiagonal() * py;
}

double GueLevel::operator()(double x) const
{
    switch (kind) {
    case Kind::IndicatorAbove:
        return x > threshold ? 1.0 : 0.0;
    case Kind::PolyGaussian: {
        double p = 0;
        for (auto c = coeffs.rbegin(); c != coeffs.rend(); ++c) p = p * x + *c;
        return p * std::exp(-decay * x * x);
    }
    case Kind::Custom:
        return custom(x);
    }
    return 0;
}

GueLevel GueLevel::indicator_above(double s)
{
    GueLevel l;
    l.kind = Kind::IndicatorAbove;
    l.threshold = s;
    return l;
}

GueLevel GueLevel::poly_gaussian(std::vector<double> coeffs, double decay)
{
    if (!(decay >= 0)) throw std::invalid_argument("poly_gaussian: decay must be non-negative");
    GueLevel l;
    l.kind = Kind::PolyGaussian;
    l.coeffs = std::move(coeffs);
    l.decay = decay;
    return l;
}

GueLevel GueLevel::from_function(Multiplier q)
{
    GueLevel l;
    l.kind = Kind::Custom;
    l.custom = std::move(q);
    return l;
}

double gue_lhs(std::size_t N, const std::vector<double>& times, const std::vector<GueLevel>& levels,
               const GueGridOptions& opts)
{
    require_increasing(times);
    if (levels.size() != times.size()) throw std::invalid_argument("gue_lhs: one level per time");
    const double L = opts.domain;
    std::vector<QuadratureGrid> grids;
    std::vector<double> kept_times;
    std::vector<Multiplier> q;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto& lv = levels[i];
        if (lv.kind == GueLevel::Kind::IndicatorAbove) {
            const double a = std::max(lv.threshold, -L);
            if (a >= L) continue;  // Q vanishes on the window
            grids.push_back(panel_grid(a, L, opts.panel, opts.nodes));
            q.push_back([](double) { return 1.0; });
        } else {
            grids.push_back(panel_grid(-L, L, opts.panel, opts.nodes));
            q.push_back(lv);
        }
        kept_times.push_back(times[i]);
    }
    if (grids.empty()) return 1.0;
    std::vector<std::vector<KernelFunction>> blocks(grids.size());
    for (std::size_t i = 0; i < grids.size(); ++i)
        for (std::size_t j = 0; j < grids.size(); ++j) {
            const double ti = kept_times[i], tj = kept_times[j];
            blocks[i].push_back([N, ti, tj](double x, double y) { return extended_hermite_kernel(N, ti, x, tj, y); });
        }
    return block_nystrom_determinant(blocks, grids, q);
}

double gue_rhs(std::size_t N, const std::vector<double>& times, const std::vector<GueLevel>& levels,
               const GueGridOptions& opts)
{
    require_increasing(times);
    if (levels.size() != times.size()) throw std::invalid_argument("gue_rhs: one level per time");
    const double L = opts.domain;
    std::vector<double> forced;
    if (levels[0].kind == GueLevel::Kind::IndicatorAbove) forced.push_back(levels[0].threshold);
    const auto outer = panel_grid(-L, L, opts.panel, opts.nodes, forced);
    const auto P = static_cast<Eigen::Index>(outer.size());

    Eigen::VectorXd qbar1(P);
    for (Eigen::Index a = 0; a < P; ++a) qbar1(a) = 1.0 - levels[0](outer.x[static_cast<std::size_t>(a)]);

    const Eigen::MatrixXd K = forward_matrix(0.0, N, outer.x, outer.x);
    Eigen::MatrixXd A;
    if (times.size() == 1) {
        A = qbar1.asDiagonal() * K;
    } else {
        // chain rows: outer grid, then each inner level's grid
        Eigen::MatrixXd chain = qbar1.asDiagonal() * Eigen::MatrixXd::Identity(P, P);
        const QuadratureGrid* prev = &outer;
        std::vector<QuadratureGrid> inner(times.size());
        bool vanished = false;
        for (std::size_t i = 1; i < times.size(); ++i) {
            const auto& lv = levels[i];
            if (lv.kind == GueLevel::Kind::IndicatorAbove) {
                const double b = std::min(lv.threshold, L);
                if (b <= -L) {
                    vanished = true;
                    break;
                }
                inner[i] = panel_grid(-L, b, opts.panel, opts.nodes);
            } else {
                inner[i] = panel_grid(-L, L, opts.panel, opts.nodes);
            }
            Eigen::VectorXd wq(static_cast<Eigen::Index>(inner[i].size()));
            for (std::size_t a = 0; a < inner[i].size(); ++a)
                wq(static_cast<Eigen::Index>(a)) = inner[i].w[a] * (1.0 - lv(inner[i].x[a]));
            chain = chain * mehler_matrix(times[i] - times[i - 1], prev->x, inner[i].x) * wq.asDiagonal();
            prev = &inner[i];
        }
        A = vanished ? Eigen::MatrixXd::Zero(P, P)
                     : Eigen::MatrixXd(chain * forward_matrix(times.back() - times.front(), N, prev->x, outer.x));
    }
    const Eigen::MatrixXd M = weight_matrix(K - A, outer, outer);
    if (!M.allFinite()) throw NonFiniteKernel("gue_rhs: non-finite kernel value");
    return determinant_lu(Eigen::MatrixXd::Identity(P, P) - M);
}

GueReport gue_identity_check(std::size_t N, const std::vector<double>& times, const std::vector<GueLevel>& levels,
                             const GueGridOptions& opts, double tol)
{
    if (N == 0) throw std::invalid_argument("gue_identity_check: N must be positive");
    GueReport r;
    r.tolerance = tol;
    for (const auto& lv : levels)
        if (!lv.preset()) {
            r.warnings.push_back("custom q is outside the preset growth classes; growth hypothesis not verified");
            break;
        }
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] - times[i - 1] < 0.1) {
            r.warnings.push_back("time gap below 0.1; backward kernel may be under-resolved");
            break;
        }
    r.lhs = gue_lhs(N, times, levels, opts);
    r.rhs = gue_rhs(N, times, levels, opts);
    r.diff = std::abs(r.lhs - r.rhs);
    r.pass = r.diff <= tol;
    if (opts.refine) {
        auto fine = opts;
        fine.panel = opts.panel / 2;
        const double l2 = gue_lhs(N, times, levels, fine), r2 = gue_rhs(N, times, levels, fine);
        r.refinement_shift = std::max(std::abs(l2 - r.lhs), std::abs(r2 - r.rhs));
        if (r.refinement_shift > tol)
            throw ResolutionError("gue_identity_check: refinement moved the result by " +
                                  std::to_string(r.refinement_shift) + "; increase nodes or domain");
    }
    return r;
}

GuePreset gue_preset(std::size_t N, std::size_t n)
{
    if (N == 0 || n == 0 || n > 3) throw std::invalid_argument("gue_preset: N >= 1 and 1 <= n <= 3");
    const double edge = std::sqrt(2.0 * static_cast<double>(N));
    const double t[] = {0.0, 0.7, 1.5}, off[] = {-0.5, 0.0, -0.8};
    GuePreset p{N, {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        p.times.push_back(t[i]);
        p.levels.push_back(GueLevel::indicator_above(edge + off[i]));
    }
    return p;
}

double rescaled_kernel(std::size_t N, double x, double y)
{
    const double c = std::sqrt(2.0) * std::pow(static_cast<double>(N), 1.0 / 6.0);
    const double e = std::sqrt(2.0 * static_cast<double>(N));
    return hermite_kernel(N, x / c + e, y / c + e) / c;
}

double rescaled_generator_potential(std::size_t N, double x)
{
    return x + x * x / (2 * std::pow(static_cast<double>(N), 2.0 / 3.0));
}

KernelLawResiduals hermite_law_residuals(std::size_t N, double s, double t, const QuadratureGrid& grid)
{
    const Eigen::MatrixXd W = diag_weights(grid);
    const Eigen::MatrixXd Ms = mehler_matrix(s, grid.x, grid.x), Mt = mehler_matrix(t, grid.x, grid.x);
    const Eigen::MatrixXd K = forward_matrix(0.0, N, grid.x, grid.x);
    KernelLawResiduals r;
    r.semigroup = (Ms * W * Mt - mehler_matrix(s + t, grid.x, grid.x)).cwiseAbs().maxCoeff();
    r.reversibility = (Mt * W * forward_matrix(t, N, grid.x, grid.x) - K).cwiseAbs().maxCoeff();
    r.commutation = (Mt * W * K - K * W * Mt).cwiseAbs().maxCoeff();
    return r;
}

Eigen::MatrixXd continuum_gamma(double l, double r, const TimePotential& h, std::size_t n_steps,
                                const ContinuumOptions& opts)
{
    if (n_steps < 2) throw std::invalid_argument("continuum_gamma: n_steps must be at least 2");
    if (!(r > l)) throw std::invalid_argument("continuum_gamma: requires l < r");
    const double delta = (r - l) / static_cast<double>(n_steps - 1);
    const auto grid = panel_grid(-opts.domain, opts.domain, opts.panel, opts.nodes);
    const Eigen::MatrixXd Phi = oscillator_matrix(opts.modes, grid.x);
    const auto M = static_cast<Eigen::Index>(opts.modes);

    Eigen::VectorXd damp(M);
    for (Eigen::Index k = 0; k < M; ++k) damp(k) = std::exp(-delta * static_cast<double>(k));

    const auto P = static_cast<Eigen::Index>(grid.size());
    auto weighted_h = [&](double t) {
        Eigen::VectorXd hw(P);
        double hmax = 0;
        for (std::size_t a = 0; a < grid.size(); ++a) {
            const double v = h(t, grid.x[a]);
            if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("continuum_gamma: h must be finite and >= 0");
            hmax = std::max(hmax, v);
            hw(static_cast<Eigen::Index>(a)) = grid.w[a] * v;
        }
        if (delta * hmax >= 1) throw std::invalid_argument("continuum_gamma: delta * max h >= 1, increase n_steps");
        return hw;
    };
    // Q = I - delta <phi_j, h phi_k>, so h = 0 gives the identity exactly
    auto make_q = [&](const Eigen::VectorXd& hw) {
        return Eigen::MatrixXd(Eigen::MatrixXd::Identity(M, M) - delta * (Phi * hw.asDiagonal() * Phi.transpose()));
    };

    const Eigen::VectorXd h0 = weighted_h(l);
    bool stationary = true;
    for (std::size_t i = 1; i < n_steps && stationary; ++i)
        stationary = weighted_h(l + delta * static_cast<double>(i)) == h0;

    const Eigen::MatrixXd Q0 = make_q(h0);
    if (stationary) {
        // Q (E Q)^{n-1} by repeated squaring
        Eigen::MatrixXd step = damp.asDiagonal() * Q0, acc = Eigen::MatrixXd::Identity(M, M);
        for (std::size_t e = n_steps - 1; e > 0; e >>= 1) {
            if (e & 1) acc = acc * step;
            if (e > 1) step = step * step;
        }
        return Q0 * acc;
    }
    Eigen::MatrixXd gamma = Q0;
    for (std::size_t i = 1; i < n_steps; ++i)
        gamma = gamma * damp.asDiagonal() * make_q(weighted_h(l + delta * static_cast<double>(i)));
    return gamma;
}

Eigen::MatrixXd gamma_on_grid(const Eigen::MatrixXd& modal, const std::vector<double>& xs)
{
    const Eigen::MatrixXd Phi = oscillator_matrix(static_cast<std::size_t>(modal.rows()), xs);
    return Phi.transpose() * modal * Phi;
}

double continuum_hermite_statistic(std::size_t N, double l, double r, const TimePotential& h, std::size_t n_steps,
                                   const ContinuumOptions& opts)
{
    if (N == 0 || N > opts.modes) throw std::invalid_argument("continuum_hermite_statistic: need 1 <= N <= modes");
    const Eigen::MatrixXd gamma = continuum_gamma(l, r, h, n_steps, opts);
    const auto n = static_cast<Eigen::Index>(N);
    Eigen::MatrixXd B = gamma.topLeftCorner(n, n);
    for (Eigen::Index k = 0; k < n; ++k) B.col(k) *= std::exp((r - l) * static_cast<double>(k));
    return determinant_lu(B);
}

} // namespace pathdet
