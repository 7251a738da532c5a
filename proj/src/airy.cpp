#include "pathdet/airy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace pathdet {

namespace {

constexpr double kAi0 = 0.355028053887817239260;
constexpr double kAiP0 = -0.258819403792806798405;
constexpr double kStep = 0.25;
constexpr double kTableEdge = 8.0;
constexpr int kCenters = static_cast<int>(2 * kTableEdge / kStep) + 1;

struct Taylor {
    double v, d, dd;
};

// Taylor expansion of the Airy equation y'' = x y about c, evaluated at c + h.
Taylor taylor(double c, double y0, double y1, double h)
{
    double ckm1 = 0, ck = y0, ck1 = y1;  // c_{k-1}, c_k, c_{k+1}
    double hp = 1;                       // h^k
    Taylor t{0, 0, 0};
    double hk_m1 = 0, hk_m2 = 0;         // h^{k-1}, h^{k-2}
    for (int k = 0; k < 80; ++k) {
        const double kk = k;
        t.v += ck * hp;
        if (k >= 1) t.d += kk * ck * hk_m1;
        if (k >= 2) t.dd += kk * (kk - 1) * ck * hk_m2;
        const double ck2 = (c * ck + ckm1) / ((kk + 2) * (kk + 1));
        ckm1 = ck;
        ck = ck1;
        ck1 = ck2;
        hk_m2 = hk_m1;
        hk_m1 = hp;
        hp *= h;
        if (k > 4 && std::abs(ck) * std::abs(hp) < 1e-19 * (std::abs(t.v) + 1e-300) &&
            std::abs(ck1 * hp * h) < 1e-19 * (std::abs(t.v) + 1e-300))
            break;
    }
    return t;
}

std::array<double, 40> asymptotic_u()
{
    std::array<double, 40> u{};
    u[0] = 1;
    for (int k = 1; k < 40; ++k)
        u[k] = u[k - 1] * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
    return u;
}

const std::array<double, 40>& coeff_u()
{
    static const auto u = asymptotic_u();
    return u;
}

std::array<double, 40> asymptotic_v()
{
    std::array<double, 40> v{};
    const auto u = asymptotic_u();
    v[0] = 1;
    for (int k = 1; k < 40; ++k) v[k] = -(6.0 * k + 1) / (6.0 * k - 1) * u[k];
    return v;
}

double coeff_v(int k)
{
    static const auto v = asymptotic_v();
    return v[static_cast<std::size_t>(k)];
}

// Optimally truncated sum of (-1)^j a_{first + j stride} zeta^{-(first + j stride)} (sign by k when !signed_by_half).
template <class Coef>
double alternating(Coef a, double zeta, int first, int stride, bool signed_by_half)
{
    const double inv = 1 / zeta, step = stride == 1 ? inv : inv * inv;
    double zp = first == 0 ? 1.0 : inv;
    double s = 0, prev = HUGE_VAL;
    for (int k = first, j = 0; k < 40; k += stride, ++j, zp *= step) {
        const double term = a(k) * zp;
        if (std::abs(term) > prev) break;
        const int sign_index = signed_by_half ? j : k;
        s += (sign_index % 2 == 0) ? term : -term;
        prev = std::abs(term);
        if (prev < 1e-18 * std::abs(s)) break;
    }
    return s;
}

void asymptotic_positive(double x, double& ai, double& aip)
{
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    const double e = std::exp(-zeta) / (2 * std::sqrt(std::numbers::pi));
    const double q = std::pow(x, 0.25);
    const auto& u = coeff_u();
    ai = e / q * alternating([&](int k) { return u[static_cast<std::size_t>(k)]; }, zeta, 0, 1, false);
    aip = -q * e * alternating(coeff_v, zeta, 0, 1, false);
}

void asymptotic_negative(double x, double& ai, double& aip)
{
    const double z = -x;
    const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
    const double s = std::sin(zeta), c = std::cos(zeta);
    const double sin_t = (s + c) / std::numbers::sqrt2, cos_t = (c - s) / std::numbers::sqrt2;
    const double q = std::pow(z, 0.25), rp = 1 / std::sqrt(std::numbers::pi);
    const auto& u = coeff_u();
    auto uk = [&](int k) { return u[static_cast<std::size_t>(k)]; };
    const double pu = alternating(uk, zeta, 0, 2, true), qu = alternating(uk, zeta, 1, 2, true);
    const double pv = alternating(coeff_v, zeta, 0, 2, true), qv = alternating(coeff_v, zeta, 1, 2, true);
    ai = rp / q * (sin_t * pu - cos_t * qu);
    aip = -rp * q * (cos_t * pv + sin_t * qv);
}

struct TableEntry {
    double ai, aip;
};

// Values at the centers -8, -7.75, ..., 8. The negative half is stepped left from the
// Maclaurin data at 0, the positive half left from the asymptotic values at 8; both
// directions are the stable ones for the Airy equation.
std::array<TableEntry, kCenters> build_table()
{
    std::array<TableEntry, kCenters> t{};
    const int zero = kCenters / 2;
    t[zero] = {kAi0, kAiP0};
    for (int i = zero; i > 0; --i) {
        const double c = (i - zero) * kStep;
        const auto r = taylor(c, t[i].ai, t[i].aip, -kStep);
        t[i - 1] = {r.v, r.d};
    }
    double a = 0, ap = 0;
    asymptotic_positive(kTableEdge, a, ap);
    t[kCenters - 1] = {a, ap};
    for (int i = kCenters - 1; i > zero + 1; --i) {
        const double c = (i - zero) * kStep;
        const auto r = taylor(c, t[i].ai, t[i].aip, -kStep);
        t[i - 1] = {r.v, r.d};
    }
    return t;
}

const std::array<TableEntry, kCenters>& table()
{
    static const auto t = build_table();
    return t;
}

void check_window(double x)
{
    if (!(std::abs(x) <= kAiryWindow))
        throw std::domain_error("airy: argument " + std::to_string(x) + " outside the accuracy window");
}

bool in_table(double x)
{
    return std::abs(x) <= kTableEdge + kStep / 2;
}

Taylor from_table(double x)
{
    const int zero = kCenters / 2;
    int i = static_cast<int>(std::lround(x / kStep)) + zero;
    i = std::clamp(i, 0, kCenters - 1);
    const double c = (i - zero) * kStep;
    const auto& e = table()[static_cast<std::size_t>(i)];
    return taylor(c, e.ai, e.aip, x - c);
}

// Ai and Ai' together, the hot path for kernel matrices.
void airy_pair(double x, double& ai, double& aip)
{
    if (in_table(x)) {
        const auto t = from_table(x);
        ai = t.v;
        aip = t.d;
    } else if (x > 0) {
        asymptotic_positive(x, ai, aip);
    } else {
        asymptotic_negative(x, ai, aip);
    }
}

double ai_unchecked(double x)
{
    double a = 0, ap = 0;
    airy_pair(x, a, ap);
    return a;
}

// Upper bound for |Ai(z)|.
double envelope(double z)
{
    if (z <= 1) return 0.6;
    return std::exp(-2.0 / 3.0 * z * std::sqrt(z)) / (2 * std::sqrt(std::numbers::pi) * std::pow(z, 0.25));
}

constexpr double kTailTol = 1e-16;
constexpr double kMaxLambda = 400;

// Panels of width 1 on [0, Lambda] with Lambda grown until e^{-lambda tau} env(xmin + lambda)^2 is negligible.
QuadratureGrid lambda_grid(double tau, double xmin)
{
    double top = 1;
    while (std::exp(-top * tau) * std::pow(envelope(xmin + top), 2) > kTailTol) {
        top += 1;
        if (top > kMaxLambda) throw std::runtime_error("airy: spectral tail does not reach tolerance");
    }
    return panel_grid(0, top, 1.0, 20);
}

// int_{-inf}^0 e^{lambda tau} Ai(x + lambda) Ai(y + lambda) d lambda, tau > 0.
double lower_spectral(double tau, double x, double y)
{
    const double lo = -(37 + std::max(0.0, std::log(1 / tau))) / tau;
    if (std::min(x, y) + lo < -kAiryWindow)
        throw std::runtime_error("airy: spectral tail for tau = " + std::to_string(tau) + " leaves the accuracy window");
    const auto g = panel_grid(lo, 0, 0.25, 20);
    double s = 0;
    for (std::size_t a = 0; a < g.size(); ++a)
        s += g.w[a] * std::exp(g.x[a] * tau) * ai_unchecked(x + g.x[a]) * ai_unchecked(y + g.x[a]);
    return s;
}

void require_increasing(const std::vector<double>& times)
{
    if (times.empty()) throw std::invalid_argument("at least one time is required");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("times must be strictly increasing");
}

double min_gap(const std::vector<double>& times)
{
    double g = HUGE_VAL;
    for (std::size_t i = 1; i < times.size(); ++i) g = std::min(g, times[i] - times[i - 1]);
    return g;
}

Eigen::VectorXd weights_of(const QuadratureGrid& g)
{
    return Eigen::Map<const Eigen::VectorXd>(g.w.data(), static_cast<Eigen::Index>(g.size()));
}

Eigen::VectorXd values_on(const QuadratureGrid& g, const std::function<double(double)>& f)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
    for (std::size_t a = 0; a < g.size(); ++a) v(static_cast<Eigen::Index>(a)) = f(g.x[a]);
    return v;
}

Eigen::MatrixXd matrix_power(Eigen::MatrixXd base, std::size_t e)
{
    Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(base.rows(), base.cols());
    for (; e > 0; e >>= 1) {
        if (e & 1) acc = acc * base;
        if (e > 1) base = base * base;
    }
    return acc;
}

} // namespace

double airy_ai(double x)
{
    check_window(x);
    return ai_unchecked(x);
}

double airy_ai_prime(double x)
{
    check_window(x);
    double a = 0, ap = 0;
    airy_pair(x, a, ap);
    return ap;
}

double airy_ai_second(double x)
{
    check_window(x);
    if (in_table(x)) return from_table(x).dd;
    return x * ai_unchecked(x);
}

double airy2_kernel(double x, double y)
{
    double ax = 0, apx = 0;
    check_window(x);
    check_window(y);
    airy_pair(x, ax, apx);
    const double h = y - x;
    if (std::abs(h) < 1e-4) {
        // expansion of the closed form about the diagonal
        const double f1 = apx * apx - x * ax * ax;
        const double f2 = ax * ax;
        const double f3 = ax * apx + x * x * ax * ax - x * apx * apx;
        return f1 - h * f2 / 2 - h * h * f3 / 6;
    }
    double ay = 0, apy = 0;
    airy_pair(y, ay, apy);
    return (ax * apy - apx * ay) / (x - y);
}

double airy2_kernel_spectral(double x, double y)
{
    return airy_forward(0.0, x, y);
}

double airy_propagator(double t, double x, double y)
{
    if (!(t > 0)) throw std::invalid_argument("airy_propagator: t must be positive");
    const double d = x - y;
    return std::exp(-d * d / (4 * t) - t * (x + y) / 2 + t * t * t / 12) / std::sqrt(4 * std::numbers::pi * t);
}

double airy_propagator_spectral(double t, double x, double y)
{
    if (!(t > 0)) throw std::invalid_argument("airy_propagator_spectral: t must be positive");
    return lower_spectral(t, x, y) + airy_forward(-t, x, y);
}

double airy_forward(double tau, double x, double y)
{
    check_window(x);
    check_window(y);
    const auto g = lambda_grid(tau, std::min(x, y));
    double s = 0;
    for (std::size_t a = 0; a < g.size(); ++a)
        s += g.w[a] * std::exp(-g.x[a] * tau) * ai_unchecked(x + g.x[a]) * ai_unchecked(y + g.x[a]);
    return s;
}

double extended_airy_kernel(double s, double x, double t, double y)
{
    if (s >= t) return airy_forward(s - t, x, y);
    check_window(x);
    check_window(y);
    return -lower_spectral(t - s, x, y);
}

Eigen::MatrixXd airy_forward_matrix(double tau, const std::vector<double>& xs, const std::vector<double>& ys)
{
    double xmin = HUGE_VAL;
    for (double v : xs) xmin = std::min(xmin, v);
    for (double v : ys) xmin = std::min(xmin, v);
    for (double v : xs) check_window(v);
    for (double v : ys) check_window(v);
    const auto g = lambda_grid(tau, xmin);
    const auto L = static_cast<Eigen::Index>(g.size());
    auto shifted = [&](const std::vector<double>& pts) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), L);
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (Eigen::Index k = 0; k < L; ++k)
                m(static_cast<Eigen::Index>(a), k) = ai_unchecked(pts[a] + g.x[static_cast<std::size_t>(k)]);
        return m;
    };
    Eigen::VectorXd wl(L);
    for (Eigen::Index k = 0; k < L; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        wl(k) = g.w[kk] * std::exp(-g.x[kk] * tau);
    }
    const Eigen::MatrixXd A = shifted(xs);
    if (&xs == &ys) return A * wl.asDiagonal() * A.transpose();
    return A * wl.asDiagonal() * shifted(ys).transpose();
}

Eigen::MatrixXd airy_propagator_matrix(double t, const std::vector<double>& xs, const std::vector<double>& ys)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
    for (std::size_t a = 0; a < xs.size(); ++a)
        for (std::size_t b = 0; b < ys.size(); ++b)
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = airy_propagator(t, xs[a], ys[b]);
    return m;
}

Eigen::MatrixXd extended_airy_block(double s, double t, const std::vector<double>& xs, const std::vector<double>& ys)
{
    if (s >= t) return airy_forward_matrix(s - t, xs, ys);
    return -(airy_propagator_matrix(t - s, xs, ys) - airy_forward_matrix(s - t, xs, ys));
}

double AiryLevel::operator()(double x) const
{
    switch (kind) {
    case Kind::IndicatorAbove:
        return x > threshold ? 1.0 : 0.0;
    case Kind::SoftThreshold:
        return x > threshold ? height * -std::expm1(-slope * (x - threshold)) : 0.0;
    case Kind::Custom:
        return custom(x);
    }
    return 0;
}

AiryLevel AiryLevel::indicator_above(double s)
{
    AiryLevel l;
    l.threshold = s;
    return l;
}

AiryLevel AiryLevel::soft_threshold(double s, double height, double slope)
{
    if (!(slope > 0)) throw std::invalid_argument("soft_threshold: slope must be positive");
    AiryLevel l;
    l.kind = Kind::SoftThreshold;
    l.threshold = s;
    l.height = height;
    l.slope = slope;
    return l;
}

AiryLevel AiryLevel::from_function(Multiplier q)
{
    AiryLevel l;
    l.kind = Kind::Custom;
    l.custom = std::move(q);
    return l;
}

ConjugationPair airy_conjugation(double r)
{
    auto psi = [r](double x) { return x >= 0 ? std::exp(-r * x / 2) : std::sqrt(1 + x * x); };
    return {psi, [psi](double x) { return 1 / psi(x); }};
}

double airy_lhs(const std::vector<double>& times, const std::vector<AiryLevel>& levels, const AiryGridOptions& opts)
{
    require_increasing(times);
    if (levels.size() != times.size()) throw std::invalid_argument("airy_lhs: one level per time");
    std::vector<QuadratureGrid> grids;
    std::vector<double> kept;
    std::vector<Eigen::VectorXd> q;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto& lv = levels[i];
        const double a = lv.supported_above_threshold() ? std::max(lv.threshold, -opts.left) : -opts.left;
        if (a >= opts.right) continue;  // Q vanishes on the window
        grids.push_back(panel_grid(a, opts.right, opts.panel, opts.nodes));
        q.push_back(values_on(grids.back(), lv));
        kept.push_back(times[i]);
    }
    if (grids.empty()) return 1.0;
    const auto pair = airy_conjugation(0.5 * (times.size() > 1 ? min_gap(times) : 1.0));
    std::vector<Eigen::Index> off(grids.size() + 1, 0);
    for (std::size_t i = 0; i < grids.size(); ++i) off[i + 1] = off[i] + static_cast<Eigen::Index>(grids[i].size());
    Eigen::MatrixXd M(off.back(), off.back());
    for (std::size_t i = 0; i < grids.size(); ++i)
        for (std::size_t j = 0; j < grids.size(); ++j) {
            Eigen::MatrixXd b = extended_airy_block(kept[i], kept[j], grids[i].x, grids[j].x);
            if (opts.conjugate) b = conjugate_matrix(b, grids[i].x, grids[j].x, pair);
            M.block(off[i], off[j], b.rows(), b.cols()) = q[i].asDiagonal() * weight_matrix(b, grids[i], grids[j]);
        }
    if (!M.allFinite()) throw NonFiniteKernel("airy_lhs: non-finite kernel value");
    return determinant_lu(Eigen::MatrixXd::Identity(M.rows(), M.cols()) - M);
}

namespace {

// Literal chain Qbar_1 W_12 Qbar_2 ... Qbar_n W_n1 K. The inner variable of factor i runs over
// (-L_i, upper_i], with L_i grown by each propagator's Gaussian reach.
Eigen::MatrixXd complement_chain(const std::vector<double>& times, const std::vector<AiryLevel>& levels,
                                 const AiryGridOptions& opts, const QuadratureGrid& outer)
{
    const std::size_t n = times.size();
    std::vector<QuadratureGrid> inner(n);
    double L = opts.left;
    for (std::size_t i = 1; i < n; ++i) {
        const double tau = times[i] - times[i - 1];
        L += 2 * std::sqrt(40 * tau) + 2 * tau;
        const auto& lv = levels[i];
        double upper = opts.right + 2;
        std::vector<double> br;
        if (lv.kind == AiryLevel::Kind::IndicatorAbove) upper = std::min(lv.threshold, upper);
        else if (lv.supported_above_threshold()) br.push_back(lv.threshold);
        if (upper <= -L) return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(outer.size()), static_cast<Eigen::Index>(outer.size()));
        inner[i] = panel_grid(-L, upper, opts.panel, opts.nodes, br);
    }
    Eigen::MatrixXd g = airy_forward_matrix(times.back() - times.front(), inner[n - 1].x, outer.x);
    for (std::size_t i = n - 1; i >= 1; --i) {
        const Eigen::VectorXd wq =
            weights_of(inner[i]).cwiseProduct(values_on(inner[i], [&](double x) { return 1.0 - levels[i](x); }));
        const auto& prev = (i == 1) ? outer.x : inner[i - 1].x;
        g = airy_propagator_matrix(times[i] - times[i - 1], prev, inner[i].x) * (wq.asDiagonal() * g);
    }
    return g;
}

struct SupportGrid {
    bool empty = true;
    QuadratureGrid grid;
    Eigen::VectorXd wq;  // weights times q
};

SupportGrid support_grid(const AiryLevel& lv, const AiryGridOptions& opts, double left)
{
    SupportGrid s;
    const double a = lv.supported_above_threshold() ? std::max(lv.threshold, -left) : -left;
    if (a >= opts.right) return s;
    s.empty = false;
    s.grid = panel_grid(a, opts.right, opts.panel, opts.nodes);
    s.wq = weights_of(s.grid).cwiseProduct(values_on(s.grid, lv));
    return s;
}

// Distance left of z at which e^{-tau H}(x, z) has fallen below e^{-36} for all x further left.
double propagator_reach(double tau, double z)
{
    const double peak = std::max(0.0, tau * tau * tau / 3 - tau * z);
    return tau * tau + std::sqrt(4 * tau * (peak + 36));
}

} // namespace

double airy_rhs(const std::vector<double>& times, const std::vector<AiryLevel>& levels, const AiryGridOptions& opts)
{
    require_increasing(times);
    if (levels.size() != times.size()) throw std::invalid_argument("airy_rhs: one level per time");
    const std::size_t n = times.size();

    std::vector<SupportGrid> supports(n);
    double left = opts.left;
    if (opts.expand_complements && n > 1) {
        for (std::size_t j = 1; j < n; ++j) {
            supports[j] = support_grid(levels[j], opts, opts.left);
            if (!supports[j].empty) {
                const double z = supports[j].grid.x.front();
                left = std::max(left, propagator_reach(times[j] - times[0], z) - z);
            }
        }
    }

    std::vector<double> forced;
    if (levels[0].supported_above_threshold()) forced.push_back(levels[0].threshold);
    const auto outer = panel_grid(-left, opts.right, opts.panel, opts.nodes, forced);
    const auto P = static_cast<Eigen::Index>(outer.size());
    const Eigen::VectorXd qbar1 = values_on(outer, [&](double x) { return 1.0 - levels[0](x); });
    const Eigen::MatrixXd K = airy_forward_matrix(0.0, outer.x, outer.x);

    Eigen::MatrixXd D;
    if (n == 1) {
        D = K - qbar1.asDiagonal() * K;
    } else if (!opts.expand_complements) {
        D = K - qbar1.asDiagonal() * complement_chain(times, levels, opts, outer);
    } else {
        // Qbar_1 W_12 (1 - Q_2) ... (1 - Q_n) W_n1 K
        //   = Qbar_1 (K + sum over nonempty S of (-1)^|S| W_{1 j1} Q_j1 W_{j1 j2} ... Q_jk W_{jk 1} K)
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(P, P);
        for (std::size_t mask = 1; mask < (std::size_t{1} << (n - 1)); ++mask) {
            std::vector<std::size_t> chain;
            for (std::size_t j = 1; j < n; ++j)
                if (mask & (std::size_t{1} << (j - 1))) chain.push_back(j);
            bool zero = false;
            for (std::size_t j : chain) zero = zero || supports[j].empty;
            if (zero) continue;
            const std::size_t last = chain.back();
            Eigen::MatrixXd g = supports[last].wq.asDiagonal() *
                                airy_forward_matrix(times[last] - times[0], supports[last].grid.x, outer.x);
            for (std::size_t c = chain.size(); c-- > 0;) {
                const std::size_t j = chain[c];
                const double prev_t = c == 0 ? times[0] : times[chain[c - 1]];
                const auto& prev_x = c == 0 ? outer.x : supports[chain[c - 1]].grid.x;
                g = airy_propagator_matrix(times[j] - prev_t, prev_x, supports[j].grid.x) * g;
                if (c > 0) g = supports[chain[c - 1]].wq.asDiagonal() * g;
            }
            B += (chain.size() % 2 == 1) ? Eigen::MatrixXd(-g) : g;
        }
        // K - Qbar_1 (K + B) = Q_1 K - Qbar_1 B
        D = (Eigen::VectorXd::Ones(P) - qbar1).asDiagonal() * K - qbar1.asDiagonal() * B;
    }
    if (opts.conjugate)
        D = conjugate_matrix(D, outer.x, outer.x, airy_conjugation(0.5 * (n > 1 ? min_gap(times) : 1.0)));
    const Eigen::MatrixXd M = weight_matrix(D, outer, outer);
    if (!M.allFinite()) throw NonFiniteKernel("airy_rhs: non-finite kernel value");
    return determinant_lu(Eigen::MatrixXd::Identity(P, P) - M);
}

KernelIdentityReport airy2_identity_check(const std::vector<double>& times, const std::vector<AiryLevel>& levels,
                                          const AiryGridOptions& opts, double tol)
{
    KernelIdentityReport r;
    r.tolerance = tol;
    for (const auto& lv : levels)
        if (!lv.preset()) {
            r.warnings.push_back("custom q is outside the preset growth classes; growth hypothesis not verified");
            break;
        }
    if (times.size() > 1 && min_gap(times) < 0.3) r.warnings.push_back("time gap below 0.3");
    r.lhs = airy_lhs(times, levels, opts);
    r.rhs = airy_rhs(times, levels, opts);
    r.diff = std::abs(r.lhs - r.rhs);
    r.pass = r.diff <= tol;
    if (opts.refine) {
        auto fine = opts;
        fine.panel = opts.panel / 2;
        const double l2 = airy_lhs(times, levels, fine), r2 = airy_rhs(times, levels, fine);
        r.refinement_shift = std::max(std::abs(l2 - r.lhs), std::abs(r2 - r.rhs));
        if (r.refinement_shift > tol)
            throw ResolutionError("airy2_identity_check: refinement moved the result by " +
                                  std::to_string(r.refinement_shift) + "; increase nodes");
    }
    return r;
}

std::vector<AiryCase> airy_preset_suite()
{
    auto ind = [](std::vector<double> s) {
        std::vector<AiryLevel> out;
        for (double v : s) out.push_back(AiryLevel::indicator_above(v));
        return out;
    };
    return {
        {{0.0}, ind({-2.0})},
        {{0.0}, ind({0.0})},
        {{0.0}, ind({1.5})},
        {{0.0, 1.0}, ind({0.0, 0.0})},
        {{0.0, 0.3}, ind({-1.0, 1.0})},
        {{0.0, 2.0}, ind({2.0, -2.0})},
        {{0.0, 0.5, 1.2}, ind({-1.0, 0.5, 0.0})},
        {{0.0, 0.3, 0.6}, ind({-2.0, -2.0, -2.0})},
        {{0.0, 1.0, 2.0}, ind({2.0, -2.0, 1.0})},
    };
}

double tracy_widom_marginal(double s, const TracyWidomOptions& opts)
{
    if (s >= opts.right) return 1.0;
    const auto g = gauss_legendre(opts.nodes, s, opts.right);
    Eigen::MatrixXd K(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
    for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = 0; b < g.size(); ++b)
            K(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = airy2_kernel(g.x[a], g.x[b]);
    return determinant_lu(Eigen::MatrixXd::Identity(K.rows(), K.cols()) - weight_matrix(K, g, g));
}

KernelLawResiduals airy_law_residuals(double s, double t, const std::vector<double>& probes)
{
    if (!(s > 0) || !(t > 0)) throw std::invalid_argument("airy_law_residuals: times must be positive");
    double pmin = HUGE_VAL, pmax = -HUGE_VAL;
    for (double p : probes) {
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
    }
    const double reach = (s + t) * (s + t) + 2 * std::sqrt(40 * (s + t)) + 12;
    const auto z = panel_grid(pmin - reach, std::max(pmax, 0.0) + 10, 0.25, 20);
    const Eigen::VectorXd w = weights_of(z);
    const auto pair = airy_conjugation(0.5 * std::min(s, t));

    const Eigen::MatrixXd Ps = airy_propagator_matrix(s, probes, z.x);
    const Eigen::MatrixXd Pt_right = airy_propagator_matrix(t, z.x, probes);
    const Eigen::MatrixXd Pt_left = airy_propagator_matrix(t, probes, z.x);
    const Eigen::MatrixXd Kpz = airy_forward_matrix(0.0, probes, z.x);

    auto norm = [&](const Eigen::MatrixXd& m) { return conjugate_matrix(m, probes, probes, pair).cwiseAbs().maxCoeff(); };
    KernelLawResiduals r;
    r.semigroup = norm(Ps * w.asDiagonal() * Pt_right - airy_propagator_matrix(s + t, probes, probes));
    r.reversibility = norm(Pt_left * w.asDiagonal() * airy_forward_matrix(t, z.x, probes) -
                           airy_forward_matrix(0.0, probes, probes));
    r.commutation = norm(Pt_left * w.asDiagonal() * Kpz.transpose() - Kpz * w.asDiagonal() * Pt_right);
    return r;
}

double continuum_airy_statistics(double l, double r, const TimePotential& h, std::size_t n_steps,
                                 const AiryContinuumOptions& opts)
{
    if (n_steps < 2) throw std::invalid_argument("continuum_airy_statistics: n_steps must be at least 2");
    if (!(r > l)) throw std::invalid_argument("continuum_airy_statistics: requires l < r");
    const double delta = (r - l) / static_cast<double>(n_steps - 1);
    const auto outer = panel_grid(-opts.left, opts.right, opts.panel, opts.nodes, opts.breaks);
    const auto z = panel_grid(-opts.left - opts.margin, opts.right + 2, opts.panel, opts.nodes, opts.breaks);

    auto q_on = [&](const QuadratureGrid& g, double t) {
        Eigen::VectorXd q(static_cast<Eigen::Index>(g.size()));
        for (std::size_t a = 0; a < g.size(); ++a) {
            const double v = h(t, g.x[a]);
            if (!(v >= 0) || !std::isfinite(v))
                throw std::invalid_argument("continuum_airy_statistics: h must be finite and >= 0");
            if (delta * v >= 1)
                throw std::invalid_argument("continuum_airy_statistics: delta * max h >= 1, increase n_steps");
            if (v != 0 && g.x[a] < -opts.left)
                throw std::invalid_argument("continuum_airy_statistics: h must vanish left of the window");
            q(static_cast<Eigen::Index>(a)) = 1 - delta * v;
        }
        return q;
    };
    auto t_at = [&](std::size_t i) { return l + delta * static_cast<double>(i); };

    std::vector<Eigen::VectorXd> qz(n_steps);
    bool stationary = true;
    for (std::size_t i = 0; i < n_steps; ++i) {
        qz[i] = q_on(z, t_at(i));
        stationary = stationary && qz[i] == qz[0];
    }
    const Eigen::VectorXd qo = q_on(outer, l);
    const Eigen::VectorXd wz = weights_of(z);

    // Gamma e^{(r-l)H} K applied from the right: Q_{t_n} first, Q_{t_1} last on the outer grid
    Eigen::MatrixXd g = qz[n_steps - 1].asDiagonal() * airy_forward_matrix(r - l, z.x, outer.x);
    if (n_steps > 2) {
        const Eigen::MatrixXd W = airy_propagator_matrix(delta, z.x, z.x) * wz.asDiagonal();
        if (stationary) {
            g = matrix_power(qz[0].asDiagonal() * W, n_steps - 2) * g;
        } else {
            for (std::size_t i = n_steps - 2; i >= 1; --i) g = qz[i].asDiagonal() * (W * g);
        }
    }
    const Eigen::MatrixXd A = qo.asDiagonal() * (airy_propagator_matrix(delta, outer.x, z.x) * wz.asDiagonal() * g);
    const Eigen::MatrixXd K = airy_forward_matrix(0.0, outer.x, outer.x);
    const Eigen::MatrixXd M = weight_matrix(K - A, outer, outer);
    if (!M.allFinite()) throw NonFiniteKernel("continuum_airy_statistics: non-finite kernel value");
    return determinant_lu(Eigen::MatrixXd::Identity(M.rows(), M.cols()) - M);
}

} // namespace pathdet
