#include "pathdet/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pathdet {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what)
{
    if (!m.allFinite())
        throw NonFiniteKernel(std::string(what) + ": non-finite kernel value (missing conjugation?)");
}

// Legendre P_m and its derivative at x via the three-term recurrence.
std::pair<double, double> legendre(std::size_t m, double x)
{
    double p0 = 1.0, p1 = x;
    if (m == 0) return {1.0, 0.0};
    for (std::size_t k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
    }
    const double dp = static_cast<double>(m) * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

} // namespace

QuadratureGrid gauss_legendre(std::size_t m, double a, double b)
{
    if (m == 0) throw std::invalid_argument("gauss_legendre: m must be positive");
    if (!(a < b)) throw std::invalid_argument("gauss_legendre: requires a < b");
    std::vector<double> t(m), wt(m);
    const std::size_t half = (m + 1) / 2;
    for (std::size_t k = 0; k < half; ++k) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.75) / (static_cast<double>(m) + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            const auto [p, d] = legendre(m, x);
            dp = d;
            const double dx = p / d;
            x -= dx;
            if (std::abs(dx) <= 1e-15) break;
        }
        dp = legendre(m, x).second;
        const double weight = 2.0 / ((1.0 - x * x) * dp * dp);
        t[k] = -x;
        t[m - 1 - k] = x;
        wt[k] = wt[m - 1 - k] = weight;
    }
    if (m % 2 == 1) t[m / 2] = 0.0;
    QuadratureGrid g;
    g.a = a;
    g.b = b;
    g.x.resize(m);
    g.w.resize(m);
    const double half_len = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < m; ++k) {
        g.x[k] = mid + half_len * t[k];
        g.w[k] = half_len * wt[k];
    }
    return g;
}

QuadratureGrid composite_gauss_legendre(const std::vector<double>& breaks, std::size_t m)
{
    if (breaks.size() < 2) throw std::invalid_argument("composite_gauss_legendre: need at least two breakpoints");
    QuadratureGrid g;
    g.a = breaks.front();
    g.b = breaks.back();
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const auto panel = gauss_legendre(m, breaks[p], breaks[p + 1]);
        g.x.insert(g.x.end(), panel.x.begin(), panel.x.end());
        g.w.insert(g.w.end(), panel.w.begin(), panel.w.end());
    }
    return g;
}

QuadratureGrid panel_grid(double a, double b, double h, std::size_t m, const std::vector<double>& forced)
{
    if (!(a < b) || !(h > 0)) throw std::invalid_argument("panel_grid: requires a < b and h > 0");
    std::vector<double> anchors = {a, b};
    for (double f : forced)
        if (f > a && f < b) anchors.push_back(f);
    std::sort(anchors.begin(), anchors.end());
    std::vector<double> breaks = {a};
    for (std::size_t s = 0; s + 1 < anchors.size(); ++s) {
        const double lo = anchors[s], hi = anchors[s + 1];
        const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / h - 1e-12)));
        for (std::size_t k = 1; k <= pieces; ++k) breaks.push_back(k == pieces ? hi : lo + (hi - lo) * k / pieces);
    }
    return composite_gauss_legendre(breaks, m);
}

Eigen::MatrixXd weight_matrix(const Eigen::MatrixXd& values, const QuadratureGrid& rows, const QuadratureGrid& cols)
{
    Eigen::MatrixXd m = values;
    for (Eigen::Index a = 0; a < m.rows(); ++a)
        for (Eigen::Index b = 0; b < m.cols(); ++b)
            m(a, b) *= std::sqrt(rows.w[static_cast<std::size_t>(a)] * cols.w[static_cast<std::size_t>(b)]);
    return m;
}

Eigen::MatrixXd discretize(const KernelFunction& k, const QuadratureGrid& rows, const QuadratureGrid& cols)
{
    Eigen::MatrixXd m(rows.size(), cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b)
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                std::sqrt(rows.w[a] * cols.w[b]) * k(rows.x[a], cols.x[b]);
    return m;
}

Eigen::MatrixXd discretize(const KernelFunction& k, const QuadratureGrid& grid)
{
    return discretize(k, grid, grid);
}

double determinant_lu(const Eigen::MatrixXd& m)
{
    return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
}

double nystrom_determinant(const KernelFunction& k, const QuadratureGrid& grid)
{
    const Eigen::MatrixXd M = discretize(k, grid);
    require_finite(M, "nystrom_determinant");
    return determinant_lu(Eigen::MatrixXd::Identity(M.rows(), M.cols()) - M);
}

SeriesResult series_determinant(const KernelFunction& k, const QuadratureGrid& grid, std::size_t max_order)
{
    if (max_order < 1) throw std::invalid_argument("series_determinant: max_order must be at least 1");
    if (max_order > kSeriesMaxOrder) throw std::invalid_argument("series_determinant: order capped at 8");
    if (grid.size() > kSeriesMaxNodes) throw std::invalid_argument("series_determinant: at most 24 nodes");
    const Eigen::MatrixXd M = discretize(k, grid);
    require_finite(M, "series_determinant");
    const std::size_t m = grid.size();
    SeriesResult r;
    for (std::size_t order = 1; order <= std::min(max_order, m); ++order) {
        // sum of principal minors of size `order`
        double e = 0;
        std::vector<std::size_t> idx(order);
        for (std::size_t i = 0; i < order; ++i) idx[i] = i;
        Eigen::MatrixXd sub(order, order);
        while (true) {
            for (std::size_t i = 0; i < order; ++i)
                for (std::size_t j = 0; j < order; ++j)
                    sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        M(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]));
            e += determinant_lu(sub);
            std::size_t i = order;
            while (i > 0 && idx[i - 1] == m - order + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < order; ++j) idx[j] = idx[j - 1] + 1;
        }
        const double term = (order % 2 == 1) ? -e : e;
        r.value += term;
        r.last_term = std::abs(term);
        r.order = order;
    }
    return r;
}

double block_nystrom_determinant(const std::vector<std::vector<KernelFunction>>& blocks,
                                 const std::vector<QuadratureGrid>& grids, const std::vector<Multiplier>& q)
{
    const std::size_t n = blocks.size();
    if (grids.size() != n) throw std::invalid_argument("block_nystrom_determinant: one grid per block row");
    if (!q.empty() && q.size() != n) throw std::invalid_argument("block_nystrom_determinant: one multiplier per block");
    std::vector<Eigen::Index> off(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) off[i + 1] = off[i] + static_cast<Eigen::Index>(grids[i].size());
    Eigen::MatrixXd M(off[n], off[n]);
    for (std::size_t i = 0; i < n; ++i) {
        if (blocks[i].size() != n) throw std::invalid_argument("block_nystrom_determinant: blocks must be square");
        for (std::size_t j = 0; j < n; ++j)
            M.block(off[i], off[j], off[i + 1] - off[i], off[j + 1] - off[j]) = discretize(blocks[i][j], grids[i], grids[j]);
        if (!q.empty())
            for (std::size_t a = 0; a < grids[i].size(); ++a)
                M.row(off[i] + static_cast<Eigen::Index>(a)) *= q[i](grids[i].x[a]);
    }
    require_finite(M, "block_nystrom_determinant");
    return determinant_lu(Eigen::MatrixXd::Identity(M.rows(), M.cols()) - M);
}

double block_nystrom_determinant(const std::vector<std::vector<KernelFunction>>& blocks, const QuadratureGrid& grid,
                                 const std::vector<Multiplier>& q)
{
    return block_nystrom_determinant(blocks, std::vector<QuadratureGrid>(blocks.size(), grid), q);
}

ConjugationPair ConjugationPair::identity()
{
    return {[](double) { return 1.0; }, [](double) { return 1.0; }};
}

KernelFunction apply_conjugation(const KernelFunction& k, const ConjugationPair& pair)
{
    return [k, pair](double x, double y) {
        const double ux = pair.u(x), uy = pair.u_prime(y), kv = k(x, y);
        const double v = ux * kv * uy;
        if (!std::isfinite(v) && std::isfinite(kv))
            throw std::overflow_error("apply_conjugation: conjugated kernel overflows at (" + std::to_string(x) + ", " +
                                      std::to_string(y) + "); choose a tamer conjugation pair");
        return v;
    };
}

Eigen::MatrixXd conjugate_matrix(const Eigen::MatrixXd& m, const std::vector<double>& xs, const std::vector<double>& ys,
                                 const ConjugationPair& pair)
{
    std::vector<double> uy(ys.size());
    for (std::size_t b = 0; b < ys.size(); ++b) uy[b] = pair.u_prime(ys[b]);
    Eigen::MatrixXd out = m;
    for (std::size_t a = 0; a < xs.size(); ++a) {
        const double ux = pair.u(xs[a]);
        for (std::size_t b = 0; b < ys.size(); ++b) {
            auto& v = out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            const double orig = v;
            v = ux * orig * uy[b];
            if (!std::isfinite(v) && std::isfinite(orig))
                throw std::overflow_error("conjugate_matrix: conjugated entry overflows; choose a tamer conjugation pair");
        }
    }
    return out;
}

} // namespace pathdet
