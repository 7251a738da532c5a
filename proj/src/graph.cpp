#include "pathdet/graph.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <string>

namespace pathdet {

namespace {

bool strictly_cross(const LayeredDigraph& g, std::size_t gap, const Edge& e1, const Edge& e2)
{
    if (e1.first == e2.first || e1.second == e2.second) return false;
    const long a = g.position(gap, e1.first), b = g.position(gap + 1, e1.second);
    const long c = g.position(gap, e2.first), d = g.position(gap + 1, e2.second);
    if (a < c) return b > d;
    return d > b;
}

void require_layer(const LayeredDigraph& g, std::size_t n, const char* what)
{
    if (n > g.layer_count())
        throw LayerRangeError(std::string(what) + ": layer " + std::to_string(n) + " outside 0.." +
                              std::to_string(g.layer_count()));
}

// Column vector phi_i pushed to layer n: rows i, columns V_n.
QMatrix pushed_phi(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w, std::size_t n)
{
    return (layer_transition(g, w, n, g.layer_count()) * bd.phi.transpose()).transpose();
}

// psi_i pushed forward to layer n: rows i, columns V_n.
QMatrix pushed_psi(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w, std::size_t n)
{
    return bd.psi * layer_transition(g, w, 0, n);
}

QMatrix outer_sum(const QMatrix& left, const QMatrix& right)
{
    return left.transpose() * right;
}

void check_boundary(const BoundaryData& bd, const LayeredDigraph& g)
{
    if (bd.N == 0) throw std::invalid_argument("boundary data: N must be positive");
    if (bd.psi.rows() != bd.N || bd.psi.cols() != g.layer_size(0))
        throw std::invalid_argument("boundary data: psi must be N x |V_0|");
    if (bd.phi.rows() != bd.N || bd.phi.cols() != g.layer_size(g.layer_count()))
        throw std::invalid_argument("boundary data: phi must be N x |V_T|");
}

// Depth-first enumeration of vertex-disjoint systems; path k starts at sources[k]
// and ends at a vertex of V_T allowed by sink_ok. Visits in lexicographic order.
void enumerate_systems(const LayeredDigraph& g, const std::vector<std::size_t>& sources,
                       const std::vector<char>& sink_ok, const std::function<void(const PathSystem&)>& visit)
{
    const std::size_t T = g.layer_count();
    const std::size_t N = sources.size();
    std::vector<std::vector<char>> used(T + 1);
    for (std::size_t n = 0; n <= T; ++n) used[n].assign(g.layer_size(n), 0);
    for (std::size_t s : sources) {
        if (used[0][s]) return;
        used[0][s] = 1;
    }
    PathSystem sys;
    sys.paths.assign(N, std::vector<std::size_t>(T + 1));

    std::function<void(std::size_t, std::size_t)> step = [&](std::size_t k, std::size_t n) {
        if (k == N) {
            visit(sys);
            return;
        }
        if (n == T) {
            if (sink_ok[sys.paths[k][T]]) step(k + 1, 0);
            return;
        }
        if (n == 0) sys.paths[k][0] = sources[k];
        const std::size_t v = sys.paths[k][n];
        for (const auto& [tgt, e] : g.out(n, v)) {
            (void)e;
            if (used[n + 1][tgt]) continue;
            used[n + 1][tgt] = 1;
            sys.paths[k][n + 1] = tgt;
            step(k, n + 1);
            used[n + 1][tgt] = 0;
        }
    };
    step(0, 0);
}

void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& f)
{
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        f(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// Unnormalized weight det[psi_i(pi_j(0))] prod w(pi_j) det[phi_i(pi_j(T))].
Rational system_weight(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w,
                       const PathSystem& sys)
{
    const std::size_t N = bd.N, T = g.layer_count();
    QMatrix a(N, N), b(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            a(i, j) = bd.psi(i, sys.paths[j][0]);
            b(i, j) = bd.phi(i, sys.paths[j][T]);
        }
    Rational weight = determinant(a);
    if (weight == 0) return 0;
    for (const auto& p : sys.paths) weight *= path_weight(g, w, p);
    if (weight == 0) return 0;
    return weight * determinant(b);
}

// Sum of weight(Pi) * value(Pi) over every system with N paths.
Rational weighted_sum(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w,
                      const std::function<Rational(const PathSystem&)>& value)
{
    const std::vector<char> all_sinks(g.layer_size(g.layer_count()), 1);
    Rational total = 0;
    for_each_subset(g.layer_size(0), bd.N, [&](const std::vector<std::size_t>& src) {
        enumerate_systems(g, src, all_sinks, [&](const PathSystem& sys) {
            const Rational wt = system_weight(bd, g, w, sys);
            if (wt != 0) total += wt * value(sys);
        });
    });
    return total;
}

Rational normalized_sum(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w,
                        const std::function<Rational(const PathSystem&)>& value)
{
    check_boundary(bd, g);
    const Rational Z = partition_function(bd, g, w);
    if (Z == 0) throw SingularGram("partition function vanishes");
    return weighted_sum(bd, g, w, value) / Z;
}

} // namespace

LayeredDigraph::LayeredDigraph(std::vector<std::vector<long>> positions, std::vector<std::vector<Edge>> edges)
    : positions_(std::move(positions)), edges_(std::move(edges))
{
    if (positions_.size() < 2) throw std::invalid_argument("layered digraph needs at least two layers");
    if (edges_.size() != positions_.size() - 1)
        throw std::invalid_argument("layered digraph: expected one edge list per gap");
    for (std::size_t n = 0; n < positions_.size(); ++n) {
        if (positions_[n].empty()) throw std::invalid_argument("layered digraph: empty layer " + std::to_string(n));
        for (std::size_t v = 1; v < positions_[n].size(); ++v)
            if (positions_[n][v] <= positions_[n][v - 1])
                throw std::invalid_argument("layered digraph: positions must increase within layer " +
                                            std::to_string(n));
    }
    out_.resize(edges_.size());
    for (std::size_t gap = 0; gap < edges_.size(); ++gap) {
        out_[gap].resize(positions_[gap].size());
        const auto& es = edges_[gap];
        for (std::size_t e = 0; e < es.size(); ++e) {
            if (es[e].first >= positions_[gap].size() || es[e].second >= positions_[gap + 1].size())
                throw std::invalid_argument("layered digraph: edge endpoint out of range in gap " +
                                            std::to_string(gap));
            for (std::size_t f = 0; f < e; ++f) {
                if (es[f] == es[e])
                    throw std::invalid_argument("layered digraph: duplicate edge in gap " + std::to_string(gap));
            }
            out_[gap][es[e].first].emplace_back(es[e].second, e);
        }
        for (auto& lst : out_[gap]) std::sort(lst.begin(), lst.end());
        for (std::size_t e = 0; e < es.size(); ++e)
            for (std::size_t f = e + 1; f < es.size(); ++f)
                if (strictly_cross(*this, gap, es[e], es[f]))
                    throw PlanarityError("edges cross without sharing a vertex in gap " + std::to_string(gap));
    }
}

std::size_t LayeredDigraph::find_edge(std::size_t gap, std::size_t src, std::size_t tgt) const
{
    for (const auto& [t, e] : out_.at(gap).at(src))
        if (t == tgt) return e;
    return npos;
}

EdgeValues EdgeValues::constant(const LayeredDigraph& g, const Rational& c)
{
    EdgeValues v;
    v.values.resize(g.layer_count());
    for (std::size_t gap = 0; gap < g.layer_count(); ++gap) v.values[gap].assign(g.edges(gap).size(), c);
    return v;
}

void EdgeValues::check(const LayeredDigraph& g) const
{
    if (values.size() != g.layer_count()) throw std::invalid_argument("edge values: one list per gap required");
    for (std::size_t gap = 0; gap < values.size(); ++gap)
        if (values[gap].size() != g.edges(gap).size())
            throw std::invalid_argument("edge values: gap " + std::to_string(gap) + " has wrong length");
}

QMatrix layer_transition(const LayeredDigraph& g, const EdgeWeighting& w, std::size_t m, std::size_t n)
{
    require_layer(g, m, "layer_transition");
    require_layer(g, n, "layer_transition");
    if (m > n) throw LayerRangeError("layer_transition: m must not exceed n");
    w.check(g);
    QMatrix acc = QMatrix::identity(g.layer_size(m));
    for (std::size_t gap = m; gap < n; ++gap) {
        QMatrix step(g.layer_size(gap), g.layer_size(gap + 1));
        const auto& es = g.edges(gap);
        for (std::size_t e = 0; e < es.size(); ++e) step(es[e].first, es[e].second) += w.at(gap, e);
        acc = acc * step;
    }
    return acc;
}

std::vector<PathSystem> enumerate_path_systems(const LayeredDigraph& g, std::size_t N,
                                               const std::vector<std::size_t>& X,
                                               const std::vector<std::size_t>& Y)
{
    if (X.size() != N || Y.size() != N) throw std::invalid_argument("enumerate_path_systems: |X| = |Y| = N required");
    const std::size_t T = g.layer_count();
    std::vector<char> sink_ok(g.layer_size(T), 0);
    for (std::size_t y : Y) {
        if (y >= g.layer_size(T)) throw std::invalid_argument("enumerate_path_systems: sink out of range");
        sink_ok[y] = 1;
    }
    for (std::size_t x : X)
        if (x >= g.layer_size(0)) throw std::invalid_argument("enumerate_path_systems: source out of range");
    std::vector<PathSystem> out;
    enumerate_systems(g, X, sink_ok, [&](const PathSystem& s) { out.push_back(s); });
    return out;
}

Rational path_weight(const LayeredDigraph& g, const EdgeValues& w, const std::vector<std::size_t>& path)
{
    Rational p = 1;
    for (std::size_t n = 0; n + 1 < path.size(); ++n) {
        const std::size_t e = g.find_edge(n, path[n], path[n + 1]);
        if (e == LayeredDigraph::npos) return 0;
        p *= w.at(n, e);
    }
    return p;
}

LgvReport lgv_check(const LayeredDigraph& g, const EdgeWeighting& w, const std::vector<std::size_t>& X,
                    const std::vector<std::size_t>& Y)
{
    const std::size_t N = X.size();
    const QMatrix W = layer_transition(g, w, 0, g.layer_count());
    QMatrix M(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) M(i, j) = W(X[i], Y[j]);
    LgvReport r;
    r.determinant = determinant(M);
    r.brute_sum = 0;
    for (const auto& sys : enumerate_path_systems(g, N, X, Y)) {
        Rational p = 1;
        for (const auto& path : sys.paths) p *= path_weight(g, w, path);
        r.brute_sum += p;
    }
    r.equal = (r.determinant == r.brute_sum);
    return r;
}

QMatrix gram_matrix(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w)
{
    check_boundary(bd, g);
    return bd.psi * layer_transition(g, w, 0, g.layer_count()) * bd.phi.transpose();
}

BoundaryData biorthogonalize(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w)
{
    const QMatrix G = gram_matrix(bd, g, w);
    QMatrix Ginv;
    if (!try_inverse(G, Ginv)) throw SingularGram("Gram matrix is singular; partition function vanishes");
    BoundaryData out = bd;
    out.psi = Ginv * bd.psi;
    return out;
}

QMatrix correlation_projector(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w)
{
    return layer_kernel(bd, g, w, 0);
}

Rational partition_function(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w)
{
    check_boundary(bd, g);
    w.check(g);
    return weighted_sum(bd, g, w, [](const PathSystem&) { return Rational(1); });
}

Rational functional_expectation_bruteforce(const BoundaryData& bd, const LayeredDigraph& g,
                                           const EdgeWeighting& w, const PathFunctional& f)
{
    f.check(g);
    return normalized_sum(bd, g, w, [&](const PathSystem& sys) {
        Rational p = 1;
        for (const auto& path : sys.paths) p *= path_weight(g, f, path);
        return p;
    });
}

Rational path_integral_determinant(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w,
                                   const PathFunctional& f)
{
    check_boundary(bd, g);
    f.check(g);
    EdgeWeighting wt;
    wt.values = w.values;
    for (std::size_t gap = 0; gap < wt.values.size(); ++gap)
        for (std::size_t e = 0; e < wt.values[gap].size(); ++e) wt.values[gap][e] *= f.at(gap, e);
    const std::size_t T = g.layer_count();
    const QMatrix K = correlation_projector(bd, g, w);
    // (W~ W^{-1} K) h = sum_i <psi_i, h> (W~ phi_i)
    const QMatrix phit = (layer_transition(g, wt, 0, T) * bd.phi.transpose()).transpose();
    const QMatrix A = outer_sum(phit, bd.psi);
    return determinant(QMatrix::identity(K.rows()) - K + A);
}

Rational one_point_correlation(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w,
                               std::size_t n, std::size_t v)
{
    require_layer(g, n, "one_point_correlation");
    return normalized_sum(bd, g, w, [&](const PathSystem& sys) {
        for (const auto& p : sys.paths)
            if (p[n] == v) return Rational(1);
        return Rational(0);
    });
}

QMatrix layer_kernel(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w, std::size_t n)
{
    return backward_on_range(bd, g, w, n, n);
}

QMatrix backward_on_range(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w, std::size_t n,
                          std::size_t m)
{
    require_layer(g, n, "backward_on_range");
    require_layer(g, m, "backward_on_range");
    if (n < m) throw LayerRangeError("backward_on_range: requires n >= m");
    check_boundary(bd, g);
    return outer_sum(pushed_phi(bd, g, w, n), pushed_psi(bd, g, w, m));
}

QMatrix extended_kernel_graph(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w,
                              std::size_t i, std::size_t j)
{
    require_layer(g, i, "extended_kernel_graph");
    require_layer(g, j, "extended_kernel_graph");
    const QMatrix WK = outer_sum(pushed_phi(bd, g, w, i), pushed_psi(bd, g, w, j));
    if (i >= j) return WK;
    return WK - layer_transition(g, w, i, j);
}

EynardMehtaReport eynard_mehta_check(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w,
                                     const std::vector<std::vector<Rational>>& q)
{
    const std::size_t T = g.layer_count();
    if (q.size() != T && q.size() != T + 1)
        throw std::invalid_argument("eynard_mehta_check: q needs one vector per layer 0..T-1");
    std::vector<std::vector<Rational>> qq = q;
    if (qq.size() == T) qq.emplace_back(g.layer_size(T), Rational(0));
    for (std::size_t n = 0; n <= T; ++n)
        if (qq[n].size() != g.layer_size(n))
            throw std::invalid_argument("eynard_mehta_check: q layer " + std::to_string(n) + " has wrong length");

    EynardMehtaReport r;
    r.lhs = normalized_sum(bd, g, w, [&](const PathSystem& sys) {
        Rational p = 1;
        for (const auto& path : sys.paths)
            for (std::size_t n = 0; n <= T; ++n) p *= 1 - qq[n][path[n]];
        return p;
    });

    std::vector<std::size_t> offset(T + 2, 0);
    for (std::size_t n = 0; n <= T; ++n) offset[n + 1] = offset[n] + g.layer_size(n);
    QMatrix M = QMatrix::identity(offset[T + 1]);
    for (std::size_t i = 0; i <= T; ++i)
        for (std::size_t j = 0; j <= T; ++j) {
            const QMatrix blk = extended_kernel_graph(bd, g, w, i, j);
            for (std::size_t a = 0; a < blk.rows(); ++a) {
                if (qq[i][a] == 0) continue;
                for (std::size_t b = 0; b < blk.cols(); ++b)
                    M(offset[i] + a, offset[j] + b) -= qq[i][a] * blk(a, b);
            }
        }
    r.rhs = determinant(M);
    r.equal = (r.lhs == r.rhs);
    return r;
}

GraphInstance random_graph_instance(std::uint64_t seed, const RandomGraphOptions& opts)
{
    std::mt19937_64 rng(seed);
    auto uni = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
    auto rational = [&](bool allow_zero, bool allow_negative) {
        long num = uni(allow_zero ? 0 : 1, opts.max_numerator);
        if (allow_negative && uni(0, 1) == 1) num = -num;
        return make_rational(num, uni(1, opts.max_denominator));
    };

    const std::size_t T = static_cast<std::size_t>(uni(1, static_cast<long>(opts.max_layers)));
    const std::size_t N = static_cast<std::size_t>(uni(1, static_cast<long>(opts.max_paths)));
    const long W = static_cast<long>(opts.max_width);

    std::vector<std::vector<long>> pos(T + 1);
    for (std::size_t n = 0; n <= T; ++n) {
        const long lo = (n == 0 || n == T) ? static_cast<long>(N) : std::max<long>(1, static_cast<long>(N) - 1);
        const long width = uni(std::min(lo, W), W);
        std::vector<long> pool(static_cast<std::size_t>(width + 2));
        for (std::size_t k = 0; k < pool.size(); ++k) pool[k] = static_cast<long>(k);
        std::shuffle(pool.begin(), pool.end(), rng);
        pos[n].assign(pool.begin(), pool.begin() + width);
        std::sort(pos[n].begin(), pos[n].end());
    }

    std::vector<std::vector<Edge>> edges(T);
    for (std::size_t gap = 0; gap < T; ++gap) {
        std::vector<Edge> cand;
        for (std::size_t a = 0; a < pos[gap].size(); ++a)
            for (std::size_t b = 0; b < pos[gap + 1].size(); ++b)
                if (std::abs(pos[gap][a] - pos[gap + 1][b]) <= 2) cand.emplace_back(a, b);
        std::shuffle(cand.begin(), cand.end(), rng);
        for (const Edge& e : cand) {
            bool ok = true;
            for (const Edge& f : edges[gap]) {
                if (e.first == f.first || e.second == f.second) continue;
                const long a = pos[gap][e.first], b = pos[gap + 1][e.second];
                const long c = pos[gap][f.first], d = pos[gap + 1][f.second];
                if ((a < c && b > d) || (c < a && d > b)) {
                    ok = false;
                    break;
                }
            }
            if (ok && uni(0, 9) != 0) edges[gap].push_back(e);
        }
        std::sort(edges[gap].begin(), edges[gap].end());
    }

    GraphInstance inst{seed, LayeredDigraph(pos, edges), {}, {}, {}, {}, {}, {}};
    const LayeredDigraph& g = inst.graph;
    inst.weights.values.resize(T);
    inst.functional.values.resize(T);
    for (std::size_t gap = 0; gap < T; ++gap)
        for (std::size_t e = 0; e < g.edges(gap).size(); ++e) {
            inst.weights.values[gap].push_back(rational(false, opts.allow_negative));
            inst.functional.values[gap].push_back(rational(true, true));
        }

    auto pick = [&](std::size_t size) {
        std::vector<std::size_t> idx(size);
        for (std::size_t k = 0; k < size; ++k) idx[k] = k;
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(N);
        std::sort(idx.begin(), idx.end());
        return idx;
    };
    inst.sources = pick(g.layer_size(0));
    inst.sinks = pick(g.layer_size(T));
    // Prefer sinks reachable by at least one disjoint system.
    std::vector<std::vector<std::size_t>> reachable;
    for_each_subset(g.layer_size(T), N, [&](const std::vector<std::size_t>& y) {
        if (!enumerate_path_systems(g, N, inst.sources, y).empty()) reachable.push_back(y);
    });
    if (!reachable.empty())
        inst.sinks = reachable[static_cast<std::size_t>(uni(0, static_cast<long>(reachable.size()) - 1))];

    inst.boundary.N = N;
    inst.boundary.psi = QMatrix(N, g.layer_size(0));
    inst.boundary.phi = QMatrix(N, g.layer_size(T));
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t v = 0; v < g.layer_size(0); ++v) inst.boundary.psi(i, v) = rational(true, true);
        for (std::size_t v = 0; v < g.layer_size(T); ++v) inst.boundary.phi(i, v) = rational(true, true);
    }

    inst.q.resize(T);
    for (std::size_t n = 0; n < T; ++n)
        for (std::size_t v = 0; v < g.layer_size(n); ++v) inst.q[n].push_back(rational(true, true));
    return inst;
}

} // namespace pathdet
