#ifndef PATHDET_GRAPH_HPP
#define PATHDET_GRAPH_HPP

#include "pathdet/rational.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pathdet {

struct PlanarityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularGram : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LayerRangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

using Edge = std::pair<std::size_t, std::size_t>;

// Layers V_0..V_T; vertex positions must be strictly increasing inside a layer.
// Strictly crossing edge pairs are rejected at construction.
class LayeredDigraph {
public:
    LayeredDigraph(std::vector<std::vector<long>> positions, std::vector<std::vector<Edge>> edges);

    std::size_t layer_count() const { return positions_.size() - 1; }
    std::size_t layer_size(std::size_t n) const { return positions_.at(n).size(); }
    long position(std::size_t n, std::size_t v) const { return positions_.at(n).at(v); }
    const std::vector<std::vector<long>>& positions() const { return positions_; }
    const std::vector<Edge>& edges(std::size_t gap) const { return edges_.at(gap); }

    // (target, edge index) pairs, sorted by target.
    const std::vector<std::pair<std::size_t, std::size_t>>& out(std::size_t gap, std::size_t v) const
    {
        return out_[gap][v];
    }

    // Edge index of src->tgt in gap, or npos.
    std::size_t find_edge(std::size_t gap, std::size_t src, std::size_t tgt) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<std::vector<long>> positions_;
    std::vector<std::vector<Edge>> edges_;
    std::vector<std::vector<std::vector<std::pair<std::size_t, std::size_t>>>> out_;
};

// Per-gap rational values aligned with LayeredDigraph::edges(gap).
struct EdgeValues {
    std::vector<std::vector<Rational>> values;

    static EdgeValues constant(const LayeredDigraph& g, const Rational& c);
    void check(const LayeredDigraph& g) const;
    const Rational& at(std::size_t gap, std::size_t e) const { return values[gap][e]; }
};

struct EdgeWeighting : EdgeValues {};
struct PathFunctional : EdgeValues {};

// psi rows live on V_0, phi rows on V_T; the source and sink sets are the supports.
struct BoundaryData {
    std::size_t N = 0;
    QMatrix psi;
    QMatrix phi;
};

struct PathSystem {
    std::vector<std::vector<std::size_t>> paths;

    bool operator==(const PathSystem& o) const { return paths == o.paths; }
};

QMatrix layer_transition(const LayeredDigraph& g, const EdgeWeighting& w, std::size_t m, std::size_t n);

std::vector<PathSystem> enumerate_path_systems(const LayeredDigraph& g, std::size_t N,
                                               const std::vector<std::size_t>& X,
                                               const std::vector<std::size_t>& Y);

Rational path_weight(const LayeredDigraph& g, const EdgeValues& w, const std::vector<std::size_t>& path);

struct LgvReport {
    Rational determinant;
    Rational brute_sum;
    bool equal = false;
};

LgvReport lgv_check(const LayeredDigraph& g, const EdgeWeighting& w, const std::vector<std::size_t>& X,
                    const std::vector<std::size_t>& Y);

// G_ij = <psi_i, W_{0,T} phi_j>.
QMatrix gram_matrix(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w);

BoundaryData biorthogonalize(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w);

QMatrix correlation_projector(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w);

Rational partition_function(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w);

Rational functional_expectation_bruteforce(const BoundaryData& bd, const LayeredDigraph& g,
                                           const EdgeWeighting& w, const PathFunctional& f);

Rational path_integral_determinant(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w,
                                   const PathFunctional& f);

// Probability-like mass of systems visiting vertex v of layer n.
Rational one_point_correlation(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w,
                               std::size_t n, std::size_t v);

// K_n = sum_i phi^(n)_i (x) psi^(n)_i, the projector at layer n.
QMatrix layer_kernel(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w, std::size_t n);

// W_{n,m} K_m for n >= m, the backward transition restricted to the range of K_m.
QMatrix backward_on_range(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w, std::size_t n,
                          std::size_t m);

QMatrix extended_kernel_graph(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w,
                              std::size_t i, std::size_t j);

struct EynardMehtaReport {
    Rational lhs;
    Rational rhs;
    bool equal = false;
};

// q[n][v] for layers n = 0..T-1 (a trailing layer-T entry is accepted too).
EynardMehtaReport eynard_mehta_check(const BoundaryData& bd, const LayeredDigraph& g, const EdgeWeighting& w,
                                     const std::vector<std::vector<Rational>>& q);

struct RandomGraphOptions {
    std::size_t max_layers = 4;
    std::size_t max_width = 6;
    std::size_t max_paths = 3;
    int max_numerator = 3;
    int max_denominator = 3;
    bool allow_negative = false;
};

struct GraphInstance {
    std::uint64_t seed = 0;
    LayeredDigraph graph;
    EdgeWeighting weights;
    BoundaryData boundary;
    std::vector<std::size_t> sources;
    std::vector<std::size_t> sinks;
    PathFunctional functional;
    std::vector<std::vector<Rational>> q;
};

GraphInstance random_graph_instance(std::uint64_t seed, const RandomGraphOptions& opts = {});

} // namespace pathdet

#endif
