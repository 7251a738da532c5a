#ifndef PATHDET_GRAPH_IO_HPP
#define PATHDET_GRAPH_IO_HPP

#include "pathdet/graph.hpp"

#include <json.hpp>

#include <optional>

namespace pathdet {

// Rationals are read from [num, den] pairs, integers, or "num/den" strings.
Rational rational_from_json(const nlohmann::json& j);
nlohmann::json rational_to_json(const Rational& q);

struct GraphDocument {
    LayeredDigraph graph;
    EdgeWeighting weights;
    std::optional<BoundaryData> boundary;
    std::vector<std::size_t> sources;
    std::vector<std::size_t> sinks;
    std::optional<PathFunctional> functional;
    std::optional<std::vector<std::vector<Rational>>> q;
};

// Keys: layers, edges, weights, psi, phi, q, sources, sinks, functional.
GraphDocument graph_document_from_json(const nlohmann::json& j);
nlohmann::json graph_document_to_json(const GraphDocument& doc);

GraphDocument document_from_instance(const GraphInstance& inst);

} // namespace pathdet

#endif
