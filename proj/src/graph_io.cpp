#include "pathdet/graph_io.hpp"

#include <stdexcept>
#include <string>

namespace pathdet {

namespace {

using nlohmann::json;

std::vector<std::vector<Rational>> rational_table(const json& j, const char* key)
{
    if (!j.is_array()) throw std::invalid_argument(std::string("graph json: '") + key + "' must be an array");
    std::vector<std::vector<Rational>> out;
    for (const auto& row : j) {
        if (!row.is_array()) throw std::invalid_argument(std::string("graph json: rows of '") + key + "' must be arrays");
        std::vector<Rational> r;
        for (const auto& v : row) r.push_back(rational_from_json(v));
        out.push_back(std::move(r));
    }
    return out;
}

QMatrix to_matrix(const std::vector<std::vector<Rational>>& rows, std::size_t cols, const char* key)
{
    QMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols)
            throw std::invalid_argument(std::string("graph json: '") + key + "' rows must match the layer size");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = rows[i][c];
    }
    return m;
}

json table_to_json(const std::vector<std::vector<Rational>>& t)
{
    json out = json::array();
    for (const auto& row : t) {
        json r = json::array();
        for (const auto& v : row) r.push_back(rational_to_json(v));
        out.push_back(r);
    }
    return out;
}

json matrix_to_json(const QMatrix& m)
{
    json out = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) r.push_back(rational_to_json(m(i, c)));
        out.push_back(r);
    }
    return out;
}

} // namespace

Rational rational_from_json(const json& j)
{
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_array() && j.size() == 2) {
        auto part = [](const json& v) {
            if (v.is_number_integer()) return mpz_class(v.get<long>());
            if (v.is_string()) {
                mpz_class z;
                if (z.set_str(v.get<std::string>(), 10) != 0)
                    throw std::invalid_argument("malformed integer '" + v.get<std::string>() + "'");
                return z;
            }
            throw std::invalid_argument("rational pair entries must be integers");
        };
        const mpz_class num = part(j[0]), den = part(j[1]);
        if (den == 0) throw std::invalid_argument("rational with zero denominator");
        Rational q(num, den);
        q.canonicalize();
        return q;
    }
    if (j.is_string()) {
        Rational q;
        if (q.set_str(j.get<std::string>(), 10) != 0 || q.get_den() == 0)
            throw std::invalid_argument("malformed rational string '" + j.get<std::string>() + "'");
        q.canonicalize();
        return q;
    }
    throw std::invalid_argument("rational must be an integer, [num, den] or \"num/den\"");
}

json rational_to_json(const Rational& q)
{
    auto part = [](const mpz_class& z) -> json {
        if (z.fits_slong_p()) return z.get_si();
        return z.get_str();
    };
    return json::array({part(q.get_num()), part(q.get_den())});
}

GraphDocument graph_document_from_json(const json& j)
{
    if (!j.is_object()) throw std::invalid_argument("graph json: top level must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        static const char* known[] = {"layers", "edges", "weights", "psi", "phi", "q", "sources", "sinks", "functional"};
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw std::invalid_argument("graph json: unknown key '" + key + "'");
    }
    const auto positions = j.at("layers").get<std::vector<std::vector<long>>>();
    std::vector<std::vector<Edge>> edges;
    for (const auto& gap : j.at("edges")) {
        std::vector<Edge> es;
        for (const auto& e : gap) es.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
        edges.push_back(std::move(es));
    }
    GraphDocument doc{LayeredDigraph(positions, edges), {}, std::nullopt, {}, {}, std::nullopt, std::nullopt};
    const auto& g = doc.graph;
    if (j.contains("weights"))
        doc.weights.values = rational_table(j.at("weights"), "weights");
    else
        doc.weights.values = EdgeValues::constant(g, 1).values;
    doc.weights.check(g);

    if (j.contains("psi") != j.contains("phi")) throw std::invalid_argument("graph json: psi and phi come together");
    if (j.contains("psi")) {
        BoundaryData bd;
        bd.psi = to_matrix(rational_table(j.at("psi"), "psi"), g.layer_size(0), "psi");
        bd.phi = to_matrix(rational_table(j.at("phi"), "phi"), g.layer_size(g.layer_count()), "phi");
        bd.N = bd.psi.rows();
        if (bd.phi.rows() != bd.N) throw std::invalid_argument("graph json: psi and phi need the same row count");
        doc.boundary = bd;
    }
    if (j.contains("sources")) doc.sources = j.at("sources").get<std::vector<std::size_t>>();
    if (j.contains("sinks")) doc.sinks = j.at("sinks").get<std::vector<std::size_t>>();
    if (j.contains("functional")) {
        PathFunctional f;
        f.values = rational_table(j.at("functional"), "functional");
        f.check(g);
        doc.functional = f;
    }
    if (j.contains("q")) doc.q = rational_table(j.at("q"), "q");
    return doc;
}

json graph_document_to_json(const GraphDocument& doc)
{
    json j;
    j["layers"] = doc.graph.positions();
    json edges = json::array();
    for (std::size_t gap = 0; gap < doc.graph.layer_count(); ++gap) {
        json es = json::array();
        for (const auto& e : doc.graph.edges(gap)) es.push_back({e.first, e.second});
        edges.push_back(es);
    }
    j["edges"] = edges;
    j["weights"] = table_to_json(doc.weights.values);
    if (doc.boundary) {
        j["psi"] = matrix_to_json(doc.boundary->psi);
        j["phi"] = matrix_to_json(doc.boundary->phi);
    }
    if (!doc.sources.empty()) j["sources"] = doc.sources;
    if (!doc.sinks.empty()) j["sinks"] = doc.sinks;
    if (doc.functional) j["functional"] = table_to_json(doc.functional->values);
    if (doc.q) j["q"] = table_to_json(*doc.q);
    return j;
}

GraphDocument document_from_instance(const GraphInstance& inst)
{
    return GraphDocument{inst.graph, inst.weights, inst.boundary, inst.sources, inst.sinks, inst.functional, inst.q};
}

} // namespace pathdet
