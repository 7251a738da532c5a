#include "pathdet/opid_io.hpp"

#include <stdexcept>

namespace pathdet {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j)
{
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix json: expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& r = j[static_cast<std::size_t>(i)];
        if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != cols)
            throw std::invalid_argument("matrix json: ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = r[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

json family_to_json(const OperatorFamily& fam)
{
    json j;
    j["d"] = fam.d;
    j["K"] = json::array();
    j["W"] = json::array();
    j["WK"] = json::array();
    for (const auto& k : fam.K) j["K"].push_back(matrix_to_json(k));
    for (const auto& row : fam.W) {
        json r = json::array();
        for (const auto& m : row) r.push_back(matrix_to_json(m));
        j["W"].push_back(r);
    }
    for (const auto& row : fam.WK) {
        json r = json::array();
        for (const auto& m : row) r.push_back(matrix_to_json(m));
        j["WK"].push_back(r);
    }
    return j;
}

OperatorFamily family_from_json(const json& j)
{
    OperatorFamily fam;
    fam.d = j.at("d").get<std::size_t>();
    for (const auto& k : j.at("K")) fam.K.push_back(matrix_from_json(k));
    for (const auto& row : j.at("W")) {
        std::vector<Eigen::MatrixXd> r;
        for (const auto& m : row) r.push_back(matrix_from_json(m));
        fam.W.push_back(std::move(r));
    }
    for (const auto& row : j.at("WK")) {
        std::vector<Eigen::MatrixXd> r;
        for (const auto& m : row) r.push_back(matrix_from_json(m));
        fam.WK.push_back(std::move(r));
    }
    fam.check();
    return fam;
}

json multipliers_to_json(const MultiplierFamily& q)
{
    json j = json::array();
    for (const auto& v : q.q) j.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    return j;
}

MultiplierFamily multipliers_from_json(const json& j)
{
    MultiplierFamily q;
    for (const auto& row : j) {
        const auto v = row.get<std::vector<double>>();
        q.q.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    return q;
}

} // namespace pathdet
