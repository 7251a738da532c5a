#ifndef PATHDET_OPID_IO_HPP
#define PATHDET_OPID_IO_HPP

#include "pathdet/opid.hpp"

#include <json.hpp>

namespace pathdet {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

// {"d", "K": [...], "W": [[W_ii, W_i,i+1, ...], ...], "WK": [[WK_j0, ..., WK_jj], ...]}
nlohmann::json family_to_json(const OperatorFamily& fam);
OperatorFamily family_from_json(const nlohmann::json& j);

nlohmann::json multipliers_to_json(const MultiplierFamily& q);
MultiplierFamily multipliers_from_json(const nlohmann::json& j);

} // namespace pathdet

#endif
