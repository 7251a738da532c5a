#ifndef PATHDET_OPID_HPP
#define PATHDET_OPID_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace pathdet {

struct TimeGrid {
    std::vector<double> times;

    explicit TimeGrid(std::vector<double> t);
    std::size_t size() const { return times.size(); }
    double min_gap() const;
};

// Indices are zero based. W[i][j] is stored for i <= j, WK[j][i] (= W_{j,i} K_i) for i <= j.
struct OperatorFamily {
    std::size_t d = 0;
    std::vector<std::vector<Eigen::MatrixXd>> W;
    std::vector<Eigen::MatrixXd> K;
    std::vector<std::vector<Eigen::MatrixXd>> WK;

    std::size_t size() const { return K.size(); }
    const Eigen::MatrixXd& forward(std::size_t i, std::size_t j) const { return W[i][j - i]; }
    Eigen::MatrixXd& forward(std::size_t i, std::size_t j) { return W[i][j - i]; }
    const Eigen::MatrixXd& backward(std::size_t j, std::size_t i) const { return WK[j][i]; }
    Eigen::MatrixXd& backward(std::size_t j, std::size_t i) { return WK[j][i]; }

    // Throws std::invalid_argument on any shape inconsistency.
    void check() const;
};

// Diagonal multipliers q_i; the complements 1 - q_i are formed on demand.
struct MultiplierFamily {
    std::vector<Eigen::VectorXd> q;

    std::size_t size() const { return q.size(); }
    Eigen::MatrixXd Q(std::size_t i) const { return q[i].asDiagonal(); }
    Eigen::MatrixXd Qbar(std::size_t i) const;
    static MultiplierFamily zeros(std::size_t n, std::size_t d);
    static MultiplierFamily constant(std::size_t n, std::size_t d, double value);
};

struct StructuralReport {
    double right_invertibility = 0;
    double semigroup = 0;
    double reversibility = 0;
    double tolerance = 0;
    bool pass = false;
};

StructuralReport verify_structural_assumptions(const OperatorFamily& fam, double tol = 1e-12);

Eigen::MatrixXd build_extended_kernel(const OperatorFamily& fam);

double extended_determinant(const OperatorFamily& fam, const MultiplierFamily& q);

double path_integral_side(const OperatorFamily& fam, const MultiplierFamily& q);

// Alternating sum over increasing chains starting at index i (zero based).
Eigen::MatrixXd alt_expansion_side(const OperatorFamily& fam, const MultiplierFamily& q, std::size_t i);

// W_{i,1}K_1 - Qbar_i W_{i,i+1} Qbar_{i+1} ... Qbar_n W_{n,1}K_1.
Eigen::MatrixXd telescoped_side(const OperatorFamily& fam, const MultiplierFamily& q, std::size_t i);

struct IdentityReport {
    double lhs = 0;
    double rhs = 0;
    double diff = 0;
    double tolerance = 0;
    bool pass = false;
};

IdentityReport identity_check(const OperatorFamily& fam, const MultiplierFamily& q, double tol = 1e-10);

struct CommutingFamilyOptions {
    std::uint64_t seed = 0;
    std::size_t n = 3;
    std::size_t d = 6;
    std::vector<double> spectrum;  // empty: drawn from [0, 2]
    std::size_t rank = 0;          // 0: drawn from [1, d-1]
    bool orthogonal = true;        // false: a random well-conditioned basis
};

struct GeneratedFamily {
    TimeGrid times;
    OperatorFamily family;
    MultiplierFamily q;
};

// W_ij = S exp(-(t_j - t_i) L) S^-1 and K the spectral projector onto the first `rank` modes.
GeneratedFamily commuting_family(const CommutingFamilyOptions& opts);

OperatorFamily similarity_transform(const OperatorFamily& fam, const Eigen::MatrixXd& S);

} // namespace pathdet

#endif
