#include "pathdet/opid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace pathdet {

namespace {

double max_abs(const Eigen::MatrixXd& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double det_lu(const Eigen::MatrixXd& m)
{
    return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
}

void check_multipliers(const OperatorFamily& fam, const MultiplierFamily& q)
{
    if (q.size() != fam.size()) throw std::invalid_argument("multiplier family: one vector per time required");
    for (const auto& v : q.q)
        if (static_cast<std::size_t>(v.size()) != fam.d)
            throw std::invalid_argument("multiplier family: vector length differs from state dimension");
}

} // namespace

TimeGrid::TimeGrid(std::vector<double> t) : times(std::move(t))
{
    if (times.empty()) throw std::invalid_argument("time grid: at least one time required");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("time grid: times must increase strictly");
}

double TimeGrid::min_gap() const
{
    double g = INFINITY;
    for (std::size_t i = 1; i < times.size(); ++i) g = std::min(g, times[i] - times[i - 1]);
    return g;
}

void OperatorFamily::check() const
{
    const std::size_t n = K.size();
    if (n == 0) throw std::invalid_argument("operator family: empty");
    if (W.size() != n || WK.size() != n) throw std::invalid_argument("operator family: W, K, WK sizes differ");
    auto shape = [&](const Eigen::MatrixXd& m, const std::string& what) {
        if (static_cast<std::size_t>(m.rows()) != d || static_cast<std::size_t>(m.cols()) != d)
            throw std::invalid_argument("operator family: " + what + " is not " + std::to_string(d) + "x" +
                                        std::to_string(d));
    };
    for (std::size_t i = 0; i < n; ++i) {
        shape(K[i], "K[" + std::to_string(i) + "]");
        if (W[i].size() != n - i) throw std::invalid_argument("operator family: W row " + std::to_string(i) + " has wrong length");
        if (WK[i].size() != i + 1) throw std::invalid_argument("operator family: WK row " + std::to_string(i) + " has wrong length");
        for (std::size_t j = i; j < n; ++j) shape(forward(i, j), "W[" + std::to_string(i) + "][" + std::to_string(j) + "]");
        for (std::size_t k = 0; k <= i; ++k) shape(backward(i, k), "WK[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
}

Eigen::MatrixXd MultiplierFamily::Qbar(std::size_t i) const
{
    return (Eigen::VectorXd::Ones(q[i].size()) - q[i]).asDiagonal();
}

MultiplierFamily MultiplierFamily::zeros(std::size_t n, std::size_t d)
{
    return constant(n, d, 0.0);
}

MultiplierFamily MultiplierFamily::constant(std::size_t n, std::size_t d, double value)
{
    MultiplierFamily m;
    m.q.assign(n, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), value));
    return m;
}

StructuralReport verify_structural_assumptions(const OperatorFamily& fam, double tol)
{
    fam.check();
    const std::size_t n = fam.size();
    StructuralReport r;
    r.tolerance = tol;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            r.right_invertibility =
                std::max(r.right_invertibility, max_abs(fam.forward(i, j) * fam.backward(j, i) - fam.K[i]));
            r.reversibility =
                std::max(r.reversibility, max_abs(fam.forward(i, j) * fam.K[j] - fam.K[i] * fam.forward(i, j)));
            for (std::size_t k = j; k < n; ++k)
                r.semigroup = std::max(r.semigroup,
                                       max_abs(fam.forward(i, j) * fam.forward(j, k) - fam.forward(i, k)));
        }
    r.pass = r.right_invertibility <= tol && r.semigroup <= tol && r.reversibility <= tol;
    return r;
}

Eigen::MatrixXd build_extended_kernel(const OperatorFamily& fam)
{
    fam.check();
    const std::size_t n = fam.size();
    const auto d = static_cast<Eigen::Index>(fam.d);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd ext(n * fam.d, n * fam.d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            auto blk = ext.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j) * d, d, d);
            if (i >= j)
                blk = fam.backward(i, j);
            else
                blk = -fam.forward(i, j) * (I - fam.K[j]);
        }
    return ext;
}

double extended_determinant(const OperatorFamily& fam, const MultiplierFamily& q)
{
    check_multipliers(fam, q);
    const Eigen::MatrixXd ext = build_extended_kernel(fam);
    Eigen::VectorXd qall(ext.rows());
    for (std::size_t i = 0; i < fam.size(); ++i)
        qall.segment(static_cast<Eigen::Index>(i * fam.d), static_cast<Eigen::Index>(fam.d)) = q.q[i];
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(ext.rows(), ext.cols()) - qall.asDiagonal() * ext;
    return det_lu(M);
}

double path_integral_side(const OperatorFamily& fam, const MultiplierFamily& q)
{
    fam.check();
    check_multipliers(fam, q);
    const std::size_t n = fam.size();
    Eigen::MatrixXd P = q.Qbar(0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        P = P * fam.forward(i, i + 1);
        P = P * q.Qbar(i + 1);
    }
    const auto d = static_cast<Eigen::Index>(fam.d);
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(d, d) - fam.K[0] + P * fam.backward(n - 1, 0);
    return det_lu(M);
}

Eigen::MatrixXd alt_expansion_side(const OperatorFamily& fam, const MultiplierFamily& q, std::size_t i)
{
    fam.check();
    check_multipliers(fam, q);
    const std::size_t n = fam.size();
    if (i >= n) throw std::invalid_argument("alt_expansion_side: start index out of range");
    const auto d = static_cast<Eigen::Index>(fam.d);
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t j = i; j < n; ++j) {
        // chains j = a_0 < a_1 < ... < a_k, one per subset of {j+1, ..., n-1}
        const std::size_t free = n - 1 - j;
        for (std::size_t mask = 0; mask < (std::size_t{1} << free); ++mask) {
            std::vector<std::size_t> chain = {j};
            for (std::size_t b = 0; b < free; ++b)
                if (mask & (std::size_t{1} << b)) chain.push_back(j + 1 + b);
            Eigen::MatrixXd term = fam.forward(i, j) * q.Q(j);
            for (std::size_t c = 1; c < chain.size(); ++c) term = term * fam.forward(chain[c - 1], chain[c]) * q.Q(chain[c]);
            term = term * fam.backward(chain.back(), 0);
            if ((chain.size() - 1) % 2 == 1)
                total -= term;
            else
                total += term;
        }
    }
    return total;
}

Eigen::MatrixXd telescoped_side(const OperatorFamily& fam, const MultiplierFamily& q, std::size_t i)
{
    fam.check();
    check_multipliers(fam, q);
    const std::size_t n = fam.size();
    if (i >= n) throw std::invalid_argument("telescoped_side: start index out of range");
    Eigen::MatrixXd P = q.Qbar(i);
    for (std::size_t a = i; a + 1 < n; ++a) P = P * fam.forward(a, a + 1) * q.Qbar(a + 1);
    return fam.backward(i, 0) - P * fam.backward(n - 1, 0);
}

IdentityReport identity_check(const OperatorFamily& fam, const MultiplierFamily& q, double tol)
{
    IdentityReport r;
    r.lhs = extended_determinant(fam, q);
    r.rhs = path_integral_side(fam, q);
    r.diff = std::abs(r.lhs - r.rhs);
    r.tolerance = tol;
    r.pass = r.diff <= tol * std::max(1.0, std::abs(r.lhs));
    return r;
}

GeneratedFamily commuting_family(const CommutingFamilyOptions& opts)
{
    if (opts.n == 0 || opts.d == 0) throw std::invalid_argument("commuting_family: n and d must be positive");
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto d = static_cast<Eigen::Index>(opts.d);

    std::vector<double> t(opts.n);
    t[0] = unit(rng);
    for (std::size_t i = 1; i < opts.n; ++i) t[i] = t[i - 1] + 0.1 + 0.9 * unit(rng);

    std::vector<double> lam = opts.spectrum;
    if (lam.empty())
        for (std::size_t k = 0; k < opts.d; ++k) lam.push_back(2.0 * unit(rng));
    if (lam.size() != opts.d) throw std::invalid_argument("commuting_family: spectrum length must equal d");
    std::size_t rank = opts.rank;
    if (rank == 0)
        rank = opts.d == 1 ? 1 : 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(opts.d - 1));
    if (rank > opts.d) throw std::invalid_argument("commuting_family: rank exceeds d");

    Eigen::MatrixXd G(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) G(a, b) = gauss(rng);
    Eigen::MatrixXd S, Sinv;
    if (opts.orthogonal) {
        S = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
        Sinv = S.transpose();
    } else {
        S = Eigen::MatrixXd::Identity(d, d) + 0.3 * G / std::sqrt(static_cast<double>(opts.d));
        Sinv = S.inverse();
    }

    auto conj = [&](const Eigen::VectorXd& diag) -> Eigen::MatrixXd { return S * diag.asDiagonal() * Sinv; };
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k < rank; ++k) proj(static_cast<Eigen::Index>(k)) = 1.0;

    GeneratedFamily out{TimeGrid(t), OperatorFamily{}, MultiplierFamily{}};
    auto& fam = out.family;
    fam.d = opts.d;
    fam.K.assign(opts.n, conj(proj));
    fam.W.resize(opts.n);
    fam.WK.resize(opts.n);
    for (std::size_t i = 0; i < opts.n; ++i) {
        for (std::size_t j = i; j < opts.n; ++j) {
            Eigen::VectorXd e(d);
            for (Eigen::Index k = 0; k < d; ++k) e(k) = std::exp(-(t[j] - t[i]) * lam[static_cast<std::size_t>(k)]);
            fam.W[i].push_back(conj(e));
        }
        for (std::size_t k = 0; k <= i; ++k) {
            Eigen::VectorXd e(d);
            for (Eigen::Index m = 0; m < d; ++m)
                e(m) = proj(m) * std::exp((t[i] - t[k]) * lam[static_cast<std::size_t>(m)]);
            fam.WK[i].push_back(conj(e));
        }
    }
    out.q.q.resize(opts.n);
    for (std::size_t i = 0; i < opts.n; ++i) {
        out.q.q[i].resize(d);
        for (Eigen::Index k = 0; k < d; ++k) out.q.q[i](k) = unit(rng);
    }
    return out;
}

OperatorFamily similarity_transform(const OperatorFamily& fam, const Eigen::MatrixXd& S)
{
    fam.check();
    const Eigen::MatrixXd Sinv = S.inverse();
    OperatorFamily out = fam;
    for (auto& k : out.K) k = S * k * Sinv;
    for (auto& row : out.W)
        for (auto& m : row) m = S * m * Sinv;
    for (auto& row : out.WK)
        for (auto& m : row) m = S * m * Sinv;
    return out;
}

} // namespace pathdet
