#ifndef PATHDET_DYSON_HPP
#define PATHDET_DYSON_HPP

#include "pathdet/quadrature.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace pathdet {

// Counter-based stream: the k-th draw is a SplitMix64 hash of (seed, k).
class SeededRng {
public:
    using result_type = std::uint64_t;

    explicit SeededRng(std::uint64_t seed = 0) : seed_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    double normal() { return gauss_(*this); }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }
    // Independent stream for trajectory k.
    SeededRng derive(std::uint64_t k) const;

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    std::normal_distribution<double> gauss_;
};

// Stationary law: diagonal entries N(0, 1/2), real and imaginary parts above the diagonal N(0, 1/4),
// so the N = 1 eigenvalue has density e^{-x^2}/sqrt(pi).
constexpr double kDiagonalVariance = 0.5;
constexpr double kOffDiagonalVariance = 0.25;

struct HermitianOUState {
    std::size_t N = 0;
    std::vector<double> diag;  // N
    std::vector<double> re;    // upper triangle, row major, N(N-1)/2
    std::vector<double> im;
    double time = 0;

    Eigen::MatrixXcd matrix() const;
    double trace() const;
};

HermitianOUState sample_stationary(std::size_t N, SeededRng& rng);

// Exact OU transition x -> e^{-dt} x + sqrt(1 - e^{-2 dt}) sigma Z for every entry.
HermitianOUState evolve(const HermitianOUState& state, double dt, SeededRng& rng);

// Cyclic complex Jacobi; eigenvalues sorted descending. Throws std::runtime_error without convergence.
std::vector<double> hermitian_eigenvalues(Eigen::MatrixXcd a);
std::vector<double> eigenvalues(const HermitianOUState& state);

struct McEstimate {
    double mean = 0;
    double stderr_ = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

// Mean of prod_i prod_j (1 - q_i(lambda_j(t_i))) over stationary trajectories.
McEstimate mc_functional_estimate(std::size_t N, const std::vector<double>& times, const std::vector<Multiplier>& q,
                                  std::size_t n_samples, std::uint64_t seed);

struct CovarianceEstimate {
    double estimate = 0;
    double stderr_ = 0;
    double expected = 0;
};

// Lag covariance of the (0,0) entry, or of Re(0,1) when off_diagonal is set (needs N >= 2).
CovarianceEstimate entry_autocovariance(std::size_t N, double lag, bool off_diagonal, std::size_t n_samples,
                                        std::uint64_t seed);

} // namespace pathdet

#endif
