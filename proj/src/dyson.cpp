#include "pathdet/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace pathdet {

namespace {

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

SeededRng::result_type SeededRng::operator()()
{
    return splitmix64(splitmix64(seed_) ^ (counter_++ * 0xd1b54a32d192ed03ULL));
}

SeededRng SeededRng::derive(std::uint64_t k) const
{
    return SeededRng(splitmix64(seed_ ^ splitmix64(k + 0x632be59bd9b4e019ULL)));
}

Eigen::MatrixXcd HermitianOUState::matrix() const
{
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    std::size_t k = 0;
    for (std::size_t i = 0; i < N; ++i) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
        for (std::size_t j = i + 1; j < N; ++j, ++k) {
            const std::complex<double> z(re[k], im[k]);
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z;
            m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(z);
        }
    }
    return m;
}

double HermitianOUState::trace() const
{
    double t = 0;
    for (double d : diag) t += d;
    return t;
}

HermitianOUState sample_stationary(std::size_t N, SeededRng& rng)
{
    if (N == 0) throw std::invalid_argument("sample_stationary: N must be positive");
    HermitianOUState s;
    s.N = N;
    const double sd = std::sqrt(kDiagonalVariance), so = std::sqrt(kOffDiagonalVariance);
    for (std::size_t i = 0; i < N; ++i) s.diag.push_back(sd * rng.normal());
    for (std::size_t k = 0; k < N * (N - 1) / 2; ++k) {
        s.re.push_back(so * rng.normal());
        s.im.push_back(so * rng.normal());
    }
    return s;
}

HermitianOUState evolve(const HermitianOUState& state, double dt, SeededRng& rng)
{
    if (!(dt > 0)) throw std::invalid_argument("evolve: dt must be positive");
    const double a = std::exp(-dt), b = std::sqrt(-std::expm1(-2 * dt));
    const double sd = b * std::sqrt(kDiagonalVariance), so = b * std::sqrt(kOffDiagonalVariance);
    HermitianOUState s = state;
    for (auto& d : s.diag) d = a * d + sd * rng.normal();
    for (std::size_t k = 0; k < s.re.size(); ++k) {
        s.re[k] = a * s.re[k] + so * rng.normal();
        s.im[k] = a * s.im[k] + so * rng.normal();
    }
    s.time += dt;
    return s;
}

std::vector<double> hermitian_eigenvalues(Eigen::MatrixXcd a)
{
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("hermitian_eigenvalues: matrix must be square");
    const double scale = std::max(1.0, a.norm());
    auto off = [&] {
        double s = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j) s += std::norm(a(i, j));
        return std::sqrt(s);
    };
    int sweep = 0;
    for (; off() > 1e-12 * scale; ++sweep) {
        if (sweep >= 100) throw std::runtime_error("hermitian_eigenvalues: Jacobi iteration did not converge");
        for (Eigen::Index p = 0; p < n - 1; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const std::complex<double> b = a(p, q);
                const double mag = std::abs(b);
                if (mag == 0) continue;
                const std::complex<double> phase = b / mag;
                const double tau = (a(q, q).real() - a(p, p).real()) / (2 * mag);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
                const double c = 1 / std::sqrt(1 + t * t), s = t * c;
                // U = diag(1, conj(phase)) R with R = [[c, s], [-s, c]]
                const std::complex<double> u_pp = c, u_pq = s, u_qp = -s * std::conj(phase), u_qq = c * std::conj(phase);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const std::complex<double> kp = a(k, p), kq = a(k, q);
                    a(k, p) = kp * u_pp + kq * u_qp;
                    a(k, q) = kp * u_pq + kq * u_qq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const std::complex<double> pk = a(p, k), qk = a(q, k);
                    a(p, k) = std::conj(u_pp) * pk + std::conj(u_qp) * qk;
                    a(q, k) = std::conj(u_pq) * pk + std::conj(u_qq) * qk;
                }
                a(p, q) = a(q, p) = 0;
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i).real();
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

std::vector<double> eigenvalues(const HermitianOUState& state)
{
    return hermitian_eigenvalues(state.matrix());
}

McEstimate mc_functional_estimate(std::size_t N, const std::vector<double>& times, const std::vector<Multiplier>& q,
                                  std::size_t n_samples, std::uint64_t seed)
{
    if (n_samples < 100) throw std::invalid_argument("mc_functional_estimate: at least 100 samples");
    if (times.empty() || q.size() != times.size())
        throw std::invalid_argument("mc_functional_estimate: one multiplier per time");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("mc_functional_estimate: times must increase");
    const SeededRng root(seed);
    double sum = 0, sum2 = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        SeededRng rng = root.derive(k);
        HermitianOUState s = sample_stationary(N, rng);
        double f = 1;
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (i > 0) s = evolve(s, times[i] - times[i - 1], rng);
            for (double lam : eigenvalues(s)) f *= 1 - q[i](lam);
        }
        sum += f;
        sum2 += f * f;
    }
    const double n = static_cast<double>(n_samples);
    McEstimate e;
    e.mean = sum / n;
    e.stderr_ = std::sqrt(std::max(0.0, sum2 / n - e.mean * e.mean) / (n - 1));
    e.samples = n_samples;
    e.seed = seed;
    return e;
}

CovarianceEstimate entry_autocovariance(std::size_t N, double lag, bool off_diagonal, std::size_t n_samples,
                                        std::uint64_t seed)
{
    if (off_diagonal && N < 2) throw std::invalid_argument("entry_autocovariance: off-diagonal entry needs N >= 2");
    if (n_samples < 2) throw std::invalid_argument("entry_autocovariance: need at least two samples");
    const SeededRng root(seed);
    double sum = 0, sum2 = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        SeededRng rng = root.derive(k);
        const auto s0 = sample_stationary(N, rng);
        const auto s1 = evolve(s0, lag, rng);
        const double p = off_diagonal ? s0.re[0] * s1.re[0] : s0.diag[0] * s1.diag[0];
        sum += p;
        sum2 += p * p;
    }
    const double n = static_cast<double>(n_samples);
    CovarianceEstimate c;
    c.estimate = sum / n;
    c.stderr_ = std::sqrt(std::max(0.0, sum2 / n - c.estimate * c.estimate) / (n - 1));
    c.expected = (off_diagonal ? kOffDiagonalVariance : kDiagonalVariance) * std::exp(-lag);
    return c;
}

} // namespace pathdet
