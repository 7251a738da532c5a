#ifndef PATHDET_HERMITE_HPP
#define PATHDET_HERMITE_HPP

#include "pathdet/kernel_common.hpp"
#include "pathdet/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace pathdet {

// Normalized oscillator function phi_k(x) = e^{-x^2/2} p_k(x).
double oscillator_fn(std::size_t k, double x);

// phi_0(x), ..., phi_{count-1}(x).
std::vector<double> oscillator_values(std::size_t count, double x);

// count x |xs| matrix of oscillator values.
Eigen::MatrixXd oscillator_matrix(std::size_t count, const std::vector<double>& xs);

double hermite_kernel(std::size_t N, double x, double y);

// Closed form for x != y, falls back to the sum on the diagonal.
double christoffel_darboux(std::size_t N, double x, double y);

// e^{-tD}(x, y) by the Mehler formula with rho = e^{-t}; t must be positive.
double mehler_propagator(double t, double x, double y);

double mehler_spectral(double t, double x, double y, std::size_t terms = 60);

// e^{tD} K_Herm(x, y) = sum_{k<N} e^{tk} phi_k(x) phi_k(y).
double forward_hermite(double t, std::size_t N, double x, double y);

// K^ext(s, x; t, y).
double extended_hermite_kernel(std::size_t N, double s, double x, double t, double y);

Eigen::MatrixXd mehler_matrix(double t, const std::vector<double>& xs, const std::vector<double>& ys);
// Signed exponent allowed here; forward_hermite's t >= 0 restriction is for the public kernel.
Eigen::MatrixXd forward_matrix(double t, std::size_t N, const std::vector<double>& xs, const std::vector<double>& ys);

// Multiplier at one time. Indicators use the tail of the window as their support.
struct GueLevel {
    enum class Kind { IndicatorAbove, PolyGaussian, Custom };
    Kind kind = Kind::IndicatorAbove;
    double threshold = 0;
    std::vector<double> coeffs;  // PolyGaussian: q(x) = (sum_k c_k x^k) e^{-decay x^2}
    double decay = 1;
    Multiplier custom;

    double operator()(double x) const;
    bool preset() const { return kind != Kind::Custom; }

    static GueLevel indicator_above(double s);
    static GueLevel poly_gaussian(std::vector<double> coeffs, double decay);
    static GueLevel from_function(Multiplier q);
};

struct GueGridOptions {
    double domain = 10;
    double panel = 1;
    std::size_t nodes = 20;
    bool refine = true;
};

using GueReport = KernelIdentityReport;

double gue_lhs(std::size_t N, const std::vector<double>& times, const std::vector<GueLevel>& levels,
               const GueGridOptions& opts);
double gue_rhs(std::size_t N, const std::vector<double>& times, const std::vector<GueLevel>& levels,
               const GueGridOptions& opts);

// Throws ResolutionError when halving the panel width moves either side by more than tol.
GueReport gue_identity_check(std::size_t N, const std::vector<double>& times, const std::vector<GueLevel>& levels,
                             const GueGridOptions& opts = {}, double tol = 1e-8);

struct GuePreset {
    std::size_t N;
    std::vector<double> times;
    std::vector<GueLevel> levels;
};

// Times (0, 0.7, 1.5) truncated to n; thresholds placed near the spectral edge sqrt(2N).
GuePreset gue_preset(std::size_t N, std::size_t n);

double rescaled_kernel(std::size_t N, double x, double y);
double rescaled_generator_potential(std::size_t N, double x);

// Grid max-norm residuals of the semigroup, right-invertibility and commutation laws.
KernelLawResiduals hermite_law_residuals(std::size_t N, double s, double t, const QuadratureGrid& grid);

struct ContinuumOptions {
    std::size_t modes = 60;
    double domain = 16;
    double panel = 0.5;
    std::size_t nodes = 20;
};

// Gamma^{h,n} = Q_{t_1} e^{-delta D} Q_{t_2} ... Q_{t_n} in the oscillator basis (modes x modes).
Eigen::MatrixXd continuum_gamma(double l, double r, const TimePotential& h, std::size_t n_steps,
                                const ContinuumOptions& opts = {});

// Gamma on a grid from its modal matrix.
Eigen::MatrixXd gamma_on_grid(const Eigen::MatrixXd& modal, const std::vector<double>& xs);

// det(I - K_Herm + Gamma^{h,n} e^{(r-l)D} K_Herm).
double continuum_hermite_statistic(std::size_t N, double l, double r, const TimePotential& h, std::size_t n_steps,
                                   const ContinuumOptions& opts = {});

} // namespace pathdet

#endif
