#ifndef PATHDET_AIRY_HPP
#define PATHDET_AIRY_HPP

#include "pathdet/kernel_common.hpp"
#include "pathdet/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace pathdet {

constexpr double kAiryWindow = 200;

// Throw std::domain_error outside [-kAiryWindow, kAiryWindow].
double airy_ai(double x);
double airy_ai_prime(double x);
// Termwise second derivative inside the Taylor table, x Ai(x) outside it.
double airy_ai_second(double x);

double airy2_kernel(double x, double y);
double airy2_kernel_spectral(double x, double y);

// e^{-tH}(x, y) in closed form; t must be positive.
double airy_propagator(double t, double x, double y);
// int_R e^{lambda t} Ai(x + lambda) Ai(y + lambda) d lambda.
double airy_propagator_spectral(double t, double x, double y);

// int_0^inf e^{-lambda tau} Ai(x + lambda) Ai(y + lambda) d lambda; tau may be negative.
double airy_forward(double tau, double x, double y);

// K^ext(s, x; t, y) by direct quadrature of the spectral branch.
double extended_airy_kernel(double s, double x, double t, double y);

Eigen::MatrixXd airy_forward_matrix(double tau, const std::vector<double>& xs, const std::vector<double>& ys);
Eigen::MatrixXd airy_propagator_matrix(double t, const std::vector<double>& xs, const std::vector<double>& ys);
// Block (s, t) of the extended kernel via e^{(s-t)H} - e^{(s-t)H}K for s < t.
Eigen::MatrixXd extended_airy_block(double s, double t, const std::vector<double>& xs, const std::vector<double>& ys);

struct AiryLevel {
    enum class Kind { IndicatorAbove, SoftThreshold, Custom };
    Kind kind = Kind::IndicatorAbove;
    double threshold = 0;
    double height = 1;  // SoftThreshold: height (1 - e^{-slope (x - s)}) for x > s
    double slope = 1;
    Multiplier custom;

    double operator()(double x) const;
    bool preset() const { return kind != Kind::Custom; }
    // q vanishes below the threshold for the preset kinds
    bool supported_above_threshold() const { return kind != Kind::Custom; }

    static AiryLevel indicator_above(double s);
    static AiryLevel soft_threshold(double s, double height, double slope);
    static AiryLevel from_function(Multiplier q);
};

struct AiryGridOptions {
    double left = 12;
    double right = 6;
    double panel = 0.5;
    std::size_t nodes = 16;
    bool refine = true;
    bool conjugate = true;
    // Expand each complement 1 - q_j (j >= 2) and telescope the propagators, so every inner
    // integral runs over the support of q_j. false evaluates the complement chain literally.
    bool expand_complements = true;
};

// psi(x) = e^{-rx/2} for x >= 0 and (1 + x^2)^{1/2} for x < 0, as the pair (psi, 1/psi).
ConjugationPair airy_conjugation(double r);

double airy_lhs(const std::vector<double>& times, const std::vector<AiryLevel>& levels, const AiryGridOptions& opts);
double airy_rhs(const std::vector<double>& times, const std::vector<AiryLevel>& levels, const AiryGridOptions& opts);

KernelIdentityReport airy2_identity_check(const std::vector<double>& times, const std::vector<AiryLevel>& levels,
                                          const AiryGridOptions& opts = {}, double tol = 1e-6);

struct AiryCase {
    std::vector<double> times;
    std::vector<AiryLevel> levels;
};

// n <= 3, gaps >= 0.3, thresholds in [-2, 2].
std::vector<AiryCase> airy_preset_suite();

struct TracyWidomOptions {
    std::size_t nodes = 60;
    double right = 8;
};

double tracy_widom_marginal(double s, const TracyWidomOptions& opts = {});

// Residuals of the semigroup, right-invertibility and commutation laws on probe points,
// with the inner integrals on a composite grid and the conjugation applied.
KernelLawResiduals airy_law_residuals(double s, double t, const std::vector<double>& probes);

struct AiryContinuumOptions {
    double left = 12;
    double right = 6;
    double margin = 14;
    double panel = 0.5;
    std::size_t nodes = 16;
    std::vector<double> breaks = {0.0};
};

// det(I - K_Ai + Gamma^{h,n} e^{(r-l)H} K_Ai); h must vanish left of -opts.left.
double continuum_airy_statistics(double l, double r, const TimePotential& h, std::size_t n_steps,
                                 const AiryContinuumOptions& opts = {});

} // namespace pathdet

#endif
