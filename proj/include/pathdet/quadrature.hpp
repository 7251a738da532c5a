#ifndef PATHDET_QUADRATURE_HPP
#define PATHDET_QUADRATURE_HPP

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <vector>

namespace pathdet {

struct NonFiniteKernel : std::domain_error {
    using std::domain_error::domain_error;
};

struct QuadratureGrid {
    double a = 0;
    double b = 0;
    std::vector<double> x;
    std::vector<double> w;

    std::size_t size() const { return x.size(); }
};

QuadratureGrid gauss_legendre(std::size_t m, double a, double b);

// Gauss-Legendre with m nodes on each panel [breaks[k], breaks[k+1]].
QuadratureGrid composite_gauss_legendre(const std::vector<double>& breaks, std::size_t m);

// Panels no wider than h covering [a, b], with extra breakpoints forced where given.
QuadratureGrid panel_grid(double a, double b, double h, std::size_t m, const std::vector<double>& forced = {});

using KernelFunction = std::function<double(double, double)>;
using Multiplier = std::function<double(double)>;

// M_ab = sqrt(w_a) k(x_a, y_b) sqrt(w_b).
Eigen::MatrixXd discretize(const KernelFunction& k, const QuadratureGrid& rows, const QuadratureGrid& cols);
Eigen::MatrixXd discretize(const KernelFunction& k, const QuadratureGrid& grid);

// Symmetric square-root weighting of a kernel matrix already evaluated on the nodes.
Eigen::MatrixXd weight_matrix(const Eigen::MatrixXd& values, const QuadratureGrid& rows, const QuadratureGrid& cols);

double determinant_lu(const Eigen::MatrixXd& m);

double nystrom_determinant(const KernelFunction& k, const QuadratureGrid& grid);

struct SeriesResult {
    double value = 1;
    double last_term = 0;
    std::size_t order = 0;
};

constexpr std::size_t kSeriesMaxOrder = 8;
constexpr std::size_t kSeriesMaxNodes = 24;

// Truncated Fredholm expansion, summing principal minors of the discretized kernel.
SeriesResult series_determinant(const KernelFunction& k, const QuadratureGrid& grid, std::size_t max_order);

// det(I - Q Blocks) where block (i, j) lives on grids[i] x grids[j]; empty q means Q = I.
double block_nystrom_determinant(const std::vector<std::vector<KernelFunction>>& blocks,
                                 const std::vector<QuadratureGrid>& grids, const std::vector<Multiplier>& q = {});
double block_nystrom_determinant(const std::vector<std::vector<KernelFunction>>& blocks, const QuadratureGrid& grid,
                                 const std::vector<Multiplier>& q = {});

struct ConjugationPair {
    Multiplier u;
    Multiplier u_prime;

    static ConjugationPair identity();
};

// (x, y) -> u(x) k(x, y) u'(y); throws std::overflow_error when the product overflows.
KernelFunction apply_conjugation(const KernelFunction& k, const ConjugationPair& pair);

// u(x_a) M_ab u'(y_b) for a matrix already evaluated on the nodes.
Eigen::MatrixXd conjugate_matrix(const Eigen::MatrixXd& m, const std::vector<double>& xs, const std::vector<double>& ys,
                                 const ConjugationPair& pair);

} // namespace pathdet

#endif
