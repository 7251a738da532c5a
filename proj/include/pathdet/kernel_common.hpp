#ifndef PATHDET_KERNEL_COMMON_HPP
#define PATHDET_KERNEL_COMMON_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathdet {

using TimePotential = std::function<double(double t, double x)>;

struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KernelLawResiduals {
    double semigroup = 0;
    double reversibility = 0;
    double commutation = 0;
};

struct KernelIdentityReport {
    double lhs = 0;
    double rhs = 0;
    double diff = 0;
    double tolerance = 0;
    bool pass = false;
    double refinement_shift = 0;
    std::vector<std::string> warnings;
};

} // namespace pathdet

#endif
