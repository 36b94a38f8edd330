#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace polyvol {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Thrown when a computation fails numerically (pole hit, non-convergence,
/// hopeless rejection sampling). Distinct from std::invalid_argument /
/// std::domain_error, which signal bad inputs.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline double square(double x) { return x * x; }
inline double cube(double x) { return x * x * x; }

} // namespace polyvol
