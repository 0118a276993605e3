#ifndef MCD_GAUSS_HPP
#define MCD_GAUSS_HPP

/**
 * @file gauss.hpp
 * @brief Gaussian tail/density helpers shared by the detection machinery.
 */

#include <cmath>

namespace mcd {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Standard normal upper-tail probability Q(x) = P[Z > x].
inline double q_function(double x) {
    return 0.5 * std::erfc(x / kSqrt2);
}

/// Standard normal CDF.
inline double phi(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

/// Gaussian density with mean mu and variance var.
inline double normal_pdf(double x, double mu, double var) {
    const double d = x - mu;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
}

}  // namespace mcd

#endif  // MCD_GAUSS_HPP
