// common.hpp — shared scalar types, tolerances, and small helpers
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace declab {

using Complex = std::complex<double>;

// repository-wide tolerances (validation gates)
constexpr double kHermiticityTol   = 1e-12;
constexpr double kNegativityTol    = -1e-12;
constexpr double kNormalizationTol = 1e-10;
constexpr double kUnitarityTol     = 1e-12;

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline bool nearly_equal(double a, double b, double tol) noexcept {
    return std::abs(a - b) <= tol;
}

} // namespace declab
