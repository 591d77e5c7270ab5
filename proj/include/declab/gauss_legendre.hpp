// gauss_legendre.hpp — Gauss-Legendre rules and composite panel quadrature
#pragma once

#include <cstddef>
#include <vector>

namespace declab {

// nodes/weights of the p-point Gauss-Legendre rule on [-1, 1],
// nodes ascending, accurate to machine precision (Newton on P_p)
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int order);

// barycentric interpolation weights for an arbitrary node set
std::vector<double> barycentric_weights(const std::vector<double>& nodes);

} // namespace declab
