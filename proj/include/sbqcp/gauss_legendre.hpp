#pragma once

#include <vector>

namespace sbqcp {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
// nodes in ascending order.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

// Cached rule; the returned reference stays valid for the program lifetime.
const GaussLegendreRule& gauss_legendre_cached(int n);

}  // namespace sbqcp
