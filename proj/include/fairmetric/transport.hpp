#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fairmetric/attrspace.hpp"

namespace fairmetric {

/// Ground cost between outcomes, row-major k x k. Zero diagonal,
/// non-negative entries.
class CostMatrix {
public:
    CostMatrix(std::size_t k, std::vector<double> c);

    std::size_t k() const { return k_; }
    double operator()(std::size_t i, std::size_t j) const { return c_[i * k_ + j]; }
    std::span<const double> data() const { return c_; }

private:
    std::size_t k_;
    std::vector<double> c_;
};

/// Discrete metric scaled by 2/k. Under this cost the transport distance to
/// any target equals the normalized Manhattan distance (1/k) * sum |p_i - q_i|.
CostMatrix default_cost(std::size_t k);

struct TransportPlan {
    std::size_t k = 0;
    std::vector<double> w;  // row-major, w[i*k+j] = mass moved from i to j
    double value = 0.0;

    double flow(std::size_t i, std::size_t j) const { return w[i * k + j]; }
};

/// Exact minimum-cost transport plan moving `source` onto `target`.
TransportPlan solve(const CategoricalDistribution& source, const CategoricalDistribution& target,
                    const CostMatrix& cost);

/// Same as above on raw mass vectors. Both must have equal (positive) totals.
TransportPlan solve(std::span<const double> source, std::span<const double> target, const CostMatrix& cost);

}  // namespace fairmetric
