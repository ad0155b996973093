#include "fairmetric/transport.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fairmetric/error.hpp"

namespace fairmetric {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Residual masses below this are treated as exhausted.
constexpr double kMassEps = 1e-13;
// Minimum improvement for a Bellman-Ford relaxation; guards against
// rounding-induced cycles in the residual graph.
constexpr double kRelaxEps = 1e-15;

}  // namespace

CostMatrix::CostMatrix(std::size_t k, std::vector<double> c) : k_(k), c_(std::move(c)) {
    if (k_ < 1) throw ValidationError("cost matrix dimension must be positive");
    if (c_.size() != k_ * k_) {
        throw ValidationError("cost matrix has " + std::to_string(c_.size()) + " entries, expected " +
                              std::to_string(k_ * k_));
    }
    for (std::size_t i = 0; i < k_; ++i) {
        for (std::size_t j = 0; j < k_; ++j) {
            const double v = c_[i * k_ + j];
            if (!std::isfinite(v) || v < 0.0) throw ValidationError("costs must be finite and non-negative");
            if (i == j && v != 0.0) throw ValidationError("cost matrix diagonal must be zero");
        }
    }
}

CostMatrix default_cost(std::size_t k) {
    if (k < 2) throw ValidationError("default cost needs k >= 2");
    const double off = 2.0 / static_cast<double>(k);
    std::vector<double> c(k * k, off);
    for (std::size_t i = 0; i < k; ++i) c[i * k + i] = 0.0;
    return CostMatrix(k, std::move(c));
}

TransportPlan solve(const CategoricalDistribution& source, const CategoricalDistribution& target,
                    const CostMatrix& cost) {
    if (source.k() != target.k()) {
        throw ValidationError("transport between distributions of different size (" + std::to_string(source.k()) +
                              " vs " + std::to_string(target.k()) + ")");
    }
    return solve(source.p(), target.p(), cost);
}

// Successive shortest paths on the complete bipartite residual graph. Left
// node i holds the unshipped supply of source[i], right node j the unmet
// demand of target[j]. Forward arcs i->j have infinite capacity and cost
// c(i,j); a backward arc j->i with cost -c(i,j) exists while w(i,j) > 0.
// Every augmentation exhausts a supply, a demand or a backward arc, and the
// plan stays optimal for the mass shipped so far.
TransportPlan solve(std::span<const double> source, std::span<const double> target, const CostMatrix& cost) {
    const std::size_t k = cost.k();
    if (source.size() != k || target.size() != k) {
        throw ValidationError("transport dimension mismatch: cost is " + std::to_string(k) + "x" +
                              std::to_string(k) + ", masses have " + std::to_string(source.size()) + " and " +
                              std::to_string(target.size()) + " entries");
    }
    double total_s = 0.0, total_t = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (!(source[i] >= 0.0) || !(target[i] >= 0.0)) throw ValidationError("transport masses must be non-negative");
        total_s += source[i];
        total_t += target[i];
    }
    if (std::abs(total_s - total_t) > 1e-9 * std::max(1.0, total_s)) {
        throw ValidationError("transport masses differ in total");
    }

    std::vector<double> supply(source.begin(), source.end());
    std::vector<double> demand(target.begin(), target.end());
    TransportPlan plan;
    plan.k = k;
    plan.w.assign(k * k, 0.0);

    const std::size_t nodes = 2 * k;  // [0,k) left, [k,2k) right
    std::vector<double> dist(nodes);
    std::vector<std::size_t> pred(nodes);
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    // Each augmentation removes at least one of k supplies, k demands or
    // k*k backward arcs; more iterations than that means rounding trouble.
    const std::size_t max_augment = 4 * k * k + 4 * k + 8;
    for (std::size_t iter = 0;; ++iter) {
        bool any_supply = false;
        for (std::size_t i = 0; i < k; ++i) {
            if (supply[i] > kMassEps) any_supply = true;
        }
        if (!any_supply) break;
        if (iter > max_augment) throw std::logic_error("transport solver failed to converge");

        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(pred.begin(), pred.end(), kNone);
        for (std::size_t i = 0; i < k; ++i) {
            if (supply[i] > kMassEps) dist[i] = 0.0;
        }
        for (std::size_t pass = 0; pass < nodes; ++pass) {
            bool changed = false;
            for (std::size_t i = 0; i < k; ++i) {
                if (dist[i] == kInf) continue;
                for (std::size_t j = 0; j < k; ++j) {
                    const double d = dist[i] + cost(i, j);
                    if (d < dist[k + j] - kRelaxEps) {
                        dist[k + j] = d;
                        pred[k + j] = i;
                        changed = true;
                    }
                }
            }
            for (std::size_t j = 0; j < k; ++j) {
                if (dist[k + j] == kInf) continue;
                for (std::size_t i = 0; i < k; ++i) {
                    if (plan.w[i * k + j] <= kMassEps) continue;
                    const double d = dist[k + j] - cost(i, j);
                    if (d < dist[i] - kRelaxEps) {
                        dist[i] = d;
                        pred[i] = k + j;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }

        std::size_t sink = kNone;
        for (std::size_t j = 0; j < k; ++j) {
            if (demand[j] > kMassEps && dist[k + j] < kInf && (sink == kNone || dist[k + j] < dist[k + sink])) {
                sink = j;
            }
        }
        if (sink == kNone) break;  // leftover supply is rounding residue

        // Walk back to the originating supply node and find the bottleneck.
        double amount = demand[sink];
        std::size_t node = k + sink;
        while (pred[node] != kNone) {
            const std::size_t prev = pred[node];
            if (prev >= k) {  // backward arc (prev right) -> node (left)
                amount = std::min(amount, plan.w[node * k + (prev - k)]);
            }
            node = prev;
        }
        amount = std::min(amount, supply[node]);
        supply[node] -= amount;
        demand[sink] -= amount;

        node = k + sink;
        while (pred[node] != kNone) {
            const std::size_t prev = pred[node];
            if (prev < k) {
                plan.w[prev * k + (node - k)] += amount;
            } else {
                double& f = plan.w[node * k + (prev - k)];
                f -= amount;
                if (f < kMassEps) f = 0.0;
            }
            node = prev;
        }
    }

    double value = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) value += plan.w[i * k + j] * cost(i, j);
    }
    plan.value = value;
    return plan;
}

}  // namespace fairmetric
