#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairmetric/attrspace.hpp"
#include "fairmetric/transport.hpp"

namespace fairmetric {

enum class MetricId { L1, L2, WD, Specificity, InfoSpecificity };

inline constexpr std::array<MetricId, 5> kAllMetrics = {MetricId::L1, MetricId::L2, MetricId::WD,
                                                        MetricId::Specificity, MetricId::InfoSpecificity};

/// CLI/config name: "l1", "l2", "wd", "spec", "is".
std::string_view metric_name(MetricId id);
/// Human-readable column title ("L1", "Specificity", ...).
std::string_view metric_title(MetricId id);
std::optional<MetricId> parse_metric(std::string_view name);
/// Comma-separated names; "all" expands to every metric. Throws ValidationError.
std::vector<MetricId> parse_metric_list(std::string_view list);

/// Tunables shared by all metrics.
struct MetricOptions {
    double is_alpha = 0.5;             // weight of L1 inside information specificity
    std::optional<CostMatrix> cost;    // WD ground cost; default_cost(k) when empty
};

/// (1/k) * sum |p_i - q_i|
double l1(const CategoricalDistribution& p, const CategoricalDistribution& q);

/// (1/k) * sqrt(sum (p_i - q_i)^2)
double l2(const CategoricalDistribution& p, const CategoricalDistribution& q);

/// Rank weights alpha_2..alpha_k used by specificity (index 0 holds alpha_2).
/// alpha_j = (k-j) / sum_{m=2..k}(k-m) for k >= 3, and alpha_2 = 1 for k = 2.
/// The weights sum to 1 and decrease strictly down to alpha_k = 0.
std::vector<double> specificity_weights(std::size_t k);

/// p_(1) - sum_{j>=2} alpha_j * p_(j) over the entries sorted in descending
/// order. Zero at the uniform distribution, one at an AB-EP.
double specificity(const CategoricalDistribution& p);

double delta_specificity(const CategoricalDistribution& p, const CategoricalDistribution& q);

/// alpha * l1 + (1 - alpha) * delta_specificity. Throws for alpha outside [0,1].
double info_specificity(const CategoricalDistribution& p, const CategoricalDistribution& q, double alpha = 0.5);

/// Optimal transport cost moving p onto q.
double wd(const CategoricalDistribution& p, const CategoricalDistribution& q,
          const std::optional<CostMatrix>& cost = std::nullopt);

/// Raw discrepancy D(p, q) for any metric.
double discrepancy(MetricId metric, const CategoricalDistribution& p, const CategoricalDistribution& q,
                   const MetricOptions& options = {});

/// Largest raw score against uniform(k), attained at the AB-EPs. Computed,
/// not tabulated; for asymmetric WD costs the maximum over all AB-EPs.
double n_factor(MetricId metric, std::size_t k, const MetricOptions& options = {});

struct FairnessScore {
    MetricId metric;
    std::size_t k;
    double raw;
    double n_factor;
    double normalized;
};

/// Fairness discrepancy of an estimated attribute distribution against the
/// uniform reference, normalized into [0, 1].
FairnessScore fd_score(MetricId metric, const CategoricalDistribution& p_est, const MetricOptions& options = {});

}  // namespace fairmetric
