#include "fairmetric/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "fairmetric/error.hpp"

namespace fairmetric {

namespace {

void check_same_size(const CategoricalDistribution& p, const CategoricalDistribution& q) {
    if (p.k() != q.k()) {
        throw ValidationError("distributions differ in size (" + std::to_string(p.k()) + " vs " +
                              std::to_string(q.k()) + ")");
    }
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view metric_name(MetricId id) {
    switch (id) {
        case MetricId::L1: return "l1";
        case MetricId::L2: return "l2";
        case MetricId::WD: return "wd";
        case MetricId::Specificity: return "spec";
        case MetricId::InfoSpecificity: return "is";
    }
    return "?";
}

std::string_view metric_title(MetricId id) {
    switch (id) {
        case MetricId::L1: return "L1";
        case MetricId::L2: return "L2";
        case MetricId::WD: return "WD";
        case MetricId::Specificity: return "Specificity";
        case MetricId::InfoSpecificity: return "IS";
    }
    return "?";
}

std::optional<MetricId> parse_metric(std::string_view name) {
    for (MetricId id : kAllMetrics) {
        if (metric_name(id) == name) return id;
    }
    return std::nullopt;
}

std::vector<MetricId> parse_metric_list(std::string_view list) {
    std::vector<MetricId> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto comma = list.find(',', pos);
        const std::string item = trim(list.substr(pos, comma == std::string_view::npos ? list.npos : comma - pos));
        if (item == "all") {
            for (MetricId id : kAllMetrics) {
                if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
            }
        } else if (auto id = parse_metric(item)) {
            if (std::find(out.begin(), out.end(), *id) == out.end()) out.push_back(*id);
        } else {
            throw ValidationError("unknown metric '" + item + "' (expected l1, l2, wd, spec, is or all)");
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

double l1(const CategoricalDistribution& p, const CategoricalDistribution& q) {
    check_same_size(p, q);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.k(); ++i) sum += std::abs(p[i] - q[i]);
    return sum / static_cast<double>(p.k());
}

double l2(const CategoricalDistribution& p, const CategoricalDistribution& q) {
    check_same_size(p, q);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.k(); ++i) {
        const double d = p[i] - q[i];
        sum += d * d;
    }
    return std::sqrt(sum) / static_cast<double>(p.k());
}

std::vector<double> specificity_weights(std::size_t k) {
    if (k < 2) throw ValidationError("specificity needs k >= 2");
    if (k == 2) return {1.0};
    std::vector<double> alpha;
    alpha.reserve(k - 1);
    // sum_{m=2..k} (k-m) = (k-1)(k-2)/2
    const double denom = static_cast<double>((k - 1) * (k - 2)) / 2.0;
    for (std::size_t j = 2; j <= k; ++j) alpha.push_back(static_cast<double>(k - j) / denom);
    return alpha;
}

double specificity(const CategoricalDistribution& p) {
    std::vector<double> sorted(p.p().begin(), p.p().end());
    std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto alpha = specificity_weights(p.k());
    double sp = sorted[0];
    for (std::size_t j = 1; j < sorted.size(); ++j) sp -= alpha[j - 1] * sorted[j];
    // rounding can leave sp at -1e-17 for exactly uniform input
    return std::max(sp, 0.0);
}

double delta_specificity(const CategoricalDistribution& p, const CategoricalDistribution& q) {
    check_same_size(p, q);
    return std::abs(specificity(p) - specificity(q));
}

double info_specificity(const CategoricalDistribution& p, const CategoricalDistribution& q, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ValidationError("information specificity alpha must lie in [0,1]");
    }
    return alpha * l1(p, q) + (1.0 - alpha) * delta_specificity(p, q);
}

double wd(const CategoricalDistribution& p, const CategoricalDistribution& q, const std::optional<CostMatrix>& cost) {
    check_same_size(p, q);
    if (cost) {
        if (cost->k() != p.k()) {
            throw ValidationError("cost matrix is " + std::to_string(cost->k()) + "x" + std::to_string(cost->k()) +
                                  " but distributions have k=" + std::to_string(p.k()));
        }
        return solve(p, q, *cost).value;
    }
    return solve(p, q, default_cost(p.k())).value;
}

double discrepancy(MetricId metric, const CategoricalDistribution& p, const CategoricalDistribution& q,
                   const MetricOptions& options) {
    switch (metric) {
        case MetricId::L1: return l1(p, q);
        case MetricId::L2: return l2(p, q);
        case MetricId::WD: return wd(p, q, options.cost);
        case MetricId::Specificity: return delta_specificity(p, q);
        case MetricId::InfoSpecificity: return info_specificity(p, q, options.is_alpha);
    }
    throw ValidationError("unknown metric");
}

double n_factor(MetricId metric, std::size_t k, const MetricOptions& options) {
    if (k < 2) throw ValidationError("normalization factor needs k >= 2, got " + std::to_string(k));
    const auto space = make_space(AttributeSpace::anonymous(k));
    const auto ref = uniform(space);
    // Every symmetric metric gives the same value at each AB-EP; a custom
    // transport cost need not be symmetric, so take the maximum.
    const std::size_t points = (metric == MetricId::WD && options.cost) ? k : 1;
    double best = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        best = std::max(best, discrepancy(metric, ab_extreme_point(space, i), ref, options));
    }
    if (!(best > 0.0)) throw ValidationError("metric has a zero normalization factor at k=" + std::to_string(k));
    return best;
}

FairnessScore fd_score(MetricId metric, const CategoricalDistribution& p_est, const MetricOptions& options) {
    const auto ref = uniform(p_est.space_ptr());
    FairnessScore s{};
    s.metric = metric;
    s.k = p_est.k();
    // estimate is the transport source, the uniform reference the target
    s.raw = discrepancy(metric, p_est, ref, options);
    s.n_factor = n_factor(metric, p_est.k(), options);
    s.normalized = s.raw / s.n_factor;
    return s;
}

}  // namespace fairmetric
