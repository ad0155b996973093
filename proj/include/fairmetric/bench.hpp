#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fairmetric/attrspace.hpp"
#include "fairmetric/classifier.hpp"
#include "fairmetric/metrics.hpp"

namespace fairmetric {

enum class ScoreKind { FairEP, ABEP, Sweep };

struct ScoreEntry {
    std::size_t k = 0;
    MetricId metric = MetricId::L1;
    double f = 0.0;                     // normalized score through the classifier
    std::optional<double> f_star;       // normalized score through the perfect classifier
    std::optional<std::size_t> outcome; // AB-EP outcome, or sweep start
    std::size_t trial = 0;
    std::size_t epoch = 0;
};

struct ScoreSet {
    ScoreKind kind = ScoreKind::FairEP;
    std::vector<ScoreEntry> entries;

    ScoreSet only(MetricId metric) const;
    ScoreSet only_k(std::size_t k) const;
    void append(const ScoreSet& other);
};

/// Mean |f - 0| over a Fair-EP set.
double mepe_fair(const ScoreSet& s);
/// Mean |f - 1| over an AB-EP set.
double mepe_ab(const ScoreSet& s);
/// Population variance (divide by N) of the scores.
double ep_var(const ScoreSet& s);
/// Mean |f - f*| over a sweep set; every entry needs f*.
double mem(const ScoreSet& s);
/// mem computed separately for each sweep start, then averaged.
double mem_per_start(const ScoreSet& s);

struct EpAnalysis {
    ScoreSet fair;
    ScoreSet ab;
};

/// Scores the uniform distribution and each of the k AB-EPs through the
/// classifier. Sampled mode repeats `trials` times with seeds derived from
/// (seed, k, trial, point); Expectation mode evaluates once.
EpAnalysis run_ep_analysis(const SpacePtr& space, const ConfusionModel& model, const EstimationMode& mode,
                           std::span<const MetricId> metrics, std::size_t trials = 1,
                           const MetricOptions& options = {});

struct SweepEpoch {
    std::size_t start = 0;
    std::size_t epoch = 0;  // 1-based
    CategoricalDistribution p_true;
    CategoricalDistribution p_est;
    std::vector<double> f;       // per metric, parallel to SweepResult::metrics
    std::vector<double> f_star;
};

struct SweepResult {
    std::size_t k = 0;
    std::vector<MetricId> metrics;
    std::vector<SweepEpoch> trace;  // ordered by start, then epoch
    ScoreSet scores;                // kind Sweep
};

/// Runs the AB-EP to Fair-EP sweep from `start` (every AB-EP when empty),
/// recording f through the model and f* through the perfect classifier.
SweepResult run_sweep(const SpacePtr& space, const ConfusionModel& model, const EstimationMode& mode,
                      std::span<const MetricId> metrics, double step,
                      std::optional<std::size_t> start = std::nullopt, const MetricOptions& options = {});

/// One classifier at one attribute cardinality.
struct BenchCell {
    SpacePtr space;
    ConfusionModel model;
    std::string classifier;  // label for metadata
};

struct BenchConfig {
    std::vector<BenchCell> cells;
    std::vector<MetricId> metrics;
    EstimationMode mode = Expectation{};
    std::size_t trials = 30;
    double step = 0.01;
    std::optional<std::size_t> sweep_start;  // empty: every AB-EP
    MetricOptions options;
};

struct BenchRow {
    std::string benchmark;  // "MEPE", "EP-var", "MEM"
    std::string kind;       // "fair", "ab", "sweep"
    std::string k_set;      // "2;4;8;16" for pooled rows
    bool pooled = false;
    std::vector<double> values;  // parallel to BenchmarkReport::metrics
    std::vector<MetricId> best;  // ties listed together
    std::vector<MetricId> worst;
};

struct BenchmarkReport {
    std::vector<MetricId> metrics;
    std::vector<BenchRow> rows;
    // metadata
    std::vector<std::size_t> k_values;
    std::vector<std::string> classifiers;
    std::string mode;  // "expectation" or "sample"
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    double step = 0.0;
    std::string sweep_starts;
    std::size_t fair_pool = 0;  // N of the pooled Fair-EP set, per metric
    std::size_t ab_pool = 0;    // N of the pooled AB-EP set, per metric

    const BenchRow* find(const std::string& benchmark, const std::string& kind, const std::string& k_set) const;
    double value(const BenchRow& row, MetricId metric) const;
};

/// Values within this distance count as tied when tagging best/worst.
inline constexpr double kTieTolerance = 1e-9;

/// Pools EP scores across all cells into MEPE/EP-var rows, adds one MEM row
/// per k sweep and, with several cells, per-k breakdown rows. Tags best/worst.
BenchmarkReport summarize(const BenchConfig& config);

/// Columns: benchmark,kind,k_set,metric,value. Pool sizes appear as rows with
/// benchmark "N".
void write_report_csv(const BenchmarkReport& report, std::ostream& out, int precision = 6);
void write_report_markdown(const BenchmarkReport& report, std::ostream& out, int precision = 4);

/// "%.{precision}g" with negative zero printed as 0.
std::string format_number(double v, int precision);

}  // namespace fairmetric
