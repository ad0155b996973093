#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fairmetric/attrspace.hpp"
#include "fairmetric/error.hpp"

namespace fairmetric {

/// Attribute classifier as a row-stochastic confusion matrix:
/// m(i, j) = P(predict j | true outcome i).
class ConfusionModel {
public:
    /// Throws ValidationError unless every row is non-negative and sums to 1
    /// within 1e-9. Rows are renormalized.
    ConfusionModel(std::size_t k, std::vector<double> m);

    std::size_t k() const { return k_; }
    double operator()(std::size_t truth, std::size_t pred) const { return m_[truth * k_ + pred]; }
    std::span<const double> row(std::size_t truth) const { return std::span<const double>(m_).subspan(truth * k_, k_); }
    std::span<const double> data() const { return m_; }

private:
    std::size_t k_;
    std::vector<double> m_;
};

ConfusionModel perfect(std::size_t k);

/// (1 - eps) * I + (eps / k) * J: with probability eps the prediction is a
/// uniformly random outcome.
ConfusionModel uniform_noise(std::size_t k, double eps);

/// Diagonal from per-class accuracies; each row's error mass is spread
/// evenly over the other k-1 outcomes.
ConfusionModel from_accuracies(std::span<const double> accuracies);

/// Diagonal of the confusion matrix.
std::vector<double> per_class_accuracy(const ConfusionModel& m);

struct Expectation {};
struct Sampled {
    std::size_t n = 0;
    std::uint64_t seed = 0;
};
using EstimationMode = std::variant<Expectation, Sampled>;

/// Stable 64-bit mixing of a base seed with cell indices (splitmix64 chain),
/// so per-trial seeds do not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices);

struct PredictionRecord {
    std::string id;
    std::variant<std::vector<double>, std::size_t> output;  // soft probs or hard label
    std::optional<std::size_t> truth;

    bool is_soft() const { return std::holds_alternative<std::vector<double>>(output); }
};

/// Draws n true outcomes from p_true and one prediction per outcome from the
/// matching confusion row. Hard records carrying truth, ids "s0".."s{n-1}".
std::vector<PredictionRecord> sample_predictions(const ConfusionModel& m, const CategoricalDistribution& p_true,
                                                 std::size_t n, std::uint64_t seed);

/// Estimated attribute distribution of classifier outputs. Expectation mode
/// returns m^T p_true; Sampled mode returns the normalized prediction tally of
/// sample_predictions(m, p_true, n, seed).
CategoricalDistribution estimate(const ConfusionModel& m, const CategoricalDistribution& p_true,
                                 const EstimationMode& mode);

class IngestError : public ValidationError {
public:
    enum class Kind { Empty, MixedRecords, IndexOutOfRange, BadProbabilities };

    IngestError(Kind kind, const std::string& what) : ValidationError(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct IngestResult {
    CategoricalDistribution estimated;
    /// Present when every record carries truth and every outcome occurs as a
    /// truth at least once.
    std::optional<ConfusionModel> confusion;
    /// Outcomes never seen as truth (only filled when all records carry truth).
    std::vector<std::size_t> missing_truth;
};

/// Soft records are averaged, hard records tallied. Mixing the two, an empty
/// input and out-of-range indices each raise a distinct IngestError kind.
IngestResult ingest_predictions(const SpacePtr& space, std::span<const PredictionRecord> records);

}  // namespace fairmetric
