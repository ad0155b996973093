#include "fairmetric/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fairmetric {

namespace {

constexpr double kRowTolerance = 1e-9;
constexpr double kProbsTolerance = 1e-6;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Inverse-CDF draw over a probability row. Only the raw 64-bit engine output
// is used, so results are identical across standard library implementations.
class CategoricalSampler {
public:
    explicit CategoricalSampler(std::span<const double> probs) {
        cdf_.reserve(probs.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            cdf_.push_back(acc);
            if (probs[i] > 0.0) last_positive_ = i;
        }
    }

    std::size_t operator()(std::mt19937_64& rng) const {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * cdf_.back();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        const auto idx = static_cast<std::size_t>(it - cdf_.begin());
        return std::min(idx, last_positive_);
    }

private:
    std::vector<double> cdf_;
    std::size_t last_positive_ = 0;
};

std::size_t argmax(std::span<const double> v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

ConfusionModel::ConfusionModel(std::size_t k, std::vector<double> m) : k_(k), m_(std::move(m)) {
    if (k_ < 2) throw ValidationError("confusion model needs k >= 2");
    if (m_.size() != k_ * k_) {
        throw ValidationError("confusion matrix has " + std::to_string(m_.size()) + " entries, expected " +
                              std::to_string(k_ * k_));
    }
    for (std::size_t i = 0; i < k_; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k_; ++j) {
            const double v = m_[i * k_ + j];
            if (!std::isfinite(v) || v < 0.0) {
                throw ValidationError("confusion row " + std::to_string(i) + " has a negative or non-finite entry");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowTolerance) {
            throw ValidationError("confusion row " + std::to_string(i) + " sums to " + std::to_string(sum));
        }
        for (std::size_t j = 0; j < k_; ++j) m_[i * k_ + j] /= sum;
    }
}

ConfusionModel perfect(std::size_t k) {
    return uniform_noise(k, 0.0);
}

ConfusionModel uniform_noise(std::size_t k, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("noise rate eps must lie in [0,1]");
    if (k < 2) throw ValidationError("confusion model needs k >= 2");
    const double off = eps / static_cast<double>(k);
    std::vector<double> m(k * k, off);
    for (std::size_t i = 0; i < k; ++i) m[i * k + i] = 1.0 - eps + off;
    return ConfusionModel(k, std::move(m));
}

ConfusionModel from_accuracies(std::span<const double> accuracies) {
    const std::size_t k = accuracies.size();
    if (k < 2) throw ValidationError("need at least two per-class accuracies");
    std::vector<double> m(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        const double a = accuracies[i];
        if (!(a >= 0.0 && a <= 1.0)) {
            throw ValidationError("accuracy " + std::to_string(a) + " for class " + std::to_string(i) +
                                  " is outside [0,1]");
        }
        const double off = (1.0 - a) / static_cast<double>(k - 1);
        for (std::size_t j = 0; j < k; ++j) m[i * k + j] = (i == j) ? a : off;
    }
    return ConfusionModel(k, std::move(m));
}

std::vector<double> per_class_accuracy(const ConfusionModel& m) {
    std::vector<double> acc(m.k());
    for (std::size_t i = 0; i < m.k(); ++i) acc[i] = m(i, i);
    return acc;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices) {
    std::uint64_t h = splitmix64(base);
    for (std::uint64_t idx : indices) h = splitmix64(h ^ splitmix64(idx + 0x632be59bd9b4e019ULL));
    return h;
}

std::vector<PredictionRecord> sample_predictions(const ConfusionModel& m, const CategoricalDistribution& p_true,
                                                 std::size_t n, std::uint64_t seed) {
    if (m.k() != p_true.k()) {
        throw ValidationError("confusion model has k=" + std::to_string(m.k()) + " but distribution has k=" +
                              std::to_string(p_true.k()));
    }
    if (n < 1) throw ValidationError("sample count n must be at least 1");

    std::mt19937_64 rng(seed);
    const CategoricalSampler truth_sampler(p_true.p());
    std::vector<CategoricalSampler> row_samplers;
    row_samplers.reserve(m.k());
    for (std::size_t i = 0; i < m.k(); ++i) row_samplers.emplace_back(m.row(i));

    std::vector<PredictionRecord> out;
    out.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t truth = truth_sampler(rng);
        const std::size_t pred = row_samplers[truth](rng);
        out.push_back({"s" + std::to_string(s), pred, truth});
    }
    return out;
}

CategoricalDistribution estimate(const ConfusionModel& m, const CategoricalDistribution& p_true,
                                 const EstimationMode& mode) {
    if (m.k() != p_true.k()) {
        throw ValidationError("confusion model has k=" + std::to_string(m.k()) + " but distribution has k=" +
                              std::to_string(p_true.k()));
    }
    const std::size_t k = m.k();
    if (std::holds_alternative<Expectation>(mode)) {
        std::vector<double> out(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            if (p_true[i] == 0.0) continue;
            for (std::size_t j = 0; j < k; ++j) out[j] += p_true[i] * m(i, j);
        }
        return CategoricalDistribution(p_true.space_ptr(), std::move(out));
    }

    const auto& s = std::get<Sampled>(mode);
    const auto records = sample_predictions(m, p_true, s.n, s.seed);
    std::vector<double> tally(k, 0.0);
    for (const auto& r : records) tally[std::get<std::size_t>(r.output)] += 1.0;
    return from_counts(p_true.space_ptr(), tally);
}

IngestResult ingest_predictions(const SpacePtr& space, std::span<const PredictionRecord> records) {
    using Kind = IngestError::Kind;
    if (records.empty()) throw IngestError(Kind::Empty, "no prediction records");
    const std::size_t k = space->k();
    const bool soft = records.front().is_soft();

    std::vector<double> acc(k, 0.0);
    std::vector<double> confusion(k * k, 0.0);
    bool all_truth = true;

    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::string where = "record " + std::to_string(r + 1) + (rec.id.empty() ? "" : " ('" + rec.id + "')");
        if (rec.is_soft() != soft) {
            throw IngestError(Kind::MixedRecords, where + ": soft and hard records cannot be mixed");
        }
        std::size_t pred = 0;
        if (soft) {
            const auto& probs = std::get<std::vector<double>>(rec.output);
            if (probs.size() != k) {
                throw IngestError(Kind::BadProbabilities, where + ": probs has " + std::to_string(probs.size()) +
                                                             " entries, expected k=" + std::to_string(k));
            }
            double sum = 0.0;
            for (double p : probs) {
                if (!std::isfinite(p) || p < 0.0) {
                    throw IngestError(Kind::BadProbabilities, where + ": probabilities must be non-negative");
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > kProbsTolerance) {
                throw IngestError(Kind::BadProbabilities, where + ": probabilities sum to " + std::to_string(sum));
            }
            for (std::size_t i = 0; i < k; ++i) acc[i] += probs[i] / sum;
            pred = argmax(probs);
        } else {
            pred = std::get<std::size_t>(rec.output);
            if (pred >= k) {
                throw IngestError(Kind::IndexOutOfRange,
                                  where + ": pred " + std::to_string(pred) + " out of range for k=" + std::to_string(k));
            }
            acc[pred] += 1.0;
        }
        if (rec.truth) {
            if (*rec.truth >= k) {
                throw IngestError(Kind::IndexOutOfRange, where + ": truth " + std::to_string(*rec.truth) +
                                                             " out of range for k=" + std::to_string(k));
            }
            confusion[*rec.truth * k + pred] += 1.0;
        } else {
            all_truth = false;
        }
    }

    const double n = static_cast<double>(records.size());
    for (double& x : acc) x /= n;
    IngestResult result{CategoricalDistribution(space, std::move(acc), kProbsTolerance), std::nullopt, {}};

    if (all_truth) {
        for (std::size_t i = 0; i < k; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < k; ++j) row += confusion[i * k + j];
            if (row == 0.0) {
                result.missing_truth.push_back(i);
                continue;
            }
            for (std::size_t j = 0; j < k; ++j) confusion[i * k + j] /= row;
        }
        if (result.missing_truth.empty()) result.confusion = ConfusionModel(k, std::move(confusion));
    }
    return result;
}

}  // namespace fairmetric
