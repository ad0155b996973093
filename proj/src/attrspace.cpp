#include "fairmetric/attrspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fairmetric/error.hpp"

namespace fairmetric {

namespace {

// Fullness test for sweep targets; absorbs the rounding of count * step.
constexpr double kFillTolerance = 1e-12;
constexpr double kRenormalizeSlack = 0x1.0p-50;

}  // namespace

AttributeSpace::AttributeSpace(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
    if (attributes_.empty()) {
        throw ValidationError("attribute space needs at least one attribute");
    }
    k_ = 1;
    for (const auto& a : attributes_) {
        if (a.name.empty()) {
            throw ValidationError("attribute name must not be empty");
        }
        if (a.values.empty()) {
            throw ValidationError("attribute '" + a.name + "' has no values");
        }
        std::set<std::string> seen(a.values.begin(), a.values.end());
        if (seen.size() != a.values.size()) {
            throw ValidationError("attribute '" + a.name + "' has duplicate values");
        }
        k_ *= a.values.size();
    }
    if (k_ < 2) {
        throw ValidationError("attribute space must have k >= 2 outcomes, got " + std::to_string(k_));
    }

    labels_.reserve(k_);
    std::vector<std::size_t> digits(attributes_.size(), 0);
    for (std::size_t outcome = 0; outcome < k_; ++outcome) {
        std::string label;
        for (std::size_t a = 0; a < attributes_.size(); ++a) {
            if (a > 0) label += '|';
            label += attributes_[a].values[digits[a]];
        }
        labels_.push_back(std::move(label));
        // odometer increment, last attribute fastest
        for (std::size_t a = attributes_.size(); a-- > 0;) {
            if (++digits[a] < attributes_[a].values.size()) break;
            digits[a] = 0;
        }
    }
}

AttributeSpace AttributeSpace::anonymous(std::size_t k) {
    Attribute a{"u", {}};
    for (std::size_t i = 0; i < k; ++i) a.values.push_back(std::to_string(i));
    return AttributeSpace({std::move(a)});
}

AttributeSpace AttributeSpace::binary(std::size_t count) {
    std::vector<Attribute> attrs;
    for (std::size_t i = 0; i < count; ++i) {
        attrs.push_back({"a" + std::to_string(i), {"0", "1"}});
    }
    return AttributeSpace(std::move(attrs));
}

const std::string& AttributeSpace::label(std::size_t outcome) const {
    if (outcome >= k_) {
        throw ValidationError("outcome index " + std::to_string(outcome) + " out of range for k=" + std::to_string(k_));
    }
    return labels_[outcome];
}

std::vector<double> AttributeSpace::one_hot(std::size_t outcome) const {
    if (outcome >= k_) {
        throw ValidationError("outcome index " + std::to_string(outcome) + " out of range for k=" + std::to_string(k_));
    }
    std::vector<double> v(k_, 0.0);
    v[outcome] = 1.0;
    return v;
}

std::size_t AttributeSpace::index_of(std::span<const double> v) const {
    if (v.size() != k_) {
        throw ValidationError("one-hot vector has length " + std::to_string(v.size()) + ", expected " + std::to_string(k_));
    }
    std::size_t hot = k_;
    for (std::size_t i = 0; i < k_; ++i) {
        if (v[i] == 1.0 && hot == k_) {
            hot = i;
        } else if (v[i] != 0.0) {
            throw ValidationError("vector is not one-hot");
        }
    }
    if (hot == k_) throw ValidationError("vector is not one-hot");
    return hot;
}

std::size_t AttributeSpace::outcome_of(std::span<const std::size_t> value_indices) const {
    if (value_indices.size() != attributes_.size()) {
        throw ValidationError("expected one value index per attribute");
    }
    std::size_t outcome = 0;
    for (std::size_t a = 0; a < attributes_.size(); ++a) {
        if (value_indices[a] >= attributes_[a].values.size()) {
            throw ValidationError("value index out of range for attribute '" + attributes_[a].name + "'");
        }
        outcome = outcome * attributes_[a].values.size() + value_indices[a];
    }
    return outcome;
}

SpacePtr make_space(AttributeSpace space) {
    return std::make_shared<const AttributeSpace>(std::move(space));
}

CategoricalDistribution::CategoricalDistribution(SpacePtr space, std::vector<double> p, double sum_tolerance)
    : space_(std::move(space)), p_(std::move(p)) {
    if (!space_) throw ValidationError("distribution needs an attribute space");
    if (p_.size() != space_->k()) {
        throw ValidationError("distribution has " + std::to_string(p_.size()) + " entries, space has k=" +
                              std::to_string(space_->k()));
    }
    double sum = 0.0;
    for (double x : p_) {
        if (!std::isfinite(x) || x < 0.0) {
            throw ValidationError("distribution entries must be finite and non-negative");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > sum_tolerance) {
        throw ValidationError("distribution entries sum to " + std::to_string(sum) + ", expected 1");
    }
    // Sums within a few ulps of 1 are left alone so that untouched entries
    // stay bit-identical.
    if (std::abs(sum - 1.0) > kRenormalizeSlack) {
        for (double& x : p_) x /= sum;
    }
}

bool CategoricalDistribution::approx_equal(const CategoricalDistribution& other, double tol) const {
    if (k() != other.k()) return false;
    for (std::size_t i = 0; i < k(); ++i) {
        if (std::abs(p_[i] - other.p_[i]) > tol) return false;
    }
    return true;
}

CategoricalDistribution uniform(const SpacePtr& space) {
    const std::size_t k = space->k();
    return CategoricalDistribution(space, std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

CategoricalDistribution ab_extreme_point(const SpacePtr& space, std::size_t outcome) {
    return CategoricalDistribution(space, space->one_hot(outcome));
}

std::vector<CategoricalDistribution> ab_extreme_points(const SpacePtr& space) {
    std::vector<CategoricalDistribution> out;
    out.reserve(space->k());
    for (std::size_t i = 0; i < space->k(); ++i) out.push_back(ab_extreme_point(space, i));
    return out;
}

CategoricalDistribution from_counts(const SpacePtr& space, std::span<const double> counts) {
    if (counts.size() != space->k()) {
        throw ValidationError("got " + std::to_string(counts.size()) + " counts for k=" + std::to_string(space->k()));
    }
    double total = 0.0;
    for (double c : counts) {
        if (!std::isfinite(c) || c < 0.0) throw ValidationError("counts must be finite and non-negative");
        total += c;
    }
    if (total <= 0.0) throw ValidationError("counts are all zero");
    std::vector<double> p(counts.begin(), counts.end());
    for (double& x : p) x /= total;
    return CategoricalDistribution(space, std::move(p));
}

std::vector<CategoricalDistribution> sweep(const SpacePtr& space, double step, std::size_t start) {
    const std::size_t k = space->k();
    const double target = 1.0 / static_cast<double>(k);
    if (!(step > 0.0) || step > target + kFillTolerance) {
        throw ValidationError("sweep step must satisfy 0 < step <= 1/k (k=" + std::to_string(k) + ")");
    }
    if (start >= k) throw ValidationError("sweep start outcome out of range");

    // Receiving bins in ascending index order, skipping the source.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < k; ++i) {
        if (i != start) order.push_back(i);
    }

    // Bin values are rebuilt from transfer counts rather than accumulated, so
    // rounding does not drift over long sweeps.
    std::vector<std::size_t> transfers(k, 0);
    std::vector<double> p(k, 0.0);
    p[start] = 1.0;

    std::vector<CategoricalDistribution> out;
    out.emplace_back(space, p);

    for (std::size_t bin : order) {
        while (true) {
            const double filled = std::min(static_cast<double>(transfers[bin]) * step, target);
            if (filled >= target - kFillTolerance) break;
            ++transfers[bin];
            double next = static_cast<double>(transfers[bin]) * step;
            if (next >= target - kFillTolerance) next = target;
            p[bin] = next;
            double rest = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                if (i != start) rest += p[i];
            }
            p[start] = std::max(0.0, 1.0 - rest);
            out.emplace_back(space, p);
        }
    }
    // The clamped final state is uniform up to rounding; make it exact.
    out.back() = uniform(space);
    return out;
}

}  // namespace fairmetric
