#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fairmetric {

struct Attribute {
    std::string name;
    std::vector<std::string> values;

    bool operator==(const Attribute&) const = default;
};

/// The targeted attribute: a product of named categorical attributes. The k
/// outcomes are the Cartesian product of the attribute values, ordered
/// lexicographically with the first attribute most significant.
class AttributeSpace {
public:
    explicit AttributeSpace(std::vector<Attribute> attributes);

    /// Single unnamed attribute with values "0".."k-1".
    static AttributeSpace anonymous(std::size_t k);

    /// `count` binary attributes a0..a{count-1}, so k = 2^count.
    static AttributeSpace binary(std::size_t count);

    std::size_t k() const { return k_; }
    const std::vector<Attribute>& attributes() const { return attributes_; }

    /// "male|black" style label of an outcome.
    const std::string& label(std::size_t outcome) const;
    const std::vector<std::string>& labels() const { return labels_; }

    std::vector<double> one_hot(std::size_t outcome) const;
    /// Inverse of one_hot. Throws ValidationError unless `v` is an exact
    /// indicator vector of length k.
    std::size_t index_of(std::span<const double> v) const;

    /// Outcome index from per-attribute value indices.
    std::size_t outcome_of(std::span<const std::size_t> value_indices) const;

    bool operator==(const AttributeSpace& other) const { return attributes_ == other.attributes_; }

private:
    std::vector<Attribute> attributes_;
    std::size_t k_ = 0;
    std::vector<std::string> labels_;
};

using SpacePtr = std::shared_ptr<const AttributeSpace>;

SpacePtr make_space(AttributeSpace space);

/// Probability vector over the outcomes of an attribute space. Entries are
/// non-negative and are renormalized to sum to 1 on construction.
class CategoricalDistribution {
public:
    /// Throws ValidationError on negative entries, wrong length, or a sum
    /// further than `sum_tolerance` from 1.
    CategoricalDistribution(SpacePtr space, std::vector<double> p, double sum_tolerance = 1e-9);

    const AttributeSpace& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }
    std::size_t k() const { return p_.size(); }
    std::span<const double> p() const { return p_; }
    double operator[](std::size_t i) const { return p_[i]; }

    /// Entry-wise comparison within `tol`.
    bool approx_equal(const CategoricalDistribution& other, double tol = 1e-9) const;

private:
    SpacePtr space_;
    std::vector<double> p_;
};

CategoricalDistribution uniform(const SpacePtr& space);

/// The k absolutely biased extreme points; element i is the indicator on outcome i.
std::vector<CategoricalDistribution> ab_extreme_points(const SpacePtr& space);

CategoricalDistribution ab_extreme_point(const SpacePtr& space, std::size_t outcome);

/// p[i] = counts[i] / sum(counts).
CategoricalDistribution from_counts(const SpacePtr& space, std::span<const double> counts);

/// Stepwise interpolation from the AB-EP on `start` to the uniform
/// distribution. Each epoch moves `step` of mass from `start` to the
/// lowest-index other outcome still below 1/k; the last transfer into an
/// outcome is clamped so it lands on 1/k exactly. The first element is the
/// AB-EP and the last is uniform. Requires 0 < step <= 1/k.
std::vector<CategoricalDistribution> sweep(const SpacePtr& space, double step, std::size_t start = 0);

}  // namespace fairmetric
