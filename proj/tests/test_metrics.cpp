#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fairmetric/error.hpp"
#include "fairmetric/metrics.hpp"
#include "oracle.hpp"

using namespace fairmetric;

namespace {

SpacePtr space_k(std::size_t k) { return make_space(AttributeSpace::anonymous(k)); }

CategoricalDistribution dist(std::vector<double> p) {
    const auto k = p.size();
    return CategoricalDistribution(space_k(k), std::move(p));
}

struct TableCell {
    MetricId metric;
    std::size_t k;
    double value;
};

// Published normalization factors (9 significant digits).
const TableCell kNormTable[] = {
    {MetricId::L2, 2, 0.353553391},  {MetricId::L1, 2, 0.5},       {MetricId::InfoSpecificity, 2, 0.75},
    {MetricId::Specificity, 2, 1},   {MetricId::WD, 2, 0.5},       {MetricId::L2, 4, 0.216506351},
    {MetricId::L1, 4, 0.375},        {MetricId::InfoSpecificity, 4, 0.6875},
    {MetricId::Specificity, 4, 1},   {MetricId::WD, 4, 0.375},     {MetricId::L2, 8, 0.116926793},
    {MetricId::L1, 8, 0.21875},      {MetricId::InfoSpecificity, 8, 0.609375},
    {MetricId::Specificity, 8, 1},   {MetricId::WD, 8, 0.21875},   {MetricId::L2, 16, 0.060515365},
    {MetricId::L1, 16, 0.1171875},   {MetricId::InfoSpecificity, 16, 0.55859375},
    {MetricId::Specificity, 16, 1},  {MetricId::WD, 16, 0.1171875},
};

}  // namespace

TEST_CASE("metric names") {
    for (MetricId m : kAllMetrics) CHECK(parse_metric(metric_name(m)) == m);
    CHECK(parse_metric("kl") == std::nullopt);
    CHECK(parse_metric_list("all").size() == 5);
    const auto two = parse_metric_list("l2, spec");
    REQUIRE(two.size() == 2);
    CHECK(two[0] == MetricId::L2);
    CHECK(two[1] == MetricId::Specificity);
    CHECK_THROWS_AS(parse_metric_list("l1,kl"), ValidationError);
}

TEST_CASE("l1") {
    CHECK(l1(dist({0.9, 0.1}), dist({0.5, 0.5})) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(l1(dist({0.3, 0.7}), dist({0.3, 0.7})) == 0.0);
    CHECK(l1(dist({1, 0, 0, 0}), uniform(space_k(4))) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK_THROWS_AS(l1(dist({0.5, 0.5}), dist({0.2, 0.3, 0.5})), ValidationError);
}

TEST_CASE("l2") {
    CHECK(std::abs(l2(dist({1, 0}), uniform(space_k(2))) - 0.353553391) < 1e-9);
    CHECK(std::abs(l2(dist({1, 0, 0, 0}), uniform(space_k(4))) - 0.216506351) < 1e-9);
    CHECK(l2(dist({0.3, 0.7}), dist({0.3, 0.7})) == 0.0);
    CHECK_THROWS_AS(l2(dist({0.5, 0.5}), dist({0.2, 0.3, 0.5})), ValidationError);
}

TEST_CASE("specificity weights") {
    CHECK(specificity_weights(2) == std::vector<double>{1.0});
    const auto w4 = specificity_weights(4);
    REQUIRE(w4.size() == 3);
    CHECK(w4[0] == doctest::Approx(2.0 / 3.0));
    CHECK(w4[1] == doctest::Approx(1.0 / 3.0));
    CHECK(w4[2] == 0.0);
    for (std::size_t k = 3; k <= 64; ++k) {
        const auto w = specificity_weights(k);
        CHECK(w.size() == k - 1);
        CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t j = 1; j < w.size(); ++j) CHECK(w[j] < w[j - 1]);
        CHECK(w.back() == 0.0);
    }
}

TEST_CASE("specificity") {
    for (std::size_t k : {2u, 3u, 4u, 8u, 16u}) {
        CHECK(specificity(ab_extreme_point(space_k(k), k / 2)) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(specificity(uniform(space_k(k))) == doctest::Approx(0.0).epsilon(1e-15));
    }
    CHECK(specificity(dist({0.4, 0.3, 0.2, 0.1})) == doctest::Approx(0.4 - (2.0 / 3 * 0.3 + 1.0 / 3 * 0.2)));
    CHECK(specificity(dist({0.1, 0.2, 0.4, 0.3})) == doctest::Approx(0.133333333333));
    CHECK(specificity(dist({0.9, 0.1})) == doctest::Approx(0.8));
}

TEST_CASE("specificity is non-negative; at k=2 zero only at uniform") {
    std::mt19937_64 rng(11);
    for (std::size_t k : {2u, 3u, 4u, 8u, 16u}) {
        for (int t = 0; t < 500; ++t) CHECK(specificity(dist(oracle::random_simplex(rng, k))) >= 0.0);
    }
    CHECK(specificity(dist({0.5 + 1e-6, 0.5 - 1e-6})) > 0.0);
    // With alpha_k = 0 the last rank carries no weight, so for k >= 3 any
    // distribution whose top k-1 entries tie also scores zero.
    CHECK(specificity(dist({0.4, 0.4, 0.2})) == doctest::Approx(0.0));
    CHECK(specificity(dist({0.3, 0.3, 0.3, 0.1})) == doctest::Approx(0.0));
}

TEST_CASE("delta specificity") {
    CHECK(delta_specificity(dist({1, 0}), dist({0.5, 0.5})) == doctest::Approx(1.0));
    CHECK(delta_specificity(dist({0.2, 0.8}), dist({0.2, 0.8})) == 0.0);
    CHECK(delta_specificity(dist({0.9, 0.1}), uniform(space_k(2))) == doctest::Approx(0.8));
}

TEST_CASE("information specificity") {
    CHECK(info_specificity(dist({1, 0}), uniform(space_k(2)), 0.5) == doctest::Approx(0.75));
    CHECK(info_specificity(ab_extreme_point(space_k(8), 0), uniform(space_k(8))) == doctest::Approx(0.609375));
    CHECK(info_specificity(dist({0.6, 0.4}), dist({0.6, 0.4})) == 0.0);
    CHECK(info_specificity(dist({1, 0}), uniform(space_k(2)), 1.0) == doctest::Approx(0.5));
    CHECK(info_specificity(dist({1, 0}), uniform(space_k(2)), 0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(info_specificity(dist({1, 0}), uniform(space_k(2)), 1.5), ValidationError);
    CHECK_THROWS_AS(info_specificity(dist({1, 0}), uniform(space_k(2)), -0.1), ValidationError);
}

TEST_CASE("wd") {
    CHECK(wd(dist({1, 0}), uniform(space_k(2))) == doctest::Approx(0.5));
    CHECK(wd(dist({0.2, 0.3, 0.5}), dist({0.2, 0.3, 0.5})) == 0.0);
    std::mt19937_64 rng(5);
    for (std::size_t k : {2u, 4u, 8u}) {
        for (int t = 0; t < 100; ++t) {
            const auto p = dist(oracle::random_simplex(rng, k));
            const auto q = dist(oracle::random_simplex(rng, k));
            CHECK(std::abs(wd(p, q) - l1(p, q)) <= 1e-9);
        }
    }
    CHECK_THROWS_AS(wd(dist({0.5, 0.5}), dist({0.5, 0.5}), default_cost(3)), ValidationError);
}

TEST_CASE("normalization factors reproduce the published table") {
    for (const auto& cell : kNormTable) {
        CAPTURE(metric_name(cell.metric));
        CAPTURE(cell.k);
        CHECK(std::abs(n_factor(cell.metric, cell.k) - cell.value) <= 1e-9);
    }
    CHECK_THROWS_AS(n_factor(MetricId::L1, 1), ValidationError);
}

TEST_CASE("n_factor with an asymmetric cost takes the worst AB-EP") {
    // moving into outcome 0 is cheap, out of it expensive
    const CostMatrix c(2, {0, 4, 1, 0});
    MetricOptions o;
    o.cost = c;
    CHECK(n_factor(MetricId::WD, 2, o) == doctest::Approx(2.0));
    for (int t = 0; t <= 10; ++t) {
        const double a = t / 10.0;
        const auto s = fd_score(MetricId::WD, dist({a, 1 - a}), o);
        CHECK(s.normalized <= 1.0 + 1e-9);
        CHECK(s.normalized >= 0.0);
    }
}

TEST_CASE("fd_score") {
    const auto s = fd_score(MetricId::L2, dist({0.9, 0.1}));
    // the exact value 0.8 sits on the edge of 0.799 +- 0.001; compare against the bounds
    CHECK(s.normalized >= 0.799 - 0.001);
    CHECK(s.normalized <= 0.799 + 0.001);
    CHECK(s.normalized == doctest::Approx(s.raw / s.n_factor).epsilon(1e-12));

    for (std::size_t k : {2u, 3u, 4u, 8u, 16u}) {
        for (MetricId m : kAllMetrics) {
            CHECK(fd_score(m, uniform(space_k(k))).normalized == doctest::Approx(0.0).epsilon(1e-12));
            for (std::size_t i = 0; i < k; ++i) {
                CHECK(fd_score(m, ab_extreme_point(space_k(k), i)).normalized ==
                      doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("normalized scores lie in [0,1] and ignore outcome order") {
    std::mt19937_64 rng(17);
    for (std::size_t k : {2u, 3u, 4u, 8u, 16u}) {
        for (int t = 0; t < 200; ++t) {
            auto p = oracle::random_simplex(rng, k);
            auto shuffled = p;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            const auto a = dist(p);
            const auto b = dist(shuffled);
            for (MetricId m : kAllMetrics) {
                const auto sa = fd_score(m, a);
                CHECK(sa.normalized >= 0.0);
                CHECK(sa.normalized <= 1.0 + 1e-9);
                CHECK(std::abs(sa.normalized - fd_score(m, b).normalized) <= 1e-12);
                CHECK(std::abs(sa.normalized - sa.raw / sa.n_factor) <= 1e-12);
            }
        }
    }
}

TEST_CASE("identity: every metric is zero between equal distributions") {
    std::mt19937_64 rng(23);
    for (std::size_t k : {2u, 5u, 16u}) {
        const auto p = dist(oracle::random_simplex(rng, k));
        for (MetricId m : kAllMetrics) CHECK(discrepancy(m, p, p) == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("normalized L2 does not depend on the 1/k convention") {
    std::mt19937_64 rng(29);
    for (std::size_t k : {2u, 4u, 8u, 16u}) {
        const auto ref = uniform(space_k(k));
        const auto ab = ab_extreme_point(space_k(k), 0);
        const auto plain_norm = [&](const CategoricalDistribution& p) {
            double sum = 0.0;
            for (std::size_t i = 0; i < k; ++i) sum += (p[i] - ref[i]) * (p[i] - ref[i]);
            return std::sqrt(sum);
        };
        for (int t = 0; t < 100; ++t) {
            const auto p = dist(oracle::random_simplex(rng, k));
            const double without_k = plain_norm(p) / plain_norm(ab);
            CHECK(std::abs(fd_score(MetricId::L2, p).normalized - without_k) <= 1e-12);
        }
    }
    // the unscaled norm gives the 0.707 / 0.866 maxima quoted for k=2 and k=4
    CHECK(n_factor(MetricId::L2, 2) * 2 == doctest::Approx(0.7071).epsilon(1e-4));
    CHECK(n_factor(MetricId::L2, 4) * 4 == doctest::Approx(0.8660).epsilon(1e-4));
}
