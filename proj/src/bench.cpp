#include "fairmetric/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "fairmetric/error.hpp"

namespace fairmetric {

namespace {

// Normalized scores for a fixed k with the normalization factors computed once.
class Scorer {
public:
    Scorer(std::size_t k, std::span<const MetricId> metrics, const MetricOptions& options)
        : metrics_(metrics.begin(), metrics.end()), options_(options) {
        for (MetricId m : metrics_) factors_.push_back(n_factor(m, k, options_));
    }

    std::vector<double> normalized(const CategoricalDistribution& p_est) const {
        const auto ref = uniform(p_est.space_ptr());
        std::vector<double> out;
        out.reserve(metrics_.size());
        for (std::size_t i = 0; i < metrics_.size(); ++i) {
            out.push_back(discrepancy(metrics_[i], p_est, ref, options_) / factors_[i]);
        }
        return out;
    }

private:
    std::vector<MetricId> metrics_;
    MetricOptions options_;
    std::vector<double> factors_;
};

void require_nonempty(const ScoreSet& s, const char* what) {
    if (s.entries.empty()) throw ValidationError(std::string(what) + " of an empty score set");
}

EstimationMode cell_mode(const EstimationMode& mode, std::initializer_list<std::uint64_t> cell) {
    if (const auto* s = std::get_if<Sampled>(&mode)) {
        return Sampled{s->n, derive_seed(s->seed, cell)};
    }
    return Expectation{};
}

std::string join_k(const std::vector<std::size_t>& ks) {
    std::string out;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(ks[i]);
    }
    return out;
}

void tag_extremes(BenchRow& row, std::span<const MetricId> metrics) {
    if (row.values.empty()) return;
    const double lo = *std::min_element(row.values.begin(), row.values.end());
    const double hi = *std::max_element(row.values.begin(), row.values.end());
    if (hi - lo <= kTieTolerance) return;  // everything tied: neither best nor worst
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        if (row.values[i] - lo <= kTieTolerance) row.best.push_back(metrics[i]);
        if (hi - row.values[i] <= kTieTolerance) row.worst.push_back(metrics[i]);
    }
}

}  // namespace

ScoreSet ScoreSet::only(MetricId metric) const {
    ScoreSet out{kind, {}};
    for (const auto& e : entries) {
        if (e.metric == metric) out.entries.push_back(e);
    }
    return out;
}

ScoreSet ScoreSet::only_k(std::size_t k) const {
    ScoreSet out{kind, {}};
    for (const auto& e : entries) {
        if (e.k == k) out.entries.push_back(e);
    }
    return out;
}

void ScoreSet::append(const ScoreSet& other) {
    if (other.kind != kind) throw ValidationError("cannot merge score sets of different kinds");
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

double mepe_fair(const ScoreSet& s) {
    if (s.kind != ScoreKind::FairEP) throw ValidationError("MEPE(fair) needs a Fair-EP score set");
    require_nonempty(s, "MEPE(fair)");
    double sum = 0.0;
    for (const auto& e : s.entries) sum += std::abs(e.f);
    return sum / static_cast<double>(s.entries.size());
}

double mepe_ab(const ScoreSet& s) {
    if (s.kind != ScoreKind::ABEP) throw ValidationError("MEPE(AB) needs an AB-EP score set");
    require_nonempty(s, "MEPE(AB)");
    double sum = 0.0;
    for (const auto& e : s.entries) sum += std::abs(e.f - 1.0);
    return sum / static_cast<double>(s.entries.size());
}

double ep_var(const ScoreSet& s) {
    require_nonempty(s, "EP-var");
    const double n = static_cast<double>(s.entries.size());
    double mean = 0.0;
    for (const auto& e : s.entries) mean += e.f;
    mean /= n;
    double var = 0.0;
    for (const auto& e : s.entries) var += (e.f - mean) * (e.f - mean);
    return var / n;
}

double mem(const ScoreSet& s) {
    if (s.kind != ScoreKind::Sweep) throw ValidationError("MEM needs a sweep score set");
    require_nonempty(s, "MEM");
    double sum = 0.0;
    for (const auto& e : s.entries) {
        if (!e.f_star) throw ValidationError("MEM needs a ground-truth score for every entry");
        sum += std::abs(e.f - *e.f_star);
    }
    return sum / static_cast<double>(s.entries.size());
}

double mem_per_start(const ScoreSet& s) {
    require_nonempty(s, "MEM");
    std::map<std::size_t, ScoreSet> by_start;
    for (const auto& e : s.entries) {
        auto& group = by_start.try_emplace(e.outcome.value_or(0), ScoreSet{s.kind, {}}).first->second;
        group.entries.push_back(e);
    }
    double sum = 0.0;
    for (const auto& [start, group] : by_start) sum += mem(group);
    return sum / static_cast<double>(by_start.size());
}

EpAnalysis run_ep_analysis(const SpacePtr& space, const ConfusionModel& model, const EstimationMode& mode,
                           std::span<const MetricId> metrics, std::size_t trials, const MetricOptions& options) {
    const std::size_t k = space->k();
    if (model.k() != k) {
        throw ValidationError("classifier has k=" + std::to_string(model.k()) + " but attribute space has k=" +
                              std::to_string(k));
    }
    if (metrics.empty()) throw ValidationError("no metrics selected");
    const bool sampled = std::holds_alternative<Sampled>(mode);
    if (sampled && trials < 1) throw ValidationError("trials must be at least 1");
    const std::size_t runs = sampled ? trials : 1;

    const Scorer scorer(k, metrics, options);
    const auto fair_true = uniform(space);
    const auto ab_true = ab_extreme_points(space);

    EpAnalysis out{{ScoreKind::FairEP, {}}, {ScoreKind::ABEP, {}}};
    for (std::size_t t = 0; t < runs; ++t) {
        // point 0 is the Fair-EP, point 1+i the AB-EP on outcome i
        const auto fair_est = estimate(model, fair_true, cell_mode(mode, {k, t, 0}));
        const auto fair_f = scorer.normalized(fair_est);
        for (std::size_t m = 0; m < metrics.size(); ++m) {
            out.fair.entries.push_back({k, metrics[m], fair_f[m], 0.0, std::nullopt, t, 0});
        }
        for (std::size_t i = 0; i < k; ++i) {
            const auto est = estimate(model, ab_true[i], cell_mode(mode, {k, t, i + 1}));
            const auto f = scorer.normalized(est);
            for (std::size_t m = 0; m < metrics.size(); ++m) {
                out.ab.entries.push_back({k, metrics[m], f[m], 1.0, i, t, 0});
            }
        }
    }
    return out;
}

SweepResult run_sweep(const SpacePtr& space, const ConfusionModel& model, const EstimationMode& mode,
                      std::span<const MetricId> metrics, double step, std::optional<std::size_t> start,
                      const MetricOptions& options) {
    const std::size_t k = space->k();
    if (model.k() != k) {
        throw ValidationError("classifier has k=" + std::to_string(model.k()) + " but attribute space has k=" +
                              std::to_string(k));
    }
    if (metrics.empty()) throw ValidationError("no metrics selected");
    if (start && *start >= k) throw ValidationError("sweep start outcome out of range");

    const Scorer scorer(k, metrics, options);
    SweepResult out;
    out.k = k;
    out.metrics.assign(metrics.begin(), metrics.end());
    out.scores.kind = ScoreKind::Sweep;

    const std::size_t first = start.value_or(0);
    const std::size_t last = start ? *start + 1 : k;
    for (std::size_t s = first; s < last; ++s) {
        const auto path = sweep(space, step, s);
        for (std::size_t e = 0; e < path.size(); ++e) {
            const auto& p_true = path[e];
            auto p_est = estimate(model, p_true, cell_mode(mode, {k, 0, s, e}));
            auto f = scorer.normalized(p_est);
            auto f_star = scorer.normalized(p_true);
            for (std::size_t m = 0; m < metrics.size(); ++m) {
                out.scores.entries.push_back({k, metrics[m], f[m], f_star[m], s, 0, e + 1});
            }
            out.trace.push_back({s, e + 1, p_true, std::move(p_est), std::move(f), std::move(f_star)});
        }
    }
    return out;
}

const BenchRow* BenchmarkReport::find(const std::string& benchmark, const std::string& kind,
                                      const std::string& k_set) const {
    for (const auto& r : rows) {
        if (r.benchmark == benchmark && r.kind == kind && r.k_set == k_set) return &r;
    }
    return nullptr;
}

double BenchmarkReport::value(const BenchRow& row, MetricId metric) const {
    const auto it = std::find(metrics.begin(), metrics.end(), metric);
    if (it == metrics.end()) throw ValidationError("metric not part of the report");
    return row.values[static_cast<std::size_t>(it - metrics.begin())];
}

BenchmarkReport summarize(const BenchConfig& config) {
    if (config.cells.empty()) throw ValidationError("benchmark needs at least one attribute cardinality");
    if (config.metrics.empty()) throw ValidationError("no metrics selected");

    BenchmarkReport report;
    report.metrics = config.metrics;
    report.trials = std::holds_alternative<Sampled>(config.mode) ? config.trials : 1;
    report.step = config.step;
    report.sweep_starts = config.sweep_start ? std::to_string(*config.sweep_start) : "all";
    if (const auto* s = std::get_if<Sampled>(&config.mode)) {
        report.mode = "sample";
        report.n = s->n;
        report.seed = s->seed;
    } else {
        report.mode = "expectation";
    }

    std::set<std::size_t> seen;
    for (const auto& cell : config.cells) {
        if (!seen.insert(cell.space->k()).second) {
            throw ValidationError("attribute cardinality k=" + std::to_string(cell.space->k()) + " configured twice");
        }
        report.k_values.push_back(cell.space->k());
        report.classifiers.push_back(cell.classifier);
    }
    const std::string pooled_k = join_k(report.k_values);

    ScoreSet fair{ScoreKind::FairEP, {}};
    ScoreSet ab{ScoreKind::ABEP, {}};
    std::vector<BenchRow> mem_rows;
    std::vector<BenchRow> breakdown;

    for (const auto& cell : config.cells) {
        const std::size_t k = cell.space->k();
        const auto ep = run_ep_analysis(cell.space, cell.model, config.mode, config.metrics, config.trials,
                                        config.options);
        fair.append(ep.fair);
        ab.append(ep.ab);

        const auto sw = run_sweep(cell.space, cell.model, config.mode, config.metrics, config.step,
                                  config.sweep_start, config.options);
        BenchRow mem_row{"MEM", "sweep", std::to_string(k), false, {}, {}, {}};
        BenchRow mf{"MEPE", "fair", std::to_string(k), false, {}, {}, {}};
        BenchRow ma{"MEPE", "ab", std::to_string(k), false, {}, {}, {}};
        BenchRow vf{"EP-var", "fair", std::to_string(k), false, {}, {}, {}};
        BenchRow va{"EP-var", "ab", std::to_string(k), false, {}, {}, {}};
        for (MetricId m : config.metrics) {
            mem_row.values.push_back(mem_per_start(sw.scores.only(m)));
            mf.values.push_back(mepe_fair(ep.fair.only(m)));
            ma.values.push_back(mepe_ab(ep.ab.only(m)));
            vf.values.push_back(ep_var(ep.fair.only(m)));
            va.values.push_back(ep_var(ep.ab.only(m)));
        }
        mem_rows.push_back(std::move(mem_row));
        for (auto* r : {&mf, &ma, &vf, &va}) breakdown.push_back(std::move(*r));
    }

    BenchRow mf{"MEPE", "fair", pooled_k, true, {}, {}, {}};
    BenchRow ma{"MEPE", "ab", pooled_k, true, {}, {}, {}};
    BenchRow vf{"EP-var", "fair", pooled_k, true, {}, {}, {}};
    BenchRow va{"EP-var", "ab", pooled_k, true, {}, {}, {}};
    for (MetricId m : config.metrics) {
        const auto f = fair.only(m);
        const auto a = ab.only(m);
        mf.values.push_back(mepe_fair(f));
        ma.values.push_back(mepe_ab(a));
        vf.values.push_back(ep_var(f));
        va.values.push_back(ep_var(a));
    }
    report.fair_pool = fair.only(config.metrics.front()).entries.size();
    report.ab_pool = ab.only(config.metrics.front()).entries.size();

    for (auto* r : {&mf, &ma, &vf, &va}) report.rows.push_back(std::move(*r));
    for (auto& r : mem_rows) report.rows.push_back(std::move(r));
    if (config.cells.size() > 1) {
        for (auto& r : breakdown) report.rows.push_back(std::move(r));
    }
    for (auto& r : report.rows) tag_extremes(r, report.metrics);
    return report;
}

std::string format_number(double v, int precision) {
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

void write_report_csv(const BenchmarkReport& report, std::ostream& out, int precision) {
    out << "benchmark,kind,k_set,metric,value\n";
    const std::string pooled_k = join_k(report.k_values);
    out << "N,fair," << pooled_k << ",*," << report.fair_pool << '\n';
    out << "N,ab," << pooled_k << ",*," << report.ab_pool << '\n';
    for (const auto& row : report.rows) {
        for (std::size_t i = 0; i < report.metrics.size(); ++i) {
            out << row.benchmark << ',' << row.kind << ',' << row.k_set << ',' << metric_name(report.metrics[i])
                << ',' << format_number(row.values[i], precision) << '\n';
        }
    }
}

void write_report_markdown(const BenchmarkReport& report, std::ostream& out, int precision) {
    const auto cell = [&](const BenchRow& row, std::size_t i) {
        const MetricId m = report.metrics[i];
        std::string s = format_number(row.values[i], precision);
        if (std::find(row.best.begin(), row.best.end(), m) != row.best.end()) return "**" + s + "** (best)";
        if (std::find(row.worst.begin(), row.worst.end(), m) != row.worst.end()) return "_" + s + "_ (worst)";
        return s;
    };
    const auto header = [&] {
        out << "| Benchmark point |";
        for (MetricId m : report.metrics) out << ' ' << metric_title(m) << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < report.metrics.size(); ++i) out << "---|";
        out << '\n';
    };
    const auto section = [&](const char* title, const std::string& benchmark, bool pooled) {
        bool any = false;
        for (const auto& row : report.rows) {
            if (row.benchmark != benchmark || row.pooled != pooled) continue;
            if (!any) {
                out << "\n### " << title << "\n\n";
                header();
                any = true;
            }
            std::string label;
            if (benchmark == "MEM") {
                label = "(k=" + row.k_set + " sweep)";
            } else {
                label = std::string(row.kind == "fair" ? "(Fair-EP)" : "(AB-EP)");
                if (!pooled) label += " k=" + row.k_set;
            }
            out << "| " << label << " |";
            for (std::size_t i = 0; i < report.metrics.size(); ++i) out << ' ' << cell(row, i) << " |";
            out << '\n';
        }
    };

    out << "## Metric benchmark summary\n\n";
    out << "- k set: " << join_k(report.k_values) << '\n';
    out << "- classifiers:";
    for (std::size_t i = 0; i < report.classifiers.size(); ++i) {
        out << (i ? ", " : " ") << "k=" << report.k_values[i] << ' ' << report.classifiers[i];
    }
    out << '\n';
    out << "- estimation: " << report.mode;
    if (report.mode == "sample") out << " (n=" << report.n << ", seed=" << report.seed << ", trials=" << report.trials << ')';
    out << '\n';
    out << "- sweep step: " << format_number(report.step, 6) << ", starts: " << report.sweep_starts << '\n';
    out << "- pooled N: Fair-EP " << report.fair_pool << ", AB-EP " << report.ab_pool << '\n';
    out << "\nLower is better everywhere. Best in bold, worst in italics; ties share the tag.\n";

    section("Mean Extreme Point Error", "MEPE", true);
    section("Extreme Point Variability", "EP-var", true);
    section("Mean Error Measurement", "MEM", false);
    section("Mean Extreme Point Error per k", "MEPE", false);
    section("Extreme Point Variability per k", "EP-var", false);
}

}  // namespace fairmetric
