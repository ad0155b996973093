#include "fairmetric/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fairmetric/bench.hpp"
#include "fairmetric/classifier.hpp"
#include "fairmetric/error.hpp"
#include "fairmetric/io.hpp"

namespace fairmetric::cli {

namespace {

using io::json;

const std::vector<std::size_t> kDefaultK = {2, 4, 8, 16};

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::size_t parse_k(const std::string& s) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ValidationError("invalid k '" + s + "'");
    }
    if (pos != s.size() || v < 2) throw ValidationError("invalid k '" + s + "' (need an integer >= 2)");
    return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_k_list(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& item : split(s)) out.push_back(parse_k(item));
    if (out.empty()) throw ValidationError("k set is empty");
    return out;
}

std::vector<double> parse_number_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split(s)) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw ValidationError("invalid number '" + item + "' in " + what);
        }
        if (pos != item.size()) throw ValidationError("invalid number '" + item + "' in " + what);
        out.push_back(v);
    }
    return out;
}

// Raw flag values; a field is applied only when its flag was given.
struct Flags {
    std::string k, metrics, classifier, accs, mode, start, out, markdown, space, cost, config;
    double eps = 0.0, step = 0.0, alpha = 0.5;
    std::size_t n = 0, trials = 0;
    std::uint64_t seed = 0;
    int precision = 6;
    std::map<std::string, CLI::Option*> opts;

    bool given(const std::string& name) const {
        const auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }
};

void add_common(CLI::App* sub, Flags& f) {
    f.opts["k"] = sub->add_option("--k", f.k, "Attribute cardinalities, e.g. 2,4,8,16");
    f.opts["metrics"] = sub->add_option("--metrics", f.metrics, "l1,l2,wd,spec,is or all");
    f.opts["classifier"] = sub->add_option("--classifier", f.classifier, "Preset name or confusion-matrix JSON file");
    f.opts["eps"] = sub->add_option("--eps", f.eps, "Uniform-noise classifier error rate");
    f.opts["accs"] = sub->add_option("--accs", f.accs, "Per-class accuracies, e.g. 0.98,0.95");
    f.opts["mode"] = sub->add_option("--mode", f.mode, "expectation or sample");
    f.opts["n"] = sub->add_option("--n", f.n, "Samples per estimate (sample mode)");
    f.opts["seed"] = sub->add_option("--seed", f.seed, "Base random seed");
    f.opts["trials"] = sub->add_option("--trials", f.trials, "Repetitions per extreme point (sample mode)");
    f.opts["step"] = sub->add_option("--step", f.step, "Sweep probability increment");
    f.opts["start"] = sub->add_option("--start", f.start, "Sweep start outcome index or 'all'");
    f.opts["out"] = sub->add_option("--out", f.out, "Output file (default stdout)");
    f.opts["markdown"] = sub->add_option("--markdown", f.markdown, "Markdown summary file ('-' for stdout)");
    f.opts["precision"] = sub->add_option("--precision", f.precision, "Significant digits in CSV output");
    f.opts["space"] = sub->add_option("--space", f.space, "Attribute-space JSON file");
    f.opts["cost"] = sub->add_option("--cost", f.cost, "WD cost-matrix JSON file or 'default'");
    f.opts["alpha"] = sub->add_option("--alpha", f.alpha, "Information-specificity weight");
    f.opts["config"] = sub->add_option("--config", f.config, "JSON run configuration");
}

void apply_config_json(RunConfig& cfg, const json& j) {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "k") {
                cfg.k.clear();
                if (v.is_array()) {
                    for (const auto& x : v) {
                        if (!x.is_number_integer() || x.get<long long>() < 2) throw ValidationError("invalid k in config");
                        cfg.k.push_back(x.get<std::size_t>());
                    }
                } else if (v.is_number_integer() && v.get<long long>() >= 2) {
                    cfg.k.push_back(v.get<std::size_t>());
                } else {
                    throw ValidationError("invalid k in config");
                }
            } else if (key == "metrics") {
                std::string list;
                if (v.is_array()) {
                    for (const auto& x : v) list += (list.empty() ? "" : ",") + x.get<std::string>();
                } else {
                    list = v.get<std::string>();
                }
                cfg.metrics = parse_metric_list(list);
            } else if (key == "classifier") {
                cfg.classifier = v.get<std::string>();
            } else if (key == "eps") {
                cfg.eps = v.get<double>();
            } else if (key == "accs") {
                cfg.accs = v.get<std::vector<double>>();
            } else if (key == "mode") {
                cfg.mode = v.get<std::string>();
            } else if (key == "n") {
                cfg.n = v.get<std::size_t>();
            } else if (key == "seed") {
                cfg.seed = v.get<std::uint64_t>();
            } else if (key == "trials") {
                cfg.trials = v.get<std::size_t>();
            } else if (key == "step") {
                cfg.step = v.get<double>();
            } else if (key == "start") {
                cfg.start = v.is_string() ? v.get<std::string>() : std::to_string(v.get<std::size_t>());
            } else if (key == "out") {
                cfg.out = v.get<std::string>();
            } else if (key == "markdown") {
                cfg.markdown = v.get<std::string>();
            } else if (key == "space") {
                cfg.space = v.get<std::string>();
            } else if (key == "cost") {
                cfg.cost = v.get<std::string>();
            } else if (key == "alpha") {
                cfg.alpha = v.get<double>();
            } else if (key == "precision") {
                cfg.precision = v.get<int>();
            } else {
                throw ValidationError("unknown config field '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: wrong value type (") + e.what() + ")");
    }
}

RunConfig build_config(const Flags& f) {
    RunConfig cfg;
    if (f.given("config")) apply_config_json(cfg, io::parse_json(io::read_file(f.config), f.config));
    if (f.given("k")) cfg.k = parse_k_list(f.k);
    if (f.given("metrics")) cfg.metrics = parse_metric_list(f.metrics);
    if (f.given("classifier")) cfg.classifier = f.classifier;
    if (f.given("eps")) cfg.eps = f.eps;
    if (f.given("accs")) cfg.accs = parse_number_list(f.accs, "--accs");
    if (f.given("mode")) cfg.mode = f.mode;
    if (f.given("n")) cfg.n = f.n;
    if (f.given("seed")) cfg.seed = f.seed;
    if (f.given("trials")) cfg.trials = f.trials;
    if (f.given("step")) cfg.step = f.step;
    if (f.given("start")) cfg.start = f.start;
    if (f.given("out")) cfg.out = f.out;
    if (f.given("markdown")) cfg.markdown = f.markdown;
    if (f.given("precision")) cfg.precision = f.precision;
    if (f.given("space")) cfg.space = f.space;
    if (f.given("cost")) cfg.cost = f.cost;
    if (f.given("alpha")) cfg.alpha = f.alpha;

    if (cfg.metrics.empty()) cfg.metrics.assign(kAllMetrics.begin(), kAllMetrics.end());
    if (cfg.mode != "expectation" && cfg.mode != "sample") {
        throw ValidationError("--mode must be 'expectation' or 'sample'");
    }
    if (cfg.mode == "sample") {
        if (!cfg.n) throw ValidationError("sample mode needs an explicit sample count --n");
        if (*cfg.n < 1) throw ValidationError("--n must be at least 1");
        if (cfg.trials < 1) throw ValidationError("--trials must be at least 1");
    }
    if (cfg.precision < 1 || cfg.precision > 17) throw ValidationError("--precision must lie in 1..17");
    if (cfg.eps && !cfg.accs.empty()) throw ValidationError("--eps and --accs are mutually exclusive");
    return cfg;
}

EstimationMode mode_of(const RunConfig& cfg) {
    if (cfg.mode == "sample") return Sampled{*cfg.n, cfg.seed};
    return Expectation{};
}

MetricOptions metric_options(const RunConfig& cfg) {
    MetricOptions o;
    o.is_alpha = cfg.alpha;
    o.cost = io::load_cost(cfg.cost);
    return o;
}

void reject_unknown_preset(const std::string& name) {
    if (name.rfind("set", 0) == 0 && !std::filesystem::exists(name)) {
        throw ValidationError("unknown classifier preset '" + name + "'");
    }
}

std::vector<std::size_t> default_k(const RunConfig& cfg) {
    if (!cfg.k.empty()) return cfg.k;
    if (!cfg.space.empty()) return {io::load_space(cfg.space).k()};
    if (cfg.eps) return kDefaultK;
    if (!cfg.accs.empty()) return {cfg.accs.size()};
    if (cfg.classifier == "set2") return kDefaultK;
    if (const auto p = io::find_preset(cfg.classifier)) return p->k == 0 ? kDefaultK : std::vector<std::size_t>{p->k};
    reject_unknown_preset(cfg.classifier);
    return {io::load_confusion(cfg.classifier).k()};
}

std::string classifier_label(const RunConfig& cfg, std::size_t k) {
    if (cfg.eps) return "uniform-noise eps=" + format_number(*cfg.eps, 6);
    if (!cfg.accs.empty()) return "accuracies";
    if (cfg.classifier == "set2") return "set2-k" + std::to_string(k);
    return cfg.classifier;
}

ConfusionModel classifier_for(const RunConfig& cfg, std::size_t k) {
    if (cfg.eps) return uniform_noise(k, *cfg.eps);
    if (!cfg.accs.empty()) {
        if (cfg.accs.size() != k) {
            throw ValidationError("--accs has " + std::to_string(cfg.accs.size()) + " entries but k=" +
                                  std::to_string(k));
        }
        return from_accuracies(cfg.accs);
    }
    if (const auto p = io::find_preset(cfg.classifier, k)) return io::preset_model(*p, k);
    if (cfg.classifier.rfind("set", 0) == 0 && !std::filesystem::exists(cfg.classifier)) {
        throw ValidationError("unknown classifier preset '" + cfg.classifier + "' for k=" + std::to_string(k));
    }
    auto m = io::load_confusion(cfg.classifier);
    if (m.k() != k) {
        throw ValidationError("confusion file has k=" + std::to_string(m.k()) + " but k=" + std::to_string(k) +
                              " was requested");
    }
    return m;
}

SpacePtr space_for(const RunConfig& cfg, std::size_t k) {
    if (!cfg.space.empty()) {
        auto space = make_space(io::load_space(cfg.space));
        if (space->k() != k) {
            throw ValidationError("attribute space has k=" + std::to_string(space->k()) + " but k=" +
                                  std::to_string(k) + " was requested");
        }
        return space;
    }
    return make_space(AttributeSpace::anonymous(k));
}

std::optional<std::size_t> sweep_start(const RunConfig& cfg, bool default_all) {
    if (cfg.start.empty()) return default_all ? std::nullopt : std::optional<std::size_t>(0);
    if (cfg.start == "all") return std::nullopt;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(cfg.start, &pos);
        if (pos == cfg.start.size() && v >= 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw ValidationError("--start must be an outcome index or 'all'");
}

// Writes to the --out file, or to the command's stdout when unset.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(fallback);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path + "'");
    fn(f);
    if (!f) throw IoError("error writing '" + path + "'");
}

std::string num(double v, const RunConfig& cfg) { return format_number(v, cfg.precision); }

// ---------------------------------------------------------------- commands

int cmd_nfactor(const RunConfig& cfg, std::ostream& out) {
    const auto ks = cfg.k.empty() ? kDefaultK : cfg.k;
    const auto options = metric_options(cfg);
    std::ostringstream csv;
    csv << 'k';
    for (MetricId m : cfg.metrics) csv << ',' << metric_name(m);
    csv << '\n';
    for (std::size_t k : ks) {
        csv << k;
        for (MetricId m : cfg.metrics) csv << ',' << num(n_factor(m, k, options), cfg);
        csv << '\n';
    }
    emit(cfg.out, out, [&](std::ostream& o) { o << csv.str(); });
    return kOk;
}

int cmd_score(const RunConfig& cfg, const std::string& dist_file, const std::string& inline_p, bool raw,
              std::ostream& out) {
    if (dist_file.empty() == inline_p.empty()) {
        throw ValidationError("score needs exactly one of a distribution file or --p");
    }
    std::optional<CategoricalDistribution> dist;
    if (!dist_file.empty()) {
        dist = io::load_distribution(dist_file);
    } else {
        auto p = parse_number_list(inline_p, "--p");
        SpacePtr space = cfg.space.empty() ? make_space(AttributeSpace::anonymous(p.size()))
                                           : make_space(io::load_space(cfg.space));
        dist = CategoricalDistribution(space, std::move(p));
    }
    const auto options = metric_options(cfg);
    std::ostringstream csv;
    csv << (raw ? "metric,k,raw,n_factor,normalized\n" : "metric,k,normalized\n");
    for (MetricId m : cfg.metrics) {
        const auto s = fd_score(m, *dist, options);
        csv << metric_name(m) << ',' << s.k << ',';
        if (raw) csv << num(s.raw, cfg) << ',' << num(s.n_factor, cfg) << ',';
        csv << num(s.normalized, cfg) << '\n';
    }
    emit(cfg.out, out, [&](std::ostream& o) { o << csv.str(); });
    return kOk;
}

int cmd_ep(const RunConfig& cfg, std::ostream& out) {
    const auto mode = mode_of(cfg);
    const auto options = metric_options(cfg);
    std::ostringstream csv, md;
    csv << "k,point,outcome,trial,metric,f\n";
    md << "| k | point |";
    for (MetricId m : cfg.metrics) md << ' ' << metric_title(m) << " |";
    md << "\n|---|---|";
    for (std::size_t i = 0; i < cfg.metrics.size(); ++i) md << "---|";
    md << '\n';

    for (std::size_t k : default_k(cfg)) {
        const auto space = space_for(cfg, k);
        const auto model = classifier_for(cfg, k);
        const auto ep = run_ep_analysis(space, model, mode, cfg.metrics, cfg.trials, options);
        for (const auto& e : ep.fair.entries) {
            csv << k << ",fair,uniform," << e.trial << ',' << metric_name(e.metric) << ',' << num(e.f, cfg) << '\n';
        }
        for (const auto& e : ep.ab.entries) {
            csv << k << ",ab," << space->label(*e.outcome) << ',' << e.trial << ',' << metric_name(e.metric) << ','
                << num(e.f, cfg) << '\n';
        }
        const auto mean = [](const ScoreSet& s) {
            double sum = 0.0;
            for (const auto& e : s.entries) sum += e.f;
            return sum / static_cast<double>(s.entries.size());
        };
        for (const auto& [label, set] : {std::pair{"mean f (Fair-EP)", &ep.fair}, std::pair{"mean f (AB-EP)", &ep.ab}}) {
            md << "| " << k << " | " << label << " |";
            for (MetricId m : cfg.metrics) md << ' ' << format_number(mean(set->only(m)), 4) << " |";
            md << '\n';
        }
        md << "| " << k << " | MEPE(fair) |";
        for (MetricId m : cfg.metrics) md << ' ' << format_number(mepe_fair(ep.fair.only(m)), 4) << " |";
        md << "\n| " << k << " | MEPE(AB) |";
        for (MetricId m : cfg.metrics) md << ' ' << format_number(mepe_ab(ep.ab.only(m)), 4) << " |";
        md << '\n';
    }
    emit(cfg.out, out, [&](std::ostream& o) { o << csv.str(); });
    if (!cfg.markdown.empty()) emit(cfg.markdown, out, [&](std::ostream& o) { o << md.str(); });
    return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const auto mode = mode_of(cfg);
    const auto options = metric_options(cfg);
    const auto start = sweep_start(cfg, false);
    std::ostringstream csv, md;
    csv << "k,start,epoch,metric,f,f_star,abs_err\n";
    md << "| k | MEM |";
    for (MetricId m : cfg.metrics) md << ' ' << metric_title(m) << " |";
    md << "\n|---|---|";
    for (std::size_t i = 0; i < cfg.metrics.size(); ++i) md << "---|";
    md << '\n';

    for (std::size_t k : default_k(cfg)) {
        const auto space = space_for(cfg, k);
        const auto model = classifier_for(cfg, k);
        const auto sw = run_sweep(space, model, mode, cfg.metrics, cfg.step, start, options);
        for (const auto& ep : sw.trace) {
            for (std::size_t m = 0; m < sw.metrics.size(); ++m) {
                csv << k << ',' << ep.start << ',' << ep.epoch << ',' << metric_name(sw.metrics[m]) << ','
                    << num(ep.f[m], cfg) << ',' << num(ep.f_star[m], cfg) << ','
                    << num(std::abs(ep.f[m] - ep.f_star[m]), cfg) << '\n';
            }
        }
        md << "| " << k << " | sweep |";
        for (MetricId m : cfg.metrics) md << ' ' << format_number(mem_per_start(sw.scores.only(m)), 4) << " |";
        md << '\n';
    }
    emit(cfg.out, out, [&](std::ostream& o) { o << csv.str(); });
    if (!cfg.markdown.empty()) emit(cfg.markdown, out, [&](std::ostream& o) { o << md.str(); });
    return kOk;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
    BenchConfig bc;
    bc.metrics = cfg.metrics;
    bc.mode = mode_of(cfg);
    bc.trials = cfg.trials;
    bc.step = cfg.step;
    bc.sweep_start = sweep_start(cfg, true);
    bc.options = metric_options(cfg);
    for (std::size_t k : default_k(cfg)) {
        bc.cells.push_back({space_for(cfg, k), classifier_for(cfg, k), classifier_label(cfg, k)});
    }
    const auto report = summarize(bc);
    emit(cfg.out, out, [&](std::ostream& o) { write_report_csv(report, o, cfg.precision); });
    if (!cfg.markdown.empty()) {
        emit(cfg.markdown, out, [&](std::ostream& o) { write_report_markdown(report, o); });
    }
    return kOk;
}

int cmd_ingest(const RunConfig& cfg, const std::string& predictions, const std::string& confusion_out,
               std::ostream& out, std::ostream& err) {
    SpacePtr space;
    if (!cfg.space.empty()) {
        space = make_space(io::load_space(cfg.space));
        if (!cfg.k.empty() && (cfg.k.size() != 1 || cfg.k.front() != space->k())) {
            throw ValidationError("--k does not match the attribute space (k=" + std::to_string(space->k()) + ")");
        }
    } else if (cfg.k.size() == 1) {
        space = make_space(AttributeSpace::anonymous(cfg.k.front()));
    } else {
        throw ValidationError("ingest needs an attribute space (--space) or a single --k");
    }
    std::vector<PredictionRecord> records;
    if (predictions == "-") {
        throw ValidationError("reading predictions from stdin is not supported; pass a file");
    }
    {
        std::ifstream in(predictions, std::ios::binary);
        if (!in) throw IoError("cannot open '" + predictions + "'");
        records = io::read_predictions(in);
    }
    const auto result = ingest_predictions(space, records);
    emit(cfg.out, out, [&](std::ostream& o) { o << io::distribution_to_json(result.estimated).dump(2) << '\n'; });
    if (!confusion_out.empty()) {
        if (result.confusion) {
            emit(confusion_out, out, [&](std::ostream& o) { o << io::confusion_to_json(*result.confusion).dump(2) << '\n'; });
        } else if (!result.missing_truth.empty()) {
            err << "warning: no confusion matrix written; outcomes never seen as truth:";
            for (std::size_t i : result.missing_truth) err << ' ' << space->label(i);
            err << '\n';
        } else {
            err << "warning: no confusion matrix written; some records lack \"true\"\n";
        }
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fairness-discrepancy metrics for generative models: scores, normalization and benchmarks"};
    app.name("fairmetric");
    app.require_subcommand(1);

    std::map<CLI::App*, Flags> flags;
    std::string dist_file, inline_p, predictions, confusion_out;
    bool raw = false;

    auto* nfactor = app.add_subcommand("nfactor", "Normalization factor per metric and k");
    auto* score = app.add_subcommand("score", "Fairness score of one distribution");
    auto* ep = app.add_subcommand("ep", "Scores at the Fair-EP and every AB-EP through a classifier");
    auto* sweep_cmd = app.add_subcommand("sweep", "Score trace along the AB-EP to Fair-EP sweep");
    auto* bench = app.add_subcommand("bench", "MEPE / EP-var / MEM benchmark report");
    auto* ingest = app.add_subcommand("ingest", "Estimated distribution from a predictions file");
    for (auto* sub : {nfactor, score, ep, sweep_cmd, bench, ingest}) add_common(sub, flags[sub]);

    score->add_option("dist", dist_file, "Distribution JSON file");
    score->add_option("--p", inline_p, "Inline distribution, e.g. 0.9,0.1");
    score->add_flag("--raw", raw, "Also print raw value and normalization factor");
    ingest->add_option("predictions", predictions, "JSON-lines predictions file")->required();
    ingest->add_option("--confusion-out", confusion_out, "Write the estimated confusion matrix here");

    std::vector<const char*> argv{"fairmetric"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        const RunConfig cfg = build_config(flags.at(active));
        if (nfactor->parsed()) return cmd_nfactor(cfg, out);
        if (score->parsed()) return cmd_score(cfg, dist_file, inline_p, raw, out);
        if (ep->parsed()) return cmd_ep(cfg, out);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg, out);
        if (bench->parsed()) return cmd_bench(cfg, out);
        if (ingest->parsed()) return cmd_ingest(cfg, predictions, confusion_out, out, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kValidation;
}

}  // namespace fairmetric::cli
