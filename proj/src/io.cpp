#include "fairmetric/io.hpp"

#include <fstream>
#include <sstream>

#include "fairmetric/error.hpp"

namespace fairmetric::io {

namespace {

std::vector<double> number_array(const json& j, const std::string& what) {
    if (!j.is_array()) throw ValidationError(what + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw ValidationError(what + " must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<double> square_matrix(const json& rows, std::size_t k, const std::string& what) {
    if (!rows.is_array() || rows.size() != k) {
        throw ValidationError(what + " must have " + std::to_string(k) + " rows");
    }
    std::vector<double> flat;
    flat.reserve(k * k);
    for (const auto& row : rows) {
        const auto r = number_array(row, what + " row");
        if (r.size() != k) throw ValidationError(what + " rows must have " + std::to_string(k) + " entries");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return flat;
}

std::size_t read_k(const json& j, const std::string& what) {
    if (!j.contains("k") || !j["k"].is_number_integer() || j["k"].get<long long>() < 1) {
        throw ValidationError(what + " needs a positive integer \"k\"");
    }
    return static_cast<std::size_t>(j["k"].get<long long>());
}

std::size_t read_index(const json& v, const std::string& field) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ValidationError("\"" + field + "\" must be a non-negative integer");
    }
    return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(source + ": invalid JSON (" + e.what() + ")");
    }
}

AttributeSpace space_from_json(const json& j) {
    if (!j.is_object() || !j.contains("attributes") || !j["attributes"].is_array()) {
        throw ValidationError("attribute space needs an \"attributes\" array");
    }
    std::vector<Attribute> attrs;
    for (const auto& a : j["attributes"]) {
        if (!a.is_object() || !a.contains("name") || !a["name"].is_string() || !a.contains("values") ||
            !a["values"].is_array()) {
            throw ValidationError("each attribute needs a \"name\" string and a \"values\" array");
        }
        Attribute attr{a["name"].get<std::string>(), {}};
        for (const auto& v : a["values"]) {
            if (!v.is_string()) throw ValidationError("attribute values must be strings");
            attr.values.push_back(v.get<std::string>());
        }
        attrs.push_back(std::move(attr));
    }
    return AttributeSpace(std::move(attrs));
}

json space_to_json(const AttributeSpace& space) {
    json attrs = json::array();
    for (const auto& a : space.attributes()) attrs.push_back({{"name", a.name}, {"values", a.values}});
    return {{"attributes", attrs}};
}

AttributeSpace load_space(const std::filesystem::path& path) {
    return space_from_json(parse_json(read_file(path), path.string()));
}

CategoricalDistribution distribution_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object() || !j.contains("p")) throw ValidationError("distribution needs a \"p\" array");
    auto p = number_array(j["p"], "\"p\"");
    SpacePtr space;
    if (j.contains("space")) {
        const auto& s = j["space"];
        if (s.is_string()) {
            std::filesystem::path sp = s.get<std::string>();
            if (sp.is_relative()) sp = base_dir / sp;
            space = make_space(load_space(sp));
        } else {
            space = make_space(space_from_json(s));
        }
    } else {
        space = make_space(AttributeSpace::anonymous(p.size()));
    }
    return CategoricalDistribution(space, std::move(p));
}

json distribution_to_json(const CategoricalDistribution& dist) {
    return {{"space", space_to_json(dist.space())}, {"p", std::vector<double>(dist.p().begin(), dist.p().end())}};
}

CategoricalDistribution load_distribution(const std::filesystem::path& path) {
    return distribution_from_json(parse_json(read_file(path), path.string()), path.parent_path());
}

std::optional<CostMatrix> cost_from_json(const json& j) {
    if (j.is_string() && j.get<std::string>() == "default") return std::nullopt;
    if (!j.is_object()) throw ValidationError("cost matrix must be an object or \"default\"");
    if (j.contains("c") && j["c"].is_string() && j["c"].get<std::string>() == "default") return std::nullopt;
    const std::size_t k = read_k(j, "cost matrix");
    if (!j.contains("c")) throw ValidationError("cost matrix needs a \"c\" array");
    return CostMatrix(k, square_matrix(j["c"], k, "cost matrix"));
}

std::optional<CostMatrix> load_cost(const std::string& path_or_default) {
    if (path_or_default == "default") return std::nullopt;
    return cost_from_json(parse_json(read_file(path_or_default), path_or_default));
}

ConfusionModel confusion_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("confusion model must be a JSON object");
    const std::size_t k = read_k(j, "confusion model");
    if (!j.contains("m")) throw ValidationError("confusion model needs an \"m\" array");
    return ConfusionModel(k, square_matrix(j["m"], k, "confusion matrix"));
}

json confusion_to_json(const ConfusionModel& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.k(); ++i) {
        const auto r = m.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return {{"k", m.k()}, {"m", rows}};
}

ConfusionModel load_confusion(const std::filesystem::path& path) {
    return confusion_from_json(parse_json(read_file(path), path.string()));
}

std::vector<PredictionRecord> read_predictions(std::istream& in) {
    std::vector<PredictionRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "line " + std::to_string(lineno);
        try {
            const json j = json::parse(line);
            if (!j.is_object()) throw ValidationError("record must be a JSON object");
            PredictionRecord rec;
            if (j.contains("id")) rec.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
            const bool has_probs = j.contains("probs");
            const bool has_pred = j.contains("pred");
            if (has_probs == has_pred) throw ValidationError("record needs exactly one of \"probs\" or \"pred\"");
            if (has_probs) {
                rec.output = number_array(j["probs"], "\"probs\"");
            } else {
                rec.output = read_index(j["pred"], "pred");
            }
            if (j.contains("true")) rec.truth = read_index(j["true"], "true");
            out.push_back(std::move(rec));
        } catch (const json::exception& e) {
            throw ValidationError(where + ": malformed record (" + e.what() + ")");
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    if (in.bad()) throw IoError("error while reading predictions");
    return out;
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = {
        {"perfect", "perfect classifier (identity)", 0, 1.0},
        {"set1-a", "gender", 2, 0.98},
        {"set1-b", "youth", 2, 0.81},
        {"set1-c", "male, black hair", 4, 0.83},
        {"set1-d", "young, smiling", 4, 0.72},
        {"set2-k2", "gender", 2, 0.98},
        {"set2-k4", "gender, black hair", 4, 0.86},
        {"set2-k8", "gender, black hair, smiling", 8, 0.78},
        {"set2-k16", "gender, black hair, smiling, bangs", 16, 0.66},
    };
    return table;
}

std::optional<Preset> find_preset(const std::string& name, std::optional<std::size_t> k) {
    std::string key = name;
    if (key == "set2" && k) key = "set2-k" + std::to_string(*k);
    for (const auto& p : presets()) {
        if (p.name == key) return p;
    }
    return std::nullopt;
}

ConfusionModel preset_model(const Preset& preset, std::size_t k) {
    if (preset.k == 0) return perfect(k);
    if (preset.k != k) {
        throw ValidationError("preset '" + preset.name + "' is defined for k=" + std::to_string(preset.k) +
                              ", not k=" + std::to_string(k));
    }
    return from_accuracies(std::vector<double>(k, preset.accuracy));
}

}  // namespace fairmetric::io
