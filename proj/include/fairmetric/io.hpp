#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmetric/attrspace.hpp"
#include "fairmetric/classifier.hpp"
#include "fairmetric/transport.hpp"

namespace fairmetric::io {

using nlohmann::json;

/// Reads a whole file; throws IoError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Parses JSON text; `source` names the input in error messages.
json parse_json(const std::string& text, const std::string& source);

/// {"attributes":[{"name":"gender","values":["male","female"]}, ...]}
AttributeSpace space_from_json(const json& j);
json space_to_json(const AttributeSpace& space);
AttributeSpace load_space(const std::filesystem::path& path);

/// {"space": <path or inline object>, "p": [...]}. A relative space path is
/// resolved against `base_dir`; without "space" an anonymous space of size
/// |p| is used.
CategoricalDistribution distribution_from_json(const json& j, const std::filesystem::path& base_dir);
json distribution_to_json(const CategoricalDistribution& dist);
CategoricalDistribution load_distribution(const std::filesystem::path& path);

/// {"k":4, "c":[[...],...]}; the string "default" selects default_cost(k)
/// and yields nullopt.
std::optional<CostMatrix> cost_from_json(const json& j);
std::optional<CostMatrix> load_cost(const std::string& path_or_default);

/// {"k":2, "m":[[0.98,0.02],[0.05,0.95]]}
ConfusionModel confusion_from_json(const json& j);
json confusion_to_json(const ConfusionModel& m);
ConfusionModel load_confusion(const std::filesystem::path& path);

/// One JSON object per line: {"id":..,"probs":[..]} or {"id":..,"pred":i}
/// with an optional "true":i. Blank lines are skipped. Malformed lines throw
/// ValidationError naming the 1-based line number.
std::vector<PredictionRecord> read_predictions(std::istream& in);

/// Classifier accuracy presets taken from published classifier tables.
struct Preset {
    std::string name;
    std::string description;
    std::size_t k;     // 0 for "perfect", which fits any k
    double accuracy;   // average accuracy, used on every diagonal entry
};

const std::vector<Preset>& presets();
/// Exact preset name, or the family alias "set2" resolved by k
/// ("set2" with k=8 gives "set2-k8").
std::optional<Preset> find_preset(const std::string& name, std::optional<std::size_t> k = std::nullopt);
ConfusionModel preset_model(const Preset& preset, std::size_t k);

}  // namespace fairmetric::io
