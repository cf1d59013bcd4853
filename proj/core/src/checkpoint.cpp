#include "dhp/checkpoint.hpp"

#include <fstream>

#include "dhp/baselines.hpp"
#include "dhp/dhp_model.hpp"

namespace dhp {

std::unique_ptr<PointProcessModel> model_from_json(const nlohmann::json& j) {
  const auto type = j.at("model_type").get<std::string>();
  if (type == "dhp") return std::make_unique<DhpModel>(DhpModel::from_json(j));
  if (type == "hawkes") return std::make_unique<HawkesModel>(HawkesModel::from_json(j));
  if (type == "hpp") return std::make_unique<HppModel>(HppModel::from_json(j));
  if (type == "rpp") return std::make_unique<RppModel>(RppModel::from_json(j));
  if (type == "selfcorrecting") return std::make_unique<SelfCorrectingModel>(SelfCorrectingModel::from_json(j));
  throw Error("unknown model_type '" + type + "'");
}

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint) {
  if (!checkpoint.model) throw std::invalid_argument("checkpoint has no model");
  auto j = checkpoint.model->to_json();
  auto& meta = j["meta"];
  meta["mark_manifest"] = checkpoint.mark_labels;
  meta["time_scale"] = checkpoint.time_scale;
  meta["time_unit"] = checkpoint.time_unit;
  if (!checkpoint.training.is_null()) j["training"] = checkpoint.training;
  return j;
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    Checkpoint c;
    c.model = model_from_json(j);
    const auto& meta = j.at("meta");
    c.mark_labels = meta.value("mark_manifest", std::vector<std::string>{});
    c.time_scale = meta.value("time_scale", 1.0);
    c.time_unit = meta.value("time_unit", std::string{});
    if (j.contains("training")) c.training = j.at("training");
    if (!c.mark_labels.empty() && c.mark_labels.size() != c.model->num_marks())
      throw Error("checkpoint: mark manifest does not match the model's mark count");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(checkpoint).dump(2) << '\n';
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace dhp
