#pragma once

// Checkpoint files: a model's JSON envelope plus the data conventions needed
// to apply it to new files (mark manifest, load-time scale, time unit).

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dhp/model.hpp"

namespace dhp {

struct Checkpoint {
  std::unique_ptr<PointProcessModel> model;
  std::vector<std::string> mark_labels;
  double time_scale = 1.0;
  std::string time_unit;
  nlohmann::json training;  // free-form summary of how the model was fitted
};

/// Rebuilds a model from its to_json() envelope, dispatching on model_type.
std::unique_ptr<PointProcessModel> model_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace dhp
