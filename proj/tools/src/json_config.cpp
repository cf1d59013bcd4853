#include "json_config.hpp"

#include <nlohmann/json.hpp>

namespace dhp::cli {

namespace {

std::vector<std::string> inputs_of(const nlohmann::json& value) {
  if (value.is_string()) return {value.get<std::string>()};
  if (value.is_boolean()) return {value.get<bool>() ? "true" : "false"};
  if (value.is_array()) {
    std::vector<std::string> out;
    for (const auto& v : value) {
      auto one = inputs_of(v);
      out.insert(out.end(), one.begin(), one.end());
    }
    return out;
  }
  return {value.dump()};
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
  nlohmann::json out = nlohmann::json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
    const auto& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& values = opt->results();
      out[name] = values.size() == 1 ? nlohmann::json(values.front()) : nlohmann::json(values);
    } else if (default_also && !opt->get_default_str().empty()) {
      out[name] = opt->get_default_str();
    }
  }
  return out.dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(input);
  } catch (const nlohmann::json::exception& e) {
    throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw CLI::ConversionError("config file must hold a JSON object");

  std::vector<CLI::ConfigItem> items;
  auto add = [&](const std::string& name, const nlohmann::json& value) {
    if (value.is_null()) return;
    CLI::ConfigItem item;
    if (!command_.empty()) item.parents = {command_};
    item.name = name;
    item.inputs = inputs_of(value);
    items.push_back(std::move(item));
  };
  for (const auto& [key, value] : root.items()) {
    if (value.is_object()) {
      if (key != command_) continue;
      for (const auto& [name, v] : value.items()) add(name, v);
    } else {
      add(key, value);
    }
  }
  return items;
}

}  // namespace dhp::cli
