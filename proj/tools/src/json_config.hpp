#pragma once

#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace dhp::cli {

// Reads flag values from a JSON object. Top-level scalars and arrays apply to
// the active command; an object keyed by the active command's name does too.
// Sections for other commands are ignored.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::string command) : command_(std::move(command)) {}

  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

 private:
  std::string command_;
};

}  // namespace dhp::cli
