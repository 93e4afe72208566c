#pragma once

#include <CLI11.hpp>
#include <istream>
#include <string>
#include <vector>

namespace tcost::cli {

/// JSON config files for CLI11. Top-level keys set root options; an object
/// value named after a subcommand sets that subcommand's options, e.g.
///   {"mu": 0.08, "simulate": {"paths": 64, "T": 200}}
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace tcost::cli
