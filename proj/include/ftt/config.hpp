#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "ftt/trainer.hpp"

namespace ftt {

// Flat key=value experiment configuration. Files hold one pair per line
// ('#' starts a comment); command-line flags override file values. Unknown
// keys are rejected, as are variant-specific keys supplied for a variant
// that does not use them.
class ConfigBuilder {
 public:
  void load_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);

  // Applies defaults, parses, and validates; throws std::invalid_argument
  // with a message naming the offending key.
  ExperimentConfig build() const;

 private:
  std::map<std::string, std::string> values_;
};

// Writes the effective configuration so that feeding the file back (with a
// fresh outdir) reproduces the run exactly. Only keys meaningful for the
// variant are emitted.
void write_config_echo(const ExperimentConfig& cfg,
                       const std::filesystem::path& path);

}  // namespace ftt
