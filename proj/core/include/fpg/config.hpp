#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fpg/trainer.hpp"

namespace fpg::config {

/// Raised for malformed lines, unknown sections or keys, and bad values.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, std::size_t line, std::string key,
              const std::string& what);

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string key_;
};

/// Parses the sectioned key=value format documented in docs/config.md.
/// Keys absent from the file keep the defaults of `trainer::default_config`
/// for the file's env. The result is validated.
trainer::TrainConfig parse_config(std::istream& in,
                                  const std::string& source = "<input>");
trainer::TrainConfig parse_config_string(const std::string& text);
trainer::TrainConfig load_config(const std::filesystem::path& path);

/// Every key, doubles at 17 significant digits; parse_config inverts it.
void write_config(std::ostream& out, const trainer::TrainConfig& config);
std::string config_to_string(const trainer::TrainConfig& config);

std::string format_double(double v);

const char* tool_version();

struct RunManifest {
  trainer::TrainConfig config;
  std::vector<std::pair<std::string, std::string>> artifacts;  // name, path
  std::string tool_version;
  std::string timestamp;  // UTC, ISO 8601
};

/// A manifest is a config file whose comment lines carry version, timestamp
/// and artifact paths, so `load_config` accepts it directly.
void write_manifest(std::ostream& out, const RunManifest& manifest);
RunManifest read_manifest(std::istream& in, const std::string& source = "<manifest>");

std::string utc_timestamp();

/// $FPG_OUTPUT_ROOT if set and nonempty, otherwise "runs".
std::filesystem::path default_output_root();

}  // namespace fpg::config
