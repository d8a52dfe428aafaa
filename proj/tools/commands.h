#pragma once

// Experiment commands behind the stretchlab executable. Each command reads a
// JSON config, writes its artifacts into an output directory and returns an
// exit code (see ExitCode).

#include "stretchlab/io.h"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace stretchlab::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode : int {
  kPass = 0,
  kConfig = 2,     // schema / usage error
  kNumeric = 3,    // numeric failure (geometry, solver)
  kThreshold = 4,  // a check exceeded its threshold
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Typed access to one JSON object; unknown keys are an error once
/// finish() is called.
class ConfigReader {
 public:
  ConfigReader(const json& j, std::string where);

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key);
  json raw(const std::string& key, const json& fallback);  // copy: fallback may be a temporary

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  int integer(const std::string& key);
  int integer(const std::string& key, int fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  bool boolean(const std::string& key, bool fallback);

  void finish() const;

 private:
  const json& j_;
  std::string where_;
  std::vector<std::string> used_;
};

struct RunOptions {
  fs::path out;
  bool resume = false;
  int verbose = 0;
};

int cmd_rep(const json& cfg, const RunOptions& opt);
int cmd_length(const json& cfg, const RunOptions& opt);
int cmd_kbound(const json& cfg, const RunOptions& opt);
int cmd_duality(const json& cfg, const RunOptions& opt);
int cmd_mass(const json& cfg, const RunOptions& opt);
int cmd_wolpert(const json& cfg, const RunOptions& opt);
int cmd_solve(const json& cfg, const RunOptions& opt);
/// Collects the reports found in opt.out into report.json and report.md.
int cmd_report(const json& cfg, const RunOptions& opt);

/// Representation from {type: octagon | identity | twist | file, ...}.
SurfaceGroupRep parse_rep(const json& spec, const std::string& where);

/// Common report envelope: command, version, config hash, tolerances.
json envelope(const std::string& command, const json& cfg);

}  // namespace stretchlab::cli
