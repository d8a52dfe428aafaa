// stretchlab <cmd> --config <file.json> --out <dir>
//
// Exit codes: 0 pass, 2 config/schema error, 3 numeric failure,
// 4 a check exceeded its threshold.

#include "commands.h"

#include "stretchlab/version.h"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>

namespace {

using namespace stretchlab;
using namespace stretchlab::cli;

int write_error(const std::string& cmd, const json& cfg, const RunOptions& opt, int code,
                const std::string& what) {
  std::cerr << "stretchlab " << cmd << ": " << what << "\n";
  try {
    json report = envelope(cmd, cfg.is_null() ? json::object() : cfg);
    report["status"] = code == kConfig ? "config_error" : "numeric_error";
    report["exit_code"] = code;
    report["message"] = what;
    fs::create_directories(opt.out);
    io::write_json_file((opt.out / (cmd + ".json")).string(), report);
  } catch (const std::exception&) {
    // the output directory itself may be the problem
  }
  return code;
}

int run(const std::string& cmd, const std::function<int(const json&, const RunOptions&)>& f,
        const std::string& config_path, const RunOptions& opt, bool config_optional) {
  json cfg;
  try {
    if (!config_path.empty()) {
      cfg = io::read_json_file(config_path);
    } else if (!config_optional) {
      throw ConfigError("--config is required");
    }
  } catch (const ConfigError& e) {
    return write_error(cmd, cfg, opt, kConfig, e.what());
  } catch (const std::exception& e) {
    return write_error(cmd, cfg, opt, kConfig, std::string("cannot read config: ") + e.what());
  }
  try {
    return f(cfg, opt);
  } catch (const ConfigError& e) {
    return write_error(cmd, cfg, opt, kConfig, e.what());
  } catch (const json::exception& e) {
    return write_error(cmd, cfg, opt, kConfig, e.what());
  } catch (const GeometryError& e) {  // before invalid_argument: it derives from it
    return write_error(cmd, cfg, opt, kNumeric, e.what());
  } catch (const SolverError& e) {
    return write_error(cmd, cfg, opt, kNumeric, e.what());
  } catch (const std::invalid_argument& e) {
    return write_error(cmd, cfg, opt, kConfig, e.what());
  } catch (const std::exception& e) {
    return write_error(cmd, cfg, opt, kNumeric, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stretchlab: best-Lipschitz / earthquake duality experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  const std::map<std::string, std::pair<std::function<int(const json&, const RunOptions&)>, std::string>>
      commands = {
          {"rep", {cmd_rep, "build a representation and write it to <out>"}},
          {"length", {cmd_length, "translation lengths of words and multicurves"}},
          {"kbound", {cmd_kbound, "K lower bound over enumerated words"}},
          {"duality", {cmd_duality, "length derivative vs measure-cocycle pairing"}},
          {"mass", {cmd_mass, "mass of standard measures vs twice the length"}},
          {"wolpert", {cmd_wolpert, "Wolpert reciprocity of twist/length derivatives"}},
          {"solve", {cmd_solve, "p-continuation of the discrete harmonic map solver"}},
          {"report", {cmd_report, "collect the reports in <out>"}},
      };

  std::string config_path;
  RunOptions opt;
  std::string out = "out";
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config,-c", config_path, "JSON config file");
    sub->add_option("--out,-o", out, "output directory")->capture_default_str();
    sub->add_flag_function("--verbose,-v", [&opt](std::int64_t n) { opt.verbose = static_cast<int>(n); },
                          "progress on stderr (repeat for solver detail)");
    if (name == "solve") sub->add_flag("--resume", opt.resume, "continue after the last checkpointed stage");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }
  opt.out = out;
  for (const auto& [name, entry] : commands) {
    if (app.got_subcommand(name)) return run(name, entry.first, config_path, opt, name == "report");
  }
  return kConfig;
}
