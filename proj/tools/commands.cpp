#include "commands.h"

#include "stretchlab/parallel.h"
#include "stretchlab/version.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

namespace stretchlab::cli {

// ---------------------------------------------------------------------------
// config access

ConfigReader::ConfigReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
  if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
}

const json& ConfigReader::raw(const std::string& key) {
  if (!j_.contains(key)) throw ConfigError(where_ + ": missing required key '" + key + "'");
  used_.push_back(key);
  return j_.at(key);
}

json ConfigReader::raw(const std::string& key, const json& fallback) {
  if (!j_.contains(key)) return fallback;
  used_.push_back(key);
  return j_.at(key);
}

double ConfigReader::number(const std::string& key) {
  const json& v = raw(key);
  if (!v.is_number()) throw ConfigError(where_ + "." + key + ": expected a number");
  return v.get<double>();
}

double ConfigReader::number(const std::string& key, double fallback) {
  return has(key) ? number(key) : fallback;
}

int ConfigReader::integer(const std::string& key) {
  const json& v = raw(key);
  if (!v.is_number_integer()) throw ConfigError(where_ + "." + key + ": expected an integer");
  return v.get<int>();
}

int ConfigReader::integer(const std::string& key, int fallback) {
  return has(key) ? integer(key) : fallback;
}

std::string ConfigReader::string(const std::string& key) {
  const json& v = raw(key);
  if (!v.is_string()) throw ConfigError(where_ + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::string ConfigReader::string(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

bool ConfigReader::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const json& v = raw(key);
  if (!v.is_boolean()) throw ConfigError(where_ + "." + key + ": expected true/false");
  return v.get<bool>();
}

void ConfigReader::finish() const {
  for (const auto& [key, value] : j_.items()) {
    if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
      throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }
}

namespace {

int curve_arg(const std::string& name, const std::string& where) {
  try {
    return parse_curve(name);
  } catch (const std::invalid_argument&) {
    throw ConfigError(where + ": unsupported curve '" + name + "' (a1, b1, a2, b2)");
  }
}

Word word_arg(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a word string");
  try {
    return Word::parse(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

WeightedMulticurve multicurve_arg(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of {word, weight}");
  WeightedMulticurve mc;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    ConfigReader r(j[i], w);
    const Word word = word_arg(r.raw("word"), w + ".word");
    const double weight = r.number("weight", 1.0);
    r.finish();
    if (!(weight > 0)) throw ConfigError(w + ".weight: must be positive");
    mc.curves.push_back({word, weight});
  }
  return mc;
}

std::string status_name(int code) {
  switch (code) {
    case kPass: return "pass";
    case kConfig: return "config_error";
    case kNumeric: return "numeric_error";
    case kThreshold: return "threshold";
  }
  return "unknown";
}

json tolerances() {
  return {{"hyperboloid", tol::kHyperboloid},
          {"group", tol::kGroup},
          {"hyperbolic_trace", tol::kHyperbolic},
          {"exp_series_switch", tol::kExpSeries},
          {"relator", 1e-9}};
}

void write_report(const RunOptions& opt, const std::string& name, json report, int code) {
  report["status"] = status_name(code);
  report["exit_code"] = code;
  fs::create_directories(opt.out);
  io::write_json_file((opt.out / (name + ".json")).string(), report);
}

json rep_summary(const SurfaceGroupRep& rep) {
  json lengths = json::array(), traces = json::array();
  for (int g = 0; g < 4; ++g) {
    lengths.push_back(translation_length(rep[g]));
    traces.push_back(rep[g].trace());
  }
  return {{"label", rep.label},
          {"relator_residual", rep.relator_residual()},
          {"plain_relator_residual", rep.plain_relator_residual()},
          {"generator_lengths", lengths},
          {"generator_traces", traces}};
}

json isometry_entry(const Word& w, const SurfaceGroupRep& rep) {
  const GroupElem g = evaluate(w, rep);
  json e = {{"word", w.str()}, {"trace", g.trace()}, {"type", to_string(classify(g))}};
  e["length"] = classify(g) == IsometryType::kHyperbolic ? json(translation_length(g)) : json(nullptr);
  return e;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace

SurfaceGroupRep parse_rep(const json& spec, const std::string& where) {
  if (spec.is_string()) {
    const std::string t = spec.get<std::string>();
    if (t == "octagon" || t == "identity") return octagon_representation();
    throw ConfigError(where + ": unknown representation '" + t + "'");
  }
  ConfigReader r(spec, where);
  const std::string type = r.string("type");
  SurfaceGroupRep rep;
  if (type == "octagon" || type == "identity") {
    rep = octagon_representation();
  } else if (type == "twist") {
    rep = r.has("base") ? parse_rep(r.raw("base"), where + ".base") : octagon_representation();
    std::vector<TwistSpec> twists;
    if (r.has("twists")) {
      const json& list = r.raw("twists");
      if (!list.is_array()) throw ConfigError(where + ".twists: expected an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string w = where + ".twists[" + std::to_string(i) + "]";
        ConfigReader t(list[i], w);
        twists.push_back({curve_arg(t.string("curve"), w), t.number("t")});
        t.finish();
      }
    } else {
      twists.push_back({curve_arg(r.string("curve"), where), r.number("t")});
    }
    for (const auto& t : twists) rep = twist(rep, t);
    rep.label = "rho";
  } else if (type == "file") {
    const std::string path = r.string("path");
    try {
      rep = io::rep_from_json(io::read_json_file(path));
    } catch (const GeometryError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(where + ": cannot load '" + path + "': " + e.what());
    }
  } else {
    throw ConfigError(where + ": unknown representation type '" + type + "'");
  }
  if (r.has("label")) rep.label = r.string("label");
  r.finish();
  rep.validate();
  return rep;
}

json envelope(const std::string& command, const json& cfg) {
  return {{"command", command},
          {"version", kVersion},
          {"config_hash", io::config_hash(cfg)},
          {"config", cfg},
          {"tolerances", tolerances()},
          {"threads", thread_count()}};
}

// ---------------------------------------------------------------------------

int cmd_rep(const json& cfg, const RunOptions& opt) {
  ConfigReader r(cfg, "config");
  const SurfaceGroupRep rep = parse_rep(r.raw("representation", json("octagon")), "representation");
  const std::string name = r.string("name", rep.label);
  r.finish();

  fs::create_directories(opt.out);
  io::write_json_file((opt.out / (name + ".json")).string(), io::rep_to_json(rep));
  json report = envelope("rep", cfg);
  report["file"] = name + ".json";
  report["representation"] = rep_summary(rep);
  report["octagon_length"] = octagon_length();
  write_report(opt, "rep", report, kPass);
  return kPass;
}

int cmd_length(const json& cfg, const RunOptions& opt) {
  ConfigReader r(cfg, "config");
  const SurfaceGroupRep rep = parse_rep(r.raw("representation", json("octagon")), "representation");
  std::vector<Word> words;
  const json& wl = r.raw("words", json::array({"a1", "b1", "a2", "b2"}));
  if (!wl.is_array()) throw ConfigError("config.words: expected an array");
  for (std::size_t i = 0; i < wl.size(); ++i) {
    words.push_back(word_arg(wl[i], "config.words[" + std::to_string(i) + "]"));
  }
  std::vector<WeightedMulticurve> mcs;
  const json& ml = r.raw("multicurves", json::array());
  if (!ml.is_array()) throw ConfigError("config.multicurves: expected an array");
  for (std::size_t i = 0; i < ml.size(); ++i) {
    mcs.push_back(multicurve_arg(ml[i], "config.multicurves[" + std::to_string(i) + "]"));
  }
  r.finish();

  json table = json::array();
  for (const Word& w : words) table.push_back(isometry_entry(w, rep));
  json mtable = json::array();
  for (const auto& mc : mcs) {
    mc.validate(rep);
    const double l = length(mc, rep);
    mtable.push_back({{"multicurve", io::multicurve_to_json(mc)},
                      {"length", l},
                      {"mass", mass(standard_measure(mc, rep))}});
  }
  json report = envelope("length", cfg);
  report["representation"] = rep_summary(rep);
  report["words"] = table;
  report["multicurves"] = mtable;
  write_report(opt, "length", report, kPass);
  return kPass;
}

int cmd_kbound(const json& cfg, const RunOptions& opt) {
  ConfigReader r(cfg, "config");
  const SurfaceGroupRep sigma = parse_rep(r.raw("sigma", json("octagon")), "sigma");
  const SurfaceGroupRep rho = parse_rep(r.raw("target"), "target");
  const int max_length = r.integer("max_length", 6);
  if (max_length < 1 || max_length > 10) throw ConfigError("config.max_length: expected 1..10");
  std::vector<Word> words;
  if (r.has("words")) {
    const json& wl = r.raw("words");
    if (!wl.is_array()) throw ConfigError("config.words: expected an array");
    for (std::size_t i = 0; i < wl.size(); ++i) {
      words.push_back(word_arg(wl[i], "config.words[" + std::to_string(i) + "]"));
    }
  }
  std::optional<double> expect_min, expect_max;
  if (r.has("expect")) {
    ConfigReader e(r.raw("expect"), "config.expect");
    if (e.has("min")) expect_min = e.number("min");
    if (e.has("max")) expect_max = e.number("max");
    e.finish();
  }
  r.finish();

  const Timer timer;
  const KBound kb = words.empty() ? k_lower_bound(max_length, sigma, rho)
                                  : k_lower_bound(words, sigma, rho);
  int code = kPass;
  if (expect_min && kb.value < *expect_min) code = kThreshold;
  if (expect_max && kb.value > *expect_max) code = kThreshold;

  json report = envelope("kbound", cfg);
  report["k_lower_bound"] = kb.value;
  report["best_word"] = kb.best.str();
  report["evaluated"] = kb.evaluated;
  report["skipped"] = kb.skipped;
  report["trace_classes"] = kb.classes;
  report["max_length"] = words.empty() ? max_length : 0;
  report["seconds"] = timer.seconds();
  write_report(opt, "kbound", report, code);
  return code;
}

int cmd_duality(const json& cfg, const RunOptions& opt) {
  ConfigReader r(cfg, "config");
  const SurfaceGroupRep sigma = parse_rep(r.raw("representation", json("octagon")), "representation");
  const double step = r.number("step", 1e-4);
  const double threshold = r.number("threshold", 1e-6);
  const double cob_threshold = r.number("coboundary_threshold", 1e-10);
  const int seed = r.integer("seed", 1);
  struct Case {
    WeightedMulticurve mc;
    int curve;
    double weight;
  };
  std::vector<Case> cases;
  const json& cl = r.raw("cases", json("all"));
  if (cl.is_string()) {
    if (cl.get<std::string>() != "all") throw ConfigError("config.cases: expected \"all\" or a list");
    // the 12 (measured curve, twist curve) pairs of distinct handle curves,
    for (int c = 0; c < 4; ++c) {
      for (int d = 0; d < 4; ++d) {
        if (c != d) cases.push_back({{{{Word::generator(c), 1.0}}}, d, 1.0});
      }
    }
    // and a two-component multicurve against every handle twist
    const WeightedMulticurve two{{{Word::generator(kA1), 0.7}, {Word::generator(kA2), 1.9}}};
    for (int d = 0; d < 4; ++d) cases.push_back({two, d, 1.0});
  } else if (cl.is_array()) {
    for (std::size_t i = 0; i < cl.size(); ++i) {
      const std::string w = "config.cases[" + std::to_string(i) + "]";
      ConfigReader c(cl[i], w);
      Case k;
      k.mc = multicurve_arg(c.raw("multicurve"), w + ".multicurve");
      k.curve = curve_arg(c.string("twist"), w + ".twist");
      k.weight = c.number("weight", 1.0);
      c.finish();
      cases.push_back(k);
    }
  } else {
    throw ConfigError("config.cases: expected \"all\" or a list");
  }
  r.finish();
  if (!(step > 0)) throw ConfigError("config.step: must be positive");

  for (const Case& k : cases) k.mc.validate(sigma);
  std::vector<DualityReport> results(cases.size());
  parallel_for(cases.size(), [&](std::size_t i) {
    results[i] = duality_check(sigma, cases[i].mc, cases[i].curve, cases[i].weight, step);
  });
  json rows = json::array();
  double worst = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& k = cases[i];
    const DualityReport& d = results[i];
    worst = std::max(worst, d.rel_err);
    rows.push_back({{"multicurve", io::multicurve_to_json(k.mc)},
                    {"twist", gen_name(k.curve)},
                    {"weight", k.weight},
                    {"lhs", d.lhs},
                    {"rhs", d.rhs},
                    {"rel_err", d.rel_err},
                    {"pass", d.rel_err <= threshold}});
  }
  // coboundaries pair to zero with every measured curve
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double cob = 0;
  for (int k = 0; k < 8; ++k) {
    Mat3 a;
    for (int i = 0; i < 9; ++i) a.data()[i] = nd(rng);
    const Cocycle xi = coboundary(project_lie(a), sigma);
    for (const Case& c : cases) cob = std::max(cob, std::abs(pair(standard_measure(c.mc, sigma), xi)));
  }
  const int code = (worst <= threshold && cob <= cob_threshold) ? kPass : kThreshold;
  json report = envelope("duality", cfg);
  report["cases"] = rows;
  report["max_rel_err"] = worst;
  report["rel_err"] = worst;
  report["threshold"] = threshold;
  report["coboundary_pairing"] = cob;
  report["coboundary_threshold"] = cob_threshold;
  write_report(opt, "duality", report, code);
  return code;
}

int cmd_mass(const json& cfg, const RunOptions& opt) {
  ConfigReader r(cfg, "config");
  const SurfaceGroupRep sigma = parse_rep(r.raw("representation", json("octagon")), "representation");
  const int samples = r.integer("samples", 64);
  const int seed = r.integer("seed", 1);
  const int nodes = r.integer("quadrature_nodes", 64);
  const double threshold = r.number("threshold", 1e-9);
  std::vector<WeightedMulticurve> mcs;
  if (r.has("multicurves")) {
    const json& ml = r.raw("multicurves");
    if (!ml.is_array()) throw ConfigError("config.multicurves: expected an array");
    for (std::size_t i = 0; i < ml.size(); ++i) {
      mcs.push_back(multicurve_arg(ml[i], "config.multicurves[" + std::to_string(i) + "]"));
    }
  }
  int random_count = 0, random_len = 4;
  if (r.has("random")) {
    ConfigReader rr(r.raw("random"), "config.random");
    random_count = rr.integer("count");
    random_len = rr.integer("max_length", 4);
    rr.finish();
    if (random_count < 0 || random_len < 1 || random_len > 8) {
      throw ConfigError("config.random: count >= 0, max_length in 1..8");
    }
  }
  r.finish();
  if (samples < 0 || nodes < 2 || nodes % 2) {
    throw ConfigError("config: samples >= 0 and an even quadrature_nodes >= 2 required");
  }

  // random weighted multicurves of pairwise non-conjugate hyperbolic words
  std::mt19937_64 rng(seed);
  if (random_count > 0) {
    const auto words = enumerate_words(random_len);
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::uniform_real_distribution<double> wdist(0.1, 3.0);
    std::uniform_int_distribution<int> count(1, 3);
    int built = 0;
    while (built < random_count) {
      WeightedMulticurve mc;
      const int n = count(rng);
      for (int i = 0; i < n; ++i) {
        const Word& w = words[pick(rng)];
        bool ok = classify(evaluate(w, sigma)) == IsometryType::kHyperbolic;
        for (const auto& c : mc.curves) {
          ok = ok && !freely_conjugate(w, c.word) && !freely_conjugate(w, c.word.inverse());
        }
        if (ok) mc.curves.push_back({w, wdist(rng)});
      }
      if (mc.curves.empty()) continue;
      mcs.push_back(mc);
      ++built;
    }
  }

  json rows = json::array();
  double worst_exact = 0, worst_dual = 0;
  bool bounded = true;
  for (std::size_t i = 0; i < mcs.size(); ++i) {
    const WeightedMulticurve& mc = mcs[i];
    if (!mc.curves.empty()) mc.validate(sigma);
    const LieValuedMeasure m = standard_measure(mc, sigma);
    const double ms = mass(m);
    const double l2 = 2.0 * length(mc, sigma);
    const DualityMass d = mass_by_duality(m, samples, seed + i, nodes);
    worst_exact = std::max(worst_exact, rel_err(ms, l2));
    worst_dual = std::max(worst_dual, rel_err(d.optimal, ms));
    bounded = bounded && d.sampled_sup <= ms * (1 + 1e-9) + 1e-9;
    rows.push_back({{"multicurve", io::multicurve_to_json(mc)},
                    {"lhs", ms},
                    {"rhs", l2},
                    {"rel_err", rel_err(ms, l2)},
                    {"mass", ms},
                    {"twice_length", l2},
                    {"duality_optimal", d.optimal},
                    {"duality_sampled_sup", d.sampled_sup},
                    {"samples", d.samples}});
  }
  const bool ok = worst_exact <= 1e-12 && worst_dual <= threshold && bounded;
  json report = envelope("mass", cfg);
  report["multicurves"] = rows;
  report["max_rel_err_mass_vs_2length"] = worst_exact;
  report["max_rel_err_duality"] = worst_dual;
  report["rel_err"] = std::max(worst_exact, worst_dual);
  report["sampled_forms_bounded"] = bounded;
  report["threshold"] = threshold;
  const int code = ok ? kPass : kThreshold;
  write_report(opt, "mass", report, code);
  return code;
}

int cmd_wolpert(const json& cfg, const RunOptions& opt) {
  ConfigReader r(cfg, "config");
  const SurfaceGroupRep sigma = parse_rep(r.raw("representation", json("octagon")), "representation");
  const double step = r.number("step", 1e-4);
  const double threshold = r.number("threshold", 1e-5);
  std::vector<std::pair<int, int>> pairs;
  const json& pl = r.raw("pairs", json("all"));
  if (pl.is_string()) {
    if (pl.get<std::string>() != "all") throw ConfigError("config.pairs: expected \"all\" or a list");
    for (int c = 0; c < 4; ++c) {
      for (int d = c; d < 4; ++d) pairs.emplace_back(c, d);
    }
  } else if (pl.is_array()) {
    for (std::size_t i = 0; i < pl.size(); ++i) {
      const std::string w = "config.pairs[" + std::to_string(i) + "]";
      if (!pl[i].is_array() || pl[i].size() != 2 || !pl[i][0].is_string() || !pl[i][1].is_string()) {
        throw ConfigError(w + ": expected [curve, curve]");
      }
      pairs.emplace_back(curve_arg(pl[i][0].get<std::string>(), w),
                         curve_arg(pl[i][1].get<std::string>(), w));
    }
  } else {
    throw ConfigError("config.pairs: expected \"all\" or a list");
  }
  r.finish();
  if (!(step > 0)) throw ConfigError("config.step: must be positive");

  json rows = json::array();
  double worst = 0;
  for (const auto& [c, d] : pairs) {
    const WolpertReport w = wolpert_reciprocity(sigma, c, d, step);
    worst = std::max(worst, w.diff);
    rows.push_back({{"curve1", gen_name(c)},
                    {"curve2", gen_name(d)},
                    {"dl1_dt2", w.d12},
                    {"dl2_dt1", w.d21},
                    {"lhs", w.d12},
                    {"rhs", w.d21},
                    {"diff", w.diff},
                    {"pass", w.diff <= threshold}});
  }
  const int code = worst <= threshold ? kPass : kThreshold;
  json report = envelope("wolpert", cfg);
  report["pairs"] = rows;
  report["max_diff"] = worst;
  report["threshold"] = threshold;
  write_report(opt, "wolpert", report, code);
  return code;
}

// ---------------------------------------------------------------------------
// solve

namespace {

struct SolveConfig {
  int level = 3;
  std::vector<int> schedule = {2, 4, 8, 16, 32, 64};
  std::string target_type = "identity";
  json target;
  SolveOptions opts;
  int kbound_length = 6;
  bool write_density = true;
  CylinderRig rig;
};

SolveConfig parse_solve(const json& cfg) {
  SolveConfig s;
  ConfigReader r(cfg, "config");
  s.level = r.integer("mesh_level", s.level);
  if (s.level < 0 || s.level > 6) throw ConfigError("config.mesh_level: expected 0..6");
  if (r.has("p_schedule")) {
    const json& ps = r.raw("p_schedule");
    if (!ps.is_array() || ps.empty()) throw ConfigError("config.p_schedule: expected a non-empty array");
    s.schedule.clear();
    for (const auto& p : ps) {
      if (!p.is_number_integer()) throw ConfigError("config.p_schedule: expected integers");
      s.schedule.push_back(p.get<int>());
    }
  }
  for (std::size_t i = 0; i < s.schedule.size(); ++i) {
    const int p = s.schedule[i];
    if (p < 2 || p % 2) throw ConfigError("config.p_schedule: p must be an even integer >= 2");
    if (i > 0 && p <= s.schedule[i - 1]) throw ConfigError("config.p_schedule: must be increasing");
  }
  s.target = r.raw("target", json{{"type", "identity"}});
  {
    ConfigReader t(s.target, "config.target");
    s.target_type = t.string("type");
    if (s.target_type == "cylinder") {
      s.rig.a = t.number("a", s.rig.a);
      s.rig.b = t.number("b", s.rig.b);
      s.rig.n = t.integer("n", s.rig.n);
      t.finish();
      if (!(s.rig.a > 0) || !(s.rig.b > 0) || s.rig.n < 4) {
        throw ConfigError("config.target: cylinder needs a > 0, b > 0, n >= 4");
      }
    } else if (s.target_type != "identity" && s.target_type != "twist" && s.target_type != "file" &&
               s.target_type != "octagon") {
      throw ConfigError("config.target.type: expected identity, twist, file or cylinder");
    }
  }
  s.opts.tol = r.number("tol", s.opts.tol);
  s.opts.max_iter = r.integer("max_iter", s.opts.max_iter);
  s.opts.ftol = r.number("ftol", s.opts.ftol);
  r.integer("seed", 0);  // recorded in the config hash; the solver is deterministic
  s.kbound_length = r.integer("kbound_max_length", s.kbound_length);
  s.write_density = r.boolean("write_density", s.write_density);
  r.finish();
  if (!(s.opts.tol > 0) || s.opts.max_iter < 1) throw ConfigError("config: tol > 0 and max_iter >= 1");
  return s;
}

json relations_json(const RelationReport& rel) {
  return {{"a_literal", rel.a_literal},
          {"a_trace_corrected", rel.a_trace},
          {"b_gap", rel.b_gap},
          {"c_concentration", rel.c_fraction}};
}

int solve_cylinder_cmd(const json& cfg, const SolveConfig& s, const RunOptions& opt) {
  const Timer timer;
  const auto stages = cylinder_continuation(s.rig, s.schedule, s.opts);
  json rows = json::array();
  bool ok = true;
  for (const auto& c : stages) {
    ok = ok && (c.converged || c.at_floor);
    rows.push_back({{"p", c.p},
                    {"J_p", c.jp},
                    {"normalized", c.normalized},
                    {"stretch", c.stretch},
                    {"max_stretch", c.max_stretch},
                    {"axis_deviation", c.axis_deviation},
                    {"iterations", c.iterations},
                    {"converged", c.converged},
                    {"at_floor", c.at_floor}});
  }
  json report = envelope("solve", cfg);
  report["target"] = s.target;
  report["exact_stretch"] = s.rig.b / s.rig.a;
  report["stages"] = rows;
  report["seconds"] = timer.seconds();
  const int code = ok ? kPass : kNumeric;
  write_report(opt, "solve", report, code);
  return code;
}

}  // namespace

int cmd_solve(const json& cfg, const RunOptions& opt) {
  SolveConfig s = parse_solve(cfg);
  s.opts.verbose = std::max(0, opt.verbose - 1);
  if (s.target_type == "cylinder") return solve_cylinder_cmd(cfg, s, opt);

  const Timer timer;
  const SurfaceGroupRep sigma = octagon_representation();
  const SurfaceGroupRep rho = parse_rep(s.target, "config.target");
  const FundamentalMesh mesh = build_octagon_mesh(sigma, s.level);
  fs::create_directories(opt.out);
  const fs::path ckpt_path = opt.out / "checkpoint.json";

  // resume after the last completed stage
  std::optional<EquivariantMap> init;
  std::vector<int> schedule = s.schedule;
  int resumed_from = 0;
  if (opt.resume && fs::exists(ckpt_path)) {
    int p_done = 0;
    try {
      init = io::checkpoint_from_json(io::read_json_file(ckpt_path.string()), mesh, rho, &p_done);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("checkpoint does not match the config: ") + e.what());
    }
    if (std::find(schedule.begin(), schedule.end(), p_done) == schedule.end()) {
      throw ConfigError("checkpoint stage p=" + std::to_string(p_done) + " is not in p_schedule");
    }
    schedule.erase(schedule.begin(), std::find(schedule.begin(), schedule.end(), p_done) + 1);
    resumed_from = p_done;
    if (opt.verbose) std::cerr << "resuming after p=" << p_done << "\n";
  }

  auto on_stage = [&](const SolveResult& r) {
    json stage = io::stage_summary(r);
    stage["relations"] = relations_json(relation_checks(mesh, r));
    if (r.v_current) {
      const ExtractedCocycle ex = extract_cocycle_from_current(mesh, *r.v_current);
      stage["v_cocycle"] = {{"closedness", ex.closedness},
                            {"tangency", ex.tangency},
                            {"trusted", ex.trusted},
                            {"handle_pairings", ex.handle_pairings}};
    }
    io::write_json_file((opt.out / ("stage_p" + std::to_string(r.p) + ".json")).string(), stage);
    if (s.write_density) {
      io::write_density_csv((opt.out / ("density_p" + std::to_string(r.p) + ".csv")).string(), mesh, r);
    }
    io::write_json_file(ckpt_path.string(), io::checkpoint_to_json(r, mesh.level));
    if (opt.verbose) {
      std::cerr << "p=" << r.p << " normalized " << r.normalized << " iterations " << r.iterations
                << (r.converged ? " converged" : (r.at_floor ? " at floor" : " NOT converged")) << "\n";
    }
  };
  if (!schedule.empty()) p_continuation(mesh, rho, schedule, s.opts, init, on_stage);

  // assemble the summary from the per-stage files (covers resumed stages)
  json stages = json::array();
  bool ok = true;
  for (int p : s.schedule) {
    const fs::path f = opt.out / ("stage_p" + std::to_string(p) + ".json");
    if (!fs::exists(f)) throw std::runtime_error("missing stage file " + f.string());
    json st = io::read_json_file(f.string());
    ok = ok && (st.at("converged").get<bool>() || st.at("at_floor").get<bool>());
    stages.push_back(std::move(st));
  }
  json report = envelope("solve", cfg);
  report["target"] = s.target;
  report["mesh"] = {{"level", mesh.level},
                    {"triangles", mesh.triangles.size()},
                    {"area", mesh.total_area()},
                    {"mesh_size", mesh.mesh_size()}};
  report["stages"] = stages;
  report["resumed_after_p"] = resumed_from;
  if (s.target_type == "twist" && s.kbound_length > 0) {
    const KBound kb = k_lower_bound(s.kbound_length, sigma, rho);
    report["k_lower_bound"] = {{"value", kb.value}, {"word", kb.best.str()}, {"max_length", s.kbound_length}};
  }
  report["seconds"] = timer.seconds();
  const int code = ok ? kPass : kNumeric;
  write_report(opt, "solve", report, code);
  return code;
}

// ---------------------------------------------------------------------------

int cmd_report(const json& cfg, const RunOptions& opt) {
  std::vector<fs::path> dirs = {opt.out};
  if (!cfg.is_null()) {
    ConfigReader r(cfg, "config");
    const json& extra = r.raw("dirs", json::array());
    if (!extra.is_array()) throw ConfigError("config.dirs: expected an array");
    for (const auto& d : extra) {
      if (!d.is_string()) throw ConfigError("config.dirs: expected strings");
      dirs.emplace_back(d.get<std::string>());
    }
    r.finish();
  }
  json entries = json::array();
  int worst = kPass;
  auto rank = [](int c) { return c == kNumeric ? 3 : c == kThreshold ? 2 : c == kConfig ? 1 : 0; };
  for (const auto& dir : dirs) {
    if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != "report.json") {
        files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      json j;
      try {
        j = io::read_json_file(f.string());
      } catch (const std::exception&) {
        continue;
      }
      if (!j.is_object() || !j.contains("command") || !j.contains("exit_code")) continue;
      const int code = j["exit_code"].get<int>();
      if (rank(code) > rank(worst)) worst = code;
      json e = {{"file", fs::relative(f, dir).string()},
                {"command", j["command"]},
                {"status", j.value("status", "")},
                {"config_hash", j.value("config_hash", "")},
                {"version", j.value("version", "")}};
      for (const char* key : {"max_rel_err", "max_diff", "k_lower_bound", "max_rel_err_duality", "message"}) {
        if (j.contains(key)) e[key] = j[key];
      }
      if (j.contains("stages") && j["stages"].is_array() && !j["stages"].empty()) {
        const json& last = j["stages"].back();
        e["final_p"] = last.value("p", 0);
        e["final_normalized"] = last.value("normalized", 0.0);
      }
      entries.push_back(std::move(e));
    }
  }
  json report = envelope("report", cfg.is_null() ? json::object() : cfg);
  report["entries"] = entries;
  fs::create_directories(opt.out);

  std::ofstream md(opt.out / "report.md");
  md << "| file | command | status | config hash | key value |\n|---|---|---|---|---|\n";
  for (const auto& e : entries) {
    std::string key;
    char buf[64];
    if (e.contains("max_rel_err")) {
      std::snprintf(buf, sizeof buf, "max rel err %.2e", e["max_rel_err"].get<double>());
      key = buf;
    } else if (e.contains("max_diff")) {
      std::snprintf(buf, sizeof buf, "max diff %.2e", e["max_diff"].get<double>());
      key = buf;
    } else if (e.contains("final_normalized")) {
      std::snprintf(buf, sizeof buf, "p=%d normalized %.6f", e["final_p"].get<int>(),
                    e["final_normalized"].get<double>());
      key = buf;
    } else if (e.contains("k_lower_bound") && e["k_lower_bound"].is_number()) {
      std::snprintf(buf, sizeof buf, "K_lb %.8f", e["k_lower_bound"].get<double>());
      key = buf;
    }
    md << "| " << e["file"].get<std::string>() << " | " << e["command"].get<std::string>() << " | "
       << e["status"].get<std::string>() << " | " << e["config_hash"].get<std::string>() << " | " << key
       << " |\n";
  }
  report["status"] = status_name(worst);
  report["exit_code"] = worst;
  io::write_json_file((opt.out / "report.json").string(), report);
  return worst;
}

}  // namespace stretchlab::cli
