#include "stretchlab/io.h"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace stretchlab::io {

json mat_to_json(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

Mat3 mat_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3x3 array");
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_array() || j[i].size() != 3) throw std::invalid_argument("expected a 3x3 array");
    for (int k = 0; k < 3; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

json rep_to_json(const SurfaceGroupRep& rep) {
  json g = json::array();
  for (const auto& x : rep.gens) g.push_back(mat_to_json(x.m));
  return {{"generators", g}, {"label", rep.label}};
}

SurfaceGroupRep rep_from_json(const json& j) {
  if (!j.contains("generators") || j["generators"].size() != 4) {
    throw std::invalid_argument("representation: expected 4 generators");
  }
  SurfaceGroupRep rep;
  for (int i = 0; i < 4; ++i) rep.gens[i] = GroupElem(mat_from_json(j["generators"][i]));
  rep.label = j.value("label", "sigma");
  rep.validate();
  return rep;
}

json cocycle_to_json(const Cocycle& c, const std::string& rep_ref) {
  json v = json::array();
  for (const auto& a : c.values) v.push_back(mat_to_json(a.m));
  json out = {{"values", v}};
  if (rep_ref.empty()) {
    out["rep"] = rep_to_json(c.base);
  } else {
    out["rep"] = rep_ref;
  }
  return out;
}

Cocycle cocycle_from_json(const json& j, const SurfaceGroupRep& base) {
  if (!j.contains("values") || j["values"].size() != 4) {
    throw std::invalid_argument("cocycle: expected 4 values");
  }
  Cocycle c = Cocycle::zero(base);
  for (int i = 0; i < 4; ++i) {
    const Mat3 m = mat_from_json(j["values"][i]);
    if (!is_lie_algebra(m, 1e-9)) throw std::invalid_argument("cocycle: value not in so(2,1)");
    c.values[i] = LieAlg(m);
  }
  return c;
}

json multicurve_to_json(const WeightedMulticurve& mc) {
  json out = json::array();
  for (const auto& c : mc.curves) out.push_back({{"word", c.word.str()}, {"weight", c.weight}});
  return out;
}

WeightedMulticurve multicurve_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("multicurve: expected an array");
  WeightedMulticurve mc;
  for (const auto& e : j) {
    mc.curves.push_back({Word::parse(e.at("word").get<std::string>()), e.value("weight", 1.0)});
  }
  return mc;
}

json measure_to_json(const LieValuedMeasure& m) {
  json atoms = json::array();
  for (const auto& a : m.atoms) {
    atoms.push_back({{"word", a.word.str()},
                     {"matrix", mat_to_json(a.b.m)},
                     {"weight", a.weight},
                     {"length", a.length}});
  }
  return {{"atoms", atoms}, {"mass", mass(m)}};
}

json mesh_to_json(const FundamentalMesh& mesh) {
  json v = json::array(), t = json::array(), pairings = json::array();
  for (const auto& x : mesh.vertices) v.push_back({x(0), x(1), x(2)});
  for (const auto& tri : mesh.triangles) t.push_back({tri[0], tri[1], tri[2]});
  for (int s = 0; s < 8; ++s) {
    json edges = json::array();
    for (int e : mesh.side_edges[s]) {
      edges.push_back({{"edge", {mesh.edges[e].a, mesh.edges[e].b}},
                       {"partner", {mesh.edges[mesh.edges[e].partner].a,
                                    mesh.edges[mesh.edges[e].partner].b}}});
    }
    pairings.push_back({{"side", s},
                        {"word", mesh.side_word[s].str()},
                        {"matrix", mat_to_json(evaluate(mesh.side_word[s], mesh.sigma).m)},
                        {"edges", edges}});
  }
  return {{"level", mesh.level}, {"vertices", v}, {"triangles", t}, {"pairings", pairings}};
}

json stage_summary(const SolveResult& r) {
  json s = {{"p", r.p},
            {"J_p", r.jp},
            {"area", r.area},
            {"normalized", r.normalized},
            {"kappa", r.kappa},
            {"grad_norm", r.grad_norm},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"line_search_failed", r.line_search_failed},
            {"at_floor", r.at_floor},
            {"equivariance_defect", r.equivariance_defect},
            {"density_mass", r.density_mass},
            {"closedness_V", r.closed_v},
            {"closedness_W", r.closed_w}};
  if (!r.s1.empty()) {
    s["max_s1"] = *std::max_element(r.s1.begin(), r.s1.end());
  }
  return s;
}

void write_density_csv(const std::string& path, const FundamentalMesh& mesh,
                       const SolveResult& r) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "id,area,s1,s2,density\n" << std::setprecision(17);
  for (std::size_t t = 0; t < r.density.size(); ++t) {
    f << t << ',' << mesh.areas[t] << ',' << r.s1[t] << ',' << r.s2[t] << ',' << r.density[t]
      << '\n';
  }
}

json checkpoint_to_json(const SolveResult& r, int level) {
  json pts = json::array();
  for (const auto& x : r.map.class_values) pts.push_back({x(0), x(1), x(2)});
  return {{"p", r.p}, {"level", level}, {"rho", rep_to_json(r.map.rho)}, {"class_values", pts}};
}

EquivariantMap checkpoint_from_json(const json& j, const FundamentalMesh& mesh,
                                    const SurfaceGroupRep& rho, int* p) {
  if (j.at("level").get<int>() != mesh.level) {
    throw std::invalid_argument("checkpoint: mesh level mismatch");
  }
  if (!same_rep(rep_from_json(j.at("rho")), rho, 1e-12)) {
    throw std::invalid_argument("checkpoint: target representation mismatch");
  }
  EquivariantMap m = EquivariantMap::identity(mesh, rho);
  const auto& pts = j.at("class_values");
  if (pts.size() != m.class_values.size()) throw std::invalid_argument("checkpoint: size mismatch");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const MinkVec x(pts[i][0].get<double>(), pts[i][1].get<double>(), pts[i][2].get<double>());
    if (!on_hyperboloid(x, 1e-8)) throw std::invalid_argument("checkpoint: point off the hyperboloid");
    m.class_values[i] = normalize_hyperboloid(x);
  }
  if (p) *p = j.at("p").get<int>();
  return m;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return json::parse(f);
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << '\n';
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace stretchlab::io
