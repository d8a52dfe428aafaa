#include "stretchlab/mesh.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>

namespace stretchlab {

namespace {

std::atomic<std::uint64_t> next_mesh_id{1};

std::int64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::int64_t>(a) << 32) | static_cast<std::int64_t>(b);
}

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) v = parent[v] = parent[parent[v]];
  return v;
}

// Letters x_k^{+-1} written as (side of the neighbouring chart).
std::vector<int> sides_of(const Word& w) {
  // a1 = x0, b1 = x1^-1, a2 = x2^-1 x3, b2 = x0 x1^-1 x2
  static const std::array<std::vector<int>, 4> expansion = {
      std::vector<int>{0}, std::vector<int>{5}, std::vector<int>{6, 3},
      std::vector<int>{0, 5, 2}};
  std::vector<int> out;
  for (const Letter& l : w.letters()) {
    const auto& e = expansion[l.gen];
    if (l.exp > 0) {
      out.insert(out.end(), e.begin(), e.end());
    } else {
      for (auto it = e.rbegin(); it != e.rend(); ++it) out.push_back((*it + 4) % 8);
    }
  }
  return out;
}

void check_form(const FundamentalMesh& mesh, const DiscreteOneForm& form) {
  if (form.mesh_id != mesh.id || form.values.size() != mesh.edges.size()) {
    throw std::invalid_argument("discrete form does not belong to this mesh");
  }
}

}  // namespace

double vertex_angle(const MinkVec& at, const MinkVec& b, const MinkVec& c) {
  const MinkVec u = log_map(at, b);
  const MinkVec v = log_map(at, c);
  const double nu = std::sqrt(std::max(0.0, mink_norm_sq(u)));
  const double nv = std::sqrt(std::max(0.0, mink_norm_sq(v)));
  if (nu == 0.0 || nv == 0.0) throw GeometryError("vertex_angle: degenerate triangle");
  return std::acos(std::clamp(mink_dot(u, v) / (nu * nv), -1.0, 1.0));
}

double triangle_area(const MinkVec& a, const MinkVec& b, const MinkVec& c) {
  return std::numbers::pi - vertex_angle(a, b, c) - vertex_angle(b, c, a) -
         vertex_angle(c, a, b);
}

std::pair<int, int> FundamentalMesh::find_edge(int a, int b) const {
  auto it = edge_map_.find(edge_key(a, b));
  if (it == edge_map_.end()) throw std::out_of_range("find_edge: no such edge");
  return {it->second, edges[it->second].a == a ? 1 : -1};
}

void FundamentalMesh::index_edges() {
  edges.clear();
  edge_map_.clear();
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    const auto& tri = triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int u = tri[i], v = tri[(i + 1) % 3];
      const std::int64_t key = edge_key(u, v);
      auto it = edge_map_.find(key);
      int idx;
      if (it == edge_map_.end()) {
        idx = static_cast<int>(edges.size());
        MeshEdge e;
        e.a = std::min(u, v);
        e.b = std::max(u, v);
        edges.push_back(e);
        edge_map_.emplace(key, idx);
      } else {
        idx = it->second;
      }
      // triangle lists u -> v counterclockwise: it is left of u -> v
      if (u < v) {
        edges[idx].left = t;
      } else {
        edges[idx].right = t;
      }
    }
  }
}

double FundamentalMesh::total_area() const {
  return std::accumulate(areas.begin(), areas.end(), 0.0);
}

double FundamentalMesh::min_angle() const {
  double m = std::numbers::pi;
  for (const auto& t : triangles) {
    for (int i = 0; i < 3; ++i) {
      m = std::min(m, vertex_angle(vertices[t[i]], vertices[t[(i + 1) % 3]],
                                   vertices[t[(i + 2) % 3]]));
    }
  }
  return m;
}

double FundamentalMesh::pairing_defect() const {
  double d = 0;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    for (const auto& [side, w] : vertex_partners[v]) {
      d = std::max(d, (evaluate(side_word[side], sigma) * vertices[w] - vertices[v]).norm());
    }
  }
  return d;
}

double FundamentalMesh::mesh_size() const {
  double h = 0;
  for (const auto& e : edges) h = std::max(h, hyperbolic_distance(vertices[e.a], vertices[e.b]));
  return h;
}

FundamentalMesh build_octagon_mesh(const SurfaceGroupRep& sigma, int level) {
  if (level < 0 || level > 7) throw std::invalid_argument("build_octagon_mesh: level out of range");
  sigma.validate();
  FundamentalMesh mesh;
  mesh.id = next_mesh_id++;
  mesh.level = level;
  mesh.sigma = sigma;

  // Corners of the regular octagon with interior angles pi/4.
  const double cosh_r = 3.0 + 2.0 * std::sqrt(2.0);
  const double sinh_r = std::sqrt(cosh_r * cosh_r - 1.0);
  mesh.vertices.push_back(apex());
  for (int j = 0; j < 8; ++j) {
    const double th = (2 * j + 1) * std::numbers::pi / 8.0;
    mesh.vertices.emplace_back(sinh_r * std::cos(th), sinh_r * std::sin(th), cosh_r);
  }
  for (int k = 0; k < 8; ++k) {
    mesh.triangles.push_back({0, 1 + (k + 7) % 8, 1 + k});
  }

  for (int l = 0; l < level; ++l) {
    std::map<std::int64_t, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = edge_key(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const int idx = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(normalize_hyperboloid(mesh.vertices[a] + mesh.vertices[b]));
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
      const int ab = midpoint(t[0], t[1]);
      const int bc = midpoint(t[1], t[2]);
      const int ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(next);
  }

  for (const auto& t : mesh.triangles) {
    Mat3 m;
    m << mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]];
    if (!(m.determinant() > 0.0)) throw GeometryError("build_octagon_mesh: bad orientation");
    mesh.areas.push_back(triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                       mesh.vertices[t[2]]));
  }
  mesh.index_edges();

  const auto& xw = octagon_side_words();
  for (int s = 0; s < 8; ++s) mesh.side_word[s] = s < 4 ? xw[s] : xw[s - 4].inverse();

  // Boundary edges and their sides.
  const int nv = static_cast<int>(mesh.vertices.size());
  std::array<std::vector<int>, 8> side_vertices;
  for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e) {
    auto& edge = mesh.edges[e];
    if (edge.left >= 0 && edge.right >= 0) continue;
    const MinkVec m = mesh.vertices[edge.a] + mesh.vertices[edge.b];
    double ang = std::atan2(m(1), m(0));
    if (ang < 0) ang += 2.0 * std::numbers::pi;
    const int s = static_cast<int>(std::lround(ang / (std::numbers::pi / 4.0))) % 8;
    edge.side = s;
    edge.canonical = s >= 4;
    mesh.side_edges[s].push_back(e);
    side_vertices[s].push_back(edge.a);
    side_vertices[s].push_back(edge.b);
  }
  for (auto& sv : side_vertices) {
    std::sort(sv.begin(), sv.end());
    sv.erase(std::unique(sv.begin(), sv.end()), sv.end());
  }

  // Partners: v on side s equals g_s w for w on side s+4 (mod 8).
  mesh.vertex_partners.assign(nv, {});
  std::vector<int> image(nv, -1);
  for (int s = 0; s < 8; ++s) {
    const int p = (s + 4) % 8;
    const GroupElem ginv = evaluate(mesh.side_word[s], sigma).inverse();
    for (int v : side_vertices[s]) {
      const MinkVec target = ginv * mesh.vertices[v];
      int best = -1;
      double best_d = 1e-8 * std::max(1.0, target.norm());
      for (int w : side_vertices[p]) {
        const double d = (mesh.vertices[w] - target).norm();
        if (d < best_d) {
          best_d = d;
          best = w;
        }
      }
      if (best < 0) throw GeometryError("build_octagon_mesh: side pairing mismatch");
      mesh.vertex_partners[v].push_back({s, best});
      image[v] = best;
    }
    for (int e : mesh.side_edges[s]) {
      auto& edge = mesh.edges[e];
      const int wa = [&] {
        for (auto [ss, w] : mesh.vertex_partners[edge.a]) if (ss == s) return w;
        return -1;
      }();
      const int wb = [&] {
        for (auto [ss, w] : mesh.vertex_partners[edge.b]) if (ss == s) return w;
        return -1;
      }();
      const auto [pe, sign] = mesh.find_edge(wa, wb);
      if (mesh.edges[pe].side != p) throw GeometryError("build_octagon_mesh: partner edge not on paired side");
      edge.partner = pe;
      edge.partner_same_dir = sign > 0;
    }
  }

  // Vertex classes and the words relating each copy to its representative.
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  for (int v = 0; v < nv; ++v) {
    for (auto [s, w] : mesh.vertex_partners[v]) {
      const int a = find_root(parent, v), b = find_root(parent, w);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  mesh.vertex_class.assign(nv, -1);
  mesh.vertex_word.assign(nv, Word());
  for (int v = 0; v < nv; ++v) {
    if (find_root(parent, v) != v) continue;
    const int c = static_cast<int>(mesh.class_rep.size());
    mesh.class_rep.push_back(v);
    std::queue<int> q;
    q.push(v);
    mesh.vertex_class[v] = c;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (auto [s, w] : mesh.vertex_partners[u]) {
        if (mesh.vertex_class[w] >= 0) continue;
        // u = g_s w  =>  h_w = g_s^{-1} h_u
        mesh.vertex_class[w] = c;
        mesh.vertex_word[w] = mesh.side_word[s].inverse() * mesh.vertex_word[u];
        q.push(w);
      }
    }
  }
  return mesh;
}

DiscreteOneForm DiscreteOneForm::zero(const FundamentalMesh& mesh, FormKind kind,
                                      const SurfaceGroupRep& transport) {
  DiscreteOneForm f;
  f.kind = kind;
  f.values.assign(mesh.edges.size(), LieAlg());
  f.transport = transport;
  f.mesh_id = mesh.id;
  return f;
}

DiscreteOneForm maurer_cartan(const FundamentalMesh& mesh) {
  DiscreteOneForm f = DiscreteOneForm::zero(mesh, FormKind::kPrimal, mesh.sigma);
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const MinkVec& xa = mesh.vertices[mesh.edges[e].a];
    const MinkVec& xb = mesh.vertices[mesh.edges[e].b];
    f.values[e] = cross(xb - xa, normalize_hyperboloid(xa + xb));
  }
  return f;
}

DiscreteOneForm exact_form(const FundamentalMesh& mesh, const std::vector<LieAlg>& values,
                           const SurfaceGroupRep& transport) {
  if (values.size() != mesh.vertices.size()) {
    throw std::invalid_argument("exact_form: one value per vertex required");
  }
  DiscreteOneForm f = DiscreteOneForm::zero(mesh, FormKind::kPrimal, transport);
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    f.values[e] = values[mesh.edges[e].b] - values[mesh.edges[e].a];
  }
  return f;
}

DiscreteOneForm assemble_dual(const FundamentalMesh& mesh,
                              const std::vector<std::array<LieAlg, 3>>& halves,
                              const SurfaceGroupRep& transport) {
  if (halves.size() != mesh.triangles.size()) {
    throw std::invalid_argument("assemble_dual: one entry per triangle required");
  }
  // Outward half of triangle t across edge e.
  auto half = [&](int t, int e) -> const LieAlg& {
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int u = tri[i], v = tri[(i + 1) % 3];
      if (std::min(u, v) == mesh.edges[e].a && std::max(u, v) == mesh.edges[e].b) {
        return halves[t][i];
      }
    }
    throw std::logic_error("assemble_dual: edge not in triangle");
  };
  DiscreteOneForm f = DiscreteOneForm::zero(mesh, FormKind::kDual, transport);
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const MeshEdge& edge = mesh.edges[e];
    LieAlg right, left;
    if (edge.side < 0) {
      right = half(edge.right, static_cast<int>(e));
      left = half(edge.left, static_cast<int>(e));
    } else {
      const MeshEdge& pe = mesh.edges[edge.partner];
      const int tin_p = pe.left >= 0 ? pe.left : pe.right;
      const LieAlg outside =
          adjoint(evaluate(mesh.side_word[edge.side], transport), half(tin_p, edge.partner));
      if (edge.right >= 0) {
        right = half(edge.right, static_cast<int>(e));
        left = outside;
      } else {
        right = outside;
        left = half(edge.left, static_cast<int>(e));
      }
    }
    // right barycentre -> midpoint -> left barycentre
    f.values[e] = right - left;
  }
  return f;
}

namespace {

// BFS tree over mesh vertices (primal) or triangles (dual) from `root`;
// potential[n] = integral of the form from the root to n along the tree.
std::vector<LieAlg> tree_potential(const FundamentalMesh& mesh, const DiscreteOneForm& form,
                                   int root) {
  const bool primal = form.kind == FormKind::kPrimal;
  const std::size_t n = primal ? mesh.vertices.size() : mesh.triangles.size();
  if (root < 0 || static_cast<std::size_t>(root) >= n) {
    throw std::out_of_range("loop_integral: base index out of range");
  }
  // adjacency: (neighbour, edge, sign of traversal)
  std::vector<std::vector<std::array<int, 3>>> adj(n);
  for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e) {
    const auto& ed = mesh.edges[e];
    if (primal) {
      adj[ed.a].push_back({ed.b, e, 1});
      adj[ed.b].push_back({ed.a, e, -1});
    } else if (ed.left >= 0 && ed.right >= 0) {
      adj[ed.right].push_back({ed.left, e, 1});
      adj[ed.left].push_back({ed.right, e, -1});
    }
  }
  std::vector<LieAlg> pot(n);
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(root);
  seen[root] = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& [v, e, sign] : adj[u]) {
      if (seen[v]) continue;
      seen[v] = 1;
      pot[v] = pot[u] + static_cast<double>(sign) * form.values[e];
      q.push(v);
    }
  }
  return pot;
}

// Entry in the chart across side s: a vertex (primal) or boundary edge (dual)
// close to the middle of the side.
int side_anchor(const FundamentalMesh& mesh, int s) {
  const double th = s * std::numbers::pi / 4.0;
  const MinkVec dir(std::cos(th), std::sin(th), 0.0);
  int best = -1;
  double best_v = -1e300;
  for (int e : mesh.side_edges[s]) {
    const MinkVec m = mesh.vertices[mesh.edges[e].a] + mesh.vertices[mesh.edges[e].b];
    const double v = m.dot(dir) / m(2);
    if (v > best_v) {
      best_v = v;
      best = e;
    }
  }
  return best;
}

}  // namespace

LieAlg loop_integral(const FundamentalMesh& mesh, const DiscreteOneForm& form,
                     const Word& word, int base) {
  check_form(mesh, form);
  const auto pot = tree_potential(mesh, form, base);
  std::array<LieAlg, 8> seg;
  std::array<bool, 8> have{};
  std::array<GroupElem, 8> step;
  for (int s = 0; s < 8; ++s) step[s] = evaluate(mesh.side_word[s], form.transport);

  auto segment = [&](int s) -> const LieAlg& {
    if (have[s]) return seg[s];
    const int e = side_anchor(mesh, s);
    const MeshEdge& edge = mesh.edges[e];
    if (form.kind == FormKind::kPrimal) {
      const int w = edge.a;
      int wp = -1;
      for (auto [ss, u] : mesh.vertex_partners[w]) if (ss == s) wp = u;
      // base -> w in F, then w' -> base in g_s F
      seg[s] = pot[w] - adjoint(step[s], pot[wp]);
    } else {
      const MeshEdge& pe = mesh.edges[edge.partner];
      const int tin = edge.left >= 0 ? edge.left : edge.right;
      const int tin_p = pe.left >= 0 ? pe.left : pe.right;
      const double out_sign = tin == edge.right ? 1.0 : -1.0;
      seg[s] = pot[tin] + out_sign * form.values[e] - adjoint(step[s], pot[tin_p]);
    }
    have[s] = true;
    return seg[s];
  };

  LieAlg acc;
  GroupElem prefix;
  for (int s : sides_of(word)) {
    acc += adjoint(prefix, segment(s));
    prefix *= step[s];
  }
  return acc;
}

Cocycle extract_cocycle(const FundamentalMesh& mesh, const DiscreteOneForm& form, int base) {
  Cocycle c = Cocycle::zero(form.transport);
  for (int g = 0; g < 4; ++g) c.values[g] = loop_integral(mesh, form, Word::generator(g), base);
  return c;
}

double closedness_residual(const FundamentalMesh& mesh, const DiscreteOneForm& form) {
  check_form(mesh, form);
  double worst = 0;
  constexpr double tiny = 1e-300;
  if (form.kind == FormKind::kPrimal) {
    for (const auto& t : mesh.triangles) {
      LieAlg circ;
      double norms = 0;
      for (int i = 0; i < 3; ++i) {
        const auto [e, sign] = mesh.find_edge(t[i], t[(i + 1) % 3]);
        circ += static_cast<double>(sign) * form.values[e];
        norms += form.values[e].norm();
      }
      if (norms > tiny) worst = std::max(worst, circ.norm() / norms);
    }
    return worst;
  }
  const int nc = mesh.num_classes();
  std::vector<LieAlg> sum(nc);
  std::vector<double> norms(nc, 0.0);
  std::vector<GroupElem> back(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    back[v] = evaluate(mesh.vertex_word[v], form.transport).inverse();
  }
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const MeshEdge& edge = mesh.edges[e];
    if (!edge.canonical) continue;
    // counterclockwise around a crosses a -> b from right to left
    const LieAlg ta = adjoint(back[edge.a], form.values[e]);
    const LieAlg tb = adjoint(back[edge.b], form.values[e]);
    sum[mesh.vertex_class[edge.a]] += ta;
    norms[mesh.vertex_class[edge.a]] += ta.norm();
    sum[mesh.vertex_class[edge.b]] -= tb;
    norms[mesh.vertex_class[edge.b]] += tb.norm();
  }
  for (int c = 0; c < nc; ++c) {
    if (norms[c] > tiny) worst = std::max(worst, sum[c].norm() / norms[c]);
  }
  return worst;
}

double wedge_pair(const FundamentalMesh& mesh, const DiscreteOneForm& phi,
                  const DiscreteOneForm& psi) {
  check_form(mesh, phi);
  check_form(mesh, psi);
  if (phi.kind != FormKind::kPrimal || psi.kind != FormKind::kPrimal) {
    throw std::invalid_argument("wedge_pair: primal forms required");
  }
  static const int perms[6][4] = {{0, 1, 2, 1},  {1, 2, 0, 1},  {2, 0, 1, 1},
                                  {0, 2, 1, -1}, {2, 1, 0, -1}, {1, 0, 2, -1}};
  auto raw = [&](const DiscreteOneForm& f, const DiscreteOneForm& g) {
    double total = 0;
    for (const auto& t : mesh.triangles) {
      auto val = [&](const DiscreteOneForm& form, int i, int j) {
        const auto [e, sign] = mesh.find_edge(t[i], t[j]);
        return static_cast<double>(sign) * form.values[e];
      };
      double s = 0;
      for (const auto& p : perms) {
        s += p[3] * killing(val(f, p[0], p[1]), val(g, p[1], p[2]));
      }
      total += s / 6.0;
    }
    return total;
  };
  return 0.5 * 0.5 * (raw(phi, psi) - raw(psi, phi));
}

LieAlg rotation_generator(const MinkVec& x) {
  return adjoint(boost_to(x), std_n_hat());
}

}  // namespace stretchlab
