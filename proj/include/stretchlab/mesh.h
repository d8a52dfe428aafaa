#pragma once

// Triangulated regular octagon (fundamental domain of the octagon
// representation) with its side pairings, and Lie-algebra-valued discrete
// 1-forms on it.
//
// Everything lives in one chart of the universal cover. A vertex on the
// boundary appears once per side it lies on; copies are related by the
// side pairings. Side s (0..7) has its midpoint in direction s*pi/4; the
// neighbouring chart across side s is g_s F with g_s = x_s for s < 4 and
// g_s = x_{s-4}^{-1} otherwise.

#include "stretchlab/cocycle.h"

#include <array>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

namespace stretchlab {

struct MeshEdge {
  int a = -1, b = -1;          // directed a -> b, a < b
  int left = -1, right = -1;   // triangles on either side (-1 outside)
  int side = -1;               // boundary side 0..7, -1 interior
  int partner = -1;            // paired edge on the opposite side
  bool partner_same_dir = true;  // partner.a is the image of a
  bool canonical = true;       // interior, or boundary on sides 4..7
};

class FundamentalMesh {
 public:
  std::uint64_t id = 0;
  int level = 0;
  SurfaceGroupRep sigma;

  std::vector<MinkVec> vertices;
  std::vector<std::array<int, 3>> triangles;  // positively oriented
  std::vector<MeshEdge> edges;
  std::vector<double> areas;                  // hyperbolic triangle areas

  // Vertex identification under the side pairings.
  std::vector<int> vertex_class;
  std::vector<int> class_rep;
  /// vertices[v] = sigma(vertex_word[v]) vertices[class_rep[vertex_class[v]]]
  std::vector<Word> vertex_word;
  /// (side, partner vertex on the paired side) with v = g_side partner.
  std::vector<std::vector<std::pair<int, int>>> vertex_partners;

  std::array<Word, 8> side_word;
  std::array<std::vector<int>, 8> side_edges;

  int num_classes() const { return static_cast<int>(class_rep.size()); }
  /// Edge index and orientation sign (+1 if stored as a -> b).
  std::pair<int, int> find_edge(int a, int b) const;
  double total_area() const;
  double min_angle() const;  // radians
  /// max ||g_s w - v|| over identified boundary vertex pairs.
  double pairing_defect() const;
  /// max edge length (hyperbolic).
  double mesh_size() const;

  friend FundamentalMesh build_octagon_mesh(const SurfaceGroupRep& sigma, int level);

 private:
  std::unordered_map<std::int64_t, int> edge_map_;
  void index_edges();
};

/// Regular octagon split into 8 triangles around the apex, refined `level`
/// times by geodesic midpoint subdivision (8 * 4^level triangles).
/// `sigma` must be the octagon representation.
FundamentalMesh build_octagon_mesh(const SurfaceGroupRep& sigma, int level);

/// Hyperbolic area pi - (sum of angles).
double triangle_area(const MinkVec& a, const MinkVec& b, const MinkVec& c);
double vertex_angle(const MinkVec& at, const MinkVec& b, const MinkVec& c);

enum class FormKind { kPrimal, kDual };

/// One Lie algebra value per edge. Primal: value on the directed edge
/// a -> b. Dual: value of the dual edge crossing a -> b from its right
/// triangle to its left triangle. The equivariant extension to other charts
/// uses Ad(transport(g)).
struct DiscreteOneForm {
  FormKind kind = FormKind::kPrimal;
  std::vector<LieAlg> values;
  SurfaceGroupRep transport;
  std::uint64_t mesh_id = 0;

  static DiscreteOneForm zero(const FundamentalMesh& mesh, FormKind kind,
                              const SurfaceGroupRep& transport);
};

/// Discrete dx x x with edge value (x_b - x_a) x normalize(x_a + x_b).
DiscreteOneForm maurer_cartan(const FundamentalMesh& mesh);

/// Primal form df for chart values f at the vertices.
DiscreteOneForm exact_form(const FundamentalMesh& mesh, const std::vector<LieAlg>& f,
                           const SurfaceGroupRep& transport);

/// Dual form from per-triangle half contributions: halves[t][i] is the
/// integral from the barycentre of triangle t to the midpoint of its edge
/// (v_i, v_{i+1}). Across boundary edges the outside half is the
/// transported half of the paired edge.
DiscreteOneForm assemble_dual(const FundamentalMesh& mesh,
                              const std::vector<std::array<LieAlg, 3>>& halves,
                              const SurfaceGroupRep& transport);

/// alpha(word) for the path from the base point to word.base (vertex for
/// primal forms, triangle for dual forms) through translated charts.
LieAlg loop_integral(const FundamentalMesh& mesh, const DiscreteOneForm& form,
                     const Word& word, int base = 0);

/// Cocycle over form.transport with generator values given by loop integrals.
Cocycle extract_cocycle(const FundamentalMesh& mesh, const DiscreteOneForm& form,
                        int base = 0);

/// Primal: max over triangles of |circulation| / sum |edge values|.
/// Dual: max over vertex classes of |transported sum around the vertex| /
/// sum of the norms of the terms.
double closedness_residual(const FundamentalMesh& mesh, const DiscreteOneForm& form);

/// 1/2 sum over triangles of the antisymmetrised cup product contracted with
/// the Killing form. Both forms must be primal on the same mesh.
double wedge_pair(const FundamentalMesh& mesh, const DiscreteOneForm& phi,
                  const DiscreteOneForm& psi);

/// Rotation generator about x: L(apex) = n_hat, L(g x) = Ad(g) L(x).
LieAlg rotation_generator(const MinkVec& x);

}  // namespace stretchlab
