#pragma once

// Discrete equivariant p-Schatten harmonic maps from the octagon surface
// (sigma) to a second hyperbolic structure (rho), with p-continuation,
// normalized densities, Noether currents and the finite-p identities.
//
// Discretization: the map is stored per vertex class; the chart value at a
// vertex v is rho(h_v) U[class(v)], so equivariance holds by construction.
// On each triangle the differential D is the linear map between the
// log-map coordinates of the domain triangle (at its projected barycentre)
// and of the image triangle (at the projected barycentre of the images),
// in the orthonormal frames given by the canonical boosts. p is an even
// integer, so s1^p + s2^p is a polynomial in the entries of D^T D.

#include "stretchlab/mesh.h"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stretchlab {

using Mat2 = Eigen::Matrix2d;

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// s1^p + s2^p for even p via the power-sum recurrence in t = tr(D^T D)
/// and delta = det(D)^2.
double trq_power(const Mat2& d, int p);
/// Singular values s1 >= s2 >= 0.
std::pair<double, double> singular_values(const Mat2& d);

struct EquivariantMap {
  SurfaceGroupRep rho;
  std::vector<MinkVec> class_values;
  std::uint64_t mesh_id = 0;

  /// Identity-like initial map: each class sent to its representative point.
  static EquivariantMap identity(const FundamentalMesh& mesh, const SurfaceGroupRep& rho);
  /// Chart values at every mesh vertex.
  std::vector<MinkVec> chart(const FundamentalMesh& mesh) const;
  /// max ||rho(g_s) u(w) - u(v)|| / ||u(v)|| over identified vertex pairs
  /// (relative: coordinate round-off grows like cosh of the distance).
  double equivariance_defect(const FundamentalMesh& mesh) const;
};

/// Per-triangle domain geometry (independent of the map).
struct DomainTriangle {
  MinkVec center;                           // projected barycentre
  Eigen::Matrix<double, 3, 2> frame;        // orthonormal tangent frame at center
  std::array<Eigen::Vector2d, 3> coords;    // log-map coordinates of the corners
  Mat2 e_inv;                               // inverse of [xi1 - xi0, xi2 - xi0]
  double area = 0;
};

std::vector<DomainTriangle> domain_geometry(const FundamentalMesh& mesh);

struct TargetTriangle {
  MinkVec center;
  Eigen::Matrix<double, 3, 2> frame;
  Mat2 d;  // differential in the (domain, target) frames
};

TargetTriangle target_differential(const DomainTriangle& dom, const MinkVec& u0,
                                   const MinkVec& u1, const MinkVec& u2);

/// J_p = sum_T area_T (s1^p + s2^p).
double energy_Jp(const FundamentalMesh& mesh, const EquivariantMap& u, int p);

/// J_p and its Euclidean gradient with respect to the class values.
double energy_gradient(const FundamentalMesh& mesh, const std::vector<DomainTriangle>& dom,
                       const EquivariantMap& u, int p, std::vector<Eigen::Vector3d>* grad);

// ---------------------------------------------------------------------------
// Riemannian optimizer on a product of hyperboloids.

struct SolveOptions {
  int max_iter = 3000;
  double tol = 1e-7;        // Riemannian gradient norm of the objective
  double ftol = 1e-13;      // relative objective change (stagnation stop)
  double armijo = 1e-4;
  double max_step = 0.25;   // cap on the largest point displacement per step
  int verbose = 0;
};

struct OptimResult {
  std::vector<MinkVec> points;
  double value = 0;
  double grad_norm = 0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  bool at_floor = false;  // stopped above tol at the round-off floor of the objective
  std::vector<double> history;
};

/// Objective returns f(points) and writes the Euclidean gradient.
using Objective =
    std::function<double(const std::vector<MinkVec>&, std::vector<Eigen::Vector3d>*)>;

/// Limited-memory BFGS on the product of hyperboloids: Armijo backtracking
/// (steps whose decrease is below round-off are accepted only if the
/// gradient shrinks), the hyperboloid exponential map as retraction and
/// tangent projection as vector transport.
OptimResult riemannian_minimize(const Objective& f, std::vector<MinkVec> x0,
                                const SolveOptions& opts);

/// Riemannian gradient at x of a Euclidean gradient g: projection of e g
/// onto the tangent plane.
MinkVec riemannian_gradient(const MinkVec& x, const Eigen::Vector3d& g);

// ---------------------------------------------------------------------------

struct SolveResult {
  EquivariantMap map;
  int p = 2;
  double jp = 0;
  double area = 0;
  double normalized = 0;  // (J_p / Area)^{1/p}
  double kappa = 0;       // J_p^{-1/p}
  double grad_norm = 0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  bool at_floor = false;
  double equivariance_defect = 0;
  std::vector<double> history;

  // filled by density_and_currents
  std::vector<double> s1, s2, density;
  std::vector<Mat2> u_norm, s_tensor, t_tensor;
  std::vector<MinkVec> domain_center, target_center;
  std::optional<DiscreteOneForm> v_current, w_current;
  double closed_v = 0, closed_w = 0;
  double density_mass = 0;  // sum area * density
};

SolveResult minimize(const FundamentalMesh& mesh, const SurfaceGroupRep& rho, int p,
                     const EquivariantMap& init, const SolveOptions& opts = {});

/// Warm-started continuation over the schedule; each stage is enriched
/// with densities and currents.
std::vector<SolveResult> p_continuation(
    const FundamentalMesh& mesh, const SurfaceGroupRep& rho,
    const std::vector<int>& schedule = {2, 4, 8, 16, 32, 64}, const SolveOptions& opts = {},
    std::optional<EquivariantMap> init = std::nullopt,
    const std::function<void(const SolveResult&)>& on_stage = nullptr);

/// kappa_p normalization, |S_{p-1}| density, S, T, and the currents
/// V_q = *(S x u) (transport rho) and W_q = *(T x id) (transport sigma).
void density_and_currents(const FundamentalMesh& mesh, SolveResult& r);

struct RelationReport {
  double a_literal = 0;    // max |-2T - (*V (x) du x u)^#|
  double a_trace = 0;      // same with the trace term (2/p)|S| g moved across
  double b_gap = 0;        // relative L1 gap of *(w_mc ^ W)^# against 2|S|
  double c_fraction = 0;   // density mass on triangles with s1 >= 0.9 max s1
};

RelationReport relation_checks(const FundamentalMesh& mesh, const SolveResult& r);

struct ExtractedCocycle {
  Cocycle alpha;
  double closedness = 0;
  double tangency = 0;
  bool trusted = false;
  std::array<double, 4> handle_pairings{};  // against the handle curves of rho
};

ExtractedCocycle extract_cocycle_from_current(const FundamentalMesh& mesh,
                                              const DiscreteOneForm& current,
                                              double trust_threshold = 0.1);

// ---------------------------------------------------------------------------
// Cylinder rig: periodic 1D domain of length a (group generated by e^{aB}),
// target generated by e^{bB}. The best map is the linear map onto the axis
// with stretch b/a.

struct CylinderRig {
  double a = 2.0;
  double b = 3.0;
  int n = 48;  // vertices per period
};

struct CylinderResult {
  std::vector<MinkVec> points;
  int p = 2;
  double jp = 0;
  double normalized = 0;  // (J_p / a)^{1/p}
  double stretch = 0;     // mean segment stretch d_H / h
  double max_stretch = 0;
  double axis_deviation = 0;  // max distance from the axis
  int iterations = 0;
  bool converged = false;
  bool at_floor = false;
};

double cylinder_energy(const CylinderRig& rig, const std::vector<MinkVec>& pts, int p,
                       std::vector<Eigen::Vector3d>* grad = nullptr);
/// Initial points: the linear map pushed off the axis by a smooth bump.
std::vector<MinkVec> cylinder_initial(const CylinderRig& rig, double offset = 0.3);
CylinderResult solve_cylinder(const CylinderRig& rig, int p, std::vector<MinkVec> init,
                              const SolveOptions& opts = {});
std::vector<CylinderResult> cylinder_continuation(const CylinderRig& rig,
                                                  const std::vector<int>& schedule,
                                                  const SolveOptions& opts = {});

}  // namespace stretchlab
