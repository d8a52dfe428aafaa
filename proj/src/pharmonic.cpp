#include "stretchlab/pharmonic.h"

#include "stretchlab/earthquake.h"
#include "stretchlab/parallel.h"

#include <unsupported/Eigen/AutoDiff>

#include <cmath>
#include <iostream>
#include <numbers>

namespace stretchlab {

namespace {

using AD = Eigen::AutoDiffScalar<Eigen::Matrix<double, 9, 1>>;

template <typename S>
using V3 = Eigen::Matrix<S, 3, 1>;

template <typename S>
S mdot(const V3<S>& a, const V3<S>& b) {
  return a(0) * b(0) + a(1) * b(1) - a(2) * b(2);
}

// acosh(1+q) / sqrt(q (q+2)): the log-map scale factor at Minkowski
// "distance" q = cosh d - 1.
double log_factor(double q) {
  q = std::max(q, 0.0);
  if (q < 1e-6) return 1.0 - q / 3.0 + 2.0 * q * q / 15.0;
  return std::acosh(1.0 + q) / std::sqrt(q * (q + 2.0));
}

double log_factor_deriv(double q) {
  q = std::max(q, 0.0);
  if (q < 1e-6) return -1.0 / 3.0 + 4.0 * q / 15.0;
  const double s = std::sqrt(q * (q + 2.0));
  return (1.0 - std::acosh(1.0 + q) * (q + 1.0) / s) / (s * s);
}

AD log_factor(const AD& q) {
  return AD(log_factor(q.value()), q.derivatives() * log_factor_deriv(q.value()));
}

double trq_power_impl(double t, double delta, int p) {
  const int m = p / 2;
  double prev = 2.0, cur = t;
  if (m == 0) return prev;
  for (int k = 2; k <= m; ++k) {
    const double next = t * cur - delta * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

template <typename S>
S trq_power_t(const S& t, const S& delta, int p) {
  const int m = p / 2;
  S prev = S(2.0), cur = t;
  for (int k = 2; k <= m; ++k) {
    S next = t * cur - delta * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

template <typename S>
struct TargetT {
  V3<S> center;
  V3<S> f1, f2;
  Eigen::Matrix<S, 2, 2> d;
};

template <typename S>
TargetT<S> target_impl(const Mat2& e_inv, const V3<S>& u0, const V3<S>& u1, const V3<S>& u2) {
  using std::sqrt;
  TargetT<S> out;
  const V3<S> sum = u0 + u1 + u2;
  const S n2 = -mdot<S>(sum, sum);
  out.center = sum / sqrt(n2);
  const V3<S>& d = out.center;
  const S s = S(1.0) / (S(1.0) + d(2));
  out.f1 << S(1.0) + d(0) * d(0) * s, d(0) * d(1) * s, d(0);
  out.f2 << d(0) * d(1) * s, S(1.0) + d(1) * d(1) * s, d(1);
  Eigen::Matrix<S, 2, 3> eta;
  const V3<S>* u[3] = {&u0, &u1, &u2};
  for (int i = 0; i < 3; ++i) {
    const S du = mdot<S>(d, *u[i]);
    const S q = -du - S(1.0);
    const V3<S> w = *u[i] + du * d;
    const S f = log_factor(q);
    eta(0, i) = f * mdot<S>(out.f1, w);
    eta(1, i) = f * mdot<S>(out.f2, w);
  }
  Eigen::Matrix<S, 2, 2> F;
  F.col(0) = eta.col(1) - eta.col(0);
  F.col(1) = eta.col(2) - eta.col(0);
  out.d = F * e_inv.cast<S>();
  return out;
}

const Mat2& rot90() {
  static const Mat2 j = (Mat2() << 0.0, -1.0, 1.0, 0.0).finished();
  return j;
}

MinkVec embed(const Eigen::Matrix<double, 3, 2>& frame, const Eigen::Vector2d& w) {
  return frame * w;
}

// Everything the energy needs about the mesh, evaluated once.
struct EnergyContext {
  std::vector<DomainTriangle> dom;
  std::vector<Mat3> transport;  // rho(h_v)
  std::vector<int> cls;
};

EnergyContext make_context(const FundamentalMesh& mesh, const SurfaceGroupRep& rho) {
  EnergyContext ctx;
  ctx.dom = domain_geometry(mesh);
  ctx.transport.resize(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    ctx.transport[v] = evaluate(mesh.vertex_word[v], rho).m;
  }
  ctx.cls = mesh.vertex_class;
  return ctx;
}

double energy_eval(const FundamentalMesh& mesh, const EnergyContext& ctx,
                   const std::vector<MinkVec>& cv, int p, std::vector<Eigen::Vector3d>* grad) {
  const std::size_t nv = mesh.vertices.size();
  std::vector<MinkVec> chart(nv);
  for (std::size_t v = 0; v < nv; ++v) chart[v] = ctx.transport[v] * cv[ctx.cls[v]];
  const std::size_t nt = mesh.triangles.size();
  std::vector<double> e(nt);
  std::vector<Eigen::Matrix<double, 9, 1>> g(grad ? nt : 0);
  parallel_for(nt, [&](std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const auto& dom = ctx.dom[t];
    if (!grad) {
      const auto tt = target_impl<double>(dom.e_inv, chart[tri[0]], chart[tri[1]], chart[tri[2]]);
      e[t] = dom.area * trq_power_impl(tt.d.squaredNorm(), std::pow(tt.d.determinant(), 2), p);
      return;
    }
    V3<AD> u[3];
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) {
        u[i](k) = AD(chart[tri[i]](k), 9, 3 * i + k);
      }
    }
    const auto tt = target_impl<AD>(dom.e_inv, u[0], u[1], u[2]);
    const AD det = tt.d.determinant();
    const AD val = trq_power_t<AD>(tt.d.squaredNorm(), det * det, p) * dom.area;
    e[t] = val.value();
    g[t] = val.derivatives();
  });
  double total = 0;
  for (double x : e) total += x;
  if (grad) {
    grad->assign(cv.size(), Eigen::Vector3d::Zero());
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& tri = mesh.triangles[t];
      for (int i = 0; i < 3; ++i) {
        const int v = tri[i];
        (*grad)[ctx.cls[v]] += ctx.transport[v].transpose() * g[t].segment<3>(3 * i);
      }
    }
  }
  return total;
}

}  // namespace

double trq_power(const Mat2& d, int p) {
  if (p < 2 || p % 2) throw std::invalid_argument("trq_power: p must be an even integer >= 2");
  return trq_power_impl(d.squaredNorm(), std::pow(d.determinant(), 2), p);
}

std::pair<double, double> singular_values(const Mat2& d) {
  Eigen::JacobiSVD<Mat2> svd(d);
  return {svd.singularValues()(0), svd.singularValues()(1)};
}

EquivariantMap EquivariantMap::identity(const FundamentalMesh& mesh, const SurfaceGroupRep& rho) {
  EquivariantMap m;
  m.rho = rho;
  m.mesh_id = mesh.id;
  for (int c = 0; c < mesh.num_classes(); ++c) {
    m.class_values.push_back(mesh.vertices[mesh.class_rep[c]]);
  }
  return m;
}

std::vector<MinkVec> EquivariantMap::chart(const FundamentalMesh& mesh) const {
  if (mesh_id != mesh.id || class_values.size() != static_cast<std::size_t>(mesh.num_classes())) {
    throw std::invalid_argument("EquivariantMap: built for a different mesh");
  }
  std::vector<MinkVec> out(mesh.vertices.size());
  for (std::size_t v = 0; v < out.size(); ++v) {
    out[v] = evaluate(mesh.vertex_word[v], rho) * class_values[mesh.vertex_class[v]];
  }
  return out;
}

double EquivariantMap::equivariance_defect(const FundamentalMesh& mesh) const {
  const auto u = chart(mesh);
  double d = 0;
  for (std::size_t v = 0; v < u.size(); ++v) {
    for (const auto& [s, w] : mesh.vertex_partners[v]) {
      d = std::max(d, (evaluate(mesh.side_word[s], rho) * u[w] - u[v]).norm() / u[v].norm());
    }
  }
  for (const auto& x : u) d = std::max(d, std::abs(mink_norm_sq(x) + 1.0));
  return d;
}

std::vector<DomainTriangle> domain_geometry(const FundamentalMesh& mesh) {
  std::vector<DomainTriangle> out(mesh.triangles.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    DomainTriangle& d = out[t];
    const MinkVec& x0 = mesh.vertices[tri[0]];
    const MinkVec& x1 = mesh.vertices[tri[1]];
    const MinkVec& x2 = mesh.vertices[tri[2]];
    d.center = normalize_hyperboloid(x0 + x1 + x2);
    d.frame = boost_to(d.center).m.leftCols<2>();
    for (int i = 0; i < 3; ++i) {
      const MinkVec l = log_map(d.center, mesh.vertices[tri[i]]);
      d.coords[i] = Eigen::Vector2d(mink_dot(d.frame.col(0), l), mink_dot(d.frame.col(1), l));
    }
    Mat2 e;
    e.col(0) = d.coords[1] - d.coords[0];
    e.col(1) = d.coords[2] - d.coords[0];
    if (!(e.determinant() > 0)) throw GeometryError("domain_geometry: degenerate triangle");
    d.e_inv = e.inverse();
    d.area = mesh.areas[t];
  }
  return out;
}

TargetTriangle target_differential(const DomainTriangle& dom, const MinkVec& u0,
                                   const MinkVec& u1, const MinkVec& u2) {
  const auto tt = target_impl<double>(dom.e_inv, u0, u1, u2);
  TargetTriangle out;
  out.center = tt.center;
  out.frame.col(0) = tt.f1;
  out.frame.col(1) = tt.f2;
  out.d = tt.d;
  return out;
}

double energy_Jp(const FundamentalMesh& mesh, const EquivariantMap& u, int p) {
  if (p < 2 || p % 2) throw std::invalid_argument("energy_Jp: p must be an even integer >= 2");
  u.chart(mesh);  // validates the mesh
  const EnergyContext ctx = make_context(mesh, u.rho);
  return energy_eval(mesh, ctx, u.class_values, p, nullptr);
}

double energy_gradient(const FundamentalMesh& mesh, const std::vector<DomainTriangle>& dom,
                       const EquivariantMap& u, int p, std::vector<Eigen::Vector3d>* grad) {
  if (p < 2 || p % 2) throw std::invalid_argument("energy_gradient: p must be an even integer >= 2");
  u.chart(mesh);
  EnergyContext ctx = make_context(mesh, u.rho);
  ctx.dom = dom;
  return energy_eval(mesh, ctx, u.class_values, p, grad);
}

MinkVec riemannian_gradient(const MinkVec& x, const Eigen::Vector3d& g) {
  const MinkVec eg = eSharp() * g;
  return eg + g.dot(x) * x;
}

OptimResult riemannian_minimize(const Objective& f, std::vector<MinkVec> x,
                                const SolveOptions& opts) {
  OptimResult res;
  const std::size_t n = x.size();
  std::vector<Eigen::Vector3d> g;
  double fx = f(x, &g);
  if (!std::isfinite(fx)) throw SolverError("riemannian_minimize: non-finite initial objective");

  using Field = std::vector<MinkVec>;
  auto dot = [&](const Field& a, const Field& b) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += mink_dot(a[i], b[i]);
    return s;
  };
  auto rgrad = [&](const Field& pts, const std::vector<Eigen::Vector3d>& eg, Field& out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = riemannian_gradient(pts[i], eg[i]);
  };
  auto max_norm = [&](const Field& v) {
    double m = 0;
    for (const auto& w : v) m = std::max(m, std::sqrt(std::max(0.0, mink_dot(w, w))));
    return m;
  };
  // L-BFGS memory; pairs are carried to the new tangent spaces by projection.
  constexpr int kMemory = 8;
  std::vector<Field> mem_s, mem_y;
  std::vector<double> mem_rho;
  auto transport = [&](const Field& pts) {
    for (auto* mem : {&mem_s, &mem_y}) {
      for (Field& v : *mem) {
        for (std::size_t i = 0; i < n; ++i) v[i] = project_tangent(pts[i], v[i]);
      }
    }
  };

  Field G(n), D(n), xn(n), Gn(n);
  std::vector<Eigen::Vector3d> gn;
  rgrad(x, g, G);
  double gnorm = std::sqrt(std::max(0.0, dot(G, G)));
  res.history.push_back(fx);
  int stagnant = 0;
  double stagnant_ref = 0;
  int it = 0;
  // f is only resolved to a few ulps; decreases below this count as noise.
  auto noise = [](double v) { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(v)); };
  for (; it < opts.max_iter; ++it) {
    if (gnorm <= opts.tol) {
      res.converged = true;
      break;
    }
    // two-loop recursion
    D = G;
    const int m = static_cast<int>(mem_s.size());
    std::vector<double> coef(m);
    for (int k = m - 1; k >= 0; --k) {
      coef[k] = mem_rho[k] * dot(mem_s[k], D);
      for (std::size_t i = 0; i < n; ++i) D[i] -= coef[k] * mem_y[k][i];
    }
    if (m > 0) {
      const double gamma = 1.0 / (mem_rho[m - 1] * dot(mem_y[m - 1], mem_y[m - 1]));
      for (auto& v : D) v *= gamma;
    }
    for (int k = 0; k < m; ++k) {
      const double beta = mem_rho[k] * dot(mem_y[k], D);
      for (std::size_t i = 0; i < n; ++i) D[i] += (coef[k] - beta) * mem_s[k][i];
    }
    for (auto& v : D) v = -v;
    double slope = dot(D, G);
    if (!(slope < 0)) {
      mem_s.clear();
      mem_y.clear();
      mem_rho.clear();
      for (std::size_t i = 0; i < n; ++i) D[i] = -G[i];
      slope = -gnorm * gnorm;
    }
    if (m == 0) {
      const double scale = std::min(1.0, opts.max_step / std::max(max_norm(D), 1e-300));
      for (auto& v : D) v *= scale;
      slope *= scale;
    }
    double alpha = std::min(1.0, opts.max_step / std::max(max_norm(D), 1e-300));

    bool accepted = false;
    double fn = fx;
    double gnorm_n = gnorm;
    for (int k = 0; k < 50; ++k) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = normalize_hyperboloid(exp_map(x[i], alpha * D[i]));
      fn = f(xn, &gn);
      if (std::isfinite(fn)) {
        if (fn <= fx + opts.armijo * alpha * slope) {
          accepted = true;
        } else if (fn <= fx + noise(fx)) {
          // below round-off: accept only on a gradient decrease
          rgrad(xn, gn, Gn);
          gnorm_n = std::sqrt(std::max(0.0, dot(Gn, Gn)));
          accepted = gnorm_n < gnorm;
          if (accepted) break;
        }
        if (accepted) break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!mem_s.empty()) {
        // stale curvature pairs; retry from steepest descent
        mem_s.clear();
        mem_y.clear();
        mem_rho.clear();
        continue;
      }
      res.line_search_failed = true;
      // no resolvable decrease along the exact negative gradient
      res.at_floor = gnorm <= 1e3 * opts.tol;
      break;
    }
    rgrad(xn, gn, Gn);
    gnorm_n = std::sqrt(std::max(0.0, dot(Gn, Gn)));

    // new pair at xn
    Field sv(n), yv(n);
    for (std::size_t i = 0; i < n; ++i) {
      sv[i] = project_tangent(xn[i], alpha * D[i]);
      yv[i] = Gn[i] - project_tangent(xn[i], G[i]);
    }
    transport(xn);
    const double sy = dot(sv, yv);
    if (sy > 1e-12 * std::sqrt(dot(sv, sv) * dot(yv, yv))) {
      mem_s.push_back(std::move(sv));
      mem_y.push_back(std::move(yv));
      mem_rho.push_back(1.0 / sy);
      if (static_cast<int>(mem_s.size()) > kMemory) {
        mem_s.erase(mem_s.begin());
        mem_y.erase(mem_y.begin());
        mem_rho.erase(mem_rho.begin());
      }
    }
    const double change = std::abs(fx - fn);
    std::swap(x, xn);
    std::swap(G, Gn);
    g.swap(gn);
    fx = fn;
    gnorm = gnorm_n;
    res.history.push_back(fx);
    if (opts.verbose && it % opts.verbose == 0) {
      std::cerr << "  iter " << it << " f " << fx << " |grad| " << gnorm << "\n";
    }
    // Stagnation: the objective no longer moves and the gradient has not
    // halved since the objective stopped moving.
    if (change > opts.ftol * std::max(1.0, std::abs(fx))) {
      stagnant = 0;
    } else if (stagnant == 0 || gnorm < 0.5 * stagnant_ref) {
      stagnant = 1;
      stagnant_ref = gnorm;
    } else if (++stagnant >= 20) {
      break;
    }
  }
  res.points = std::move(x);
  res.value = fx;
  res.grad_norm = gnorm;
  res.iterations = it;
  if (gnorm <= opts.tol) res.converged = true;
  if (!res.converged && !res.at_floor && it < opts.max_iter) {
    // Stopped early without meeting tol: at the round-off floor if the last
    // steps no longer change the objective measurably.
    const auto& h = res.history;
    const std::size_t w = std::min<std::size_t>(h.size() - 1, 20);
    res.at_floor = std::abs(h[h.size() - 1 - w] - h.back()) <= 1e-11 * std::max(1.0, std::abs(h.back()));
  }
  return res;
}

SolveResult minimize(const FundamentalMesh& mesh, const SurfaceGroupRep& rho, int p,
                     const EquivariantMap& init, const SolveOptions& opts) {
  if (p < 2 || p % 2) throw std::invalid_argument("minimize: p must be an even integer >= 2");
  if (!same_rep(init.rho, rho)) throw std::invalid_argument("minimize: initial map uses another rho");
  init.chart(mesh);
  const EnergyContext ctx = make_context(mesh, rho);
  Objective obj = [&](const std::vector<MinkVec>& cv, std::vector<Eigen::Vector3d>* grad) {
    const double j = energy_eval(mesh, ctx, cv, p, grad);
    if (!(j > 0) || !std::isfinite(j)) return std::numeric_limits<double>::infinity();
    if (grad) for (auto& v : *grad) v /= j;
    return std::log(j);
  };
  OptimResult opt = riemannian_minimize(obj, init.class_values, opts);

  SolveResult r;
  r.map = init;
  r.map.class_values = opt.points;
  r.p = p;
  r.jp = std::exp(opt.value);
  r.area = mesh.total_area();
  r.normalized = std::pow(r.jp / r.area, 1.0 / p);
  r.kappa = std::pow(r.jp, -1.0 / p);
  r.grad_norm = opt.grad_norm;
  r.iterations = opt.iterations;
  r.converged = opt.converged;
  r.line_search_failed = opt.line_search_failed;
  r.at_floor = opt.at_floor;
  r.history = std::move(opt.history);
  for (double& h : r.history) h = std::exp(h);
  r.equivariance_defect = r.map.equivariance_defect(mesh);
  return r;
}

std::vector<SolveResult> p_continuation(const FundamentalMesh& mesh, const SurfaceGroupRep& rho,
                                        const std::vector<int>& schedule,
                                        const SolveOptions& opts,
                                        std::optional<EquivariantMap> init,
                                        const std::function<void(const SolveResult&)>& on_stage) {
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i] <= schedule[i - 1]) {
      throw std::invalid_argument("p_continuation: schedule must be increasing");
    }
  }
  EquivariantMap current = init ? *init : EquivariantMap::identity(mesh, rho);
  std::vector<SolveResult> out;
  for (int p : schedule) {
    SolveResult r = minimize(mesh, rho, p, current, opts);
    density_and_currents(mesh, r);
    current = r.map;
    if (on_stage) on_stage(r);
    out.push_back(std::move(r));
  }
  return out;
}

void density_and_currents(const FundamentalMesh& mesh, SolveResult& r) {
  const auto dom = domain_geometry(mesh);
  const auto u = r.map.chart(mesh);
  const std::size_t nt = mesh.triangles.size();
  const int p = r.p;
  r.s1.assign(nt, 0);
  r.s2.assign(nt, 0);
  r.density.assign(nt, 0);
  r.u_norm.assign(nt, Mat2::Zero());
  r.s_tensor.assign(nt, Mat2::Zero());
  r.t_tensor.assign(nt, Mat2::Zero());
  r.domain_center.assign(nt, MinkVec::Zero());
  r.target_center.assign(nt, MinkVec::Zero());
  std::vector<std::array<LieAlg, 3>> vh(nt), wh(nt);
  double jp = 0;
  std::vector<TargetTriangle> tts(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    tts[t] = target_differential(dom[t], u[tri[0]], u[tri[1]], u[tri[2]]);
    jp += dom[t].area * trq_power(tts[t].d, p);
  }
  r.jp = jp;
  r.kappa = std::pow(jp, -1.0 / p);
  r.normalized = std::pow(jp / r.area, 1.0 / p);
  r.density_mass = 0;
  for (std::size_t t = 0; t < nt; ++t) {
    const TargetTriangle& tt = tts[t];
    const DomainTriangle& dt = dom[t];
    const auto [a, b] = singular_values(tt.d);
    r.s1[t] = a;
    r.s2[t] = b;
    const Mat2 un = r.kappa * tt.d;
    const double dens = trq_power(un, p);
    Eigen::SelfAdjointEigenSolver<Mat2> eig(un * un.transpose());
    const Eigen::Vector2d lam = eig.eigenvalues().cwiseMax(0.0);
    Eigen::Vector2d powl;
    for (int k = 0; k < 2; ++k) powl(k) = std::pow(lam(k), (p - 2) / 2);
    const Mat2 s = eig.eigenvectors() * powl.asDiagonal() * eig.eigenvectors().transpose() * un;
    const Mat2 tq = s.transpose() * un - (dens / p) * Mat2::Identity();
    r.u_norm[t] = un;
    r.s_tensor[t] = s;
    r.t_tensor[t] = tq;
    r.density[t] = dens;
    r.domain_center[t] = dt.center;
    r.target_center[t] = tt.center;
    r.density_mass += dt.area * dens;

    const Eigen::Vector2d mean = (dt.coords[0] + dt.coords[1] + dt.coords[2]) / 3.0;
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d w = 0.5 * (dt.coords[i] + dt.coords[(i + 1) % 3]) - mean;
      const Eigen::Vector2d jw = rot90() * w;
      vh[t][i] = cross(embed(tt.frame, -s * jw), tt.center);
      wh[t][i] = cross(embed(dt.frame, -tq * jw), dt.center);
    }
  }
  r.v_current = assemble_dual(mesh, vh, r.map.rho);
  r.w_current = assemble_dual(mesh, wh, mesh.sigma);
  r.closed_v = closedness_residual(mesh, *r.v_current);
  r.closed_w = closedness_residual(mesh, *r.w_current);
}

RelationReport relation_checks(const FundamentalMesh& mesh, const SolveResult& r) {
  if (r.density.size() != mesh.triangles.size()) {
    throw std::invalid_argument("relation_checks: run density_and_currents first");
  }
  const auto dom = domain_geometry(mesh);
  const auto u = r.map.chart(mesh);
  RelationReport rep;
  double gap_num = 0, gap_den = 0, top = 0;
  for (double s : r.s1) top = std::max(top, s);
  double conc = 0, total = 0;
  const Eigen::Vector2d e[2] = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const DomainTriangle& dt = dom[t];
    const auto& tri = mesh.triangles[t];
    const TargetTriangle tt = target_differential(dt, u[tri[0]], u[tri[1]], u[tri[2]]);
    const Mat2& s = r.s_tensor[t];
    const Mat2& un = r.u_norm[t];
    const Mat2& tq = r.t_tensor[t];
    const double dens = r.density[t];
    auto v_form = [&](const Eigen::Vector2d& w) {
      return cross(embed(tt.frame, -s * (rot90() * w)), tt.center);
    };
    auto star_v = [&](const Eigen::Vector2d& w) { return -1.0 * v_form(rot90() * w); };
    auto du_x_u = [&](const Eigen::Vector2d& w) {
      return cross(embed(tt.frame, un * w), tt.center);
    };
    auto w_form = [&](const Eigen::Vector2d& w) {
      return cross(embed(dt.frame, -tq * (rot90() * w)), dt.center);
    };
    auto omega = [&](const Eigen::Vector2d& w) { return cross(embed(dt.frame, w), dt.center); };
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double rhs = killing(star_v(e[i]), du_x_u(e[j]));
        const double lhs = -2.0 * tq(i, j);
        rep.a_literal = std::max(rep.a_literal, std::abs(lhs - rhs));
        const double trace_term = i == j ? 2.0 * dens / r.p : 0.0;
        rep.a_trace = std::max(rep.a_trace, std::abs(lhs - trace_term - rhs));
      }
    }
    const double wedge = killing(omega(e[0]), w_form(e[1])) - killing(omega(e[1]), w_form(e[0]));
    gap_num += dt.area * std::abs(wedge - 2.0 * dens);
    gap_den += dt.area * 2.0 * dens;
    total += dt.area * dens;
    if (r.s1[t] >= 0.9 * top) conc += dt.area * dens;
  }
  rep.b_gap = gap_den > 0 ? gap_num / gap_den : 0.0;
  rep.c_fraction = total > 0 ? conc / total : 0.0;
  return rep;
}

ExtractedCocycle extract_cocycle_from_current(const FundamentalMesh& mesh,
                                              const DiscreteOneForm& current,
                                              double trust_threshold) {
  ExtractedCocycle out{extract_cocycle(mesh, current), 0, 0, false, {}};
  out.closedness = closedness_residual(mesh, current);
  out.tangency = relator_tangency(out.alpha);
  out.trusted = out.closedness <= trust_threshold;
  for (int g = 0; g < 4; ++g) {
    const WeightedMulticurve mc{{{Word::generator(g), 1.0}}};
    out.handle_pairings[g] = pair(standard_measure(mc, current.transport), out.alpha);
  }
  return out;
}

// ---------------------------------------------------------------------------

double cylinder_energy(const CylinderRig& rig, const std::vector<MinkVec>& pts, int p,
                       std::vector<Eigen::Vector3d>* grad) {
  const int n = static_cast<int>(pts.size());
  const double h = rig.a / n;
  const GroupElem period = exp_so21(rig.b * std_b());
  if (grad) grad->assign(n, Eigen::Vector3d::Zero());
  double total = 0;
  for (int i = 0; i < n; ++i) {
    const bool wrap = i + 1 == n;
    const MinkVec& x = pts[i];
    const MinkVec y = wrap ? MinkVec(period * pts[0]) : pts[i + 1];
    const double c = std::max(1.0, -mink_dot(x, y));
    const double d = std::acosh(c);
    total += h * std::pow(d / h, p);
    if (grad) {
      const double sh = std::sqrt(std::max(c * c - 1.0, 1e-300));
      // dE/dd * dd/dc, with dc/dx = -e y and dc/dy = -e x
      const double coef = p * std::pow(d / h, p - 1) / sh;
      (*grad)[i] += -coef * (eSharp() * y);
      const Eigen::Vector3d gy = -coef * (eSharp() * x);
      if (wrap) {
        (*grad)[0] += period.m.transpose() * gy;
      } else {
        (*grad)[i + 1] += gy;
      }
    }
  }
  return total;
}

std::vector<MinkVec> cylinder_initial(const CylinderRig& rig, double offset) {
  std::vector<MinkVec> pts;
  for (int i = 0; i < rig.n; ++i) {
    const double phase = 2.0 * std::numbers::pi * i / rig.n;
    const double s = rig.b * i / rig.n + 0.1 * std::sin(phase);
    const MinkVec off = exp_map(apex(), MinkVec(offset * (1.0 + 0.5 * std::sin(phase)), 0, 0));
    pts.push_back(exp_so21(s * std_b()) * off);
  }
  return pts;
}

namespace {

CylinderResult summarize_cylinder(const CylinderRig& rig, std::vector<MinkVec> pts, int p) {
  CylinderResult r;
  r.p = p;
  const int n = static_cast<int>(pts.size());
  const double h = rig.a / n;
  const GroupElem period = exp_so21(rig.b * std_b());
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const MinkVec y = i + 1 == n ? MinkVec(period * pts[0]) : pts[i + 1];
    const double d = hyperbolic_distance(pts[i], y);
    sum += d;
    r.max_stretch = std::max(r.max_stretch, d / h);
    r.axis_deviation = std::max(r.axis_deviation, std::asinh(std::abs(pts[i](0))));
  }
  r.stretch = sum / rig.a;
  r.jp = cylinder_energy(rig, pts, p);
  r.normalized = std::pow(r.jp / rig.a, 1.0 / p);
  r.points = std::move(pts);
  return r;
}

}  // namespace

CylinderResult solve_cylinder(const CylinderRig& rig, int p, std::vector<MinkVec> init,
                              const SolveOptions& opts) {
  if (p < 2) throw std::invalid_argument("solve_cylinder: p < 2");
  if (static_cast<int>(init.size()) != rig.n) throw std::invalid_argument("solve_cylinder: wrong size");
  Objective obj = [&](const std::vector<MinkVec>& pts, std::vector<Eigen::Vector3d>* grad) {
    const double j = cylinder_energy(rig, pts, p, grad);
    if (grad) for (auto& v : *grad) v /= j;
    return std::log(j);
  };
  OptimResult opt = riemannian_minimize(obj, std::move(init), opts);
  CylinderResult r = summarize_cylinder(rig, std::move(opt.points), p);
  r.iterations = opt.iterations;
  r.converged = opt.converged;
  r.at_floor = opt.at_floor;
  return r;
}

std::vector<CylinderResult> cylinder_continuation(const CylinderRig& rig,
                                                  const std::vector<int>& schedule,
                                                  const SolveOptions& opts) {
  std::vector<CylinderResult> out;
  std::vector<MinkVec> pts = cylinder_initial(rig);
  for (int p : schedule) {
    out.push_back(solve_cylinder(rig, p, pts, opts));
    pts = out.back().points;
  }
  return out;
}

}  // namespace stretchlab
