#pragma once

#include "phmink/ring_mesh.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <memory>

namespace phmink {

struct SolverConfig {
  double p = 2.0;
  double eps0 = 1e-2;         // initial regularization, relative to data scale
  double eps_min = 1e-8;      // final regularization, relative to data scale
  double picard_tol = 1e-7;   // relative H1 increment
  int max_picard = 400;
  double damping_floor = 1e-3;

  void validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw SolveError("SolverConfig: p must be in (1, inf)");
    if (!(eps_min > 0.0)) throw SolveError("SolverConfig: eps_min must be positive");
  }
};

struct SolverStats {
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> energy_history;
  std::vector<double> residual_history;
  std::vector<double> eps_history;
};

namespace detail {

/// Precomputed P1 element geometry: constant basis gradients and areas.
struct FemGeometry {
  std::vector<Eigen::Matrix<double, 2, 3>> grad_basis;
  std::vector<double> area;

  explicit FemGeometry(const SimplicialMesh& mesh) {
    grad_basis.reserve(mesh.simplices.size());
    area.reserve(mesh.simplices.size());
    for (const auto& t : mesh.simplices) {
      const Vec2 a = mesh.nodes[t[0]], b = mesh.nodes[t[1]], c = mesh.nodes[t[2]];
      const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
      if (!(det > 0)) throw MeshError("FemGeometry: inverted simplex");
      Eigen::Matrix<double, 2, 3> G;
      // grad of barycentric basis: perpendicular of opposite edge / (2A)
      G.col(0) = Vec2(b.y() - c.y(), c.x() - b.x()) / det;
      G.col(1) = Vec2(c.y() - a.y(), a.x() - c.x()) / det;
      G.col(2) = Vec2(a.y() - b.y(), b.x() - a.x()) / det;
      grad_basis.push_back(G);
      area.push_back(0.5 * det);
    }
  }
};

/// Uniform-grid point locator over the mesh elements.
class PointLocator {
 public:
  explicit PointLocator(const SimplicialMesh& mesh) : mesh_(&mesh) {
    lo_ = mesh.nodes.front();
    hi_ = lo_;
    for (const Vec2& n : mesh.nodes) {
      lo_ = lo_.cwiseMin(n);
      hi_ = hi_.cwiseMax(n);
    }
    const double target = std::max(mesh.h, 1e-12);
    nx_ = std::max(1, static_cast<int>((hi_.x() - lo_.x()) / target));
    ny_ = std::max(1, static_cast<int>((hi_.y() - lo_.y()) / target));
    nx_ = std::min(nx_, 2048);
    ny_ = std::min(ny_, 2048);
    cells_.resize(static_cast<size_t>(nx_) * ny_);
    for (size_t e = 0; e < mesh.simplices.size(); ++e) {
      const auto& t = mesh.simplices[e];
      Vec2 elo = mesh.nodes[t[0]], ehi = elo;
      for (int k = 1; k < 3; ++k) {
        elo = elo.cwiseMin(mesh.nodes[t[k]]);
        ehi = ehi.cwiseMax(mesh.nodes[t[k]]);
      }
      const auto [i0, j0] = cellOf(elo);
      const auto [i1, j1] = cellOf(ehi);
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j) cells_[idx(i, j)].push_back(static_cast<int>(e));
    }
  }

  /// Containing element and barycentric coordinates; nullopt if outside.
  std::optional<std::pair<int, Eigen::Vector3d>> locate(const Vec2& x,
                                                        double tol = 1e-9) const {
    const auto [i, j] = cellOf(x);
    for (int e : cells_[idx(i, j)]) {
      const auto bc = barycentric(e, x);
      if (bc.minCoeff() >= -tol) return std::make_pair(e, bc);
    }
    // Tolerant second pass over neighboring cells (points on cell borders).
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        const int ii = std::clamp(i + di, 0, nx_ - 1), jj = std::clamp(j + dj, 0, ny_ - 1);
        for (int e : cells_[idx(ii, jj)]) {
          const auto bc = barycentric(e, x);
          if (bc.minCoeff() >= -1e-6) return std::make_pair(e, bc);
        }
      }
    }
    return std::nullopt;
  }

 private:
  std::pair<int, int> cellOf(const Vec2& x) const {
    const int i = std::clamp(
        static_cast<int>((x.x() - lo_.x()) / std::max(hi_.x() - lo_.x(), 1e-300) * nx_), 0,
        nx_ - 1);
    const int j = std::clamp(
        static_cast<int>((x.y() - lo_.y()) / std::max(hi_.y() - lo_.y(), 1e-300) * ny_), 0,
        ny_ - 1);
    return {i, j};
  }
  size_t idx(int i, int j) const { return static_cast<size_t>(j) * nx_ + i; }
  Eigen::Vector3d barycentric(int e, const Vec2& x) const {
    const auto& t = mesh_->simplices[e];
    const Vec2 a = mesh_->nodes[t[0]], b = mesh_->nodes[t[1]], c = mesh_->nodes[t[2]];
    const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    Eigen::Vector3d bc;
    bc[1] = ((x - a).x() * (c - a).y() - (x - a).y() * (c - a).x()) / det;
    bc[2] = ((b - a).x() * (x - a).y() - (b - a).y() * (x - a).x()) / det;
    bc[0] = 1.0 - bc[1] - bc[2];
    return bc;
  }
  const SimplicialMesh* mesh_;
  Vec2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

}  // namespace detail

/// Discrete p-harmonic field on a ring mesh: nodal P1 values with per-element
/// constant gradients.  Immutable after the solve.
struct PHarmSolution {
  std::shared_ptr<const SimplicialMesh> mesh;
  ConvexRing ring;
  Vec nodal_values;
  std::vector<Vec2> element_gradients;
  double p = 2.0;
  double eps_reg = 0.0;
  double data_scale = 1.0;  // applied normalization factor, if any
  SolverStats stats;
  std::shared_ptr<const detail::PointLocator> locator;

  /// Barycentric interpolation at x; throws if x is outside the meshed ring.
  double evaluate(const Vec2& x) const {
    const auto hit = locator->locate(x);
    if (!hit) throw SolveError("evaluate: point outside the meshed ring");
    const auto& [e, bc] = *hit;
    const auto& t = mesh->simplices[e];
    return bc[0] * nodal_values[t[0]] + bc[1] * nodal_values[t[1]] + bc[2] * nodal_values[t[2]];
  }
};

struct BoundaryFlux {
  int boundary_index;      // into mesh.boundary
  int facet;               // outer facet id
  double length;
  double normal_gradient;  // |<grad u, nu>| on the adjacent element
  double tangential_residual;
};

namespace detail {

inline double regularizedEnergy(const FemGeometry& geom, const std::vector<Vec2>& grads,
                                double p, double eps) {
  double E = 0.0;
  for (size_t e = 0; e < grads.size(); ++e) {
    E += geom.area[e] * std::pow(grads[e].squaredNorm() + eps * eps, p / 2.0) / p;
  }
  return E;
}

inline void elementGradients(const SimplicialMesh& mesh, const FemGeometry& geom, const Vec& u,
                             std::vector<Vec2>& out) {
  out.resize(mesh.simplices.size());
  for (size_t e = 0; e < mesh.simplices.size(); ++e) {
    const auto& t = mesh.simplices[e];
    out[e] = geom.grad_basis[e].col(0) * u[t[0]] + geom.grad_basis[e].col(1) * u[t[1]] +
             geom.grad_basis[e].col(2) * u[t[2]];
  }
}

}  // namespace detail

/// Solves the Dirichlet problem for the regularized p-Laplacian on the ring
/// mesh: zero data on the outer boundary, `inner_data` on the inner circle.
/// Damped Picard (Kacanov) iteration on the weights (|grad u|^2 +
/// eps^2)^{(p-2)/2} with eps-continuation.
inline PHarmSolution solveDirichlet(const ConvexRing& ring, const SimplicialMesh& mesh,
                                    const std::function<double(const Vec2&)>& inner_data,
                                    const SolverConfig& cfg) {
  cfg.validate();
  const int N = static_cast<int>(mesh.nodes.size());
  detail::FemGeometry geom(mesh);

  // Dirichlet values: 0 on outer nodes, data on inner nodes; free elsewhere.
  Vec fixed = Vec::Zero(N);
  std::vector<char> is_fixed(N, 0);
  double data_max = 0.0;
  for (int i = 0; i < N; ++i) {
    if (mesh.on_outer[i]) {
      is_fixed[i] = 1;
      fixed[i] = 0.0;
    } else if (mesh.on_inner[i]) {
      is_fixed[i] = 1;
      fixed[i] = inner_data(mesh.nodes[i]);
      if (!(std::isfinite(fixed[i]))) throw SolveError("solveDirichlet: non-finite inner data");
      data_max = std::max(data_max, std::abs(fixed[i]));
    }
  }
  std::vector<int> free_of(N, -1);
  std::vector<int> node_of;
  for (int i = 0; i < N; ++i) {
    if (!is_fixed[i]) {
      free_of[i] = static_cast<int>(node_of.size());
      node_of.push_back(i);
    }
  }
  const int nf = static_cast<int>(node_of.size());

  double width = 0.0;
  {
    double apothem = std::numeric_limits<double>::infinity();
    for (const auto& f : ring.outer.facets) {
      const auto& hs = ring.outer.halfspaces[f.halfspace];
      apothem = std::min(apothem, hs.offset - hs.normal.dot(ring.inner_center));
    }
    width = apothem - ring.margin_inner_radius;
  }
  const double grad_scale = std::max(data_max / std::max(width, 1e-300), 1e-300);

  Eigen::SparseMatrix<double> A(nf, nf);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;

  // Assembles and factors the weighted stiffness matrix.  With rhs_free ==
  // nullptr it solves the Dirichlet problem for the stored boundary data
  // (Picard step); otherwise it solves A x = rhs_free with zero Dirichlet
  // values (Newton correction).
  auto weightedSolve = [&](const std::vector<Eigen::Matrix2d>& W, const Vec* rhs_free) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(mesh.simplices.size() * 9);
    Vec rhs = rhs_free ? *rhs_free : Vec::Zero(nf);
    for (size_t e = 0; e < mesh.simplices.size(); ++e) {
      const auto& t = mesh.simplices[e];
      const auto& G = geom.grad_basis[e];
      const Eigen::Matrix2d S = geom.area[e] * W[e];
      for (int a = 0; a < 3; ++a) {
        if (free_of[t[a]] < 0) continue;
        for (int b = 0; b < 3; ++b) {
          const double kab = G.col(a).dot(S * G.col(b));
          if (free_of[t[b]] >= 0) {
            trips.emplace_back(free_of[t[a]], free_of[t[b]], kab);
          } else if (!rhs_free) {
            rhs[free_of[t[a]]] -= kab * fixed[t[b]];
          }
        }
      }
    }
    A.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed) {
      ldlt.analyzePattern(A);
      analyzed = true;
    }
    ldlt.factorize(A);
    if (ldlt.info() != Eigen::Success) throw SolveError("solveDirichlet: factorization failed");
    const Vec xf = ldlt.solve(rhs);
    Vec x = rhs_free ? Vec(Vec::Zero(N)) : fixed;
    for (int k = 0; k < nf; ++k) x[node_of[k]] = xf[k];
    return x;
  };

  SolverStats stats;
  std::vector<Vec2> grads;
  double eps = cfg.eps0 * grad_scale;
  const double eps_min = cfg.eps_min * grad_scale;
  const std::vector<Eigen::Matrix2d> unit_w(mesh.simplices.size(),
                                            Eigen::Matrix2d::Identity());

  // Initial iterate: the p=2 solution (unit weights).
  Vec u = weightedSolve(unit_w, nullptr);
  detail::elementGradients(mesh, geom, u, grads);
  stats.iterations = 1;
  stats.energy_history.push_back(detail::regularizedEnergy(geom, grads, cfg.p, eps));

  if (std::abs(cfg.p - 2.0) > 1e-14 && data_max > 0.0) {
    auto fluxWeights = [&]() {
      std::vector<Eigen::Matrix2d> W(mesh.simplices.size());
      for (size_t e = 0; e < W.size(); ++e) {
        W[e] = std::pow(grads[e].squaredNorm() + eps * eps, (cfg.p - 2.0) / 2.0) *
               Eigen::Matrix2d::Identity();
      }
      return W;
    };
    auto newtonWeights = [&]() {
      // Hessian of the regularized energy: w [ I + (p-2) g g^T / (|g|^2+e^2) ].
      std::vector<Eigen::Matrix2d> W(mesh.simplices.size());
      for (size_t e = 0; e < W.size(); ++e) {
        const double q = grads[e].squaredNorm() + eps * eps;
        const double w = std::pow(q, (cfg.p - 2.0) / 2.0);
        W[e] = w * (Eigen::Matrix2d::Identity() +
                    (cfg.p - 2.0) / q * grads[e] * grads[e].transpose());
      }
      return W;
    };
    auto gradientResidual = [&]() {
      Vec r = Vec::Zero(nf);
      for (size_t e = 0; e < mesh.simplices.size(); ++e) {
        const auto& t = mesh.simplices[e];
        const double w = std::pow(grads[e].squaredNorm() + eps * eps, (cfg.p - 2.0) / 2.0);
        for (int a = 0; a < 3; ++a) {
          if (free_of[t[a]] >= 0) {
            r[free_of[t[a]]] += geom.area[e] * w * grads[e].dot(geom.grad_basis[e].col(a));
          }
        }
      }
      return r;
    };
    // Exact-ish line search: the energy is convex along the direction, so the
    // argmin over a halving ladder is a robust choice and only costs O(#elems)
    // per sample.
    auto takeStep = [&](const Vec& d) {
      std::vector<Vec2> gd;
      detail::elementGradients(mesh, geom, d, gd);
      double best_alpha = 0.0;
      double best_e = detail::regularizedEnergy(geom, grads, cfg.p, eps);
      std::vector<Vec2> trial(grads.size());
      for (double alpha = 1.0; alpha >= cfg.damping_floor; alpha /= 2.0) {
        for (size_t e = 0; e < grads.size(); ++e) trial[e] = grads[e] + alpha * gd[e];
        const double en = detail::regularizedEnergy(geom, trial, cfg.p, eps);
        if (en < best_e) {
          best_e = en;
          best_alpha = alpha;
        } else if (best_alpha > 0.0 && alpha < best_alpha) {
          break;  // convex along d: past the minimum
        }
      }
      double inc_sq = 0.0, norm_sq = 0.0;
      for (size_t e = 0; e < grads.size(); ++e) {
        grads[e] += best_alpha * gd[e];
        inc_sq += geom.area[e] * best_alpha * best_alpha * gd[e].squaredNorm();
        norm_sq += geom.area[e] * grads[e].squaredNorm();
      }
      u += best_alpha * d;
      ++stats.iterations;
      const double res = std::sqrt(inc_sq / std::max(norm_sq, 1e-300));
      stats.energy_history.push_back(best_e);
      stats.residual_history.push_back(res);
      stats.eps_history.push_back(eps);
      stats.final_residual = res;
      return res;
    };

    // Phase 1: Picard (Kacanov) with eps-continuation; each stalled plateau
    // halves eps.
    int stall = 0;
    double prev_res = std::numeric_limits<double>::infinity();
    bool settled_at_min = false;
    while (!settled_at_min) {
      if (stats.iterations >= cfg.max_picard) break;
      const Vec u_hat = weightedSolve(fluxWeights(), nullptr);
      const double res = takeStep(u_hat - u);
      const bool settled = res <= cfg.picard_tol;
      const bool at_min = eps <= eps_min * (1.0 + 1e-12);
      if (res > 0.9 * prev_res) {
        ++stall;
      } else {
        stall = 0;
      }
      if (settled || stall >= 3) {
        if (at_min) {
          settled_at_min = true;  // hand over to Newton for the endgame
        } else {
          eps = std::max(eps / 2.0, eps_min);
        }
        stall = 0;
        prev_res = std::numeric_limits<double>::infinity();
        continue;
      }
      prev_res = res;
    }
    // Phase 2: damped Newton at the final regularization.
    bool converged = stats.final_residual <= cfg.picard_tol;
    while (!converged && stats.iterations < cfg.max_picard) {
      const Vec r = gradientResidual();
      const Vec d = weightedSolve(newtonWeights(), &r);
      const double res = takeStep(-d);
      converged = res <= cfg.picard_tol;
    }
    if (!converged) {
      throw SolveError("solveDirichlet: iteration did not converge (final residual " +
                       std::to_string(stats.final_residual) + ")");
    }
  }

  PHarmSolution sol;
  sol.mesh = std::make_shared<SimplicialMesh>(mesh);
  sol.ring = ring;
  sol.nodal_values = u;
  sol.element_gradients = grads;
  sol.p = cfg.p;
  sol.eps_reg = eps;
  sol.stats = std::move(stats);
  sol.locator = std::make_shared<detail::PointLocator>(*sol.mesh);
  return sol;
}

/// Gradient magnitude per outer boundary element, taken from the adjacent
/// simplex.  Since u vanishes along each facet the tangential component is a
/// pure discretization residual; it is reported alongside.
inline std::vector<BoundaryFlux> boundaryGradient(const PHarmSolution& sol) {
  const auto& mesh = *sol.mesh;
  std::map<std::pair<int, int>, int> edge_elem;
  for (size_t e = 0; e < mesh.simplices.size(); ++e) {
    const auto& t = mesh.simplices[e];
    for (int k = 0; k < 3; ++k) {
      const auto key = std::minmax(t[k], t[(k + 1) % 3]);
      edge_elem[{key.first, key.second}] = static_cast<int>(e);
    }
  }
  std::vector<BoundaryFlux> out;
  for (size_t b = 0; b < mesh.boundary.size(); ++b) {
    const auto& be = mesh.boundary[b];
    if (be.tag == kInnerTag) continue;
    const auto key = std::minmax(be.a, be.b);
    const auto it = edge_elem.find({key.first, key.second});
    if (it == edge_elem.end()) throw SolveError("boundaryGradient: dangling boundary edge");
    const Vec2 g = sol.element_gradients[it->second];
    const Direction& nu = sol.ring.outer.halfspaces[be.tag].normal;
    const Vec2 n(nu[0], nu[1]);
    const Vec2 tau(-n.y(), n.x());
    out.push_back({static_cast<int>(b), be.tag, (mesh.nodes[be.b] - mesh.nodes[be.a]).norm(),
                   std::abs(g.dot(n)), std::abs(g.dot(tau))});
  }
  return out;
}

/// Constant P1 gradient of the solved field on the element containing x.
inline Vec2 gradientAt(const PHarmSolution& sol, const Vec2& x) {
  const auto hit = sol.locator->locate(x);
  if (!hit) throw SolveError("gradientAt: point outside the meshed ring");
  return sol.element_gradients[hit->first];
}

/// Solves the linearization of the p-Laplace equation around the solved
/// field: div(A(grad u) grad w) = 0 with A the Hessian of the regularized
/// energy, `inner_data` on the meshed inner boundary and zero on the outer
/// boundary.  w is the first-order response of the solution to that inner
/// data perturbation.  Returns nodal values on sol's mesh.
inline Vec linearizedSolve(const PHarmSolution& sol,
                           const std::function<double(const Vec2&)>& inner_data) {
  const SimplicialMesh& mesh = *sol.mesh;
  const int N = static_cast<int>(mesh.nodes.size());
  detail::FemGeometry geom(mesh);

  Vec fixed = Vec::Zero(N);
  std::vector<char> is_fixed(N, 0);
  for (int i = 0; i < N; ++i) {
    if (mesh.on_outer[i]) {
      is_fixed[i] = 1;
    } else if (mesh.on_inner[i]) {
      is_fixed[i] = 1;
      fixed[i] = inner_data(mesh.nodes[i]);
      if (!std::isfinite(fixed[i])) throw SolveError("linearizedSolve: non-finite inner data");
    }
  }
  std::vector<int> free_of(N, -1);
  std::vector<int> node_of;
  for (int i = 0; i < N; ++i) {
    if (!is_fixed[i]) {
      free_of[i] = static_cast<int>(node_of.size());
      node_of.push_back(i);
    }
  }
  const int nf = static_cast<int>(node_of.size());

  const double eps2 = sol.eps_reg * sol.eps_reg;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.simplices.size() * 9);
  Vec rhs = Vec::Zero(nf);
  for (size_t e = 0; e < mesh.simplices.size(); ++e) {
    const auto& t = mesh.simplices[e];
    const auto& G = geom.grad_basis[e];
    const Vec2& g = sol.element_gradients[e];
    const double q = g.squaredNorm() + eps2;
    const double w = std::pow(q, (sol.p - 2.0) / 2.0);
    const Eigen::Matrix2d S =
        geom.area[e] * w *
        (Eigen::Matrix2d::Identity() + (sol.p - 2.0) / q * g * g.transpose());
    for (int a = 0; a < 3; ++a) {
      if (free_of[t[a]] < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const double kab = G.col(a).dot(S * G.col(b));
        if (free_of[t[b]] >= 0) {
          trips.emplace_back(free_of[t[a]], free_of[t[b]], kab);
        } else {
          rhs[free_of[t[a]]] -= kab * fixed[t[b]];
        }
      }
    }
  }
  Eigen::SparseMatrix<double> A(nf, nf);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw SolveError("linearizedSolve: factorization failed");
  const Vec xf = ldlt.solve(rhs);
  Vec x = fixed;
  for (int k = 0; k < nf; ++k) x[node_of[k]] = xf[k];
  return x;
}

/// The canonical p-harmonic field of a ring: unit data on the meshed inner
/// boundary, rescaled so the mean over the data circle is one.  Rescaling
/// preserves p-harmonicity, so the field is a genuine solution on the whole
/// extended ring.
inline PHarmSolution solveCanonical(const ConvexRing& ring, const SimplicialMesh& mesh,
                                    const SolverConfig& cfg) {
  PHarmSolution sol = solveDirichlet(ring, mesh, [](const Vec2&) { return 1.0; }, cfg);
  double sum = 0.0;
  int count = 0;
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    if (mesh.on_data_ring[i]) {
      sum += sol.nodal_values[i];
      ++count;
    }
  }
  if (count == 0 || !(sum > 0.0)) throw SolveError("solveCanonical: empty data ring");
  const double c = count / sum;
  sol.nodal_values *= c;
  for (Vec2& g : sol.element_gradients) g *= c;
  sol.data_scale = c;
  return sol;
}

/// Largest |t| for which the family evaluation x/(1+t) stays inside the
/// meshed extended ring of the base solution.
inline double admissibleFamilyRange(const ConvexRing& ring) {
  const double up = ring.inner_radius / ring.margin_inner_radius - 1.0;
  double apothem = std::numeric_limits<double>::infinity();
  for (const auto& f : ring.outer.facets) {
    const auto& hs = ring.outer.halfspaces[f.halfspace];
    apothem = std::min(apothem, hs.offset - hs.normal.dot(ring.inner_center));
  }
  const double down = 1.0 - ring.inner_radius / apothem;
  return 0.9 * std::min(up, down);
}

/// Support heights of P + t*Q over the union of both facet-normal sets
/// (valid for small negative t as well).
inline SupportVector familyHeights(const Polytope& P, const Polytope& Q, double t) {
  std::vector<Direction> normals;
  std::vector<double> heights;
  auto add = [&](const Direction& n) {
    for (const auto& m : normals)
      if (m.sameAs(n)) return;
    normals.push_back(n);
    heights.push_back(supportFunction(P, n.vec()) + t * supportFunction(Q, n.vec()));
  };
  for (const auto& f : P.facets) add(f.normal);
  for (const auto& f : Q.facets) add(f.normal);
  for (double h : heights) {
    if (!(h > 0.0)) throw SolveError("familyHeights: body lost the origin");
  }
  return SupportVector(std::move(normals), std::move(heights));
}

/// Solves the t-member of the Minkowski family Omega^t = Omega + t*Omega0
/// over the same inner circle as the base, with inner data u(x/(1+t)) taken
/// from the base solution.  Requires the base ring centered at the origin.
inline PHarmSolution familySolve(const PHarmSolution& base, const Polytope& Omega0, double t,
                                 const SolverConfig& cfg, double target_h,
                                 const RingMeshOptions& base_opts = {}) {
  const ConvexRing& ring = base.ring;
  if (ring.inner_center.norm() > 1e-9 * ring.outer.diameter()) {
    throw SolveError("familySolve: base ring must be centered at the origin");
  }
  const double tau = admissibleFamilyRange(ring);
  if (std::abs(t) > tau) throw SolveError("familySolve: |t| exceeds the admissible range");

  const Polytope body = wulffShape(familyHeights(ring.outer, Omega0, t));
  RingMeshOptions opts = base_opts;
  opts.margin_factor = 1.0;  // data circle is the meshed inner boundary here
  auto [fam_ring, fam_mesh] = buildRingAt(body, ring.inner_center, ring.inner_radius, target_h, opts);
  const double contract = 1.0 / (1.0 + t);
  return solveDirichlet(
      fam_ring, fam_mesh, [&](const Vec2& x) { return base.evaluate(contract * x); }, cfg);
}

}  // namespace phmink
