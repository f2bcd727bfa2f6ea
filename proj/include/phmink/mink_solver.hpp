#pragma once

#include "phmink/pharm_measure.hpp"

namespace phmink {

struct MinkSolveConfig {
  double p = 2.0;
  double tol = 1e-2;           // measure residual acceptance
  double gamma_tol = 1e-3;     // |Gamma - 1| acceptance
  double step0 = 0.3;          // multiplicative update exponent
  double step_floor = 1e-3;
  int max_iter = 80;
  double mesh_h = 0.05;        // relative to the body's centroid apothem
  double shrink = 0.5;
  int max_repairs = 5;
  bool gradient_mode = false;
  int fd_check_every = 5;      // gradient-mode surrogate audit cadence
  double classical_tol = 1e-9;
  SolverConfig pde;            // p is overwritten by the effective exponent
  RingMeshOptions mesh_opts;
};

struct IterRecord {
  int iter = 0;
  double residual = 0.0;
  double gamma = 0.0;     // raw canonical Gamma before rescale
  double step = 0.0;
  double objective = 0.0; // gradient mode: sum c_i h_i
};

struct SolveDiagnostics {
  Vec center_defect;
  int degeneracy_repairs = 0;
  int activity_repairs = 0;
  double p_shift = 0.0;
  bool antipodal_perturbed = false;
  double data_scale = 1.0;  // beta: multiplier on the canonical inner data
  int pde_iterations_total = 0;
  std::vector<IterRecord> history;
};

struct SolveOutcome {
  Polytope P;
  MeasureAtomMap mu_P;   // scaled atoms; heights of the final body
  double residual = 0.0;
  double gamma = 0.0;
  bool converged = false;
  SolveDiagnostics diagnostics;
};

/// The existence theorem excludes p = n+1 (the normalizing dilation exponent
/// n-p+1 vanishes there); following the paper's approximation argument the
/// exponent is nudged toward 2 and the shift is reported.
inline double handlePException(double p, int n) {
  if (std::abs(p - (n + 1)) < 1e-6) {
    return (p > 2.0) ? p - 1e-3 : p + 1e-3;
  }
  return p;
}

namespace detail {

/// Distance from the centroid to the nearest facet plane.
inline double centroidApothem(const Polytope& P) {
  double a = std::numeric_limits<double>::infinity();
  for (const auto& f : P.facets) {
    const auto& hs = P.halfspaces[f.halfspace];
    a = std::min(a, hs.offset - hs.normal.dot(P.centroid));
  }
  return a;
}

/// Wulff shape of the heights with slab repair: when the body degenerates the
/// two facets most aligned with the thin direction are pushed outward.
inline Polytope buildBody(const std::vector<Direction>& xis, Vec& h, int max_repairs,
                          int& repair_count) {
  const int m = static_cast<int>(h.size());
  for (int attempt = 0;; ++attempt) {
    std::vector<double> hv(h.data(), h.data() + m);
    Polytope P = wulffShape(SupportVector(xis, hv));
    if (!(P.degeneracy && P.degeneracy->is_slab)) return P;
    if (attempt >= max_repairs) throw SolveError("solve: persistent degenerate iterate");
    const Direction& nrm = *P.degeneracy->slab_normal;
    int ipos = 0, ineg = 0;
    for (int i = 1; i < m; ++i) {
      if (nrm.dot(xis[i].vec()) > nrm.dot(xis[ipos].vec())) ipos = i;
      if (nrm.dot(xis[i].vec()) < nrm.dot(xis[ineg].vec())) ineg = i;
    }
    h[ipos] *= 1.1;
    h[ineg] *= 1.1;
    ++repair_count;
  }
}

/// Translates the body so its centroid sits at the origin, expressed on the
/// heights; the translation is damped if it would drive a height toward 0.
inline void recenterHeights(const std::vector<Direction>& xis, Vec& h, const Vec& centroid) {
  Vec t = centroid;
  for (int guard = 0; guard < 60; ++guard) {
    bool ok = true;
    for (int i = 0; i < h.size(); ++i) {
      if (h[i] - xis[i].dot(t) <= 0.05 * h[i]) {
        ok = false;
        break;
      }
    }
    if (ok) break;
    t *= 0.5;
  }
  for (int i = 0; i < h.size(); ++i) h[i] -= xis[i].dot(t);
}

/// Canonical PDE solve on the body; returns per-target-atom masses (indexed
/// like the height vector via halfspace ids) and the raw canonical Gamma.
struct BodyMeasurement {
  Vec atoms;
  double total = 0.0;
  double gamma_raw = 0.0;
  Vec center_defect;
  int pde_iterations = 0;
  std::vector<char> active;
};

inline BodyMeasurement measureBody(const Polytope& P, int m, const MinkSolveConfig& cfg) {
  const double target_h = cfg.mesh_h * centroidApothem(P);
  auto [ring, mesh] = buildRing(P, cfg.shrink, target_h, cfg.mesh_opts);
  const PHarmSolution sol = solveCanonical(ring, mesh, cfg.pde);
  const MeasureAtomMap map = pharmMeasure(P, sol);
  BodyMeasurement out;
  out.atoms = Vec::Zero(m);
  out.active.assign(m, 0);
  for (size_t k = 0; k < P.facets.size(); ++k) {
    const int i = P.facets[k].halfspace;
    if (i < 0 || i >= m) throw SolveError("measureBody: unexpected facet id");
    out.atoms[i] = map.masses[k];
    out.active[i] = 1;
  }
  out.total = map.total_mass;
  out.gamma_raw = gamma(map).value;
  out.center_defect = map.center_defect;
  out.pde_iterations = sol.stats.iterations;
  return out;
}

}  // namespace detail

/// Finds support heights whose Wulff shape carries the target p-harmonic
/// measure.  Damped multiplicative fixed point on the heights: a facet with
/// excess mass is pushed outward (which shrinks it); each iterate is
/// recentered and normalized so Gamma = 1 using the dilation law together
/// with the data-scale freedom (the measure of beta*u carries beta^{p-1}
/// times the mass of u).
inline SolveOutcome solveDiscrete(const SphericalMeasure& mu_target, MinkSolveConfig cfg,
                                  const std::optional<Vec>& h0 = std::nullopt) {
  const int n = mu_target.dim;
  if (n != 2) throw SolveError("solveDiscrete: only n=2 is implemented");
  SolveOutcome out;
  auto cond = checkMeasureConditions(mu_target);
  if (!cond.spans || !cond.centered) {
    throw MeasureError("solveDiscrete: measure fails the existence conditions");
  }
  SphericalMeasure mu = mu_target;
  if (!cond.antipodal_pairs.empty()) {
    mu = perturbAntipodal(mu_target, 1e-3);
    out.diagnostics.antipodal_perturbed = true;
  }
  const double p_eff = handlePException(cfg.p, n);
  out.diagnostics.p_shift = p_eff - cfg.p;
  cfg.pde.p = p_eff;

  const int m = static_cast<int>(mu.size());
  const double C_tot = mu.totalMass();
  Vec c(m);
  for (int i = 0; i < m; ++i) c[i] = mu.weights[i];

  Vec h = h0 ? *h0 : Vec::Ones(m);
  if (h.size() != m || h.minCoeff() <= 0.0) throw SolveError("solveDiscrete: bad initial heights");

  Vec h_best = h;
  double res_best = std::numeric_limits<double>::infinity();
  double res_prev = std::numeric_limits<double>::infinity();
  Vec h_prev = h;
  double step = cfg.step0;
  double lam_last = 1.0;
  detail::BodyMeasurement meas;
  Polytope P;

  auto applyFixedPointUpdate = [&](const Vec& base_h, const detail::BodyMeasurement& mm,
                                   double lam, double gam) {
    Vec hn(m);
    for (int i = 0; i < m; ++i) {
      if (!mm.active[i]) {
        // Inactive target facet: pull its plane inward until it cuts.
        hn[i] = lam * 0.95 * base_h[i];
        ++out.diagnostics.activity_repairs;
        continue;
      }
      const double ratio = std::clamp(mm.atoms[i] * (C_tot / mm.total) / c[i], 0.25, 4.0);
      hn[i] = lam * base_h[i] * std::pow(ratio, gam);
    }
    return hn;
  };

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    P = detail::buildBody(mu.xis, h, cfg.max_repairs, out.diagnostics.degeneracy_repairs);
    detail::recenterHeights(mu.xis, h, P.centroid);
    P = detail::buildBody(mu.xis, h, cfg.max_repairs, out.diagnostics.degeneracy_repairs);
    meas = detail::measureBody(P, m, cfg);
    out.diagnostics.pde_iterations_total += meas.pde_iterations;

    // Normalization: dilation by lam makes Gamma of the (data-rescaled)
    // measure equal 1; beta matches the total mass.
    const double lam = meas.total / (C_tot * meas.gamma_raw);
    const Vec atil = (C_tot / meas.total) * meas.atoms;
    const double res = (atil - c).lpNorm<1>() / C_tot;
    out.diagnostics.history.push_back({iter, res, meas.gamma_raw, step, 0.0});
    lam_last = lam;

    if (res < res_best) {
      res_best = res;
      h_best = h;
    }
    if (res <= cfg.tol) break;

    if (res > res_prev * (1.0 + 1e-12) && step > cfg.step_floor) {
      // Reject: retry from the previous iterate with a smaller step.
      step = std::max(step / 2.0, cfg.step_floor);
      h = h_prev;
      res_prev = std::numeric_limits<double>::infinity();
      continue;
    }
    h_prev = h;
    res_prev = res;
    h = applyFixedPointUpdate(h, meas, lam, step);
  }

  // Final normalized body and its measurement (h_best at the last residual).
  h = h_best;
  P = detail::buildBody(mu.xis, h, cfg.max_repairs, out.diagnostics.degeneracy_repairs);
  detail::recenterHeights(mu.xis, h, P.centroid);
  Vec h_final = h * lam_last;
  // Recompute lam on the recentered body so Gamma lands on 1.
  {
    P = detail::buildBody(mu.xis, h, cfg.max_repairs, out.diagnostics.degeneracy_repairs);
    meas = detail::measureBody(P, m, cfg);
    out.diagnostics.pde_iterations_total += meas.pde_iterations;
    const double lam = meas.total / (C_tot * meas.gamma_raw);
    h_final = h * lam;
  }
  Polytope P_final = detail::buildBody(mu.xis, h_final, cfg.max_repairs,
                                       out.diagnostics.degeneracy_repairs);
  detail::BodyMeasurement fin = detail::measureBody(P_final, m, cfg);
  out.diagnostics.pde_iterations_total += fin.pde_iterations;
  const double beta_pm1 = C_tot / fin.total;  // mass multiplier from data scale
  out.diagnostics.data_scale = std::pow(beta_pm1, 1.0 / (p_eff - 1.0));

  out.P = P_final;
  out.mu_P.normals = mu.xis;
  out.mu_P.masses.resize(m);
  out.mu_P.heights.resize(m);
  out.mu_P.total_mass = 0.0;
  out.mu_P.center_defect = Vec::Zero(n);
  double gam_final = 0.0;
  for (int i = 0; i < m; ++i) {
    out.mu_P.masses[i] = beta_pm1 * fin.atoms[i];
    out.mu_P.heights[i] = h_final[i];
    out.mu_P.total_mass += out.mu_P.masses[i];
    out.mu_P.center_defect += out.mu_P.masses[i] * mu.xis[i].vec();
    gam_final += out.mu_P.masses[i] * h_final[i];
  }
  Vec diff(m);
  for (int i = 0; i < m; ++i) diff[i] = out.mu_P.masses[i] - c[i];
  out.residual = diff.lpNorm<1>() / C_tot;
  out.gamma = gam_final;
  out.diagnostics.center_defect = out.mu_P.center_defect;
  out.converged = out.residual <= cfg.tol && std::abs(out.gamma - 1.0) <= cfg.gamma_tol;
  return out;
}

/// Gradient mode: minimizes sum c_i h_i subject to Gamma(h) >= 1 by projected
/// gradient, using the Hadamard surrogate dGamma/dh_i ~ (n-p+1) a_i; the
/// surrogate is audited against a central finite difference at a fixed
/// cadence and the step falls back to the finite-difference value when the
/// surrogate is off by more than 25%.
inline SolveOutcome solveDiscreteGradient(const SphericalMeasure& mu_target,
                                          MinkSolveConfig cfg) {
  const int n = mu_target.dim;
  if (n != 2) throw SolveError("solveDiscreteGradient: only n=2 is implemented");
  SolveOutcome out;
  auto cond = checkMeasureConditions(mu_target);
  if (!cond.spans || !cond.centered) {
    throw MeasureError("solveDiscreteGradient: measure fails the existence conditions");
  }
  SphericalMeasure mu = mu_target;
  if (!cond.antipodal_pairs.empty()) {
    mu = perturbAntipodal(mu_target, 1e-3);
    out.diagnostics.antipodal_perturbed = true;
  }
  const double p_eff = handlePException(cfg.p, n);
  out.diagnostics.p_shift = p_eff - cfg.p;
  cfg.pde.p = p_eff;

  const int m = static_cast<int>(mu.size());
  Vec c(m);
  for (int i = 0; i < m; ++i) c[i] = mu.weights[i];
  const double C_tot = c.sum();

  auto gammaOf = [&](Vec h) {
    Polytope P = detail::buildBody(mu.xis, h, cfg.max_repairs, out.diagnostics.degeneracy_repairs);
    auto mm = detail::measureBody(P, m, cfg);
    out.diagnostics.pde_iterations_total += mm.pde_iterations;
    return std::make_pair(mm, P);
  };
  auto normalizeGamma = [&](Vec& h, double gamma_raw) {
    // Gamma scales like lam^{n-p+1} for the canonical construction.
    const double expo = n - p_eff + 1.0;
    h *= std::pow(gamma_raw, -1.0 / expo);
  };

  Vec h = Vec::Ones(m);
  {
    auto [mm, P] = gammaOf(h);
    normalizeGamma(h, mm.gamma_raw);
  }
  double step = cfg.step0;
  double obj_prev = std::numeric_limits<double>::infinity();
  detail::BodyMeasurement meas;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    auto [mm, P] = gammaOf(h);
    meas = mm;
    const double obj = c.dot(h);
    const Vec atil = (C_tot / mm.total) * mm.atoms;
    const double res = (atil - c).lpNorm<1>() / C_tot;
    out.diagnostics.history.push_back({iter, res, mm.gamma_raw, step, obj});
    if (res <= cfg.tol) break;

    Vec g = (n - p_eff + 1.0) * mm.atoms;  // surrogate constraint gradient
    if (cfg.fd_check_every > 0 && iter % cfg.fd_check_every == 0) {
      int k = 0;
      c.maxCoeff(&k);
      const double dt = 1e-2 * h[k];
      Vec hp = h, hmn = h;
      hp[k] += dt;
      hmn[k] -= dt;
      const double gp = gammaOf(hp).first.gamma_raw;
      const double gm = gammaOf(hmn).first.gamma_raw;
      const double fd = (gp - gm) / (2.0 * dt);
      if (std::abs(g[k]) > 1e-12 * mm.total &&
          std::abs(fd - g[k]) > 0.25 * std::abs(g[k])) {
        g[k] = fd;
      }
    }
    const double gg = g.squaredNorm();
    Vec d = c;
    if (gg > 0.0) d -= (c.dot(g) / gg) * g;  // project off the constraint normal
    if (d.norm() < 1e-14 * c.norm()) break;  // stationary: a ~ c
    // Backtracking on the objective after re-normalization to Gamma = 1.
    bool accepted = false;
    for (int bt = 0; bt < 12 && !accepted; ++bt) {
      Vec ht = h - step * (h.norm() / d.norm()) * d;
      if (ht.minCoeff() <= 0.0) {
        step /= 2.0;
        continue;
      }
      auto [mt, Pt] = gammaOf(ht);
      normalizeGamma(ht, mt.gamma_raw);
      const double obj_t = c.dot(ht);
      if (obj_t < obj || step <= cfg.step_floor) {
        h = ht;
        accepted = true;
      } else {
        step = std::max(step / 2.0, cfg.step_floor);
      }
    }
    if (!accepted) break;
    obj_prev = obj;
  }
  // Reuse the fixed-point finisher for normalization and reporting.
  return solveDiscrete(mu_target, cfg, h);
}

/// Classical Minkowski baseline: prescribes the surface measure (facet
/// lengths in n=2) instead of the p-harmonic measure.  On the full sorted
/// normal fan the signed facet lengths are globally linear in the heights,
/// ell_k = (h_{k-1} - h_k cos d_{k-1}) / sin d_{k-1}
///       + (h_{k+1} - h_k cos d_k) / sin d_k,
/// with a symmetric matrix whose kernel is the two translations, so one
/// minimum-norm least-squares solve recovers the body exactly (the target
/// weights are positive and centered, hence in the range).
inline SolveOutcome solveClassical(const SphericalMeasure& mu_target, MinkSolveConfig cfg) {
  const int n = mu_target.dim;
  if (n != 2) throw SolveError("solveClassical: only n=2 is implemented");
  SolveOutcome out;
  auto cond = checkMeasureConditions(mu_target);
  if (!cond.spans || !cond.centered) {
    throw MeasureError("solveClassical: measure fails the existence conditions");
  }
  const SphericalMeasure& mu = mu_target;  // antipodal pairs allowed here
  const int m = static_cast<int>(mu.size());
  if (m < 3) throw MeasureError("solveClassical: need at least 3 atoms");
  const double C_tot = mu.totalMass();

  std::vector<int> ord(m);
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(), [&](int a, int b) {
    return polarAngle(mu.xis[a].vec()) < polarAngle(mu.xis[b].vec());
  });
  Vec ang(m);
  for (int k = 0; k < m; ++k) ang[k] = polarAngle(mu.xis[ord[k]].vec());

  Mat L = Mat::Zero(m, m);
  Vec cs(m);
  for (int k = 0; k < m; ++k) {
    const int kn = (k + 1) % m;
    double d = ang[kn] - ang[k];
    if (kn == 0) d += 2.0 * kPi;
    const double s = std::sin(d), co = std::cos(d);
    if (!(s > 1e-12)) throw MeasureError("solveClassical: coincident atom directions");
    L(k, kn) += 1.0 / s;
    L(kn, k) += 1.0 / s;
    L(k, k) -= co / s;
    L(kn, kn) -= co / s;
    cs[k] = mu.weights[ord[k]];
  }
  const Vec hs = L.completeOrthogonalDecomposition().solve(cs);
  out.diagnostics.history.push_back({0, (L * hs - cs).lpNorm<1>() / C_tot, 0.0, 1.0, 0.0});

  // Vertices of the full fan; recentre at the centroid so all heights are
  // positive before rebuilding the polytope.
  std::vector<Vec> verts;
  for (int k = 0; k < m; ++k) {
    const int kn = (k + 1) % m;
    verts.push_back(
        detail::lineIntersect(mu.xis[ord[k]], hs[k], mu.xis[ord[kn]], hs[kn]));
  }
  double area2 = 0.0;
  Vec cen = Vec::Zero(2);
  for (int k = 0; k < m; ++k) {
    const Vec& a = verts[k];
    const Vec& b = verts[(k + 1) % m];
    const double cr = a[0] * b[1] - a[1] * b[0];
    area2 += cr;
    cen += cr * (a + b);
  }
  if (!(area2 > 0.0)) throw SolveError("solveClassical: degenerate reconstruction");
  cen /= 3.0 * area2;

  Vec h(m);
  for (int k = 0; k < m; ++k) h[ord[k]] = hs[k] - mu.xis[ord[k]].dot(cen);
  if (h.minCoeff() <= 0.0) throw SolveError("solveClassical: reconstruction lost the origin");
  Polytope P = detail::buildBody(mu.xis, h, cfg.max_repairs,
                                 out.diagnostics.degeneracy_repairs);
  Vec ell = Vec::Zero(m);
  for (const auto& f : P.facets) ell[f.halfspace] = f.area;
  Vec c(m);
  for (int i = 0; i < m; ++i) c[i] = mu.weights[i];
  const double res = (ell - c).lpNorm<1>() / C_tot;

  out.P = P;
  out.mu_P.normals = mu.xis;
  out.mu_P.masses.assign(ell.data(), ell.data() + m);
  out.mu_P.heights.assign(h.data(), h.data() + m);
  out.mu_P.total_mass = ell.sum();
  out.mu_P.center_defect = Vec::Zero(n);
  for (int i = 0; i < m; ++i) out.mu_P.center_defect += ell[i] * mu.xis[i].vec();
  out.residual = res;
  out.gamma = volume(out.P);
  out.diagnostics.center_defect = out.mu_P.center_defect;
  out.converged = res <= cfg.classical_tol * 10.0;
  return out;
}

/// Coarse-to-fine pipeline for a continuous target density: discretize on an
/// increasing atom schedule, warm-starting each stage from the previous
/// polytope's support values at the new normals.
struct GeneralOutcome {
  std::vector<SolveOutcome> stages;
  std::vector<double> stage_hausdorff;  // d_H between successive stage bodies
  int failed_stage = -1;
  std::string failure;

  const SolveOutcome& finest() const {
    if (stages.empty()) throw SolveError("solveGeneral: no completed stages");
    return stages.back();
  }
};

inline GeneralOutcome solveGeneral(const std::function<double(const Direction&)>& density,
                                   const std::vector<int>& m_schedule, const MinkSolveConfig& cfg) {
  if (m_schedule.empty()) throw SolveError("solveGeneral: empty schedule");
  GeneralOutcome out;
  for (size_t s = 0; s < m_schedule.size(); ++s) {
    try {
      const SphericalMeasure mu = discretizeMeasure(density, 2, m_schedule[s]);
      std::optional<Vec> h0;
      if (!out.stages.empty()) {
        Vec h(mu.size());
        for (size_t i = 0; i < mu.size(); ++i) {
          h[static_cast<int>(i)] = supportFunction(out.stages.back().P, mu.xis[i].vec());
        }
        if (h.minCoeff() > 0.0) h0 = h;
      }
      SolveOutcome oc = solveDiscrete(mu, cfg, h0);
      if (!out.stages.empty()) {
        out.stage_hausdorff.push_back(hausdorffDistance(out.stages.back().P, oc.P, 256));
      }
      out.stages.push_back(std::move(oc));
    } catch (const std::exception& e) {
      out.failed_stage = static_cast<int>(s);
      out.failure = e.what();
      break;
    }
  }
  if (out.stages.empty()) {
    throw SolveError("solveGeneral: every stage failed: " + out.failure);
  }
  return out;
}

}  // namespace phmink
