#pragma once

#include "phmink/measure.hpp"
#include "phmink/plap_fem.hpp"

namespace phmink {

/// The p-harmonic measure of a polytope assembled from a boundary-gradient
/// field: one atom per facet, a_i = sum over the facet's boundary elements of
/// |grad u|^{p-1} times element length (midpoint rule, consistent with
/// element-constant P1 gradients).
struct MeasureAtomMap {
  std::vector<Direction> normals;  // facet normals, indexed like P.facets
  std::vector<double> masses;
  std::vector<double> heights;     // h_P at the facet normals
  double total_mass = 0.0;
  Vec center_defect;

  SphericalMeasure toMeasure(int dim) const {
    return SphericalMeasure(dim, normals, masses);
  }
};

inline MeasureAtomMap pharmMeasure(const Polytope& P, const PHarmSolution& sol) {
  const int nf = static_cast<int>(P.facets.size());
  std::vector<int> facet_of_halfspace(P.halfspaces.size(), -1);
  for (int i = 0; i < nf; ++i) facet_of_halfspace[P.facets[i].halfspace] = i;

  MeasureAtomMap out;
  out.normals.reserve(nf);
  out.masses.assign(nf, 0.0);
  out.heights.reserve(nf);
  for (const auto& f : P.facets) {
    out.normals.push_back(f.normal);
    out.heights.push_back(P.halfspaces[f.halfspace].offset);
  }

  for (const auto& flux : boundaryGradient(sol)) {
    if (flux.facet < 0 || flux.facet >= static_cast<int>(facet_of_halfspace.size()) ||
        facet_of_halfspace[flux.facet] < 0) {
      throw MeasureError("pharmMeasure: boundary tag does not match a facet of P");
    }
    out.masses[facet_of_halfspace[flux.facet]] +=
        std::pow(flux.normal_gradient, sol.p - 1.0) * flux.length;
  }

  out.center_defect = Vec::Zero(P.dim);
  for (int i = 0; i < nf; ++i) {
    out.total_mass += out.masses[i];
    out.center_defect += out.masses[i] * out.normals[i].vec();
  }
  return out;
}

/// Per-facet first-order change of the measure atoms when the solution field
/// moves by w at fixed domain: da_i = (p-1) int_{facet_i} |grad u|^{p-3}
/// <grad u, grad w> dH^1, assembled element-wise like pharmMeasure.
inline std::vector<double> measureVariation(const Polytope& P, const PHarmSolution& sol,
                                            const Vec& w) {
  const int nf = static_cast<int>(P.facets.size());
  std::vector<int> facet_of_halfspace(P.halfspaces.size(), -1);
  for (int i = 0; i < nf; ++i) facet_of_halfspace[P.facets[i].halfspace] = i;

  const SimplicialMesh& mesh = *sol.mesh;
  if (w.size() != static_cast<Eigen::Index>(mesh.nodes.size())) {
    throw MeasureError("measureVariation: field size does not match the mesh");
  }
  std::map<std::pair<int, int>, int> edge_elem;
  for (size_t e = 0; e < mesh.simplices.size(); ++e) {
    const auto& t = mesh.simplices[e];
    for (int k = 0; k < 3; ++k) {
      const auto key = std::minmax(t[k], t[(k + 1) % 3]);
      edge_elem[{key.first, key.second}] = static_cast<int>(e);
    }
  }
  const detail::FemGeometry geom(mesh);
  std::vector<double> rates(nf, 0.0);
  for (const auto& be : mesh.boundary) {
    if (be.tag == kInnerTag) continue;
    const auto key = std::minmax(be.a, be.b);
    const auto it = edge_elem.find({key.first, key.second});
    if (it == edge_elem.end()) throw MeasureError("measureVariation: dangling boundary edge");
    const int e = it->second;
    const auto& t = mesh.simplices[e];
    const Vec2 gu = sol.element_gradients[e];
    const double mag = gu.norm();
    if (!(mag > 0.0)) throw MeasureError("measureVariation: vanishing boundary gradient");
    const Vec2 gw = geom.grad_basis[e].col(0) * w[t[0]] + geom.grad_basis[e].col(1) * w[t[1]] +
                    geom.grad_basis[e].col(2) * w[t[2]];
    const double len = (mesh.nodes[be.b] - mesh.nodes[be.a]).norm();
    if (be.tag < 0 || be.tag >= static_cast<int>(facet_of_halfspace.size()) ||
        facet_of_halfspace[be.tag] < 0) {
      throw MeasureError("measureVariation: boundary tag does not match a facet of P");
    }
    const int f = facet_of_halfspace[be.tag];
    rates[f] += (sol.p - 1.0) * std::pow(mag, sol.p - 3.0) * gu.dot(gw) * len;
  }
  return rates;
}

/// Gamma(P) = integral of h_P against mu_P = sum_i h_i a_i.
struct GammaValue {
  double value = 0.0;
  std::vector<double> contributions;
};

inline GammaValue gamma(const MeasureAtomMap& mu_P) {
  GammaValue g;
  g.contributions.resize(mu_P.masses.size());
  for (size_t i = 0; i < mu_P.masses.size(); ++i) {
    g.contributions[i] = mu_P.heights[i] * mu_P.masses[i];
    g.value += g.contributions[i];
  }
  return g;
}

/// Relative l1 mismatch sum |a_i - c_i| / sum c_i.  Atom direction sets must
/// coincide.
inline double residual(const MeasureAtomMap& mu_P, const SphericalMeasure& mu) {
  if (mu.size() != mu_P.normals.size()) {
    throw MeasureError("residual: atom counts differ");
  }
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < mu.size(); ++i) {
    int match = -1;
    for (size_t j = 0; j < mu_P.normals.size(); ++j) {
      if (mu.xis[i].sameAs(mu_P.normals[j])) {
        match = static_cast<int>(j);
        break;
      }
    }
    if (match < 0) throw MeasureError("residual: atom direction sets differ");
    num += std::abs(mu_P.masses[match] - mu.weights[i]);
    den += mu.weights[i];
  }
  return num / den;
}

/// One row of the weak-convergence table: a sequence member's distance to the
/// limit body and its measure gaps for the probe test functions
/// w in { 1, xi_1, xi_2, <xi, zeta>^2 }.
struct ProbeRow {
  double d_hausdorff = 0.0;
  double total_mass_gap = 0.0;
  std::vector<double> test_gaps;
};

namespace detail {

inline std::vector<double> probeIntegrals(const MeasureAtomMap& mu, const Direction& zeta) {
  std::vector<double> vals(4, 0.0);
  for (size_t i = 0; i < mu.masses.size(); ++i) {
    const double a = mu.masses[i];
    vals[0] += a;
    vals[1] += a * mu.normals[i][0];
    vals[2] += a * mu.normals[i][1];
    const double s = zeta.dot(mu.normals[i].vec());
    vals[3] += a * s * s;
  }
  return vals;
}

}  // namespace detail

/// Weak-convergence probe: solves the limit body canonically, then each
/// sequence member over the same inner circle with the limit solution's trace
/// as inner data, and tabulates measure gaps against the limit measure.
inline std::vector<ProbeRow> weakConvergenceProbe(const Polytope& limit,
                                                  const std::vector<Polytope>& seq,
                                                  const SolverConfig& cfg, double target_h,
                                                  double shrink = 0.5,
                                                  const RingMeshOptions& opts = {}) {
  auto [ring, mesh] = buildRing(limit, shrink, target_h, opts);
  const PHarmSolution base = solveCanonical(ring, mesh, cfg);
  const MeasureAtomMap mu_lim = pharmMeasure(limit, base);
  const Direction zeta(1.0, 1.0);
  const auto ref = detail::probeIntegrals(mu_lim, zeta);

  std::vector<ProbeRow> rows;
  for (const Polytope& Pj : seq) {
    RingMeshOptions member_opts = opts;
    member_opts.margin_factor = 1.0;
    auto [rj, mj] = buildRingAt(Pj, ring.inner_center, ring.inner_radius, target_h, member_opts);
    const PHarmSolution sj = solveDirichlet(
        rj, mj, [&](const Vec2& x) { return base.evaluate(x); }, cfg);
    const MeasureAtomMap mu_j = pharmMeasure(Pj, sj);
    const auto vals = detail::probeIntegrals(mu_j, zeta);
    ProbeRow row;
    row.d_hausdorff = hausdorffDistance(Pj, limit, 256);
    row.total_mass_gap = std::abs(vals[0] - ref[0]);
    for (size_t k = 0; k < vals.size(); ++k) row.test_gaps.push_back(std::abs(vals[k] - ref[k]));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace phmink
