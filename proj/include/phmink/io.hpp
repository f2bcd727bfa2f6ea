#pragma once

#include "phmink/verify.hpp"

#include "json.hpp"

#include <fstream>
#include <iomanip>

namespace phmink {

using Json = nlohmann::json;

namespace detail {

inline Json vecToJson(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Vec vecFromJson(const Json& a) {
  if (!a.is_array() || a.empty()) throw IoError("expected a non-empty numeric array");
  Vec v(static_cast<int>(a.size()));
  for (size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Measure JSON: {"dim": n, "atoms": [{"xi": [..], "c": w}, ...]}
// ---------------------------------------------------------------------------

inline Json measureToJson(const SphericalMeasure& mu) {
  Json j;
  j["dim"] = mu.dim;
  j["atoms"] = Json::array();
  for (size_t i = 0; i < mu.size(); ++i) {
    j["atoms"].push_back({{"xi", detail::vecToJson(mu.xis[i].vec())}, {"c", mu.weights[i]}});
  }
  return j;
}

inline SphericalMeasure measureFromJson(const Json& j) {
  if (!j.contains("dim") || !j.contains("atoms")) {
    throw IoError("measure JSON: missing 'dim' or 'atoms'");
  }
  const int dim = j.at("dim").get<int>();
  std::vector<Direction> xis;
  std::vector<double> ws;
  for (const auto& a : j.at("atoms")) {
    xis.emplace_back(detail::vecFromJson(a.at("xi")));
    ws.push_back(a.at("c").get<double>());
  }
  return SphericalMeasure(dim, std::move(xis), std::move(ws));
}

inline Json atomMapToJson(const MeasureAtomMap& mu, int dim) {
  Json j;
  j["dim"] = dim;
  j["atoms"] = Json::array();
  for (size_t i = 0; i < mu.masses.size(); ++i) {
    j["atoms"].push_back({{"xi", detail::vecToJson(mu.normals[i].vec())}, {"c", mu.masses[i]}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Polytope JSON: {"dim": n, "normals": [[..]], "heights": [..], "vertices": [[..]]}
// ---------------------------------------------------------------------------

inline Json polytopeToJson(const Polytope& P) {
  Json j;
  j["dim"] = P.dim;
  j["normals"] = Json::array();
  j["heights"] = Json::array();
  for (const auto& hs : P.halfspaces) {
    j["normals"].push_back(detail::vecToJson(hs.normal.vec()));
    j["heights"].push_back(hs.offset);
  }
  j["vertices"] = Json::array();
  for (const Vec& v : P.vertices) j["vertices"].push_back(detail::vecToJson(v));
  return j;
}

/// Rebuilds the body from its half-space data, cross-checks the stored
/// vertices against the reconstruction, and adopts the stored coordinates so
/// a write/read round trip reproduces vertices bit-exactly.
inline Polytope polytopeFromJson(const Json& j) {
  for (const char* key : {"dim", "normals", "heights", "vertices"}) {
    if (!j.contains(key)) throw IoError(std::string("polytope JSON: missing '") + key + "'");
  }
  std::vector<Direction> normals;
  std::vector<double> heights;
  for (const auto& nrm : j.at("normals")) normals.emplace_back(detail::vecFromJson(nrm));
  for (const auto& h : j.at("heights")) heights.push_back(h.get<double>());
  Polytope P = wulffShape(SupportVector(std::move(normals), std::move(heights)));
  std::vector<Vec> stored;
  for (const auto& vj : j.at("vertices")) stored.push_back(detail::vecFromJson(vj));
  double scale = 1e-12;
  for (const Vec& v : P.vertices) scale = std::max(scale, v.norm());
  for (Vec& v : P.vertices) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < stored.size(); ++k) {
      const double d = (v - stored[k]).norm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(k);
      }
    }
    if (best < 0 || best_d > 1e-7 * scale) {
      throw IoError("polytope JSON: stored vertices inconsistent with half-space data");
    }
    v = stored[best];
  }
  return P;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline Json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

inline void writeJsonFile(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline Json checkResultToJson(const CheckResult& r) {
  return Json{{"name", r.name},         {"measured", r.measured},
              {"expected", r.expected}, {"rel_error", r.rel_error},
              {"tolerance", r.tolerance}, {"passed", r.passed},
              {"context", r.context}};
}

inline Json outcomeToJson(const SolveOutcome& oc) {
  Json j;
  j["polytope"] = polytopeToJson(oc.P);
  j["measure"] = atomMapToJson(oc.mu_P, oc.P.dim);
  j["residual"] = oc.residual;
  j["gamma"] = oc.gamma;
  j["converged"] = oc.converged;
  j["diagnostics"] = {
      {"center_defect", detail::vecToJson(oc.diagnostics.center_defect)},
      {"degeneracy_repairs", oc.diagnostics.degeneracy_repairs},
      {"activity_repairs", oc.diagnostics.activity_repairs},
      {"p_shift", oc.diagnostics.p_shift},
      {"antipodal_perturbed", oc.diagnostics.antipodal_perturbed},
      {"data_scale", oc.diagnostics.data_scale},
      {"pde_iterations_total", oc.diagnostics.pde_iterations_total},
  };
  j["history"] = Json::array();
  for (const auto& rec : oc.diagnostics.history) {
    j["history"].push_back({{"iter", rec.iter},
                            {"residual", rec.residual},
                            {"gamma", rec.gamma},
                            {"step", rec.step}});
  }
  return j;
}

inline void writeSolverStatsCsv(std::ostream& os, const SolverStats& stats) {
  os << "iteration,energy,residual,eps\n";
  os.precision(17);
  for (size_t i = 0; i < stats.energy_history.size(); ++i) {
    os << i << "," << stats.energy_history[i] << ",";
    if (i > 0 && i - 1 < stats.residual_history.size()) os << stats.residual_history[i - 1];
    os << ",";
    if (i > 0 && i - 1 < stats.eps_history.size()) os << stats.eps_history[i - 1];
    os << "\n";
  }
}

/// Polygon with per-facet target-vs-achieved mass bars (n=2 only).
inline void writeSolveSvg(std::ostream& os, const SolveOutcome& oc,
                          const SphericalMeasure& target) {
  if (oc.P.dim != 2) throw IoError("SVG output supports n=2 only");
  double extent = 1e-12;
  for (const Vec& v : oc.P.vertices) extent = std::max(extent, v.lpNorm<Eigen::Infinity>());
  const double s = 200.0 / extent;  // body scale to pixels
  const double cx = 300, cy = 300;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='600' height='600' "
        "viewBox='0 0 600 600'>\n";
  os << "<rect width='600' height='600' fill='white'/>\n";
  os << "<polygon points='";
  for (const Vec& v : oc.P.vertices) os << cx + s * v[0] << "," << cy - s * v[1] << " ";
  os << "' fill='none' stroke='black' stroke-width='1.5'/>\n";
  double cmax = 1e-300;
  for (double w : target.weights) cmax = std::max(cmax, w);
  for (double a : oc.mu_P.masses) cmax = std::max(cmax, a);
  for (size_t i = 0; i < oc.mu_P.masses.size(); ++i) {
    const Vec n = oc.mu_P.normals[i].vec();
    const double h = oc.mu_P.heights[i];
    const Vec base = h * n;
    double c_i = 0.0;
    for (size_t k = 0; k < target.size(); ++k) {
      if (target.xis[k].sameAs(oc.mu_P.normals[i])) c_i = target.weights[k];
    }
    const double bar = 60.0 / cmax;
    auto ray = [&](double len, const char* color, double off) {
      const Vec t = rotate90(n) * off;
      os << "<line x1='" << cx + s * (base[0] + t[0]) << "' y1='" << cy - s * (base[1] + t[1])
         << "' x2='" << cx + s * (base[0] + t[0]) + bar * len * n[0] << "' y2='"
         << cy - s * (base[1] + t[1]) - bar * len * n[1] << "' stroke='" << color
         << "' stroke-width='4'/>\n";
    };
    ray(c_i, "steelblue", 0.02 * extent);
    ray(oc.mu_P.masses[i], "darkorange", -0.02 * extent);
  }
  os << "<text x='10' y='20' font-size='14'>target (blue) vs achieved (orange) facet mass; "
        "residual "
     << oc.residual << "</text>\n";
  os << "</svg>\n";
}

}  // namespace phmink
