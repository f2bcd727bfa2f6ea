#pragma once

#include "phmink/common.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>

namespace phmink {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Support heights over a fixed finite set of unit normals.  Heights are
/// strictly positive so the Wulff shape has the origin in its interior.
struct SupportVector {
  std::vector<Direction> normals;
  std::vector<double> heights;

  SupportVector(std::vector<Direction> n, std::vector<double> h)
      : normals(std::move(n)), heights(std::move(h)) {
    if (normals.size() != heights.size()) {
      throw GeometryError("SupportVector: normals/heights length mismatch");
    }
    if (normals.empty()) throw GeometryError("SupportVector: empty");
    for (double v : heights) {
      if (!(v > 0.0)) throw GeometryError("SupportVector: heights must be positive");
    }
    const int d = normals.front().dim();
    for (const auto& dir : normals) {
      if (dir.dim() != d) throw GeometryError("SupportVector: mixed dimensions");
    }
  }
  int dim() const { return normals.front().dim(); }
};

struct Halfspace {
  Direction normal;
  double offset;  // { x : <x, normal> <= offset }
};

struct Facet {
  int halfspace;           // index into Polytope::halfspaces
  std::vector<int> loop;   // vertex indices; ordered along the boundary
  double area;             // H^{n-1} measure
  Direction normal;
};

struct DegeneracyReport {
  int hausdorff_dim_estimate = 0;
  bool is_slab = false;
  std::optional<Direction> slab_normal;
  double thickness = 0.0;
};

/// Bounded intersection of finitely many closed half-spaces, carried with a
/// consistent vertex representation and per-facet records.  Immutable after
/// construction.
struct Polytope {
  int dim = 0;
  std::vector<Halfspace> halfspaces;  // includes inactive (redundant) ones
  std::vector<Vec> vertices;          // n=2: counter-clockwise order
  std::vector<Facet> facets;          // one per active halfspace
  Vec centroid;
  double inradius_estimate = 0.0;
  std::optional<DegeneracyReport> degeneracy;

  double diameter() const {
    double d = 0.0;
    for (size_t i = 0; i < vertices.size(); ++i)
      for (size_t j = i + 1; j < vertices.size(); ++j)
        d = std::max(d, (vertices[i] - vertices[j]).norm());
    return d;
  }
};

struct DegenerateShapeError : GeometryError {
  DegeneracyReport report;
  explicit DegenerateShapeError(DegeneracyReport r)
      : GeometryError("degenerate polytope (slab)"), report(std::move(r)) {}
};

// ---------------------------------------------------------------------------
// Basic queries
// ---------------------------------------------------------------------------

/// h_P(y) = max_{v in P} <v, y>.  Positively 1-homogeneous in y.
inline double supportFunction(const Polytope& P, const Vec& y) {
  if (P.vertices.empty()) throw GeometryError("supportFunction: empty polytope");
  double h = -std::numeric_limits<double>::infinity();
  for (const Vec& v : P.vertices) h = std::max(h, v.dot(y));
  return h;
}

/// r_P(theta) = sup{ r >= 0 : r*theta in P }; requires 0 interior to P.
inline double radialFunction(const Polytope& P, const Direction& theta) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& hs : P.halfspaces) {
    if (!(hs.offset > 0.0)) {
      throw GeometryError("radialFunction: origin not interior");
    }
    const double d = hs.normal.dot(theta.vec());
    if (d > 0.0) r = std::min(r, hs.offset / d);
  }
  if (!std::isfinite(r)) throw GeometryError("radialFunction: unbounded direction");
  return r;
}

/// Surface measure atoms: one (facet normal, facet area) pair per facet.
inline std::vector<std::pair<Direction, double>> gaussMapMeasure(const Polytope& P) {
  if (P.degeneracy && P.degeneracy->is_slab) {
    throw DegenerateShapeError(*P.degeneracy);
  }
  if (P.facets.empty()) throw GeometryError("gaussMapMeasure: no facets");
  std::vector<std::pair<Direction, double>> atoms;
  atoms.reserve(P.facets.size());
  for (const auto& f : P.facets) atoms.emplace_back(f.normal, f.area);
  return atoms;
}

/// Exact volume by the divergence theorem over facets:
/// |P| = (1/n) sum_f area_f * offset_f.  Degenerate bodies report 0.
inline double volume(const Polytope& P) {
  if (P.facets.empty()) return 0.0;
  if (P.degeneracy && P.degeneracy->is_slab) return 0.0;
  double v = 0.0;
  for (const auto& f : P.facets) {
    v += f.area * P.halfspaces[f.halfspace].offset;
  }
  return v / P.dim;
}

/// Width statistics along the principal axes of the vertex cloud.
inline DegeneracyReport detectDegenerate(const Polytope& P, double slab_tol) {
  DegeneracyReport rep;
  if (P.vertices.empty()) {
    rep.is_slab = true;
    return rep;
  }
  const int n = P.dim;
  Vec mean = Vec::Zero(n);
  for (const Vec& v : P.vertices) mean += v;
  mean /= static_cast<double>(P.vertices.size());
  Mat cov = Mat::Zero(n, n);
  for (const Vec& v : P.vertices) cov += (v - mean) * (v - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  double min_width = std::numeric_limits<double>::infinity();
  Vec thin_axis = es.eigenvectors().col(0);
  int thick_axes = 0;
  for (int k = 0; k < n; ++k) {
    const Vec axis = es.eigenvectors().col(k);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec& v : P.vertices) {
      const double s = axis.dot(v);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    const double w = hi - lo;
    if (w < min_width) {
      min_width = w;
      thin_axis = axis;
    }
    if (w >= slab_tol) ++thick_axes;
  }
  rep.thickness = min_width;
  rep.is_slab = min_width < slab_tol;
  rep.hausdorff_dim_estimate = thick_axes;
  if (rep.is_slab) rep.slab_normal = Direction(thin_axis);
  return rep;
}

// ---------------------------------------------------------------------------
// Construction helpers (2D)
// ---------------------------------------------------------------------------

namespace detail {

inline double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

/// Intersection of the boundary lines <x,n1>=h1, <x,n2>=h2.
inline Vec lineIntersect(const Direction& n1, double h1, const Direction& n2, double h2) {
  const double det = cross2(n1.vec(), n2.vec());
  if (std::abs(det) < 1e-15) throw GeometryError("lineIntersect: parallel lines");
  Vec x(2);
  x[0] = (h1 * n2[1] - h2 * n1[1]) / det;
  x[1] = (n1[0] * h2 - n2[0] * h1) / det;
  return x;
}

/// Assemble a polygon from its CCW vertex cycle.  Consecutive collinear
/// edges are merged so each facet carries a distinct normal.
inline Polytope polygonFromCcwVertices(std::vector<Vec> verts) {
  const double scale = [&] {
    double s = 1e-12;
    for (const Vec& v : verts) s = std::max(s, v.lpNorm<Eigen::Infinity>());
    return s;
  }();
  // Drop repeated points.
  std::vector<Vec> vs;
  for (const Vec& v : verts) {
    if (vs.empty() || (v - vs.back()).norm() > 1e-12 * scale) vs.push_back(v);
  }
  while (vs.size() > 1 && (vs.front() - vs.back()).norm() <= 1e-12 * scale) vs.pop_back();
  // Merge collinear consecutive edges.
  bool changed = true;
  while (changed && vs.size() > 3) {
    changed = false;
    for (size_t i = 0; i < vs.size(); ++i) {
      const Vec& a = vs[(i + vs.size() - 1) % vs.size()];
      const Vec& b = vs[i];
      const Vec& c = vs[(i + 1) % vs.size()];
      if (std::abs(cross2(b - a, c - b)) <= 1e-12 * scale * scale) {
        vs.erase(vs.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  if (vs.size() < 3) throw GeometryError("polygonFromCcwVertices: fewer than 3 vertices");

  Polytope P;
  P.dim = 2;
  P.vertices = vs;
  const int m = static_cast<int>(vs.size());
  double area2 = 0.0;
  Vec cen = Vec::Zero(2);
  for (int i = 0; i < m; ++i) {
    const Vec& a = vs[i];
    const Vec& b = vs[(i + 1) % m];
    const double c = cross2(a, b);
    area2 += c;
    cen += (a + b) * c;
  }
  if (area2 <= 0.0) throw GeometryError("polygonFromCcwVertices: not CCW / zero area");
  P.centroid = cen / (3.0 * area2);
  for (int i = 0; i < m; ++i) {
    const Vec& a = vs[i];
    const Vec& b = vs[(i + 1) % m];
    const Vec e = b - a;
    Direction n(vec2(e[1], -e[0]));
    const double off = n.dot(a);
    P.halfspaces.push_back({n, off});
    P.facets.push_back({i, {i, (i + 1) % m}, e.norm(), n});
  }
  double inr = std::numeric_limits<double>::infinity();
  for (const auto& hs : P.halfspaces) inr = std::min(inr, hs.offset - hs.normal.dot(P.centroid));
  P.inradius_estimate = inr;
  const auto rep = detectDegenerate(P, 1e-7 * P.diameter());
  if (rep.is_slab) P.degeneracy = rep;
  return P;
}

/// Andrew monotone chain; returns hull vertices in CCW order.
inline std::vector<Vec> convexHull2(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec& a, const Vec& b) { return (a - b).norm() < 1e-14; }),
            pts.end());
  const size_t n = pts.size();
  if (n < 3) throw GeometryError("convexHull2: fewer than 3 distinct points");
  std::vector<Vec> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// ---------------------------------------------------------------------------
// Construction helpers (3D): incremental convex hull + coplanar merge
// ---------------------------------------------------------------------------

struct TriFace {
  int a, b, c;
  Eigen::Vector3d n;  // unit outward normal
  double off;
  bool alive = true;
};

inline std::vector<TriFace> hull3(const std::vector<Vec>& pts) {
  const int np = static_cast<int>(pts.size());
  if (np < 4) throw GeometryError("hull3: fewer than 4 points");
  double scale = 1e-12;
  for (const Vec& p : pts) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
  const double eps = 1e-10 * scale;

  auto at = [&](int i) { return Eigen::Vector3d(pts[i][0], pts[i][1], pts[i][2]); };

  // Initial simplex: spread-out quadruple.
  int i0 = 0;
  for (int i = 1; i < np; ++i)
    if (pts[i][0] < pts[i0][0]) i0 = i;
  int i1 = -1;
  double best = eps;
  for (int i = 0; i < np; ++i) {
    const double d = (at(i) - at(i0)).norm();
    if (d > best) { best = d; i1 = i; }
  }
  if (i1 < 0) throw GeometryError("hull3: all points coincide");
  int i2 = -1;
  best = eps * (at(i1) - at(i0)).norm();
  for (int i = 0; i < np; ++i) {
    const double d = (at(i1) - at(i0)).cross(at(i) - at(i0)).norm();
    if (d > best) { best = d; i2 = i; }
  }
  if (i2 < 0) throw GeometryError("hull3: points are collinear");
  int i3 = -1;
  best = eps * (at(i1) - at(i0)).cross(at(i2) - at(i0)).norm();
  for (int i = 0; i < np; ++i) {
    const double d =
        std::abs((at(i1) - at(i0)).cross(at(i2) - at(i0)).dot(at(i) - at(i0)));
    if (d > best) { best = d; i3 = i; }
  }
  if (i3 < 0) throw GeometryError("hull3: points are coplanar");

  std::vector<TriFace> faces;
  auto addFace = [&](int a, int b, int c, const Eigen::Vector3d& interior) {
    Eigen::Vector3d n = (at(b) - at(a)).cross(at(c) - at(a));
    const double norm = n.norm();
    if (norm < 1e-30) throw GeometryError("hull3: degenerate face");
    n /= norm;
    if (n.dot(interior - at(a)) > 0) {
      std::swap(b, c);
      n = -n;
    }
    faces.push_back({a, b, c, n, n.dot(at(a)), true});
  };
  const Eigen::Vector3d interior = (at(i0) + at(i1) + at(i2) + at(i3)) / 4.0;
  addFace(i0, i1, i2, interior);
  addFace(i0, i1, i3, interior);
  addFace(i0, i2, i3, interior);
  addFace(i1, i2, i3, interior);

  for (int p = 0; p < np; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    // Visible faces.
    std::vector<int> vis;
    for (size_t f = 0; f < faces.size(); ++f) {
      if (faces[f].alive && faces[f].n.dot(at(p)) - faces[f].off > eps) {
        vis.push_back(static_cast<int>(f));
      }
    }
    if (vis.empty()) continue;
    // Horizon: directed edges of visible faces whose neighbors are hidden.
    std::map<std::pair<int, int>, int> edge_count;
    for (int f : vis) {
      const auto& F = faces[f];
      const int e[3][2] = {{F.a, F.b}, {F.b, F.c}, {F.c, F.a}};
      for (auto& ed : e) {
        auto key = std::minmax(ed[0], ed[1]);
        edge_count[{key.first, key.second}]++;
      }
    }
    std::vector<std::pair<int, int>> horizon;
    for (int f : vis) {
      const auto& F = faces[f];
      const int e[3][2] = {{F.a, F.b}, {F.b, F.c}, {F.c, F.a}};
      for (auto& ed : e) {
        auto key = std::minmax(ed[0], ed[1]);
        if (edge_count[{key.first, key.second}] == 1) horizon.push_back({ed[0], ed[1]});
      }
    }
    for (int f : vis) faces[f].alive = false;
    for (auto& [u, v] : horizon) {
      Eigen::Vector3d n = (at(v) - at(u)).cross(at(p) - at(u));
      const double norm = n.norm();
      if (norm < eps * eps) continue;  // sliver along the horizon
      n /= norm;
      faces.push_back({u, v, p, n, n.dot(at(u)), true});
    }
  }
  std::vector<TriFace> out;
  for (auto& f : faces)
    if (f.alive) out.push_back(f);
  return out;
}

struct MergedFace {
  Eigen::Vector3d n;
  double off;
  std::vector<int> loop;  // point indices, CCW seen from outside
  double area;
  std::vector<int> tris;  // member triangle indices (into hull3 output)
};

inline std::vector<MergedFace> mergeCoplanar(const std::vector<Vec>& pts,
                                             const std::vector<TriFace>& tris) {
  double scale = 1e-12;
  for (const Vec& p : pts) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
  const double ang_tol = 1e-7;
  const double off_tol = 1e-7 * scale;

  const int nt = static_cast<int>(tris.size());
  // Adjacency through shared undirected edges.
  std::map<std::pair<int, int>, std::vector<int>> by_edge;
  for (int t = 0; t < nt; ++t) {
    const int e[3][2] = {{tris[t].a, tris[t].b}, {tris[t].b, tris[t].c}, {tris[t].c, tris[t].a}};
    for (auto& ed : e) {
      auto key = std::minmax(ed[0], ed[1]);
      by_edge[{key.first, key.second}].push_back(t);
    }
  }
  std::vector<int> group(nt, -1);
  int ngroups = 0;
  for (int t = 0; t < nt; ++t) {
    if (group[t] >= 0) continue;
    const int g = ngroups++;
    std::vector<int> stack{t};
    group[t] = g;
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      const int e[3][2] = {
          {tris[cur].a, tris[cur].b}, {tris[cur].b, tris[cur].c}, {tris[cur].c, tris[cur].a}};
      for (auto& ed : e) {
        auto key = std::minmax(ed[0], ed[1]);
        for (int nb : by_edge[{key.first, key.second}]) {
          if (group[nb] >= 0) continue;
          if (tris[cur].n.dot(tris[nb].n) > std::cos(ang_tol) &&
              std::abs(tris[cur].off - tris[nb].off) < off_tol) {
            group[nb] = g;
            stack.push_back(nb);
          }
        }
      }
    }
  }

  std::vector<MergedFace> out(ngroups);
  for (int g = 0; g < ngroups; ++g) {
    auto& mf = out[g];
    mf.n.setZero();
    mf.off = 0;
    mf.area = 0;
  }
  for (int t = 0; t < nt; ++t) {
    auto& mf = out[group[t]];
    const Eigen::Vector3d a(pts[tris[t].a][0], pts[tris[t].a][1], pts[tris[t].a][2]);
    const Eigen::Vector3d b(pts[tris[t].b][0], pts[tris[t].b][1], pts[tris[t].b][2]);
    const Eigen::Vector3d c(pts[tris[t].c][0], pts[tris[t].c][1], pts[tris[t].c][2]);
    const double tri_area = 0.5 * (b - a).cross(c - a).norm();
    mf.n += tri_area * tris[t].n;
    mf.area += tri_area;
    mf.tris.push_back(t);
  }
  for (int g = 0; g < ngroups; ++g) {
    auto& mf = out[g];
    mf.n.normalize();
    // Boundary loop: directed edges not shared within the group.
    std::map<std::pair<int, int>, int> dir_edges;
    for (int t : mf.tris) {
      const int e[3][2] = {{tris[t].a, tris[t].b}, {tris[t].b, tris[t].c}, {tris[t].c, tris[t].a}};
      for (auto& ed : e) dir_edges[{ed[0], ed[1]}]++;
    }
    std::map<int, int> next;
    for (auto& [ed, cnt] : dir_edges) {
      if (dir_edges.count({ed.second, ed.first}) == 0) next[ed.first] = ed.second;
    }
    if (next.empty()) throw GeometryError("mergeCoplanar: closed face group");
    int start = next.begin()->first;
    int cur = start;
    do {
      mf.loop.push_back(cur);
      auto it = next.find(cur);
      if (it == next.end()) throw GeometryError("mergeCoplanar: open boundary loop");
      cur = it->second;
    } while (cur != start && mf.loop.size() <= next.size() + 1);
    if (cur != start) throw GeometryError("mergeCoplanar: boundary loop did not close");
    double off = 0;
    for (int v : mf.loop) off += mf.n.dot(Eigen::Vector3d(pts[v][0], pts[v][1], pts[v][2]));
    mf.off = off / static_cast<double>(mf.loop.size());
  }
  return out;
}

inline Polytope polytope3FromMergedFaces(const std::vector<Vec>& pts,
                                         const std::vector<MergedFace>& faces) {
  Polytope P;
  P.dim = 3;
  // Reindex the points actually used.
  std::map<int, int> remap;
  for (const auto& f : faces)
    for (int v : f.loop)
      if (!remap.count(v)) {
        remap[v] = static_cast<int>(P.vertices.size());
        P.vertices.push_back(pts[v]);
      }
  for (const auto& f : faces) {
    Halfspace hs{Direction(vec3(f.n[0], f.n[1], f.n[2])), f.off};
    std::vector<int> loop;
    for (int v : f.loop) loop.push_back(remap.at(v));
    const int hi = static_cast<int>(P.halfspaces.size());
    P.halfspaces.push_back(hs);
    P.facets.push_back({hi, std::move(loop), f.area, hs.normal});
  }
  // Volume centroid by tetra fan from the vertex mean.
  Vec mean = Vec::Zero(3);
  for (const Vec& v : P.vertices) mean += v;
  mean /= static_cast<double>(P.vertices.size());
  double vol = 0.0;
  Vec cen = Vec::Zero(3);
  for (const auto& f : P.facets) {
    const Vec& a = P.vertices[f.loop[0]];
    for (size_t k = 1; k + 1 < f.loop.size(); ++k) {
      const Vec& b = P.vertices[f.loop[k]];
      const Vec& c = P.vertices[f.loop[k + 1]];
      Eigen::Vector3d u(a[0] - mean[0], a[1] - mean[1], a[2] - mean[2]);
      Eigen::Vector3d v(b[0] - mean[0], b[1] - mean[1], b[2] - mean[2]);
      Eigen::Vector3d w(c[0] - mean[0], c[1] - mean[1], c[2] - mean[2]);
      const double tv = u.cross(v).dot(w) / 6.0;
      vol += tv;
      cen += tv * (mean + (a - mean + b - mean + c - mean) / 4.0);
    }
  }
  if (vol <= 0.0) throw GeometryError("polytope3FromMergedFaces: non-positive volume");
  P.centroid = cen / vol;
  double inr = std::numeric_limits<double>::infinity();
  for (const auto& hs : P.halfspaces) inr = std::min(inr, hs.offset - hs.normal.dot(P.centroid));
  P.inradius_estimate = inr;
  const auto rep = detectDegenerate(P, 1e-7 * P.diameter());
  if (rep.is_slab) P.degeneracy = rep;
  return P;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Wulff shape, Minkowski sum, Hausdorff distance
// ---------------------------------------------------------------------------

/// Convex hull of a point cloud as a Polytope (n = 2 or 3).
inline Polytope polytopeFromPoints(const std::vector<Vec>& pts) {
  if (pts.empty()) throw GeometryError("polytopeFromPoints: empty");
  const int d = static_cast<int>(pts.front().size());
  if (d == 2) {
    return detail::polygonFromCcwVertices(detail::convexHull2(pts));
  }
  if (d == 3) {
    const auto tris = detail::hull3(pts);
    return detail::polytope3FromMergedFaces(pts, detail::mergeCoplanar(pts, tris));
  }
  throw GeometryError("polytopeFromPoints: dim must be 2 or 3");
}

/// Wulff shape of positive support heights over the given normal set:
/// the intersection of { <x, xi_i> <= h_i }.  Inactive halfspaces are kept
/// in the H-rep without a facet.  n=2 uses angular-sort adjacent-line
/// intersection with pruning; n=3 uses the dual-point convex hull.
inline Polytope wulffShape(const SupportVector& h) {
  const int n = h.dim();

  // Merge duplicate directions, keeping the tighter constraint.
  std::vector<Direction> normals;
  std::vector<double> heights;
  for (size_t i = 0; i < h.normals.size(); ++i) {
    bool merged = false;
    for (size_t j = 0; j < normals.size(); ++j) {
      if (normals[j].sameAs(h.normals[i])) {
        heights[j] = std::min(heights[j], h.heights[i]);
        merged = true;
        break;
      }
    }
    if (!merged) {
      normals.push_back(h.normals[i]);
      heights.push_back(h.heights[i]);
    }
  }
  const int m = static_cast<int>(normals.size());

  if (n == 2) {
    if (m < 3) throw UnboundedShapeError("wulffShape: fewer than 3 distinct normals");
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return polarAngle(normals[a].vec()) < polarAngle(normals[b].vec());
    });
    // Bounded iff no angular gap of size >= pi.
    for (int k = 0; k < m; ++k) {
      const double a0 = polarAngle(normals[order[k]].vec());
      double a1 = polarAngle(normals[order[(k + 1) % m]].vec());
      if (k + 1 == m) a1 += 2.0 * kPi;
      if (a1 - a0 >= kPi - 1e-12) {
        throw UnboundedShapeError("wulffShape: normals leave an open halfplane gap");
      }
    }
    // Prune: a halfplane is inactive when the corner of its (angular)
    // neighbors already satisfies it.
    const double scale = *std::max_element(heights.begin(), heights.end());
    std::vector<int> act = order;
    bool removed = true;
    while (removed && static_cast<int>(act.size()) >= 3) {
      removed = false;
      for (size_t k = 0; k < act.size(); ++k) {
        const int i = act[k];
        const int jp = act[(k + act.size() - 1) % act.size()];
        const int jn = act[(k + 1) % act.size()];
        // Removing i must not open an angular gap >= pi between its
        // neighbors (the region would become unbounded there and the corner
        // test below is invalid).
        double gap = polarAngle(normals[jn].vec()) - polarAngle(normals[jp].vec());
        if (gap < 0.0) gap += 2.0 * kPi;
        if (gap >= kPi - 1e-12) continue;
        Vec x;
        try {
          x = detail::lineIntersect(normals[jp], heights[jp], normals[jn], heights[jn]);
        } catch (const GeometryError&) {
          continue;  // neighbors parallel; i separates them and stays
        }
        if (normals[i].dot(x) <= heights[i] + 1e-12 * scale) {
          act.erase(act.begin() + static_cast<long>(k));
          removed = true;
          break;
        }
      }
    }
    if (static_cast<int>(act.size()) < 3) {
      throw UnboundedShapeError("wulffShape: active set collapsed");
    }
    std::vector<Vec> verts;
    for (size_t k = 0; k < act.size(); ++k) {
      const int i = act[k];
      const int j = act[(k + 1) % act.size()];
      verts.push_back(detail::lineIntersect(normals[i], heights[i], normals[j], heights[j]));
    }
    Polytope P = detail::polygonFromCcwVertices(verts);
    // Rebuild H-rep in input order so inactive halfspaces are retained and
    // facets point back at the caller's indices.
    std::vector<Halfspace> hss;
    for (size_t i = 0; i < h.normals.size(); ++i) hss.push_back({h.normals[i], h.heights[i]});
    std::vector<Facet> facets;
    for (const auto& f : P.facets) {
      const Direction& fn = f.normal;
      int match = -1;
      for (size_t i = 0; i < h.normals.size(); ++i) {
        if (h.normals[i].sameAs(fn, 1e-7) && match < 0) match = static_cast<int>(i);
      }
      if (match < 0) throw GeometryError("wulffShape: facet normal lost");
      facets.push_back({match, f.loop, f.area, hss[match].normal});
    }
    P.halfspaces = std::move(hss);
    P.facets = std::move(facets);
    return P;
  }

  if (n == 3) {
    if (m < 4) throw UnboundedShapeError("wulffShape: fewer than 4 distinct normals");
    std::vector<Vec> duals;
    for (int i = 0; i < m; ++i) duals.push_back(normals[i].vec() / heights[i]);
    std::vector<detail::TriFace> tris;
    try {
      tris = detail::hull3(duals);
    } catch (const GeometryError&) {
      throw UnboundedShapeError("wulffShape: normals do not span R^3");
    }
    // Bounded iff the origin is strictly inside the dual hull.
    for (const auto& f : tris) {
      if (!(f.off > 1e-12)) {
        throw UnboundedShapeError("wulffShape: normals do not positively span R^3");
      }
    }
    const auto dual_faces = detail::mergeCoplanar(duals, tris);
    // Each dual face corresponds to one primal vertex.
    std::vector<Vec> pverts;
    std::vector<std::vector<int>> vertex_inputs;  // dual point (= input) ids per vertex
    for (const auto& df : dual_faces) {
      pverts.push_back(vec3(df.n[0] / df.off, df.n[1] / df.off, df.n[2] / df.off));
      vertex_inputs.push_back(df.loop);
    }
    Polytope P;
    P.dim = 3;
    P.vertices = pverts;
    for (size_t i = 0; i < h.normals.size(); ++i)
      P.halfspaces.push_back({h.normals[i], h.heights[i]});
    // Primal facet i = ordered cycle of primal vertices whose dual face
    // touches dual point i.
    // Map merged dual indices back to original input indices.
    std::vector<int> dual_to_input(m);
    std::iota(dual_to_input.begin(), dual_to_input.end(), 0);
    std::vector<int> merged_to_input;
    {
      // normals[] may be a merged subset of h.normals; find input index of each.
      for (int i = 0; i < m; ++i) {
        int match = -1;
        for (size_t j = 0; j < h.normals.size(); ++j) {
          if (h.normals[j].sameAs(normals[i]) && match < 0) match = static_cast<int>(j);
        }
        merged_to_input.push_back(match);
      }
    }
    for (int i = 0; i < m; ++i) {
      std::vector<int> around;
      for (size_t vidx = 0; vidx < vertex_inputs.size(); ++vidx) {
        for (int pid : vertex_inputs[vidx]) {
          if (pid == i) around.push_back(static_cast<int>(vidx));
        }
      }
      if (around.size() < 3) continue;  // inactive input plane
      // Order around the facet normal.
      const Vec& nv = normals[i].vec();
      Eigen::Vector3d nn(nv[0], nv[1], nv[2]);
      Eigen::Vector3d t1 = nn.unitOrthogonal();
      Eigen::Vector3d t2 = nn.cross(t1);
      Eigen::Vector3d c = Eigen::Vector3d::Zero();
      for (int v : around) c += Eigen::Vector3d(pverts[v][0], pverts[v][1], pverts[v][2]);
      c /= static_cast<double>(around.size());
      std::sort(around.begin(), around.end(), [&](int a, int b) {
        Eigen::Vector3d pa(pverts[a][0], pverts[a][1], pverts[a][2]);
        Eigen::Vector3d pb(pverts[b][0], pverts[b][1], pverts[b][2]);
        return std::atan2(t2.dot(pa - c), t1.dot(pa - c)) <
               std::atan2(t2.dot(pb - c), t1.dot(pb - c));
      });
      double area = 0.0;
      const Eigen::Vector3d p0(pverts[around[0]][0], pverts[around[0]][1], pverts[around[0]][2]);
      for (size_t k = 1; k + 1 < around.size(); ++k) {
        Eigen::Vector3d pa(pverts[around[k]][0], pverts[around[k]][1], pverts[around[k]][2]);
        Eigen::Vector3d pb(pverts[around[k + 1]][0], pverts[around[k + 1]][1],
                           pverts[around[k + 1]][2]);
        area += 0.5 * (pa - p0).cross(pb - p0).norm();
      }
      P.facets.push_back({merged_to_input[i], around, area, h.normals[merged_to_input[i]]});
    }
    Vec mean = Vec::Zero(3);
    for (const Vec& v : P.vertices) mean += v;
    mean /= static_cast<double>(P.vertices.size());
    double vol = 0.0;
    Vec cen = Vec::Zero(3);
    for (const auto& f : P.facets) {
      const Vec& a = P.vertices[f.loop[0]];
      for (size_t k = 1; k + 1 < f.loop.size(); ++k) {
        const Vec& b = P.vertices[f.loop[k]];
        const Vec& c = P.vertices[f.loop[k + 1]];
        Eigen::Vector3d u(a[0] - mean[0], a[1] - mean[1], a[2] - mean[2]);
        Eigen::Vector3d v(b[0] - mean[0], b[1] - mean[1], b[2] - mean[2]);
        Eigen::Vector3d w(c[0] - mean[0], c[1] - mean[1], c[2] - mean[2]);
        const double tv = u.cross(v).dot(w) / 6.0;
        vol += tv;
        cen += tv * (mean + (a - mean + b - mean + c - mean) / 4.0);
      }
    }
    if (vol <= 0.0) throw GeometryError("wulffShape: non-positive volume");
    P.centroid = cen / vol;
    double inr = std::numeric_limits<double>::infinity();
    for (const auto& f : P.facets) {
      const auto& hs = P.halfspaces[f.halfspace];
      inr = std::min(inr, hs.offset - hs.normal.dot(P.centroid));
    }
    P.inradius_estimate = inr;
    const auto rep = detectDegenerate(P, 1e-7 * P.diameter());
    if (rep.is_slab) P.degeneracy = rep;
    return P;
  }
  throw GeometryError("wulffShape: dim must be 2 or 3");
}

/// Minkowski sum via convex hull of pairwise vertex sums; support values
/// add exactly on the result.
inline Polytope minkowskiSum(const Polytope& P, const Polytope& Q) {
  if (P.dim != Q.dim) throw GeometryError("minkowskiSum: dimension mismatch");
  std::vector<Vec> sums;
  sums.reserve(P.vertices.size() * Q.vertices.size());
  for (const Vec& a : P.vertices)
    for (const Vec& b : Q.vertices) sums.push_back(a + b);
  return polytopeFromPoints(sums);
}

/// sup-norm distance of support functions over a deterministic direction
/// sample augmented with both facet-normal sets.
inline double hausdorffDistance(const Polytope& P, const Polytope& Q, int n_dirs = 256) {
  if (P.dim != Q.dim) throw GeometryError("hausdorffDistance: dimension mismatch");
  if (n_dirs < 16) throw GeometryError("hausdorffDistance: need at least 16 directions");
  double d = 0.0;
  auto probe = [&](const Vec& u) {
    d = std::max(d, std::abs(supportFunction(P, u) - supportFunction(Q, u)));
  };
  for (const auto& dir : sampleDirections(P.dim, n_dirs)) probe(dir.vec());
  for (const auto& f : P.facets) probe(f.normal.vec());
  for (const auto& f : Q.facets) probe(f.normal.vec());
  // Vertex-supporting directions of the difference: probe directions toward
  // each vertex of both bodies as seen from the other's centroid.
  for (const Vec& v : P.vertices) {
    const Vec u = v - Q.centroid;
    if (u.norm() > 1e-14) probe(u / u.norm());
  }
  for (const Vec& v : Q.vertices) {
    const Vec u = v - P.centroid;
    if (u.norm() > 1e-14) probe(u / u.norm());
  }
  return d;
}

inline Polytope translate(const Polytope& P, const Vec& t) {
  Polytope Q = P;
  for (Vec& v : Q.vertices) v += t;
  for (auto& hs : Q.halfspaces) hs.offset += hs.normal.dot(t);
  Q.centroid += t;
  return Q;
}

inline Polytope scale(const Polytope& P, double lam) {
  if (!(lam > 0.0)) throw GeometryError("scale: factor must be positive");
  Polytope Q = P;
  for (Vec& v : Q.vertices) v *= lam;
  for (auto& hs : Q.halfspaces) hs.offset *= lam;
  for (auto& f : Q.facets) f.area *= std::pow(lam, P.dim - 1);
  Q.centroid *= lam;
  Q.inradius_estimate *= lam;
  return Q;
}

/// Support heights of P at its own facet normals (round-trip companion of
/// wulffShape).
inline SupportVector supportAtFacetNormals(const Polytope& P) {
  std::vector<Direction> normals;
  std::vector<double> heights;
  for (const auto& f : P.facets) {
    normals.push_back(f.normal);
    heights.push_back(P.halfspaces[f.halfspace].offset);
  }
  return SupportVector(std::move(normals), std::move(heights));
}

}  // namespace phmink
