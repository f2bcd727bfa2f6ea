#pragma once

#include "phmink/geometry.hpp"

#include <array>
#include <ostream>

namespace phmink {

/// Annular computational domain between an inner circle and the outer
/// polytope.  `inner_radius` is the data circle where Dirichlet data for the
/// canonical measure lives; `margin_inner_radius` is the (smaller) radius of
/// the meshed inner boundary, so the base solution can be evaluated at
/// contracted points x/(1+t) without extrapolation.
struct ConvexRing {
  Polytope outer;
  Vec inner_center;
  double inner_radius = 0.0;
  double margin_inner_radius = 0.0;
};

inline constexpr int kInnerTag = -1;

struct BoundaryElement {
  int a = 0, b = 0;
  int tag = 0;  // kInnerTag or outer facet index
};

struct SimplicialMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> simplices;
  std::vector<BoundaryElement> boundary;
  std::vector<char> on_data_ring;  // nodes lying exactly on the data circle
  std::vector<char> on_inner;      // nodes on the meshed inner boundary
  std::vector<char> on_outer;      // nodes on the outer polygon boundary
  double h = 0.0;

  double minAngle() const {
    double worst = kPi;
    for (const auto& t : simplices) {
      const Vec2 a = nodes[t[0]], b = nodes[t[1]], c = nodes[t[2]];
      const double la = (b - c).norm(), lb = (a - c).norm(), lc = (a - b).norm();
      const double angA = std::acos(std::clamp((lb * lb + lc * lc - la * la) / (2 * lb * lc), -1.0, 1.0));
      const double angB = std::acos(std::clamp((la * la + lc * lc - lb * lb) / (2 * la * lc), -1.0, 1.0));
      worst = std::min({worst, angA, angB, kPi - angA - angB});
    }
    return worst;
  }

  double area() const {
    double s = 0.0;
    for (const auto& t : simplices) {
      const Vec2 a = nodes[t[0]], b = nodes[t[1]], c = nodes[t[2]];
      s += 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    }
    return s;
  }
};

struct RingMeshOptions {
  double margin_factor = 0.8;  // margin_inner_radius / inner_radius
  // Radial spacing is tied to the smallest angular edge at the inner circle
  // so aspect ratios stay bounded; this caps the ratio radial/angular.
  double max_radial_aspect = 1.6;
  // Facet resolution floor; many-facet proxies of smooth bodies may lower it.
  int min_edges_per_facet = 4;
};

namespace detail {

struct RingLayout {
  std::vector<Vec2> outer_pts;   // boundary points, CCW
  std::vector<int> facet_of;     // facet id of edge (j, j+1)
};

inline RingLayout sampleOuterBoundary(const Polytope& P, double target_h, int min_edges) {
  RingLayout lay;
  for (const auto& f : P.facets) {
    const Vec& a = P.vertices[f.loop[0]];
    const Vec& b = P.vertices[f.loop[1]];
    const double len = (b - a).norm();
    const int k = std::max(min_edges, static_cast<int>(std::ceil(len / target_h)));
    for (int j = 0; j < k; ++j) {
      const Vec p = a + (b - a) * (static_cast<double>(j) / k);
      lay.outer_pts.emplace_back(p[0], p[1]);
      lay.facet_of.push_back(f.halfspace);
    }
  }
  return lay;
}

}  // namespace detail

/// Structured radial mesh of the ring between the circle of radius
/// margin_inner_radius about `center` and the polygon boundary, with an
/// exact node ring on the data circle.  Boundary nodes lie exactly on the
/// facet lines; inner nodes exactly on the margin circle.
inline std::pair<ConvexRing, SimplicialMesh> buildRingAt(const Polytope& P, const Vec& center,
                                                         double r0, double target_h,
                                                         const RingMeshOptions& opts = {}) {
  if (P.dim != 2) throw MeshError("buildRing: only n=2 meshing is implemented");
  if (P.degeneracy && P.degeneracy->is_slab) throw MeshError("buildRing: degenerate polygon");
  if (!(opts.margin_factor > 0.0 && opts.margin_factor <= 1.0)) {
    throw MeshError("buildRing: margin factor must be in (0,1]");
  }

  double apothem = std::numeric_limits<double>::infinity();
  for (const auto& f : P.facets) {
    const auto& hs = P.halfspaces[f.halfspace];
    apothem = std::min(apothem, hs.offset - hs.normal.dot(center));
  }
  if (!(r0 > 0.0 && r0 < apothem)) {
    throw MeshError("buildRing: inner circle not inside the polygon");
  }
  const double margin = opts.margin_factor * r0;
  if (apothem - r0 < 0.1 * P.inradius_estimate) {
    throw MeshError("buildRing: inner ball clearance too small");
  }
  if (target_h > 0.5 * (apothem - r0)) {
    throw MeshError("buildRing: target_h too large to resolve the ring");
  }

  ConvexRing ring{P, center, r0, margin};

  const auto lay = detail::sampleOuterBoundary(P, target_h, opts.min_edges_per_facet);
  const int M = static_cast<int>(lay.outer_pts.size());
  const Vec2 c2(center[0], center[1]);

  // Column radii/directions and the smallest angular step.
  std::vector<double> R(M);
  std::vector<Vec2> dir(M);
  double min_dtheta = 2.0 * kPi;
  for (int j = 0; j < M; ++j) {
    const Vec2 d = lay.outer_pts[j] - c2;
    R[j] = d.norm();
    dir[j] = d / R[j];
  }
  for (int j = 0; j < M; ++j) {
    const Vec2 &a = dir[j], &b = dir[(j + 1) % M];
    min_dtheta = std::min(min_dtheta, std::acos(std::clamp(a.dot(b), -1.0, 1.0)));
  }

  const double Rmax = *std::max_element(R.begin(), R.end());
  const int L2 = std::max(2, static_cast<int>(std::ceil((Rmax - r0) / target_h)));
  // The collar sits at the smallest radii where angular edges are shortest;
  // its layer count is capped separately so aspect ratios stay bounded there.
  const double collar_dr =
      std::min(target_h, opts.max_radial_aspect * margin * min_dtheta);
  const int L1 = (opts.margin_factor < 1.0)
                     ? std::max(1, static_cast<int>(std::ceil((r0 - margin) / collar_dr)))
                     : 0;
  const int L = L1 + L2;

  SimplicialMesh mesh;
  mesh.h = target_h;
  mesh.nodes.resize(static_cast<size_t>(M) * (L + 1));
  mesh.on_data_ring.assign(mesh.nodes.size(), 0);
  mesh.on_inner.assign(mesh.nodes.size(), 0);
  mesh.on_outer.assign(mesh.nodes.size(), 0);
  auto id = [&](int j, int r) { return (j % M) * (L + 1) + r; };

  for (int j = 0; j < M; ++j) {
    for (int r = 0; r <= L; ++r) {
      double rad;
      if (r <= L1) {
        rad = (L1 == 0) ? r0 : margin + (r0 - margin) * (static_cast<double>(r) / L1);
      } else {
        rad = r0 + (R[j] - r0) * (static_cast<double>(r - L1) / L2);
      }
      mesh.nodes[id(j, r)] = c2 + rad * dir[j];
    }
    mesh.nodes[id(j, L)] = lay.outer_pts[j];  // exact facet incidence
    mesh.on_data_ring[id(j, L1)] = 1;
    mesh.on_inner[id(j, 0)] = 1;
    mesh.on_outer[id(j, L)] = 1;
  }

  auto pushTri = [&](int a, int b, int c) {
    const Vec2 &pa = mesh.nodes[a], &pb = mesh.nodes[b], &pc = mesh.nodes[c];
    const double det = (pb - pa).x() * (pc - pa).y() - (pb - pa).y() * (pc - pa).x();
    if (det > 0) {
      mesh.simplices.push_back({a, b, c});
    } else {
      mesh.simplices.push_back({a, c, b});
    }
  };
  for (int j = 0; j < M; ++j) {
    for (int r = 0; r < L; ++r) {
      const int p00 = id(j, r), p10 = id(j + 1, r), p01 = id(j, r + 1), p11 = id(j + 1, r + 1);
      // Split along the shorter diagonal.
      const double d0 = (mesh.nodes[p00] - mesh.nodes[p11]).norm();
      const double d1 = (mesh.nodes[p10] - mesh.nodes[p01]).norm();
      if (d0 <= d1) {
        pushTri(p00, p10, p11);
        pushTri(p00, p11, p01);
      } else {
        pushTri(p00, p10, p01);
        pushTri(p10, p11, p01);
      }
    }
  }
  for (int j = 0; j < M; ++j) {
    mesh.boundary.push_back({id(j, L), id(j + 1, L), lay.facet_of[j]});
    mesh.boundary.push_back({id(j + 1, 0), id(j, 0), kInnerTag});
  }
  return {ring, mesh};
}

/// Canonical ring: inner circle about the centroid at shrink times the
/// centroid-to-boundary distance.
inline std::pair<ConvexRing, SimplicialMesh> buildRing(const Polytope& P, double shrink,
                                                       double target_h,
                                                       const RingMeshOptions& opts = {}) {
  if (!(shrink > 0.0 && shrink < 1.0)) throw MeshError("buildRing: shrink must be in (0,1)");
  const Vec center = P.centroid;
  double apothem = std::numeric_limits<double>::infinity();
  for (const auto& f : P.facets) {
    const auto& hs = P.halfspaces[f.halfspace];
    apothem = std::min(apothem, hs.offset - hs.normal.dot(center));
  }
  return buildRingAt(P, center, shrink * apothem, target_h, opts);
}

/// Uniform red refinement.  Boundary tags are inherited; new nodes on the
/// inner boundary and the data ring are re-projected to their circles.
inline SimplicialMesh refine(const SimplicialMesh& mesh, const ConvexRing& ring) {
  SimplicialMesh out;
  out.h = mesh.h / 2.0;
  out.nodes = mesh.nodes;
  out.on_data_ring = mesh.on_data_ring;
  out.on_inner = mesh.on_inner;
  out.on_outer = mesh.on_outer;
  const Vec2 c2(ring.inner_center[0], ring.inner_center[1]);

  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find({key.first, key.second});
    if (it != midpoint.end()) return it->second;
    Vec2 p = 0.5 * (mesh.nodes[a] + mesh.nodes[b]);
    char dr = 0, in = 0, ou = 0;
    if (mesh.on_inner[a] && mesh.on_inner[b]) {
      p = c2 + ring.margin_inner_radius * (p - c2).normalized();
      in = 1;
    } else if (mesh.on_data_ring[a] && mesh.on_data_ring[b]) {
      p = c2 + ring.inner_radius * (p - c2).normalized();
      dr = 1;
    }
    if (mesh.on_outer[a] && mesh.on_outer[b]) ou = 1;
    const int idx = static_cast<int>(out.nodes.size());
    out.nodes.push_back(p);
    out.on_data_ring.push_back(dr);
    out.on_inner.push_back(in);
    out.on_outer.push_back(ou);
    midpoint[{key.first, key.second}] = idx;
    return idx;
  };

  for (const auto& t : mesh.simplices) {
    const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
    out.simplices.push_back({t[0], ab, ca});
    out.simplices.push_back({ab, t[1], bc});
    out.simplices.push_back({ca, bc, t[2]});
    out.simplices.push_back({ab, bc, ca});
  }
  for (const auto& be : mesh.boundary) {
    const int m = mid(be.a, be.b);
    out.boundary.push_back({be.a, m, be.tag});
    out.boundary.push_back({m, be.b, be.tag});
  }
  return out;
}

/// Plain-text mesh dump for external visualization.
inline void dumpMesh(std::ostream& os, const SimplicialMesh& mesh) {
  os << "# phmink mesh dump v1\n";
  os << "# sections: nodes (x y data_ring inner outer), simplices (a b c), "
        "boundary (a b tag); tag -1 = inner circle, otherwise facet id\n";
  os << "nodes " << mesh.nodes.size() << "\n";
  os.precision(17);
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    os << mesh.nodes[i].x() << " " << mesh.nodes[i].y() << " "
       << int(mesh.on_data_ring[i]) << " " << int(mesh.on_inner[i]) << " "
       << int(mesh.on_outer[i]) << "\n";
  }
  os << "simplices " << mesh.simplices.size() << "\n";
  for (const auto& t : mesh.simplices) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "boundary " << mesh.boundary.size() << "\n";
  for (const auto& b : mesh.boundary) os << b.a << " " << b.b << " " << b.tag << "\n";
}

}  // namespace phmink
