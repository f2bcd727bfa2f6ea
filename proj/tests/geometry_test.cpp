#include "phmink/geometry.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace phmink;

namespace {

Polytope unitSquare() {
  std::vector<Direction> n = {Direction(1.0, 0.0), Direction(-1.0, 0.0), Direction(0.0, 1.0),
                              Direction(0.0, -1.0)};
  return wulffShape(SupportVector(n, {1.0, 1.0, 1.0, 1.0}));
}

}  // namespace

TEST_CASE("support function basics") {
  const Polytope sq = unitSquare();
  CHECK(supportFunction(sq, vec2(1.0, 0.0)) == Catch::Approx(1.0));
  CHECK(supportFunction(sq, vec2(0.0, 0.0)) == Catch::Approx(0.0).margin(1e-15));
  CHECK(supportFunction(sq, vec2(1.0, 1.0)) == Catch::Approx(2.0));
}

TEST_CASE("support additivity under Minkowski sum") {
  const Polytope sq = unitSquare();
  std::vector<Direction> dn = {Direction(1.0, 1.0), Direction(-1.0, 1.0), Direction(-1.0, -1.0),
                               Direction(1.0, -1.0)};
  const Polytope diamond = wulffShape(SupportVector(dn, {1.0, 1.0, 1.0, 1.0}));
  const Polytope sum = minkowskiSum(sq, diamond);
  for (const auto& d : sampleDirections(2, 64)) {
    CHECK(supportFunction(sum, d.vec()) ==
          Catch::Approx(supportFunction(sq, d.vec()) + supportFunction(diamond, d.vec()))
              .margin(1e-12));
  }
}

TEST_CASE("wulff shape square") {
  const Polytope sq = unitSquare();
  REQUIRE(sq.vertices.size() == 4);
  REQUIRE(sq.facets.size() == 4);
  for (const Vec& v : sq.vertices) {
    CHECK(std::abs(v[0]) == Catch::Approx(1.0));
    CHECK(std::abs(v[1]) == Catch::Approx(1.0));
  }
  CHECK(volume(sq) == Catch::Approx(4.0));
}

TEST_CASE("wulff shape regular octagon") {
  std::vector<Direction> n;
  for (int k = 0; k < 8; ++k) n.emplace_back(std::cos(kPi * k / 4.0), std::sin(kPi * k / 4.0));
  const Polytope oct = wulffShape(SupportVector(n, std::vector<double>(8, 1.0)));
  REQUIRE(oct.vertices.size() == 8);
  const double circum = 1.0 / std::cos(kPi / 8.0);
  for (const Vec& v : oct.vertices) CHECK(v.norm() == Catch::Approx(circum));
}

TEST_CASE("redundant halfspace is inactive") {
  std::vector<Direction> n = {Direction(1.0, 0.0), Direction(-1.0, 0.0), Direction(0.0, 1.0),
                              Direction(0.0, -1.0), Direction(1.0, 1.0)};
  const Polytope P = wulffShape(SupportVector(n, {1.0, 1.0, 1.0, 1.0, 2.0}));
  REQUIRE(P.facets.size() == 4);
  for (const auto& f : P.facets) CHECK(f.halfspace != 4);
  CHECK(volume(P) == Catch::Approx(4.0));
}

TEST_CASE("unbounded wulff shape rejected") {
  std::vector<Direction> n = {Direction(1.0, 0.0), Direction(-1.0, 0.0)};
  CHECK_THROWS_AS(wulffShape(SupportVector(n, {1.0, 1.0})), UnboundedShapeError);
}

TEST_CASE("minkowski sum identities") {
  const Polytope sq = unitSquare();
  const Polytope origin = polytopeFromPoints({vec2(0.0, 0.0), vec2(1e-13, 0.0), vec2(0.0, 1e-13)});
  SECTION("sum with itself doubles") {
    const Polytope twice = minkowskiSum(sq, sq);
    CHECK(volume(twice) == Catch::Approx(16.0));
    CHECK(supportFunction(twice, vec2(1.0, 0.0)) == Catch::Approx(2.0));
  }
}

TEST_CASE("hausdorff distance") {
  const Polytope sq = unitSquare();
  CHECK(hausdorffDistance(sq, sq, 64) == Catch::Approx(0.0).margin(1e-14));
  const Polytope big = scale(sq, 2.0);
  CHECK(hausdorffDistance(sq, big, 64) == Catch::Approx(1.0 * std::sqrt(2.0)).epsilon(1e-9));
  const Polytope moved = translate(sq, vec2(0.3, 0.0));
  CHECK(hausdorffDistance(sq, moved, 64) == Catch::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("gauss map measure of the square") {
  const auto atoms = gaussMapMeasure(unitSquare());
  REQUIRE(atoms.size() == 4);
  Vec closure = Vec::Zero(2);
  double per = 0.0;
  for (const auto& [d, a] : atoms) {
    CHECK(a == Catch::Approx(2.0));
    closure += a * d.vec();
    per += a;
  }
  CHECK(closure.norm() < 1e-9);
  CHECK(per == Catch::Approx(8.0));
}

TEST_CASE("gauss map measure n=3 cube") {
  std::vector<Vec> pts;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) pts.push_back(vec3(0.5 * sx, 0.5 * sy, 0.5 * sz));
  const Polytope cube = polytopeFromPoints(pts);
  const auto atoms = gaussMapMeasure(cube);
  REQUIRE(atoms.size() == 6);
  for (const auto& [d, a] : atoms) CHECK(a == Catch::Approx(1.0));
  CHECK(volume(cube) == Catch::Approx(1.0));
}

TEST_CASE("radial function") {
  const Polytope sq = unitSquare();
  CHECK(radialFunction(sq, Direction(1.0, 0.0)) == Catch::Approx(1.0));
  CHECK(radialFunction(sq, Direction(1.0, 1.0)) == Catch::Approx(std::sqrt(2.0)));
  const Polytope shifted = translate(sq, vec2(2.0, 0.0));
  CHECK_THROWS_AS(radialFunction(shifted, Direction(-1.0, 0.0)), GeometryError);
}

TEST_CASE("radial homogeneity") {
  const Polytope sq = unitSquare();
  const Polytope big = scale(sq, 2.0);
  for (const auto& d : sampleDirections(2, 32)) {
    CHECK(radialFunction(big, d) == Catch::Approx(2.0 * radialFunction(sq, d)));
  }
}

TEST_CASE("octagon volume closed form") {
  // Regular octagon with circumradius 1 has area 2*sqrt(2).
  std::vector<Vec> pts;
  for (int k = 0; k < 8; ++k) {
    pts.push_back(vec2(std::cos(kPi * k / 4.0), std::sin(kPi * k / 4.0)));
  }
  const Polytope oct = polytopeFromPoints(pts);
  CHECK(volume(oct) == Catch::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("volume vs radial quadrature") {
  std::vector<Vec> pts = {vec2(1.1, -0.2), vec2(0.7, 0.9), vec2(-0.5, 1.0),
                          vec2(-1.2, 0.1), vec2(-0.4, -0.8), vec2(0.5, -1.0)};
  const Polytope P = polytopeFromPoints(pts);
  const int N = 4096;
  double q = 0.0;
  for (int k = 0; k < N; ++k) {
    const double th = 2.0 * kPi * (k + 0.5) / N;
    const double r = radialFunction(P, Direction(std::cos(th), std::sin(th)));
    q += 0.5 * r * r * (2.0 * kPi / N);
  }
  CHECK(q == Catch::Approx(volume(P)).epsilon(1e-3));
}

TEST_CASE("degeneracy detection") {
  const Polytope sq = unitSquare();
  const auto rep = detectDegenerate(sq, 1e-7 * sq.diameter());
  CHECK_FALSE(rep.is_slab);
  CHECK(rep.thickness == Catch::Approx(2.0));

  std::vector<Vec> thin = {vec2(-1.0, -5e-13), vec2(1.0, -5e-13), vec2(1.0, 5e-13),
                           vec2(-1.0, 5e-13)};
  Polytope flat;
  flat.dim = 2;
  flat.vertices = thin;
  const auto rep2 = detectDegenerate(flat, 1e-7 * 2.0);
  CHECK(rep2.is_slab);
  REQUIRE(rep2.slab_normal.has_value());
  CHECK(std::abs((*rep2.slab_normal)[1]) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("slab wulff shape carries degeneracy report") {
  std::vector<Direction> n = {Direction(1.0, 0.0), Direction(-1.0, 0.0), Direction(0.0, 1.0),
                              Direction(0.0, -1.0)};
  const Polytope flat = wulffShape(SupportVector(n, {1.0, 1.0, 1e-12, 1e-12}));
  REQUIRE(flat.degeneracy.has_value());
  CHECK(flat.degeneracy->is_slab);
  CHECK_THROWS_AS(gaussMapMeasure(flat), DegenerateShapeError);
  CHECK(volume(flat) == 0.0);
}

TEST_CASE("wulff shape n=3 cube") {
  std::vector<Direction> n;
  for (int a = 0; a < 3; ++a) {
    for (int s : {-1, 1}) {
      Vec v = Vec::Zero(3);
      v[a] = s;
      n.emplace_back(v);
    }
  }
  const Polytope cube = wulffShape(SupportVector(n, std::vector<double>(6, 1.0)));
  REQUIRE(cube.vertices.size() == 8);
  REQUIRE(cube.facets.size() == 6);
  CHECK(volume(cube) == Catch::Approx(8.0));
  for (const auto& f : cube.facets) CHECK(f.area == Catch::Approx(4.0));
}

TEST_CASE("wulff shape keeps a halfspace whose neighbors leave a half-plane gap") {
  // The second and fourth normals are slightly more than opposite, so the
  // directions adjacent to (0, 1) span an angular gap just over pi.  Pruning
  // (0, 1) would leave the region unbounded there; all four facets must
  // survive.
  const double eps = 1e-3;
  std::vector<Direction> n = {Direction(0.0, -1.0), Direction(1.0, 0.0), Direction(0.0, 1.0),
                              Direction(std::cos(kPi + eps), std::sin(kPi + eps))};
  const Polytope P = wulffShape(SupportVector(n, {1.0, 1.0, 1.0, 1.0}));
  REQUIRE(P.facets.size() == 4);
  CHECK(volume(P) == Catch::Approx(4.0).epsilon(1e-2));
}

TEST_CASE("round trip via support values at facet normals") {
  std::vector<Vec> pts = {vec2(1.0, 0.1), vec2(0.3, 0.9), vec2(-0.8, 0.5),
                          vec2(-0.9, -0.6), vec2(0.4, -1.0)};
  const Polytope P = polytopeFromPoints(pts);
  const Polytope R = wulffShape(supportAtFacetNormals(P));
  REQUIRE(R.vertices.size() == P.vertices.size());
  CHECK(hausdorffDistance(P, R, 128) < 1e-9);
}
