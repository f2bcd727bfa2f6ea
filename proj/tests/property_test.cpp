// Randomized property suite for the convex-geometry layer: 1000 generated
// polygon cases at a fixed seed, exercising support-function round trips,
// Minkowski additivity, Hausdorff metric identities, the closure condition
// on the surface measure, and radial/volume consistency.

#include "phmink/geometry.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace phmink;

namespace {

// Vertices on jittered rays with bounded angular gaps (< pi), so the origin
// is always interior and the radial function well defined.
Polytope randomPolygon(std::mt19937& rng) {
  std::uniform_int_distribution<int> nv(4, 10);
  std::uniform_real_distribution<double> ujit(0.0, 0.6), urad(0.3, 1.7);
  const int k = nv(rng);
  std::vector<Vec> pts;
  for (int i = 0; i < k; ++i) {
    const double a = 2.0 * kPi * (i + 0.2 + ujit(rng)) / k;
    pts.push_back(vec2(urad(rng) * std::cos(a), urad(rng) * std::sin(a)));
  }
  return polytopeFromPoints(pts);
}

double radialQuadratureVolume(const Polytope& P, int N) {
  double q = 0.0;
  for (int k = 0; k < N; ++k) {
    const double th = 2.0 * kPi * (k + 0.5) / N;
    const double r = radialFunction(P, Direction(std::cos(th), std::sin(th)));
    q += 0.5 * r * r * (2.0 * kPi / N);
  }
  return q;
}

}  // namespace

TEST_CASE("randomized geometry properties, 1000 cases") {
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> ushift(-0.2, 0.2), uscale(0.5, 2.0),
      uang_probe(0.0, 2.0 * kPi);
  int failures = 0;
  for (int case_id = 0; case_id < 1000; ++case_id) {
    CAPTURE(case_id);
    const Polytope P = randomPolygon(rng);
    const Polytope Q = randomPolygon(rng);
    const Polytope R = translate(randomPolygon(rng), vec2(ushift(rng), ushift(rng)));
    const double diam = P.diameter();
    bool ok = true;

    // Support-function round trip through the Wulff construction.
    const Polytope P2 = wulffShape(supportAtFacetNormals(P));
    ok = ok && hausdorffDistance(P, P2, 128) <= 1e-9 * diam;

    // Support additivity under the Minkowski sum, and inclusion P subset P+Q
    // whenever 0 is in Q's recession of support (h_Q >= 0 not required for
    // additivity itself).
    const Polytope S = minkowskiSum(P, Q);
    for (const auto& d : sampleDirections(2, 16)) {
      const double lhs = supportFunction(S, d.vec());
      const double rhs = supportFunction(P, d.vec()) + supportFunction(Q, d.vec());
      ok = ok && std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs));
    }

    // Hausdorff metric: identity, symmetry, triangle inequality (all three
    // distances sampled over the same direction set).
    ok = ok && hausdorffDistance(P, P, 64) <= 1e-14;
    const double dpq = hausdorffDistance(P, Q, 64);
    const double dqp = hausdorffDistance(Q, P, 64);
    const double dpr = hausdorffDistance(P, R, 64);
    const double dqr = hausdorffDistance(Q, R, 64);
    ok = ok && std::abs(dpq - dqp) <= 1e-13;
    ok = ok && dpr <= dpq + dqr + 1e-13;

    // Translation invariance of the metric.
    const Vec t = vec2(ushift(rng), ushift(rng));
    ok = ok && std::abs(hausdorffDistance(translate(P, t), translate(Q, t), 64) - dpq) <= 1e-12;

    // Closure condition: the surface measure's first moment vanishes.
    Vec closure = Vec::Zero(2);
    double perimeter = 0.0;
    for (const auto& [d, a] : gaussMapMeasure(P)) {
      closure += a * d.vec();
      perimeter += a;
    }
    ok = ok && closure.norm() <= 1e-10 * perimeter;

    // Radial/volume cross-check (the origin is interior by construction).
    ok = ok && std::abs(radialQuadratureVolume(P, 512) - volume(P)) <= 0.01 * volume(P);

    // Homogeneity of volume, support, and radial functions.
    const double lam = uscale(rng);
    const Polytope L = scale(P, lam);
    ok = ok && std::abs(volume(L) - lam * lam * volume(P)) <= 1e-10 * volume(L);
    const Direction probe(std::cos(uang_probe(rng)), std::sin(uang_probe(rng)));
    ok = ok && std::abs(supportFunction(L, probe.vec()) -
                        lam * supportFunction(P, probe.vec())) <= 1e-11 * lam * diam;
    ok = ok && std::abs(radialFunction(L, probe) - lam * radialFunction(P, probe)) <=
                   1e-11 * lam * diam;

    // Monotonicity: P lies inside P + Q because 0 is interior to Q.
    for (const auto& d : sampleDirections(2, 8)) {
      ok = ok && supportFunction(P, d.vec()) <= supportFunction(S, d.vec()) + 1e-12;
    }

    if (!ok) {
      ++failures;
      CHECK(ok);  // reports the captured case id
    }
  }
  CHECK(failures == 0);
}
