#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phmink {

using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Mat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;

// Shared numeric tolerances.  Geometric consistency checks are phrased
// relative to the body's scale where it matters; these are the absolute
// defaults for unit-scale work.
inline constexpr double kDirectionTol = 1e-12;    // |unit vector| - 1
inline constexpr double kAngularTol = 1e-9;       // duplicate / antipodal atoms
inline constexpr double kGeomTol = 1e-9;          // halfspace / facet incidence
inline constexpr double kSpanSingularTol = 1e-10; // rank test singular values

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnboundedShapeError : GeometryError {
  using GeometryError::GeometryError;
};
struct MeasureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unit vector on S^{n-1}.  Inputs are normalized on construction; a
/// near-zero vector is rejected.
class Direction {
 public:
  explicit Direction(Vec v) : u_(std::move(v)) {
    const double norm = u_.norm();
    if (!(norm > 1e-14)) {
      throw GeometryError("Direction: cannot normalize near-zero vector");
    }
    u_ /= norm;
  }
  Direction(double x, double y) : Direction(make(x, y)) {}
  Direction(double x, double y, double z) : Direction(make(x, y, z)) {}

  const Vec& vec() const { return u_; }
  int dim() const { return static_cast<int>(u_.size()); }
  double operator[](int i) const { return u_[i]; }

  double dot(const Vec& v) const { return u_.dot(v); }
  double angleTo(const Direction& o) const {
    const double c = std::clamp(u_.dot(o.u_), -1.0, 1.0);
    return std::acos(c);
  }
  bool sameAs(const Direction& o, double tol = kAngularTol) const {
    return angleTo(o) <= tol;
  }
  bool antipodalTo(const Direction& o, double tol = kAngularTol) const {
    return angleTo(o) >= kPi - tol;
  }

 private:
  static Vec make(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
  }
  static Vec make(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
  }
  Vec u_;
};

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}
inline Vec vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

inline double polarAngle(const Vec& v) { return std::atan2(v[1], v[0]); }

inline Vec rotate90(const Vec& v) { return vec2(-v[1], v[0]); }

/// Deterministic low-discrepancy direction sets used for Hausdorff
/// estimation and diagnostics: golden-angle on S^1, Fibonacci sphere on S^2.
inline std::vector<Direction> sampleDirections(int dim, int count) {
  std::vector<Direction> dirs;
  dirs.reserve(count);
  if (dim == 2) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double th = std::fmod(k * golden, 2.0 * kPi);
      dirs.emplace_back(std::cos(th), std::sin(th));
    }
  } else if (dim == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = k * golden;
      dirs.emplace_back(r * std::cos(th), r * std::sin(th), z);
    }
  } else {
    throw GeometryError("sampleDirections: dim must be 2 or 3");
  }
  return dirs;
}

}  // namespace phmink
