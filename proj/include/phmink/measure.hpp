#pragma once

#include "phmink/geometry.hpp"

#include <functional>

namespace phmink {

/// Atomic measure mu = sum c_i delta_{xi_i} on S^{n-1}.  Duplicate
/// directions are merged at construction by summing weights.
struct SphericalMeasure {
  int dim;
  std::vector<Direction> xis;
  std::vector<double> weights;

  SphericalMeasure(int n, std::vector<Direction> dirs, std::vector<double> ws) : dim(n) {
    if (dirs.size() != ws.size()) throw MeasureError("SphericalMeasure: length mismatch");
    if (dirs.empty()) throw MeasureError("SphericalMeasure: no atoms");
    for (size_t i = 0; i < dirs.size(); ++i) {
      if (dirs[i].dim() != n) throw MeasureError("SphericalMeasure: dimension mismatch");
      if (!(ws[i] > 0.0)) throw MeasureError("SphericalMeasure: weights must be positive");
      bool merged = false;
      for (size_t j = 0; j < xis.size(); ++j) {
        if (xis[j].sameAs(dirs[i])) {
          weights[j] += ws[i];
          merged = true;
          break;
        }
      }
      if (!merged) {
        xis.push_back(dirs[i]);
        weights.push_back(ws[i]);
      }
    }
  }

  size_t size() const { return xis.size(); }
  double totalMass() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }
  Vec centerDefect() const {
    Vec d = Vec::Zero(dim);
    for (size_t i = 0; i < xis.size(); ++i) d += weights[i] * xis[i].vec();
    return d;
  }
};

struct MeasureConditions {
  bool spans = false;
  bool centered = false;
  Vec center_defect;
  std::vector<std::pair<int, int>> antipodal_pairs;

  bool admissible() const { return spans && centered; }
};

/// Checks the existence conditions on mu: (i) the atoms are not all
/// orthogonal to any single direction (positive span), and (ii) the weighted
/// first moment vanishes.  Also lists antipodal atom pairs.
inline MeasureConditions checkMeasureConditions(const SphericalMeasure& mu,
                                                double center_tol = 1e-9) {
  MeasureConditions out;
  const int n = mu.dim;
  const int m = static_cast<int>(mu.size());
  // Condition (i) fails iff some zeta has <zeta, xi_i> = 0 for all atoms,
  // i.e. the atom directions do not have full rank.
  Mat X(n, m);
  for (int i = 0; i < m; ++i) X.col(i) = mu.xis[i].vec();
  Eigen::JacobiSVD<Mat> svd(X);
  out.spans = svd.singularValues().size() >= n &&
              svd.singularValues()(n - 1) > kSpanSingularTol;
  out.center_defect = mu.centerDefect();
  out.centered = out.center_defect.norm() <= center_tol;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (mu.xis[i].antipodalTo(mu.xis[j])) out.antipodal_pairs.emplace_back(i, j);
  return out;
}

namespace detail {

/// Minimum-norm weight correction dc with X (c + dc) = 0, X = [xi_1..xi_m].
inline std::vector<double> recenterWeights(const std::vector<Direction>& xis,
                                           const std::vector<double>& w) {
  const int n = xis.front().dim();
  const int m = static_cast<int>(xis.size());
  Mat X(n, m);
  Vec c(m);
  for (int i = 0; i < m; ++i) {
    X.col(i) = xis[i].vec();
    c[i] = w[i];
  }
  const Vec defect = X * c;
  const Vec dc = -X.transpose() * (X * X.transpose()).ldlt().solve(defect);
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) {
    out[i] = w[i] + dc[i];
    if (!(out[i] > 0.0)) {
      throw MeasureError(
          "weight recentering infeasible (a weight would become non-positive); "
          "try a smaller perturbation");
    }
  }
  return out;
}

inline Direction rotateSlightly(const Direction& xi, double eps) {
  const int n = xi.dim();
  if (n == 2) {
    const double c = std::cos(eps), s = std::sin(eps);
    return Direction(vec2(c * xi[0] - s * xi[1], s * xi[0] + c * xi[1]));
  }
  // n = 3: rotate in the plane spanned by xi and the coordinate axis least
  // aligned with it (deterministic choice).
  Vec axis = Vec::Zero(n);
  int k = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(xi[i]) < std::abs(xi[k])) k = i;
  axis[k] = 1.0;
  Vec t = axis - xi.dot(axis) * xi.vec();
  t /= t.norm();
  return Direction(std::cos(eps) * xi.vec() + std::sin(eps) * t);
}

}  // namespace detail

/// Removes antipodal atom pairs by rotating one member of each pair by the
/// angle eps in a deterministic plane, then restoring the centering
/// condition by a minimum-norm positive weight correction.
inline SphericalMeasure perturbAntipodal(const SphericalMeasure& mu, double eps) {
  if (!(eps > 0.0) || eps > 1e-2) {
    throw MeasureError("perturbAntipodal: eps must be in (0, 1e-2]");
  }
  const auto cond = checkMeasureConditions(mu);
  if (cond.antipodal_pairs.empty()) return mu;
  std::vector<Direction> xis = mu.xis;
  std::vector<double> w = mu.weights;
  for (const auto& [i, j] : cond.antipodal_pairs) {
    xis[j] = detail::rotateSlightly(xis[j], eps);
  }
  w = detail::recenterWeights(xis, w);
  SphericalMeasure out(mu.dim, xis, w);
  const auto after = checkMeasureConditions(out);
  if (!after.antipodal_pairs.empty()) {
    throw MeasureError("perturbAntipodal: perturbation failed to separate atoms");
  }
  return out;
}

/// Quadrature discretization of a continuous density: uniform angular grid
/// on S^1, Fibonacci sphere on S^2; weights recentered exactly.
inline SphericalMeasure discretizeMeasure(
    const std::function<double(const Direction&)>& density, int dim, int m) {
  if (m < dim + 1) throw MeasureError("discretizeMeasure: need m >= n+1 atoms");
  std::vector<Direction> xis;
  std::vector<double> w;
  if (dim == 2) {
    for (int k = 0; k < m; ++k) {
      const double th = 2.0 * kPi * k / m;
      Direction xi(std::cos(th), std::sin(th));
      const double c = density(xi) * (2.0 * kPi / m);
      if (c > 0.0) {
        xis.push_back(xi);
        w.push_back(c);
      }
    }
  } else if (dim == 3) {
    for (const auto& xi : sampleDirections(3, m)) {
      const double c = density(xi) * (4.0 * kPi / m);
      if (c > 0.0) {
        xis.push_back(xi);
        w.push_back(c);
      }
    }
  } else {
    throw MeasureError("discretizeMeasure: dim must be 2 or 3");
  }
  if (xis.empty()) throw MeasureError("discretizeMeasure: density vanishes everywhere");
  if (static_cast<int>(xis.size()) < dim + 1) {
    throw MeasureError("discretizeMeasure: too few atoms with positive weight");
  }
  w = detail::recenterWeights(xis, w);
  SphericalMeasure out(dim, xis, w);
  if (!checkMeasureConditions(out).spans) {
    throw MeasureError("discretizeMeasure: discretized atoms do not span");
  }
  return out;
}

}  // namespace phmink
