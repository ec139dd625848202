#pragma once

// Streaming support function of the sample hull: per-probe running maxima of
// <X_k, u_j>, O(D) per sample and O(D) memory regardless of n. An exact 2D
// convex hull (monotone chain) serves as the cross-validation oracle.

#include "hullsim/construction.hpp"
#include "hullsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hullsim {

// Single rounding order for 2D inner products. The streaming maxima and the
// polygon-support oracle must call this same function so their values agree
// bit for bit (FMA contraction is disabled project-wide).
inline double dot2(double x, double y, double ux, double uy) { return x * ux + y * uy; }

class SupportAccumulator {
 public:
  explicit SupportAccumulator(ProbeSet probes, bool retain_points = false)
      : probes_(std::move(probes)),
        h_(probes_.size(), -std::numeric_limits<double>::infinity()),
        retain_(retain_points) {
    if (retain_ && probes_.dimension() != 2)
      throw std::invalid_argument("SupportAccumulator: point retention is a 2D cross-check mode");
    if (probes_.dimension() == 2) {
      ux_.reserve(probes_.size());
      uy_.reserve(probes_.size());
      for (const Vector& u : probes_.directions) {
        ux_.push_back(u(0));
        uy_.push_back(u(1));
      }
    }
  }

  void ingest(const Vector& X) {
    if (X.size() != probes_.dimension())
      throw std::invalid_argument("ingest: sample dimension mismatch");
    if (probes_.dimension() == 2) {
      ingest2(X(0), X(1));
      return;
    }
    for (size_t j = 0; j < h_.size(); ++j) h_[j] = std::max(h_[j], probes_.directions[j].dot(X));
    ++n_;
  }

  // Hot path for d = 2.
  void ingest2(double x, double y) {
    for (size_t j = 0; j < h_.size(); ++j) h_[j] = std::max(h_[j], dot2(x, y, ux_[j], uy_[j]));
    ++n_;
    if (retain_) retained_.emplace_back(x, y);
  }

  // Pointwise max of the running maxima plus count addition; equals ingesting
  // the union in any order.
  void merge(const SupportAccumulator& other) {
    if (other.h_.size() != h_.size() || other.probes_.dimension() != probes_.dimension() ||
        other.retain_ != retain_)
      throw std::invalid_argument("merge: accumulator configuration mismatch");
    for (size_t j = 0; j < h_.size(); ++j) {
      if ((probes_.directions[j].array() != other.probes_.directions[j].array()).any())
        throw std::invalid_argument("merge: probe set mismatch");
      h_[j] = std::max(h_[j], other.h_[j]);
    }
    n_ += other.n_;
    if (retain_)
      retained_.insert(retained_.end(), other.retained_.begin(), other.retained_.end());
  }

  long long count() const { return n_; }
  const ProbeSet& probes() const { return probes_; }
  const std::vector<double>& raw_support() const { return h_; }
  const std::vector<Eigen::Vector2d>& retained_points() const { return retained_; }

  // M_n(u_j) = h_j / b(n); defined for n >= 2 (b vanishes at n = 1).
  std::vector<double> normalized_support() const {
    if (n_ < 2) throw std::domain_error("normalized_support: requires n >= 2");
    const double b = normalizer_b(static_cast<double>(n_));
    std::vector<double> out(h_.size());
    for (size_t j = 0; j < h_.size(); ++j) out[j] = h_[j] / b;
    return out;
  }

  // Probe-set estimate of d_H(W_n / b(n), target).
  double sup_error(const SymmetricConvexBody& target) const {
    if (target.dimension() != probes_.dimension())
      throw std::invalid_argument("sup_error: dimension mismatch");
    if (n_ < 2) throw std::domain_error("sup_error: requires n >= 2");
    const double b = normalizer_b(static_cast<double>(n_));
    double m = 0.0;
    for (size_t j = 0; j < h_.size(); ++j)
      m = std::max(m, std::abs(h_[j] / b - target.support(probes_.directions[j])));
    return m;
  }

 private:
  ProbeSet probes_;
  std::vector<double> ux_, uy_;
  std::vector<double> h_;
  long long n_ = 0;
  bool retain_;
  std::vector<Eigen::Vector2d> retained_;
};

// Counter-clockwise vertex list of a convex polygon; may degenerate to a
// segment (2 vertices) or a point (1 vertex).
struct Polygon2D {
  std::vector<Eigen::Vector2d> vertices;
};

// Andrew monotone chain over lexicographically sorted points. Pops use an
// exact cross-product test, so exactly collinear boundary points are dropped
// and every extreme point is kept.
inline Polygon2D exact_hull_2d(std::vector<Eigen::Vector2d> points) {
  if (points.empty()) throw std::invalid_argument("exact_hull_2d: needs at least one point");
  std::sort(points.begin(), points.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
                             return a.x() == b.x() && a.y() == b.y();
                           }),
               points.end());
  const size_t n = points.size();
  if (n <= 2) return Polygon2D{std::move(points)};
  std::vector<Eigen::Vector2d> hull(2 * n);
  size_t h = 0;
  auto turns_right = [&](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                         const Eigen::Vector2d& b) {
    return detail::cross2(a.x() - o.x(), a.y() - o.y(), b.x() - o.x(), b.y() - o.y()) <= 0.0;
  };
  for (size_t i = 0; i < n; ++i) {
    while (h >= 2 && turns_right(hull[h - 2], hull[h - 1], points[i])) --h;
    hull[h++] = points[i];
  }
  for (size_t i = n - 1, lower = h + 1; i-- > 0;) {
    while (h >= lower && turns_right(hull[h - 2], hull[h - 1], points[i])) --h;
    hull[h++] = points[i];
  }
  hull.resize(h - 1);
  return Polygon2D{std::move(hull)};
}

inline double polygon_support(const Polygon2D& poly, const Eigen::Vector2d& u) {
  if (poly.vertices.empty()) throw std::invalid_argument("polygon_support: empty polygon");
  double m = -std::numeric_limits<double>::infinity();
  for (const Eigen::Vector2d& v : poly.vertices)
    m = std::max(m, dot2(v.x(), v.y(), u.x(), u.y()));
  return m;
}

inline double distance_to_polygon(const Eigen::Vector2d& p, const Polygon2D& poly) {
  const auto& v = poly.vertices;
  if (v.empty()) throw std::invalid_argument("distance_to_polygon: empty polygon");
  if (v.size() == 1) return (p - v[0]).norm();
  if (v.size() >= 3 && detail::point_in_convex_polygon(v, p, 0.0)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < v.size(); ++i)
    best = std::min(best, detail::point_segment_distance(p, v[i], v[(i + 1) % v.size()]));
  return best;
}

// Exact Hausdorff distance between convex polygons: the farthest point of a
// convex set from another convex set is a vertex, so a vertex sweep in both
// directions suffices.
inline double exact_hausdorff_2d(const Polygon2D& a, const Polygon2D& b) {
  if (a.vertices.empty() || b.vertices.empty())
    throw std::invalid_argument("exact_hausdorff_2d: empty polygon");
  double m = 0.0;
  for (const Eigen::Vector2d& v : a.vertices) m = std::max(m, distance_to_polygon(v, b));
  for (const Eigen::Vector2d& v : b.vertices) m = std::max(m, distance_to_polygon(v, a));
  return m;
}

}  // namespace hullsim
