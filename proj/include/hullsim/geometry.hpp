#pragma once

// Centrally symmetric convex compact bodies with a dual pair of oracles:
// support function M_V(u) = sup_{x in V} <x,u> and radial gauge
// a(s) = sup{t >= 0 : t*s in V}. Hausdorff distances between convex bodies
// are estimated as sup-norm gaps of support values over a probe set.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hullsim {

using Vector = Eigen::VectorXd;

// Raised when an operation is not defined for a body's representation
// (e.g. radial gauge of a support-sampled body, which lacks a primal
// membership test).
class UnsupportedRepresentation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class BodyKind { Ball, Ellipsoid, Polytope, SupportSampled };

namespace detail {

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

inline double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                                     const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Minimal monotone-chain hull used internally for polytope membership tests.
// The public cross-validation oracle lives in hull_engine.
inline std::vector<Eigen::Vector2d> membership_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
                          return a.x() == b.x() && a.y() == b.y();
                        }),
            pts.end());
  const size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Eigen::Vector2d> hull(2 * n);
  size_t h = 0;
  for (size_t i = 0; i < n; ++i) {
    while (h >= 2 && cross2(hull[h - 1].x() - hull[h - 2].x(), hull[h - 1].y() - hull[h - 2].y(),
                            pts[i].x() - hull[h - 2].x(), pts[i].y() - hull[h - 2].y()) <= 0.0)
      --h;
    hull[h++] = pts[i];
  }
  for (size_t i = n - 1, lower = h + 1; i-- > 0;) {
    while (h >= lower && cross2(hull[h - 1].x() - hull[h - 2].x(), hull[h - 1].y() - hull[h - 2].y(),
                                pts[i].x() - hull[h - 2].x(), pts[i].y() - hull[h - 2].y()) <= 0.0)
      --h;
    hull[h++] = pts[i];
  }
  hull.resize(h - 1);
  return hull;
}

inline bool point_in_convex_polygon(const std::vector<Eigen::Vector2d>& poly,
                                    const Eigen::Vector2d& p, double tol) {
  if (poly.empty()) return false;
  if (poly.size() == 1) return (p - poly[0]).norm() <= tol;
  if (poly.size() == 2) return point_segment_distance(p, poly[0], poly[1]) <= tol;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[(i + 1) % poly.size()];
    if (cross2(b.x() - a.x(), b.y() - a.y(), p.x() - a.x(), p.y() - a.y()) < -tol) return false;
  }
  return true;
}

}  // namespace detail

class SymmetricConvexBody {
 public:
  static SymmetricConvexBody ball(int dimension, double radius) {
    if (dimension < 1) throw std::invalid_argument("ball: dimension must be >= 1");
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw std::invalid_argument("ball: radius must be a positive finite real");
    SymmetricConvexBody b(BodyKind::Ball, dimension);
    b.radius_ = radius;
    b.circumradius_ = radius;
    return b;
  }

  static SymmetricConvexBody ellipsoid(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 1)
      throw std::invalid_argument("ellipsoid: sigma must be a square matrix");
    if (!sigma.allFinite()) throw std::invalid_argument("ellipsoid: sigma has non-finite entries");
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument("ellipsoid: sigma must be symmetric");
    SymmetricConvexBody b(BodyKind::Ellipsoid, static_cast<int>(sigma.rows()));
    b.sigma_ = 0.5 * (sigma + sigma.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.sigma_);
    if (es.info() != Eigen::Success)
      throw std::invalid_argument("ellipsoid: eigendecomposition failed");
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
      throw std::invalid_argument("ellipsoid: sigma must be positive semi-definite");
    b.eigvals_ = es.eigenvalues().cwiseMax(0.0);
    b.eigvecs_ = es.eigenvectors();
    b.circumradius_ = std::sqrt(b.eigvals_.maxCoeff());
    return b;
  }

  // Body = conv{ +g_i, -g_i }.
  static SymmetricConvexBody polytope(int dimension, std::vector<Vector> generators) {
    if (dimension < 1) throw std::invalid_argument("polytope: dimension must be >= 1");
    if (generators.empty()) throw std::invalid_argument("polytope: needs at least one generator");
    double R = 0.0;
    for (const Vector& g : generators) {
      if (g.size() != dimension) throw std::invalid_argument("polytope: generator dimension mismatch");
      if (!detail::all_finite(g)) throw std::invalid_argument("polytope: non-finite generator");
      R = std::max(R, g.norm());
    }
    SymmetricConvexBody b(BodyKind::Polytope, dimension);
    b.generators_ = std::move(generators);
    b.circumradius_ = R;
    if (dimension == 2) {
      std::vector<Eigen::Vector2d> pts;
      pts.reserve(2 * b.generators_.size());
      for (const Vector& g : b.generators_) {
        pts.emplace_back(g(0), g(1));
        pts.emplace_back(-g(0), -g(1));
      }
      b.hull2d_ = detail::membership_hull(std::move(pts));
    }
    return b;
  }

  // Dual representation: support values over a fixed set of unit directions.
  // Evaluation outside the sampled directions (up to sign) is unsupported.
  static SymmetricConvexBody support_sampled(std::vector<Vector> directions,
                                             std::vector<double> values) {
    if (directions.empty() || directions.size() != values.size())
      throw std::invalid_argument("support_sampled: directions/values size mismatch or empty");
    const int d = static_cast<int>(directions.front().size());
    double R = 0.0;
    for (size_t i = 0; i < directions.size(); ++i) {
      if (directions[i].size() != d)
        throw std::invalid_argument("support_sampled: direction dimension mismatch");
      if (std::abs(directions[i].norm() - 1.0) > 1e-12)
        throw std::invalid_argument("support_sampled: directions must be unit vectors");
      if (!std::isfinite(values[i]) || values[i] < 0.0)
        throw std::invalid_argument("support_sampled: values must be finite and >= 0");
      R = std::max(R, values[i]);
    }
    SymmetricConvexBody b(BodyKind::SupportSampled, d);
    b.sample_dirs_ = std::move(directions);
    b.sample_vals_ = std::move(values);
    b.circumradius_ = R;
    return b;
  }

  BodyKind kind() const { return kind_; }
  int dimension() const { return dim_; }
  double circumradius() const { return circumradius_; }
  double ball_radius() const { return radius_; }
  const Eigen::MatrixXd& ellipsoid_shape() const { return sigma_; }
  const std::vector<Vector>& generators() const { return generators_; }
  const std::vector<Eigen::Vector2d>& polytope_hull_2d() const { return hull2d_; }

  double support(const Vector& u) const {
    if (u.size() != dim_) throw std::invalid_argument("support: direction dimension mismatch");
    if (!detail::all_finite(u)) throw std::invalid_argument("support: non-finite direction");
    switch (kind_) {
      case BodyKind::Ball:
        return radius_ * u.norm();
      case BodyKind::Ellipsoid: {
        const double q = u.dot(sigma_ * u);
        return std::sqrt(std::max(q, 0.0));
      }
      case BodyKind::Polytope: {
        double m = 0.0;
        for (const Vector& g : generators_) m = std::max(m, std::abs(g.dot(u)));
        return m;
      }
      case BodyKind::SupportSampled: {
        const double norm = u.norm();
        if (norm == 0.0) return 0.0;
        const Vector s = u / norm;
        for (size_t i = 0; i < sample_dirs_.size(); ++i) {
          if ((s - sample_dirs_[i]).norm() <= 1e-9 || (s + sample_dirs_[i]).norm() <= 1e-9)
            return sample_vals_[i] * norm;
        }
        throw UnsupportedRepresentation(
            "support: direction not present in the sampled support table");
      }
    }
    return 0.0;
  }

  double radial_gauge(const Vector& s) const {
    if (s.size() != dim_) throw std::invalid_argument("radial_gauge: direction dimension mismatch");
    if (!detail::all_finite(s)) throw std::invalid_argument("radial_gauge: non-finite direction");
    if (std::abs(s.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("radial_gauge: direction must be a unit vector");
    switch (kind_) {
      case BodyKind::Ball:
        return radius_;
      case BodyKind::Ellipsoid: {
        // a(s) = 1/sqrt(s' Sigma^-1 s) through the eigenbasis; directions with
        // mass on a null eigenvector meet the body only at the origin.
        const Vector w = eigvecs_.transpose() * s;
        const double lmax = eigvals_.maxCoeff();
        double q = 0.0;
        for (int i = 0; i < eigvals_.size(); ++i) {
          const double c2 = w(i) * w(i);
          if (eigvals_(i) <= 1e-14 * std::max(lmax, 1.0)) {
            if (c2 > 1e-18) return 0.0;
          } else {
            q += c2 / eigvals_(i);
          }
        }
        return q > 0.0 ? 1.0 / std::sqrt(q) : 0.0;
      }
      case BodyKind::Polytope:
        return polytope_gauge(s);
      case BodyKind::SupportSampled:
        throw UnsupportedRepresentation(
            "radial_gauge: unsupported for support-sampled bodies (no membership test)");
    }
    return 0.0;
  }

 private:
  SymmetricConvexBody(BodyKind kind, int dim) : kind_(kind), dim_(dim) {}

  double polytope_gauge(const Vector& s) const {
    if (dim_ == 1) {
      // conv{+-g} in 1D is the interval [-max|g|, max|g|].
      return circumradius_;
    }
    if (dim_ != 2)
      throw UnsupportedRepresentation(
          "radial_gauge: polytope membership bisection implemented for d <= 2 only");
    // Bisection on membership of t*s, absolute tolerance 1e-10 * circumradius.
    const double R = circumradius_;
    const double tol = 1e-12 * std::max(R, 1.0);
    const Eigen::Vector2d dir(s(0), s(1));
    double lo = 0.0;
    double hi = R * (1.0 + 1e-9) + tol;
    if (detail::point_in_convex_polygon(hull2d_, hi * dir, tol)) return hi;
    const double width = 1e-10 * std::max(R, 1.0);
    while (hi - lo > width) {
      const double mid = 0.5 * (lo + hi);
      if (detail::point_in_convex_polygon(hull2d_, mid * dir, tol))
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  }

  BodyKind kind_;
  int dim_;
  double radius_ = 0.0;
  double circumradius_ = 0.0;
  Eigen::MatrixXd sigma_;
  Vector eigvals_;
  Eigen::MatrixXd eigvecs_;
  std::vector<Vector> generators_;
  std::vector<Eigen::Vector2d> hull2d_;
  std::vector<Vector> sample_dirs_;
  std::vector<double> sample_vals_;
};

struct ProbeSet {
  std::vector<Vector> directions;

  ProbeSet() = default;

  explicit ProbeSet(std::vector<Vector> dirs) : directions(std::move(dirs)) {
    if (directions.empty()) throw std::invalid_argument("ProbeSet: empty direction list");
    const Eigen::Index d = directions.front().size();
    for (const Vector& u : directions) {
      if (u.size() != d) throw std::invalid_argument("ProbeSet: mixed dimensions");
      if (std::abs(u.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("ProbeSet: directions must be unit vectors");
    }
  }

  int dimension() const { return directions.empty() ? 0 : static_cast<int>(directions[0].size()); }
  size_t size() const { return directions.size(); }
};

// D equally spaced unit directions at angles 2*pi*j/D. For even D the second
// half is the exact negation of the first, so +-u pairs match bitwise.
inline ProbeSet uniform_probes_2d(int D) {
  if (D < 4) throw std::invalid_argument("uniform_probes_2d: need D >= 2d = 4");
  std::vector<Vector> dirs(D, Vector(2));
  const int half = (D % 2 == 0) ? D / 2 : D;
  for (int j = 0; j < half; ++j) {
    const double t = 2.0 * std::numbers::pi * j / D;
    dirs[j] << std::cos(t), std::sin(t);
  }
  for (int j = half; j < D; ++j) dirs[j] = -dirs[j - half];
  return ProbeSet(std::move(dirs));
}

inline ProbeSet probes_1d() {
  std::vector<Vector> dirs(2, Vector(1));
  dirs[0] << 1.0;
  dirs[1] << -1.0;
  return ProbeSet(std::move(dirs));
}

inline double support(const SymmetricConvexBody& V, const Vector& u) { return V.support(u); }

inline double radial_gauge(const SymmetricConvexBody& V, const Vector& s) {
  return V.radial_gauge(s);
}

// Probe-set estimate of d_H(A, B); a lower bound on the true Hausdorff
// distance for convex bodies (the sup is restricted to finitely many
// directions).
inline double hausdorff_estimate(const SymmetricConvexBody& A, const SymmetricConvexBody& B,
                                 const ProbeSet& P) {
  if (A.dimension() != B.dimension())
    throw std::invalid_argument("hausdorff_estimate: dimension mismatch");
  if (P.directions.empty()) throw std::invalid_argument("hausdorff_estimate: empty probe set");
  double m = 0.0;
  for (const Vector& u : P.directions) m = std::max(m, std::abs(A.support(u) - B.support(u)));
  return m;
}

// Support of conv(K1, K2) is the pointwise max of the two support functions.
inline std::vector<double> merge_support(const std::vector<double>& hA,
                                         const std::vector<double>& hB) {
  if (hA.size() != hB.size()) throw std::invalid_argument("merge_support: length mismatch");
  std::vector<double> out(hA.size());
  for (size_t j = 0; j < hA.size(); ++j) out[j] = std::max(hA[j], hB[j]);
  return out;
}

// Distance overshoot of x beyond the scaled body c*V, measured along the ray
// through x: max(0, |x| - c * a(x/|x|)). Upper-bounds dist(x, c*V) via the
// projection onto the diameter segment through x.
inline double excess_along_ray(const Vector& x, double c, const SymmetricConvexBody& V) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("excess_along_ray: c must be > 0");
  if (x.size() != V.dimension()) throw std::invalid_argument("excess_along_ray: dimension mismatch");
  if (!detail::all_finite(x)) throw std::invalid_argument("excess_along_ray: non-finite point");
  const double norm = x.norm();
  if (norm == 0.0) return 0.0;
  const Vector s = x / norm;
  return std::max(0.0, norm - c * V.radial_gauge(s));
}

}  // namespace hullsim
