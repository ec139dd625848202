#pragma once

// Generator of the line-supported Gaussian sequence: a quota partition of the
// sample indices into classes of prescribed asymptotic density, a family of
// unit directions with their radial gauge radii in the target body, and the
// sample stream X_n = a_k * xi_n * s_k for n in class k.

#include "hullsim/geometry.hpp"
#include "hullsim/rng.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hullsim {

inline double normalizer_b(double t) {
  if (!(t > 1.0)) throw std::domain_error("normalizer_b: requires t > 1");
  return std::sqrt(2.0 * std::log(t));
}

// Deterministic quota partition: index n+1 goes to the class with the largest
// quota deficit p_k*(n+1) - c_k, ties broken by lowest index. Keeps
// max_k |c_k(n) - n*p_k| <= 1 for every n.
class PartitionScheme {
 public:
  explicit PartitionScheme(std::vector<double> densities) : p_(std::move(densities)) {
    if (p_.empty()) throw std::invalid_argument("PartitionScheme: empty density list");
    double sum = 0.0;
    for (double pk : p_) {
      if (!std::isfinite(pk) || pk <= 0.0)
        throw std::invalid_argument("PartitionScheme: densities must be positive");
      sum += pk;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("PartitionScheme: densities must sum to 1 (got " +
                                  std::to_string(sum) + ")");
    c_.assign(p_.size(), 0);
  }

  // Advances n by one and returns the 0-based class index of the new sample.
  int assign_next() {
    const double next = static_cast<double>(n_ + 1);
    int best = 0;
    double best_deficit = p_[0] * next - static_cast<double>(c_[0]);
    for (size_t k = 1; k < p_.size(); ++k) {
      const double deficit = p_[k] * next - static_cast<double>(c_[k]);
      if (deficit > best_deficit) {
        best = static_cast<int>(k);
        best_deficit = deficit;
      }
    }
    ++c_[static_cast<size_t>(best)];
    ++n_;
    return best;
  }

  long long total() const { return n_; }
  int classes() const { return static_cast<int>(p_.size()); }
  const std::vector<double>& densities() const { return p_; }
  const std::vector<long long>& counts() const { return c_; }

  double max_discrepancy() const {
    double m = 0.0;
    for (size_t k = 0; k < p_.size(); ++k)
      m = std::max(m, std::abs(static_cast<double>(c_[k]) - static_cast<double>(n_) * p_[k]));
    return m;
  }

 private:
  std::vector<double> p_;
  std::vector<long long> c_;
  long long n_ = 0;
};

inline int assign_class(PartitionScheme& scheme) { return scheme.assign_next(); }

// Class labels for indices 1..n_max, precomputable so sample generation can
// proceed in parallel chunks.
inline std::vector<int32_t> assign_labels(const std::vector<double>& densities, long long n_max) {
  PartitionScheme scheme(densities);
  std::vector<int32_t> labels;
  labels.reserve(static_cast<size_t>(n_max));
  for (long long n = 0; n < n_max; ++n) labels.push_back(scheme.assign_next());
  return labels;
}

enum class DirectionMode { ExplicitList, UniformAngles2d, SeededQuasiUniform };

// m unit directions. Uniform 2D angles cover the half-circle pi*(k-1)/m
// (opposite directions are redundant for centrally symmetric targets); the
// quasi-uniform mode normalizes deterministic pseudo-Gaussian draws.
inline std::vector<Vector> direction_sequence(int d, int m, DirectionMode mode,
                                              const std::vector<Vector>& explicit_list = {},
                                              uint64_t seed = 0) {
  if (m < 1) throw std::invalid_argument("direction_sequence: m must be >= 1");
  if (d < 1) throw std::invalid_argument("direction_sequence: dimension must be >= 1");
  std::vector<Vector> dirs;
  switch (mode) {
    case DirectionMode::ExplicitList: {
      if (static_cast<int>(explicit_list.size()) != m)
        throw std::invalid_argument("direction_sequence: explicit list size != m");
      for (const Vector& s : explicit_list) {
        if (s.size() != d) throw std::invalid_argument("direction_sequence: dimension mismatch");
        if (std::abs(s.norm() - 1.0) > 1e-12)
          throw std::invalid_argument("direction_sequence: explicit directions must be unit");
      }
      dirs = explicit_list;
      break;
    }
    case DirectionMode::UniformAngles2d: {
      if (d != 2) throw std::invalid_argument("direction_sequence: uniform-angles mode needs d = 2");
      dirs.assign(m, Vector(2));
      for (int k = 0; k < m; ++k) {
        const double t = std::numbers::pi * k / m;
        dirs[k] << std::cos(t), std::sin(t);
      }
      break;
    }
    case DirectionMode::SeededQuasiUniform: {
      dirs.assign(m, Vector(d));
      for (int k = 0; k < m; ++k) {
        Vector v(d);
        for (int c = 0; c < d; ++c)
          v(c) = standard_normal(seed, static_cast<uint64_t>(k), static_cast<uint32_t>(c),
                                 kDomainDirections);
        const double norm = v.norm();
        if (norm < 1e-12) {
          v.setZero();
          v(0) = 1.0;
        } else {
          v /= norm;
        }
        dirs[k] = v;
      }
      break;
    }
  }
  return dirs;
}

struct ConstructionSpec {
  int dimension = 2;
  std::vector<Vector> directions;       // s_k, unit
  std::vector<double> gauge_radii;      // a_k = radial gauge of the target at s_k
  std::vector<double> densities;        // p_k
  uint64_t seed = 1;
  std::vector<double> class_variances;  // a_k^2

  int classes() const { return static_cast<int>(directions.size()); }
};

inline ConstructionSpec build_spec(const SymmetricConvexBody& V, std::vector<Vector> directions,
                                   std::vector<double> densities, uint64_t seed) {
  if (directions.empty()) throw std::invalid_argument("build_spec: no directions");
  if (directions.size() != densities.size())
    throw std::invalid_argument("build_spec: directions/densities size mismatch");
  PartitionScheme validate_densities(densities);
  ConstructionSpec spec;
  spec.dimension = V.dimension();
  spec.seed = seed;
  spec.densities = std::move(densities);
  spec.gauge_radii.reserve(directions.size());
  spec.class_variances.reserve(directions.size());
  for (const Vector& s : directions) {
    if (s.size() != V.dimension()) throw std::invalid_argument("build_spec: direction dimension mismatch");
    if (std::abs(s.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("build_spec: directions must be unit vectors");
    const double a = V.radial_gauge(s);
    spec.gauge_radii.push_back(a);
    spec.class_variances.push_back(a * a);
  }
  spec.directions = std::move(directions);
  return spec;
}

// The scalar noise xi_n of sample n; a pure function of (seed, n).
inline double sample_xi(const ConstructionSpec& spec, long long n) {
  return standard_normal(spec.seed, static_cast<uint64_t>(n), 0, kDomainSamples);
}

// X_n = a_k * xi_n * s_k where k is the class of index n. The scheme must be
// positioned exactly before index n.
inline Vector draw_sample(const ConstructionSpec& spec, long long n, PartitionScheme& scheme) {
  if (scheme.total() + 1 != n)
    throw std::invalid_argument("draw_sample: scheme is not positioned at index n");
  if (scheme.classes() != spec.classes())
    throw std::invalid_argument("draw_sample: scheme/spec class count mismatch");
  const int k = scheme.assign_next();
  const double xi = sample_xi(spec, n);
  return (spec.gauge_radii[static_cast<size_t>(k)] * xi) * spec.directions[static_cast<size_t>(k)];
}

// V_m = conv{ +- a_k s_k : k <= m }: the exact limit body of the truncated
// construction.
struct TruncatedTarget {
  SymmetricConvexBody body;
};

inline TruncatedTarget truncated_target(const ConstructionSpec& spec) {
  std::vector<Vector> gens;
  gens.reserve(spec.directions.size());
  for (size_t k = 0; k < spec.directions.size(); ++k)
    gens.push_back(spec.gauge_radii[k] * spec.directions[k]);
  return TruncatedTarget{SymmetricConvexBody::polytope(spec.dimension, std::move(gens))};
}

}  // namespace hullsim
