#pragma once

// Quantitative tail machinery: the chi-square moment generating constant
// C(gamma) = E exp(gamma xi^2), the analytic tail bound C(gamma) * n^(-2
// gamma (1+eps)^2), the exact two-sided Gaussian tail, extreme-value
// statistics of normalized maxima, the concentration-ellipsoid support, and
// the Borel-Cantelli violation counter for the constructed sequence.

#include "hullsim/construction.hpp"
#include "hullsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hullsim {

struct TailBoundRow {
  long long n = 0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double bound = 0.0;
  double exact_tail = 0.0;
};

// C(gamma) = E exp(gamma xi^2) = 1/sqrt(1 - 2 gamma), finite on (0, 1/2).
inline double mgf_constant(double gamma) {
  if (!(gamma > 0.0) || !(gamma < 0.5))
    throw std::domain_error("mgf_constant: gamma must lie in (0, 1/2)");
  return 1.0 / std::sqrt(1.0 - 2.0 * gamma);
}

// Chernoff bound on P{|xi| > (1+eps) b(n)}: C(gamma) / n^(2 gamma (1+eps)^2).
inline double tail_bound(long long n, double eps, double gamma) {
  if (n < 2) throw std::domain_error("tail_bound: n must be >= 2");
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw std::domain_error("tail_bound: epsilon must be > 0");
  const double c = mgf_constant(gamma);
  const double exponent = 2.0 * gamma * (1.0 + eps) * (1.0 + eps);
  return c * std::pow(static_cast<double>(n), -exponent);
}

// Two-sided tail P{|xi| > x} = 2(1 - Phi(x)) = erfc(x / sqrt(2)).
inline double gaussian_tail_exact(double x) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::domain_error("gaussian_tail_exact: x must be finite and >= 0");
  return std::erfc(x / std::numbers::sqrt2);
}

// max_{i <= n} xi_i / b(n) for the seeded stream; approaches 1 from below
// with the classical Gumbel centering.
inline double normalized_max_stat(long long n, uint64_t seed) {
  if (n < 2) throw std::domain_error("normalized_max_stat: requires n >= 2");
  double m = -std::numeric_limits<double>::infinity();
  for (long long i = 1; i <= n; ++i)
    m = std::max(m, standard_normal(seed, static_cast<uint64_t>(i), 0, kDomainSamples));
  return m / normalizer_b(static_cast<double>(n));
}

// Support function of the concentration ellipsoid of N(0, Sigma):
// sqrt(u' Sigma u).
inline double ellipsoid_support(const Eigen::MatrixXd& sigma, const Vector& u) {
  if (sigma.rows() != sigma.cols() || sigma.rows() != u.size())
    throw std::invalid_argument("ellipsoid_support: dimension mismatch");
  if (!sigma.allFinite() || !u.allFinite())
    throw std::invalid_argument("ellipsoid_support: non-finite input");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("ellipsoid_support: sigma must be symmetric");
  return std::sqrt(std::max(0.0, u.dot(sigma * u)));
}

// Counts indices n in [2, checkpoint] whose sample overshoots the scaled
// target: excess_along_ray(X_n, (1+eps) b(n), V) > eps. Along the class line
// this reduces to the scalar threshold |xi_n| > (1+eps) b(n) + eps / a_k.
// One cumulative count is reported per checkpoint (strictly increasing).
inline std::vector<long long> compactness_violation_trace(const ConstructionSpec& spec,
                                                          const std::vector<long long>& checkpoints,
                                                          double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("compactness_violation_trace: epsilon must be > 0");
  for (size_t i = 0; i + 1 < checkpoints.size(); ++i)
    if (checkpoints[i] >= checkpoints[i + 1])
      throw std::invalid_argument("compactness_violation_trace: checkpoints must increase");
  std::vector<long long> out;
  if (checkpoints.empty()) return out;
  PartitionScheme scheme(spec.densities);
  long long count = 0;
  size_t ci = 0;
  const long long n_last = checkpoints.back();
  for (long long n = 1; n <= n_last; ++n) {
    const int k = scheme.assign_next();
    if (n >= 2) {
      const double a = spec.gauge_radii[static_cast<size_t>(k)];
      if (a > 0.0) {
        const double threshold = (1.0 + eps) * normalizer_b(static_cast<double>(n)) + eps / a;
        if (std::abs(sample_xi(spec, n)) > threshold) ++count;
      }
    }
    while (ci < checkpoints.size() && n == checkpoints[ci]) {
      out.push_back(count);
      ++ci;
    }
  }
  return out;
}

inline long long compactness_violation_count(const ConstructionSpec& spec, long long n_max,
                                             double eps) {
  return compactness_violation_trace(spec, {n_max}, eps).front();
}

// Rank statistics used for per-checkpoint aggregates: linear interpolation on
// the sorted sample at rank (size - 1) * q.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile_sorted: q outside [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

}  // namespace hullsim
