#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ssat/error.hpp"

namespace ssat {

inline constexpr std::size_t kDefaultEmbeddingDim = 512;
inline constexpr double kUnitNormTolerance = 1e-6;
inline constexpr double kMinNorm = 1e-12;

inline double l2_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

/// Unit-L2 appearance embedding. Every instance satisfies |v| = 1 within
/// kUnitNormTolerance; the only ways to build one are normalize() and
/// from_unit().
class FeatureVec {
 public:
  FeatureVec() = default;

  /// v / |v|. Throws InputError when |v| < 1e-12.
  static FeatureVec normalize(std::span<const double> v) {
    const double n = l2_norm(v);
    if (!(n >= kMinNorm) || !std::isfinite(n)) {
      throw InputError("normalize: embedding norm " + std::to_string(n) +
                       " is unusable");
    }
    FeatureVec f;
    f.values_.resize(v.size());
    std::transform(v.begin(), v.end(), f.values_.begin(),
                   [n](double x) { return x / n; });
    return f;
  }

  /// Wraps values that are already unit-norm, verbatim. Throws when the
  /// norm deviates from 1 by more than `tolerance`.
  static FeatureVec from_unit(std::vector<double> v,
                              double tolerance = kUnitNormTolerance) {
    const double n = l2_norm(v);
    if (!(std::abs(n - 1.0) <= tolerance)) {
      throw InputError("from_unit: norm " + std::to_string(n) +
                       " is not unit within tolerance");
    }
    FeatureVec f;
    f.values_ = std::move(v);
    return f;
  }

  std::size_t dim() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const FeatureVec&, const FeatureVec&) = default;

 private:
  std::vector<double> values_;
};

inline void require_same_dim(const FeatureVec& f, const FeatureVec& g,
                             const char* where) {
  if (f.dim() != g.dim()) {
    throw InputError(std::string(where) + ": dimension mismatch (" +
                     std::to_string(f.dim()) + " vs " +
                     std::to_string(g.dim()) + ")");
  }
}

inline double dot(const FeatureVec& f, const FeatureVec& g) {
  require_same_dim(f, g, "dot");
  const auto a = f.values();
  const auto b = g.values();
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

/// 1 - <f, g>, clamped to [0, 2]. Smaller means more similar.
inline double cosine_distance(const FeatureVec& f, const FeatureVec& g) {
  require_same_dim(f, g, "cosine_distance");
  return std::clamp(1.0 - dot(f, g), 0.0, 2.0);
}

/// Exponential feature blending: normalize(beta * fresh + (1 - beta) * stored).
inline FeatureVec accumulate(const FeatureVec& stored, const FeatureVec& fresh,
                             double beta) {
  require_same_dim(stored, fresh, "accumulate");
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw InputError("accumulate: beta " + std::to_string(beta) +
                     " outside [0,1]");
  }
  if (beta == 0.0) return stored;
  if (beta == 1.0) return fresh;
  const auto s = stored.values();
  const auto n = fresh.values();
  std::vector<double> mixed(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    mixed[i] = beta * n[i] + (1.0 - beta) * s[i];
  }
  if (l2_norm(mixed) < kMinNorm) {
    throw InputError("accumulate: blended feature vanishes (antipodal inputs)");
  }
  return FeatureVec::normalize(mixed);
}

}  // namespace ssat
