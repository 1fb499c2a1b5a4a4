#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ssat/features.hpp"

using ssat::FeatureVec;

namespace {

FeatureVec unit(std::vector<double> v) { return FeatureVec::normalize(v); }

FeatureVec random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g;
  std::vector<double> v(dim);
  for (auto& x : v) x = g(rng);
  return FeatureVec::normalize(v);
}

}  // namespace

TEST(Features, NormalizeHandValue) {
  const auto f = unit({3, 4});
  EXPECT_NEAR(f[0], 0.6, 1e-15);
  EXPECT_NEAR(f[1], 0.8, 1e-15);
}

TEST(Features, NormalizeUnitIsIdentity) {
  const auto f = unit({0, 1, 0});
  EXPECT_EQ(f, FeatureVec::normalize(f.values()));
}

TEST(Features, NormalizeRejectsZero) {
  EXPECT_THROW(unit({0, 0}), ssat::InputError);
  EXPECT_THROW(unit({1e-13, 0}), ssat::InputError);
}

TEST(Features, FromUnitChecksNorm) {
  EXPECT_NO_THROW(FeatureVec::from_unit({0.6, 0.8}));
  EXPECT_THROW(FeatureVec::from_unit({0.6, 0.9}), ssat::InputError);
}

TEST(Features, CosineDistanceCases) {
  const auto e1 = unit({1, 0}), e2 = unit({0, 1}), neg = unit({-1, 0});
  EXPECT_EQ(ssat::cosine_distance(e1, e1), 0.0);
  EXPECT_EQ(ssat::cosine_distance(e1, e2), 1.0);
  EXPECT_EQ(ssat::cosine_distance(e1, neg), 2.0);
}

TEST(Features, CosineDistanceDimensionMismatch) {
  EXPECT_THROW(ssat::cosine_distance(unit({1, 0}), unit({1, 0, 0})), ssat::InputError);
}

TEST(Features, AccumulateBoundaries) {
  const auto a = unit({1, 2, 3}), b = unit({-1, 0, 4});
  EXPECT_EQ(ssat::accumulate(a, b, 0.0), a);
  EXPECT_EQ(ssat::accumulate(a, b, 1.0), b);
}

TEST(Features, AccumulateHandValue) {
  // normalize(0.4 * (0,1) + 0.6 * (1,0)) = (0.6, 0.4) / sqrt(0.52)
  const auto r = ssat::accumulate(unit({1, 0}), unit({0, 1}), 0.4);
  EXPECT_NEAR(r[0], 0.6 / std::sqrt(0.52), 1e-12);
  EXPECT_NEAR(r[1], 0.4 / std::sqrt(0.52), 1e-12);
  EXPECT_NEAR(r[0], 0.832050, 1e-6);
  EXPECT_NEAR(r[1], 0.554700, 1e-6);
}

TEST(Features, AccumulateAntipodalHalfIsError) {
  EXPECT_THROW(ssat::accumulate(unit({1, 0}), unit({-1, 0}), 0.5), ssat::InputError);
}

TEST(Features, AccumulateRejectsBadBeta) {
  EXPECT_THROW(ssat::accumulate(unit({1, 0}), unit({0, 1}), 1.5), ssat::InputError);
}

TEST(FeaturesProperty, DistanceAndAccumulateInvariants) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> beta(0, 1);
  for (int i = 0; i < 300; ++i) {
    const auto f = random_unit(rng, 64), g = random_unit(rng, 64);
    EXPECT_NEAR(ssat::cosine_distance(f, f), 0.0, 1e-12);
    const double d = ssat::cosine_distance(f, g);
    EXPECT_EQ(d, ssat::cosine_distance(g, f));
    EXPECT_GE(d, -1e-9);
    EXPECT_LE(d, 2.0 + 1e-9);
    const double b = beta(rng);
    const auto acc = ssat::accumulate(f, g, b);
    EXPECT_NEAR(ssat::l2_norm(acc.values()), 1.0, 1e-6);
    const auto same = ssat::accumulate(f, f, b);
    for (std::size_t k = 0; k < f.dim(); ++k) EXPECT_NEAR(same[k], f[k], 1e-12);
  }
}
