#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "patchdct/attack.hpp"
#include "patchdct/error.hpp"
#include "patchdct/metrics.hpp"
#include "test_support.hpp"

using namespace patchdct;
using testsupport::random_image;

TEST(L2Distortion, IdenticalIsZero) {
  const auto x = random_image(1, {8, 8, 3});
  EXPECT_EQ(l2_distortion(x, x), 0.0);
}

TEST(L2Distortion, SinglePixelUnitDifference) {
  ImageTensor x(Shape{4, 4, 3}, 0.0);
  auto y = x;
  y.at(2, 1, 1) = 1.0;
  EXPECT_EQ(l2_distortion(x, y), 1.0);
}

TEST(L2Distortion, MatchesNaiveSum) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = random_image(seed, {32, 32, 3});
    const auto y = random_image(seed + 500, {32, 32, 3});
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x.values()[i] - y.values()[i]) * (x.values()[i] - y.values()[i]);
    EXPECT_NEAR(l2_distortion(x, y), std::sqrt(s), 1e-12);
  }
}

TEST(L2Distortion, ShapeMismatch) {
  EXPECT_THROW(l2_distortion(ImageTensor(Shape{2, 2, 1}), ImageTensor(Shape{2, 2, 3})), ShapeMismatch);
}

TEST(Psnr, MseOfOneHundredthIsTwentyDb) {
  ImageTensor x(Shape{16, 16, 3}, 0.3);
  ImageTensor y(Shape{16, 16, 3}, 0.4);  // uniform difference 0.1
  EXPECT_NEAR(psnr(x, y), 20.0, 1e-9);
  // Non-uniform error with the same MSE: half the pixels off by sqrt(0.02).
  auto z = x;
  for (std::size_t i = 0; i < z.size(); i += 2) z.values()[i] += std::sqrt(0.02);
  EXPECT_NEAR(psnr(x, z), 20.0, 1e-9);
}

TEST(Psnr, IdenticalImagesHitTheCap) {
  const auto x = random_image(2, {8, 8, 3});
  EXPECT_EQ(psnr(x, x), kPsnrCap);
  EXPECT_EQ(kPsnrCap, 99.0);
}

TEST(Ssim, IdenticalImagesGiveOne) {
  const auto x = random_image(3, {32, 32, 3});
  EXPECT_DOUBLE_EQ(ssim(x, x), 1.0);
}

TEST(Ssim, InvertedBinaryImageIsNegative) {
  ImageTensor x(Shape{24, 24, 1});
  std::mt19937_64 gen(5);
  for (double& v : x.values()) v = static_cast<double>(gen() & 1);
  auto inv = x;
  for (double& v : inv.values()) v = 1.0 - v;
  EXPECT_LT(ssim(x, inv), 0.0);
}

TEST(Ssim, MatchesReferenceImplementation) {
  // Reference: skimage.metrics.structural_similarity(x, y, gaussian_weights=True,
  // sigma=1.5, use_sample_covariance=False, data_range=1.0, channel_axis=2).
  const std::size_t H = 24, W = 20, C = 3;
  ImageTensor x(Shape{W, H, C}), y(Shape{W, H, C});
  for (std::size_t h = 0; h < H; ++h)
    for (std::size_t w = 0; w < W; ++w)
      for (std::size_t c = 0; c < C; ++c) {
        const double hd = static_cast<double>(h), wd = static_cast<double>(w), cd = static_cast<double>(c);
        const double v = 0.5 + 0.4 * std::sin(0.3 * hd + 0.7 * wd + 1.3 * cd) * std::cos(0.11 * hd - 0.05 * wd * cd);
        x.at(h, w, c) = v;
        y.at(h, w, c) = std::clamp(v + 0.08 * std::sin(1.7 * hd * 0.5 + 0.9 * wd + 0.4 * cd), 0.0, 1.0);
      }
  EXPECT_NEAR(ssim(x, y), 0.8845807480627288, 1e-9);
}

TEST(Ssim, Symmetric) {
  const auto x = random_image(6, {16, 16, 3});
  const auto y = random_image(7, {16, 16, 3});
  EXPECT_NEAR(ssim(x, y), ssim(y, x), 1e-15);
}

TEST(Ssim, TooSmallForTheWindow) {
  EXPECT_THROW(ssim(ImageTensor(Shape{10, 16, 1}), ImageTensor(Shape{10, 16, 1})), ImageTooSmall);
  EXPECT_NO_THROW(ssim(ImageTensor(Shape{11, 11, 1}), ImageTensor(Shape{11, 11, 1})));
}

namespace {
ImageOutcome ok(double l2, std::uint64_t queries = 100) { return {true, l2, 30.0, 0.9, queries}; }
ImageOutcome fail() { return {false, 0.0, 0.0, 0.0, 4000}; }
}  // namespace

TEST(SuccessRate, AllFailuresGiveZero) {
  const std::vector<ImageOutcome> v{fail(), fail()};
  EXPECT_EQ(success_rate(v, 5.0, 4000), 0.0);
}

TEST(SuccessRate, ThreeOfFour) {
  const std::vector<ImageOutcome> v{ok(1.0), ok(4.9), ok(5.0), ok(5.1)};
  EXPECT_EQ(success_rate(v, 5.0, 4000), 0.75);
}

TEST(SuccessRate, QueriesBeyondBudgetDoNotCount) {
  const std::vector<ImageOutcome> v{ok(1.0, 4000), ok(1.0, 4001)};
  EXPECT_EQ(success_rate(v, 5.0, 4000), 0.5);
}

TEST(SuccessRate, EmptyIsAnError) { EXPECT_THROW(success_rate({}, 5.0, 4000), RangeError); }

TEST(SuccessRate, MonotoneOverStandardThresholds) {
  std::vector<ImageOutcome> v;
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> l2(0.5, 10.0);
  for (int i = 0; i < 200; ++i) v.push_back(i % 7 == 0 ? fail() : ok(l2(gen)));
  double prev = -1.0;
  for (double eps : {3.0, 5.0, 8.0}) {
    const double r = success_rate(v, eps, 4000);
    EXPECT_GE(r, prev);
    prev = r;
  }
  for (double eps = 0.0; eps < 12.0; eps += 0.05) {
    EXPECT_LE(success_rate(v, eps, 4000), success_rate(v, eps + 0.05, 4000));
  }
}

TEST(Aggregate, SingleResultIsItself) {
  const std::vector<ImageOutcome> v{{true, 2.5, 31.0, 0.93, 10}};
  const auto r = aggregate(v);
  EXPECT_EQ(r.total, 1u);
  EXPECT_EQ(r.succeeded, 1u);
  EXPECT_EQ(r.l2, (SummaryStats{2.5, 2.5}));
  EXPECT_EQ(r.psnr, (SummaryStats{31.0, 31.0}));
  EXPECT_EQ(r.ssim, (SummaryStats{0.93, 0.93}));
}

TEST(Aggregate, LowerMiddleMedian) {
  const std::vector<ImageOutcome> v{ok(1), ok(2), ok(3), ok(4)};
  const auto r = aggregate(v);
  EXPECT_EQ(r.l2.mean, 2.5);
  EXPECT_EQ(r.l2.median, 2.0);
  EXPECT_EQ(lower_median({5.0, 1.0, 3.0}), 3.0);
  EXPECT_TRUE(std::isnan(lower_median({})));
  EXPECT_TRUE(std::isnan(mean(std::vector<double>{})));
}

TEST(Aggregate, FailuresCountedButExcludedFromStatistics) {
  const std::vector<ImageOutcome> v{ok(1), fail(), ok(3)};
  const auto r = aggregate(v);
  EXPECT_EQ(r.total, 3u);
  EXPECT_EQ(r.succeeded, 2u);
  EXPECT_EQ(r.l2.mean, 2.0);
  EXPECT_EQ(r.l2.median, 1.0);
}

TEST(Aggregate, PermutationInvariant) {
  std::vector<ImageOutcome> v;
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 57; ++i) v.push_back(i % 5 == 0 ? fail() : ImageOutcome{true, u(gen), u(gen) * 5, u(gen) / 10, 7});
  const auto reference = aggregate(v);
  for (int k = 0; k < 20; ++k) {
    std::shuffle(v.begin(), v.end(), gen);
    EXPECT_EQ(aggregate(v), reference);  // exact, not approximate
  }
}

TEST(Metrics, L2AgreesWithEngineReport) {
  const Shape shape{32, 32, 3};
  const PatchOracle oracle(shape, 16, 1, 0.55);
  AttackConfig config;
  config.budget = 800;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto x0 = random_image(seed + 40, shape, 0.35, 0.65);
    config.seed = seed;
    const auto result = run_attack(x0, oracle, config);
    ASSERT_TRUE(result.succeeded) << result.message;
    EXPECT_NEAR(l2_distortion(x0, result.adversarial), result.l2, 1e-6);
  }
}
