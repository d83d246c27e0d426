#include "dmdsep/kernels.h"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gtest/gtest.h"

#include "dmdsep/errors.h"
#include "test_util.h"

namespace dmdsep {
namespace {

using testing::RandomMatrix;

TEST(Shrink, Examples) {
  EXPECT_EQ(Shrink(0.5, 1.0), 0.0);
  EXPECT_EQ(Shrink(3.0, 1.0), 2.0);
  EXPECT_EQ(Shrink(-3.0, 1.0), -2.0);
  EXPECT_EQ(Shrink(-0.25, 0.0), -0.25);
}

TEST(Shrink, PropertyNonexpansive) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> value(-5.0, 5.0), tau(0.0, 3.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = value(rng), y = value(rng), t = tau(rng);
    EXPECT_LE(std::abs(Shrink(x, t) - Shrink(y, t)), std::abs(x - y) + 1e-15);
  }
}

TEST(RedistributeResidual, OvershootFoldsBackIntoLowRank) {
  RealMatrix x(1, 1), modulus(1, 1), low, sparse;
  x << 1.0;
  modulus << 1.2;
  kernels::serial::RedistributeResidual(x, modulus, &low, &sparse);
  EXPECT_DOUBLE_EQ(low(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(sparse(0, 0), 0.0);
}

TEST(RedistributeResidual, NoNegativeResidual) {
  RealMatrix x(1, 1), modulus(1, 1), low, sparse;
  x << 0.5;
  modulus << 0.3;
  kernels::parallel::RedistributeResidual(x, modulus, &low, &sparse);
  EXPECT_DOUBLE_EQ(low(0, 0), 0.3);
  EXPECT_DOUBLE_EQ(sparse(0, 0), 0.5 - 0.3);
}

TEST(RedistributeResidual, NegativeInputIsClampedAndCounted) {
  RealMatrix x(1, 2), modulus(1, 2), low, sparse;
  x << -0.1, 0.2;
  modulus << 0.0, 0.1;
  const RedistributionStats stats =
      kernels::serial::RedistributeResidual(x, modulus, &low, &sparse);
  EXPECT_EQ(stats.clamped_entries, 1u);
  EXPECT_NEAR(stats.clamped_mass, 0.1, 1e-15);
  EXPECT_EQ(low(0, 0), 0.0);
  EXPECT_NEAR(low(0, 0) + sparse(0, 0), -0.1, 1e-15);
}

TEST(RedistributeResidual, ShapeMismatch) {
  RealMatrix low, sparse;
  EXPECT_THROW(kernels::parallel::RedistributeResidual(
                   RealMatrix::Zero(2, 2), RealMatrix::Zero(2, 3), &low, &sparse),
               DimensionError);
}

TEST(ModeGrowth, DecayedModeIsOneThenZero) {
  const Complex decayed(-std::numeric_limits<double>::infinity(), 0.0);
  EXPECT_EQ(ModeGrowth(decayed, 0.0), Complex(1.0, 0.0));
  EXPECT_EQ(ModeGrowth(decayed, 1.0), Complex(0.0, 0.0));
  EXPECT_NEAR(std::abs(ModeGrowth(Complex(0.0, M_PI), 1.0) - Complex(-1.0, 0.0)),
              0.0, 1e-15);
}

TEST(BoxFilterTaps, WeightsSumToOne) {
  for (Eigen::Index source : {1, 7, 96, 120, 240}) {
    for (Eigen::Index target = 1; target <= source; target += 1 + target / 3) {
      const auto taps = BoxFilterTaps(source, target);
      ASSERT_EQ(static_cast<Eigen::Index>(taps.size()), target);
      std::vector<double> coverage(static_cast<std::size_t>(source), 0.0);
      for (const auto& row : taps) {
        double sum = 0.0;
        for (const BoxTap& t : row) {
          sum += t.weight;
          coverage[static_cast<std::size_t>(t.source)] += t.weight;
        }
        EXPECT_NEAR(sum, 1.0, 1e-14);
      }
      // Every source sample contributes target/source of its mass in total.
      for (double c : coverage) {
        EXPECT_NEAR(c, static_cast<double>(target) / source, 1e-14);
      }
    }
  }
}

// The OpenMP kernels must agree with the serial references.
TEST(Kernels, PropertyParallelMatchesSerial) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 700);
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng() % 15);
    const Eigen::Index modes = 1 + static_cast<Eigen::Index>(rng() % 6);

    const ComplexMatrix phi = RandomMatrix(&rng, n, modes).cast<Complex>() +
                              Complex(0, 1) * RandomMatrix(&rng, n, modes).cast<Complex>();
    const ComplexVector b = RandomMatrix(&rng, modes, 1).cast<Complex>();
    ComplexVector omega = 0.1 * RandomMatrix(&rng, modes, 1).cast<Complex>();
    omega(0) = Complex(-std::numeric_limits<double>::infinity(), 0.0);
    std::vector<double> times;
    for (Eigen::Index k = 0; k < m; ++k) times.push_back(static_cast<double>(k));
    const ComplexMatrix serial = kernels::serial::ReconstructModes(phi, b, omega, times);
    const ComplexMatrix parallel = kernels::parallel::ReconstructModes(phi, b, omega, times);
    EXPECT_LT((serial - parallel).cwiseAbs().maxCoeff(), 1e-12);

    const RealMatrix x = RandomMatrix(&rng, n, m, 0.0, 1.0);
    const RealMatrix modulus = RandomMatrix(&rng, n, m, 0.0, 1.0);
    RealMatrix l1, s1, l2, s2;
    kernels::serial::RedistributeResidual(x, modulus, &l1, &s1);
    kernels::parallel::RedistributeResidual(x, modulus, &l2, &s2);
    EXPECT_EQ(l1, l2);
    EXPECT_EQ(s1, s2);
    EXPECT_LT((l1 + s1 - x).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_GE(s1.minCoeff(), 0.0);
    EXPECT_GE(l1.minCoeff(), 0.0);

    RealMatrix a1 = RandomMatrix(&rng, n, m), a2 = a1;
    kernels::serial::ShrinkInPlace(&a1, 0.3);
    kernels::parallel::ShrinkInPlace(&a2, 0.3);
    EXPECT_EQ(a1, a2);

    const Eigen::Index w = 1 + static_cast<Eigen::Index>(rng() % 50);
    const Eigen::Index h = 1 + static_cast<Eigen::Index>(rng() % 50);
    const Image frame = RandomMatrix(&rng, h, w, 0.0, 1.0);
    const Eigen::Index tw = 1 + static_cast<Eigen::Index>(rng() % w);
    const Eigen::Index th = 1 + static_cast<Eigen::Index>(rng() % h);
    EXPECT_EQ(kernels::serial::BoxDownsample(frame, tw, th),
              kernels::parallel::BoxDownsample(frame, tw, th));
  }
}

TEST(BoxDownsample, MeanOfTwoByTwo) {
  Image frame(2, 2);
  frame << 0, 1, 1, 0;
  const Image out = kernels::serial::BoxDownsample(frame, 1, 1);
  EXPECT_DOUBLE_EQ(out(0, 0), 0.5);
}

TEST(BoxDownsample, UpsamplingUnsupported) {
  EXPECT_THROW(kernels::parallel::BoxDownsample(Image::Zero(4, 4), 5, 4),
               UnsupportedError);
}

}  // namespace
}  // namespace dmdsep
