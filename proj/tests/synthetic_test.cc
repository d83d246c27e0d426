#include "dmdsep/synthetic.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

#include "dmdsep/errors.h"
#include "test_util.h"

namespace dmdsep {
namespace {

using testing::TempDir;

const SyntheticVideo& DefaultVideo() {
  static const SyntheticVideo video = GenerateSyntheticVideo();
  return video;
}

TEST(Synthetic, FirstFrame) {
  const SyntheticVideo& syn = DefaultVideo();
  ASSERT_EQ(syn.video.size(), 300);
  ASSERT_EQ(syn.video.width, 100);
  const auto& p = syn.truth.placements;
  EXPECT_TRUE(p[0][0].visible);
  EXPECT_EQ(p[0][0].x, 0);
  EXPECT_EQ(p[0][0].y, 0);
  EXPECT_FALSE(p[1][0].visible);
  EXPECT_FALSE(p[2][0].visible);
  const Image& f0 = syn.video.frames[0];
  // 7x7 patrol square: white corners and plus, black elsewhere.
  EXPECT_EQ(f0(0, 0), 1.0);
  EXPECT_EQ(f0(6, 6), 1.0);
  EXPECT_EQ(f0(3, 3), 1.0);
  EXPECT_EQ(f0(1, 3), 1.0);
  EXPECT_EQ(f0(1, 1), 0.0);
  EXPECT_EQ(syn.truth.foreground_masks[0].count(), 49);
}

TEST(Synthetic, DiscEntersOnItsFrame) {
  const SyntheticVideo& syn = DefaultVideo();
  const auto& disc = syn.truth.placements[1];
  EXPECT_FALSE(disc[24].visible);
  ASSERT_TRUE(disc[25].visible);
  ASSERT_TRUE(disc[26].visible);
  // Moves up and to the left.
  EXPECT_EQ(disc[26].x, disc[25].x - 2);
  EXPECT_EQ(disc[26].y, disc[25].y - 2);
  const int cx = disc[26].x + 4;
  const int cy = disc[26].y + 4;
  EXPECT_FALSE(syn.truth.foreground_masks[24](cy, cx));
  EXPECT_TRUE(syn.truth.foreground_masks[26](cy, cx));
  EXPECT_EQ(syn.video.frames[26](cy, cx), 0.75);
  EXPECT_EQ(syn.video.frames[24](cy, cx), syn.truth.background(cy, cx));
}

TEST(Synthetic, DiscBouncesThenLeaves) {
  const SyntheticVideo& syn = DefaultVideo();
  const auto& disc = syn.truth.placements[1];
  bool went_down = false;
  int last_visible = -1;
  for (int k = 26; k < 300; ++k) {
    if (!disc[k].visible) continue;
    last_visible = k;
    if (disc[k - 1].visible && disc[k].y > disc[k - 1].y) went_down = true;
    EXPECT_GE(disc[k].y, 100 / 5 - 2);
  }
  EXPECT_TRUE(went_down);
  ASSERT_GT(last_visible, 25);
  ASSERT_LT(last_visible, 299);
  for (int k = last_visible + 1; k < 300; ++k) EXPECT_FALSE(disc[k].visible);
}

TEST(Synthetic, OutlineStaysInFrame) {
  const SyntheticVideo& syn = DefaultVideo();
  const auto& sq = syn.truth.placements[2];
  EXPECT_FALSE(sq[49].visible);
  ASSERT_TRUE(sq[50].visible);
  EXPECT_EQ(sq[50].x, 100 - 13);
  for (int k = 50; k < 300; ++k) {
    ASSERT_TRUE(sq[k].visible);
    EXPECT_GE(sq[k].x, 0);
    EXPECT_GE(sq[k].y, 0);
    EXPECT_LE(sq[k].x, 100 - 13);
    EXPECT_LE(sq[k].y, 100 - 13);
  }
}

TEST(Synthetic, PatrolLap) {
  const SyntheticVideoSpec spec;
  ASSERT_EQ(PatrolPerimeter(spec), 372);
  const ObjectPlacement quarter = PatrolPosition(spec, 93);
  EXPECT_EQ(quarter.x, 0);
  EXPECT_EQ(quarter.y, 93);
  const ObjectPlacement half = PatrolPosition(spec, 186);
  EXPECT_EQ(half.x, 93);
  EXPECT_EQ(half.y, 93);
  const ObjectPlacement lap = PatrolPosition(spec, 372);
  EXPECT_EQ(lap.x, 0);
  EXPECT_EQ(lap.y, 0);
  // 4 px per frame: one lap every 93 frames.
  const auto& p = DefaultVideo().truth.placements[0];
  EXPECT_EQ(p[93].x, p[0].x);
  EXPECT_EQ(p[93].y, p[0].y);
}

TEST(Synthetic, PropertyPatrolStepsAlongBorder) {
  const SyntheticVideoSpec spec;
  for (long s = 0; s < 2 * PatrolPerimeter(spec); ++s) {
    const ObjectPlacement a = PatrolPosition(spec, s);
    const ObjectPlacement b = PatrolPosition(spec, s + 1);
    EXPECT_EQ(std::abs(a.x - b.x) + std::abs(a.y - b.y), 1) << s;
    EXPECT_TRUE(a.x == 0 || a.y == 0 || a.x == 93 || a.y == 93) << s;
  }
}

// Outside the foreground mask every frame shows the static background.
TEST(Synthetic, PropertyBackgroundOutsideMask) {
  const SyntheticVideo& syn = DefaultVideo();
  for (std::size_t k = 0; k < syn.video.frames.size(); ++k) {
    const Image& f = syn.video.frames[k];
    const Mask& mask = syn.truth.foreground_masks[k];
    const Eigen::Index changed =
        ((f.array() != syn.truth.background.array()) && !mask.array()).count();
    EXPECT_EQ(changed, 0) << "frame " << k;
    EXPECT_GE(f.minCoeff(), 0.0);
    EXPECT_LE(f.maxCoeff(), 1.0);
  }
}

TEST(Synthetic, BackgroundStatistics) {
  const Image& bg = DefaultVideo().truth.background;
  EXPECT_NEAR(bg.mean(), 0.5, 0.01);
  EXPECT_GE(bg.minCoeff(), 0.0);
  EXPECT_LT(bg.maxCoeff(), 1.0);
}

TEST(Synthetic, DeterministicPerSeed) {
  SyntheticVideoSpec spec;
  spec.frames = 40;
  const SyntheticVideo a = GenerateSyntheticVideo(spec);
  const SyntheticVideo b = GenerateSyntheticVideo(spec);
  for (std::size_t k = 0; k < a.video.frames.size(); ++k) {
    EXPECT_EQ(a.video.frames[k], b.video.frames[k]);
  }
  spec.seed = 2;
  const SyntheticVideo c = GenerateSyntheticVideo(spec);
  EXPECT_NE(a.truth.background, c.truth.background);
}

TEST(Synthetic, OtherSizes) {
  SyntheticVideoSpec spec;
  spec.width = 120;
  spec.height = 96;
  spec.frames = 60;
  const SyntheticVideo syn = GenerateSyntheticVideo(spec);
  EXPECT_EQ(syn.video.frames[0].cols(), 120);
  EXPECT_EQ(syn.video.frames[0].rows(), 96);
  spec.width = 5;
  EXPECT_THROW(GenerateSyntheticVideo(spec), InvalidArgument);
}

TEST(BackgroundError, Examples) {
  const SyntheticVideo& syn = DefaultVideo();
  const std::vector<Eigen::Index> frames = {0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(
      MeanBackgroundIntensityError(RealMatrix::Zero(10000, 4), syn.truth, frames),
      0.0);
  EXPECT_NEAR(MeanBackgroundIntensityError(RealMatrix::Constant(10000, 4, 0.004),
                                           syn.truth, frames),
              0.004, 1e-14);
  // The last column is ignored.
  RealMatrix s = RealMatrix::Zero(10000, 4);
  s.col(3).setConstant(1.0);
  EXPECT_DOUBLE_EQ(MeanBackgroundIntensityError(s, syn.truth, frames), 0.0);
  // Foreground pixels are ignored.
  s.setZero();
  s(0, 0) = 1.0;  // patrol square covers pixel 0 on frame 0
  EXPECT_DOUBLE_EQ(MeanBackgroundIntensityError(s, syn.truth, frames), 0.0);
  EXPECT_THROW(MeanBackgroundIntensityError(s, syn.truth,
                                            std::vector<Eigen::Index>{0, 1}),
               DimensionError);
}

TEST(BackgroundError, FrameVariant) {
  Mask mask = Mask::Constant(2, 2, false);
  mask(0, 0) = true;
  RealVector col(4);
  col << 9.0, 0.1, 0.2, 0.3;
  EXPECT_NEAR(FrameBackgroundIntensity(col, mask), 0.2, 1e-15);
}

TEST(Synthetic, WriteAndReload) {
  SyntheticVideoSpec spec;
  spec.frames = 12;
  const SyntheticVideo syn = GenerateSyntheticVideo(spec);
  const auto dir = TempDir("synthetic_io");
  WriteSyntheticVideo(syn, spec, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "groundtruth.json"));
  const GroundTruth truth = LoadGroundTruth(dir);
  EXPECT_EQ(truth.seed, spec.seed);
  ASSERT_EQ(truth.foreground_masks.size(), 12u);
  for (std::size_t k = 0; k < 12; ++k) {
    EXPECT_EQ(truth.foreground_masks[k], syn.truth.foreground_masks[k]);
  }
  EXPECT_LE((truth.background - syn.truth.background).cwiseAbs().maxCoeff(),
            1.0 / 131070 + 1e-12);
  const FrameSequence frames = LoadPgmSequence(dir / "frames");
  EXPECT_EQ(frames.size(), 12);
}

}  // namespace
}  // namespace dmdsep
