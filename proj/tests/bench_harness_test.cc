#include "dmdsep/bench_harness.h"

#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/QR>
#include "gtest/gtest.h"

#include "dmdsep/errors.h"
#include "dmdsep/synthetic.h"
#include "test_util.h"

namespace dmdsep {
namespace {

using testing::TempDir;

std::vector<std::string> Lines(const std::filesystem::path& path) {
  std::ifstream f(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(f, line);) out.push_back(line);
  return out;
}

TEST(FitPower, ExactModels) {
  const std::vector<double> s = {1, 2, 3, 4};
  std::vector<double> quad, lin;
  for (double v : s) {
    quad.push_back(2 * v * v);
    lin.push_back(3 * v);
  }
  const FitResult q = FitPower(s, quad, 2);
  EXPECT_NEAR(q.c, 2.0, 1e-12);
  EXPECT_NEAR(q.r_squared, 1.0, 1e-12);
  const FitResult l = FitPower(s, lin, 1);
  EXPECT_NEAR(l.c, 3.0, 1e-12);
  EXPECT_NEAR(l.r_squared, 1.0, 1e-12);
  // The wrong model fits worse.
  EXPECT_LT(FitPower(s, quad, 1).r_squared, 0.99);
}

// Oracle: least squares through the origin via a QR solve, R^2 from its
// residual against the mean.
TEST(FitPower, PropertyMatchesQrLeastSquares) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 3 + static_cast<int>(rng() % 8);
    const int e = 1 + static_cast<int>(rng() % 2);
    std::vector<double> s, t;
    Eigen::VectorXd design(k), rhs(k);
    for (int i = 0; i < k; ++i) {
      s.push_back(1.0 + 100.0 * u(rng));
      t.push_back(1e-3 * std::pow(s.back(), e) * (0.8 + 0.4 * u(rng)));
      design(i) = std::pow(s.back(), e);
      rhs(i) = t.back();
    }
    const double c = design.colPivHouseholderQr().solve(rhs)(0);
    const double ss_res = (rhs - c * design).squaredNorm();
    const double ss_tot = (rhs.array() - rhs.mean()).square().sum();
    const FitResult fit = FitPower(s, t, e);
    EXPECT_NEAR(fit.c, c, 1e-10 * std::abs(c));
    EXPECT_NEAR(fit.r_squared, 1.0 - ss_res / ss_tot, 1e-9);
  }
}

TEST(FitPower, Errors) {
  EXPECT_THROW(FitPower({5, 5, 5}, {1, 2, 3}, 1), InvalidArgument);
  EXPECT_THROW(FitPower({1, 2}, {1, 2}, 1), InvalidArgument);
  EXPECT_THROW(FitPower({1, 2, 3}, {1, 2}, 1), DimensionError);
  EXPECT_THROW(FitPower({1, 2, 3}, {1, 2, 3}, 3), InvalidArgument);
}

TEST(FitPower, FromRecordsSkipsFailuresAndOtherMethods) {
  std::vector<TimingRecord> records;
  for (Eigen::Index m : {10, 20, 30}) {
    records.push_back({Method::kDmd, 100, m, 0.01 * m, 3, true, ""});
    records.push_back({Method::kRpca, 100, m, 1.0, 3, true, ""});
  }
  records.push_back({Method::kDmd, 100, 40, 99.0, 3, false, "boom"});
  const FitResult fit =
      FitPower(records, Method::kDmd, FitVariable::kSegmentLength, 1);
  EXPECT_NEAR(fit.c, 0.01, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_THROW(FitPower(records, Method::kDmd, FitVariable::kPixelCount, 1),
               InvalidArgument);
}

TEST(DimensionsForPixelCount, Examples) {
  EXPECT_EQ(DimensionsForPixelCount(11520, 320, 240),
            (std::pair<Eigen::Index, Eigen::Index>{120, 96}));
  EXPECT_EQ(DimensionsForPixelCount(10000, 100, 100),
            (std::pair<Eigen::Index, Eigen::Index>{100, 100}));
  EXPECT_EQ(DimensionsForPixelCount(3000, 120, 96),
            (std::pair<Eigen::Index, Eigen::Index>{60, 50}));
  EXPECT_THROW(DimensionsForPixelCount(7, 100, 100), InvalidArgument);
  EXPECT_THROW(DimensionsForPixelCount(0, 100, 100), InvalidArgument);
}

TEST(Methods, NamesRoundTrip) {
  EXPECT_EQ(ParseMethod(MethodName(Method::kDmd)), Method::kDmd);
  EXPECT_EQ(ParseMethod("rpca"), Method::kRpca);
  EXPECT_THROW(ParseMethod("svd"), InvalidArgument);
}

FrameSequence SmallVideo() {
  SyntheticVideoSpec spec;
  spec.width = 20;
  spec.height = 20;
  spec.frames = 12;
  return GenerateSyntheticVideo(spec).video;
}

TEST(RunSweep, SmallestCellAndRecordedFailures) {
  const FrameSequence video = SmallVideo();
  const auto records =
      RunSweep(video, {400, 7}, {10, 50}, {Method::kDmd, Method::kRpca});
  ASSERT_EQ(records.size(), 8u);
  int ok = 0;
  for (const TimingRecord& r : records) {
    EXPECT_EQ(r.repetitions, 3);
    if (r.ok) {
      ++ok;
      EXPECT_EQ(r.n, 400);
      EXPECT_EQ(r.m, 10);
      EXPECT_GT(r.seconds, 0.0);
    } else {
      EXPECT_FALSE(r.error.empty());
    }
  }
  EXPECT_EQ(ok, 2);
  EXPECT_THROW(RunSweep(video, {}, {10}, {Method::kDmd}), InvalidArgument);
}

TEST(RunSweep, OnePixelTwoFrames) {
  const auto records = RunSweep(SmallVideo(), {1}, {2}, {Method::kDmd});
  ASSERT_EQ(records.size(), 1u);
  EXPECT_TRUE(records[0].ok) << records[0].error;
  EXPECT_TRUE(std::isfinite(records[0].seconds));
  EXPECT_GT(records[0].seconds, 0.0);
}

TEST(RunSweep, RowCountIsGridProduct) {
  const auto records = RunSweep(SmallVideo(), {100, 400}, {2, 5, 10},
                                {Method::kDmd, Method::kRpca});
  EXPECT_EQ(records.size(), 2u * 3u * 2u);
}

TEST(TimeSeparation, RepeatedTimingsAreStable) {
  SyntheticVideoSpec spec;
  spec.frames = 30;
  const FrameSequence video = GenerateSyntheticVideo(spec).video;
  const FrameMatrix segment = ToFrameMatrix(video, {0, 30});
  const SweepOptions options;
  const double a = TimeSeparation(segment, Method::kDmd, options);
  const double b = TimeSeparation(segment, Method::kDmd, options);
  EXPECT_LT(std::max(a, b) / std::min(a, b), 3.0);
}

TEST(EmitReport, EmptyRecordsGiveHeadersOnly) {
  const auto dir = TempDir("report_empty");
  EmitReport({}, {}, dir / "timing.csv");
  EXPECT_EQ(Lines(dir / "timing.csv"), std::vector<std::string>{kTimingHeader});
  EXPECT_EQ(Lines(dir / "timing.summary.csv"),
            std::vector<std::string>{"kind,label,n,m,value,r_squared"});
}

TEST(EmitReport, RowsFitsAndSpeedups) {
  const auto dir = TempDir("report_rows");
  const std::vector<TimingRecord> records = {
      {Method::kDmd, 100, 10, 0.5, 3, true, ""},
      {Method::kRpca, 100, 10, 10.0, 3, true, ""},
      {Method::kDmd, 200, 10, 1.0, 3, true, ""},
      {Method::kRpca, 200, 10, 0.0, 3, false, "too slow"},
  };
  const auto speedups = SpeedupRatios(records);
  ASSERT_EQ(speedups.size(), 1u);
  EXPECT_EQ(speedups[0].n, 100);
  EXPECT_DOUBLE_EQ(speedups[0].ratio, 20.0);

  EmitReport(records, {{"dmd_m", {2, 0.001, 0.99}}}, dir / "t.csv");
  const auto timing = Lines(dir / "t.csv");
  ASSERT_EQ(timing.size(), 5u);
  EXPECT_EQ(timing[4].substr(timing[4].rfind(',') + 1), "failed");
  const auto summary = Lines(dir / "t.summary.csv");
  ASSERT_EQ(summary.size(), 3u);
  EXPECT_EQ(summary[1].rfind("fit_s2,dmd_m,", 0), 0u);
  EXPECT_EQ(summary[2].rfind("speedup,rpca/dmd,100,10,20", 0), 0u);

  WriteGnuplotTsv(records, Method::kDmd, FitVariable::kPixelCount, dir / "g.tsv");
  const auto tsv = Lines(dir / "g.tsv");
  ASSERT_EQ(tsv.size(), 3u);
  EXPECT_EQ(tsv[1], "100\t0.5");
}

}  // namespace
}  // namespace dmdsep
