#ifndef DMDSEP_BENCH_HARNESS_H_
#define DMDSEP_BENCH_HARNESS_H_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dmdsep/dmd.h"
#include "dmdsep/rpca.h"
#include "dmdsep/video.h"

namespace dmdsep {

enum class Method { kDmd, kRpca };

std::string MethodName(Method method);
// Accepts "dmd" and "rpca"; throws InvalidArgument otherwise.
Method ParseMethod(const std::string& name);

struct TimingRecord {
  Method method = Method::kDmd;
  Eigen::Index n = 0;  // pixels per frame
  Eigen::Index m = 0;  // frames per segment
  double seconds = 0.0;  // mean over `repetitions` timed runs
  int repetitions = 0;
  bool ok = true;
  std::string error;
};

struct SweepOptions {
  int repetitions = 3;
  DmdOptions dmd;
  PcpOptions pcp;
};

// Frame dimensions with exactly `pixels` pixels and the aspect ratio closest
// to the source's. Throws InvalidArgument when `pixels` cannot be factored
// within 10% of that aspect ratio.
std::pair<Eigen::Index, Eigen::Index> DimensionsForPixelCount(
    Eigen::Index pixels, Eigen::Index source_width, Eigen::Index source_height);

// Times a full separation of the first m frames, downsampled to n pixels, for
// every (n, m, method). One untimed warm-up run precedes the timed ones.
// Failures are recorded in the cell and the sweep continues. Cells run
// sequentially.
std::vector<TimingRecord> RunSweep(const FrameSequence& video,
                                   const std::vector<Eigen::Index>& pixel_grid,
                                   const std::vector<Eigen::Index>& segment_grid,
                                   const std::vector<Method>& methods,
                                   const SweepOptions& options = {});

// Mean wall time of `repetitions` runs of one separation, after a warm-up.
double TimeSeparation(const FrameMatrix& segment, Method method,
                      const SweepOptions& options);

struct FitResult {
  int exponent = 1;  // model t = c * s^exponent
  double c = 0.0;
  double r_squared = 0.0;
};

// One-parameter least squares through the origin on raw values:
// c = sum t s^e / sum s^2e, R^2 = 1 - SS_res / SS_tot.
FitResult FitPower(const std::vector<double>& sizes,
                   const std::vector<double>& seconds, int exponent);

enum class FitVariable { kSegmentLength, kPixelCount };

// Fits the successful records of one method, using m or n as the size.
FitResult FitPower(const std::vector<TimingRecord>& records, Method method,
                   FitVariable variable, int exponent);

struct LabeledFit {
  std::string label;
  FitResult fit;
};

struct SpeedupRow {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  double ratio = 0.0;  // rpca seconds / dmd seconds
};

std::vector<SpeedupRow> SpeedupRatios(const std::vector<TimingRecord>& records);

inline constexpr const char* kTimingHeader = "method,n,m,seconds,repetitions,status";

// Writes the timing CSV at `path` and a summary (fits and speedups) next to
// it as `<stem>.summary.csv`.
void EmitReport(const std::vector<TimingRecord>& records,
                const std::vector<LabeledFit>& fits,
                const std::filesystem::path& path);

// Gnuplot-friendly "size<TAB>seconds" pairs for one method.
void WriteGnuplotTsv(const std::vector<TimingRecord>& records, Method method,
                     FitVariable variable, const std::filesystem::path& path);

}  // namespace dmdsep

#endif  // DMDSEP_BENCH_HARNESS_H_
