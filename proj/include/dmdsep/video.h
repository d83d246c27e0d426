#ifndef DMDSEP_VIDEO_H_
#define DMDSEP_VIDEO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "dmdsep/dmd.h"
#include "dmdsep/kernels.h"
#include "dmdsep/numerics.h"

namespace dmdsep {

// Grayscale frames with intensities in [0, 1], all of the same size.
struct FrameSequence {
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  std::vector<Image> frames;
  double frame_rate = 30.0;  // informational

  Eigen::Index size() const { return static_cast<Eigen::Index>(frames.size()); }
  Eigen::Index pixels() const { return width * height; }
};

struct SegmentPlan {
  Eigen::Index segment_length = 30;
  Eigen::Index stride = 30;
  // A trailing segment shorter than this is merged into its predecessor.
  Eigen::Index min_length = 2;
};

// Half-open frame range [first, first + length).
struct SegmentRange {
  Eigen::Index first = 0;
  Eigen::Index length = 0;
};

// ---- PGM (binary P5) frames ----

Image ReadPgm(const std::filesystem::path& path);

// maxval must be 255 or 65535. Intensities are clamped to [0, 1].
void WritePgm(const Image& frame, const std::filesystem::path& path,
              int maxval = 255);

// Loads every `*<digits>.pgm` file of a directory, ordered by the numeric
// index in the file name.
FrameSequence LoadPgmSequence(const std::filesystem::path& dir);

// Writes `<prefix>%06d.pgm` for each frame, index starting at `first_index`.
// Written value = round(clamp(intensity * brighten, 0, 1) * 255).
void WritePgmSequence(const FrameSequence& sequence,
                      const std::filesystem::path& dir, double brighten = 1.0,
                      Eigen::Index first_index = 0,
                      const std::string& prefix = "frame_");

// ---- Geometry ----

// Area-average (box filter) downsampling; upsampling throws UnsupportedError.
FrameSequence Downsample(const FrameSequence& sequence, Eigen::Index width,
                         Eigen::Index height);

// Drops the first `count` frames.
FrameSequence SkipFrames(const FrameSequence& sequence, Eigen::Index count);

// Row-major pixel scan of a frame into a column vector, and back.
RealVector Vectorize(const Image& frame);
Image Devectorize(const Eigen::Ref<const RealVector>& column,
                  Eigen::Index width, Eigen::Index height);

std::vector<SegmentRange> PlanSegments(Eigen::Index frame_count,
                                       const SegmentPlan& plan);

std::vector<FrameMatrix> SegmentFrames(const FrameSequence& sequence,
                                       const SegmentPlan& plan);

// Frame matrix for an explicit range.
FrameMatrix ToFrameMatrix(const FrameSequence& sequence, SegmentRange range);

// Converts matrix columns back into frames.
FrameSequence ToFrameSequence(const RealMatrix& columns, Eigen::Index width,
                              Eigen::Index height);

// ---- Binary matrix files ----
//
// "DMDV", u32 LE rows, u32 LE cols, rows * cols IEEE-754 LE doubles in
// column-major order.

void WriteMatrixBinary(const RealMatrix& x, const std::filesystem::path& path);
RealMatrix ReadMatrixBinary(const std::filesystem::path& path);

// ---- Metrics ----

struct MetricsRow {
  Eigen::Index segment = 0;
  Eigen::Index frame = 0;
  std::string method;
  double mean_bg_intensity = 0.0;
  double wall_seconds = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "segment,frame,method,mean_bg_intensity,wall_seconds";

void WriteMetricsCsv(const std::vector<MetricsRow>& rows,
                     const std::filesystem::path& path);

}  // namespace dmdsep

#endif  // DMDSEP_VIDEO_H_
