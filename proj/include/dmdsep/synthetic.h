#ifndef DMDSEP_SYNTHETIC_H_
#define DMDSEP_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dmdsep/video.h"

namespace dmdsep {

using Mask =
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Constructed error-analysis video: a fixed uniform-random background with
// three moving objects drawn on top, in order:
//   1. 7x7 black square with a white pixel in each corner and a white plus,
//      patrolling the frame border counter-clockwise from the top-left corner.
//   2. light-gray disc of diameter 9, appearing on `circle_entry_frame`,
//      moving up and to the left, bouncing down off a wall one fifth of the way
//      from the top, then leaving through the left edge.
//   3. 13x13 outline square with a black X and transparent interior,
//      appearing at the right edge on `square_entry_frame`, moving down and to
//      the left and bouncing off every edge.
struct SyntheticVideoSpec {
  Eigen::Index frames = 300;
  Eigen::Index width = 100;
  Eigen::Index height = 100;
  std::uint64_t seed = 1;

  int patrol_speed = 4;
  int circle_diameter = 9;
  double circle_intensity = 0.75;
  int circle_entry_frame = 25;
  int circle_speed = 2;
  int square_size = 13;
  int square_entry_frame = 50;
  int square_speed_x = 6;
  int square_speed_y = 1;
};

// Top-left pixel of an object's bounding box on one frame.
struct ObjectPlacement {
  bool visible = false;
  int x = 0;
  int y = 0;
};

struct GroundTruth {
  Image background;
  std::vector<Mask> foreground_masks;  // one per frame
  // placements[object][frame], object = 0, 1, 2.
  std::vector<std::vector<ObjectPlacement>> placements;
  std::uint64_t seed = 0;
};

struct SyntheticVideo {
  FrameSequence video;
  GroundTruth truth;
};

SyntheticVideo GenerateSyntheticVideo(const SyntheticVideoSpec& spec = {});

// Top-left corner of the patrolling square after travelling `distance` pixels
// counter-clockwise along the inside border, starting at the top-left corner.
ObjectPlacement PatrolPosition(const SyntheticVideoSpec& spec, long distance);

// Length in pixels of one lap of the patrol path.
long PatrolPerimeter(const SyntheticVideoSpec& spec);

// Mean |sparse| over ground-truth background pixels of the first m - 1
// columns, where column k of `sparse` is frame segment_frames[k].
double MeanBackgroundIntensityError(const RealMatrix& sparse,
                                    const GroundTruth& truth,
                                    std::span<const Eigen::Index> segment_frames);

// Same restricted to one column; used for per-frame metrics.
double FrameBackgroundIntensity(const Eigen::Ref<const RealVector>& sparse_column,
                                const Mask& mask);

// Writes frames/, masks/ (0/255), background.pgm and groundtruth.json.
void WriteSyntheticVideo(const SyntheticVideo& synthetic,
                         const SyntheticVideoSpec& spec,
                         const std::filesystem::path& dir);

// Reads masks/ and background.pgm written by WriteSyntheticVideo.
GroundTruth LoadGroundTruth(const std::filesystem::path& dir);

}  // namespace dmdsep

#endif  // DMDSEP_SYNTHETIC_H_
