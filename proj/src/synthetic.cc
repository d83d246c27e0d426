#include "dmdsep/synthetic.h"

#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "json.hpp"

#include "dmdsep/errors.h"

namespace dmdsep {
namespace fs = std::filesystem;
namespace {

constexpr int kPatrolSize = 7;

double UniformFromBits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Paints one pixel if it is on screen.
void Plot(Image* frame, Mask* mask, int x, int y, double value) {
  if (x < 0 || y < 0 || x >= frame->cols() || y >= frame->rows()) return;
  (*frame)(y, x) = value;
  (*mask)(y, x) = true;
}

void DrawPatrolSquare(Image* frame, Mask* mask, ObjectPlacement at) {
  constexpr int last = kPatrolSize - 1;
  constexpr int mid = kPatrolSize / 2;
  for (int dy = 0; dy < kPatrolSize; ++dy) {
    for (int dx = 0; dx < kPatrolSize; ++dx) {
      const bool corner = (dx == 0 || dx == last) && (dy == 0 || dy == last);
      const bool plus = (dx == mid && dy >= 1 && dy <= last - 1) ||
                        (dy == mid && dx >= 1 && dx <= last - 1);
      Plot(frame, mask, at.x + dx, at.y + dy, (corner || plus) ? 1.0 : 0.0);
    }
  }
}

void DrawDisc(Image* frame, Mask* mask, ObjectPlacement at, int diameter,
              double value) {
  const double radius = diameter / 2.0;
  const double center = (diameter - 1) / 2.0;
  for (int dy = 0; dy < diameter; ++dy) {
    for (int dx = 0; dx < diameter; ++dx) {
      const double ox = dx - center;
      const double oy = dy - center;
      if (ox * ox + oy * oy <= radius * radius) {
        Plot(frame, mask, at.x + dx, at.y + dy, value);
      }
    }
  }
}

void DrawCrossedOutline(Image* frame, Mask* mask, ObjectPlacement at, int size) {
  const int last = size - 1;
  for (int dy = 0; dy < size; ++dy) {
    for (int dx = 0; dx < size; ++dx) {
      const bool border = dx == 0 || dy == 0 || dx == last || dy == last;
      const bool diagonal = dx == dy || dx + dy == last;
      if (border || diagonal) Plot(frame, mask, at.x + dx, at.y + dy, 0.0);
    }
  }
}

// Reflects a coordinate into [0, limit] and flips the velocity on contact.
void Bounce(int* position, int* velocity, int limit) {
  if (*position < 0) {
    *position = -*position;
    *velocity = -*velocity;
  } else if (*position > limit) {
    *position = 2 * limit - *position;
    *velocity = -*velocity;
  }
}

std::vector<ObjectPlacement> DiscTrajectory(const SyntheticVideoSpec& spec) {
  std::vector<ObjectPlacement> path(static_cast<std::size_t>(spec.frames));
  const int w = static_cast<int>(spec.width);
  const int h = static_cast<int>(spec.height);
  const int d = spec.circle_diameter;
  const int wall = h / 5;
  // Appears in the left half, below the wall, heading up-left.
  int x = static_cast<int>(std::lround(0.45 * w)) - d / 2;
  int y = static_cast<int>(std::lround(0.55 * h)) - d / 2;
  int vx = -spec.circle_speed;
  int vy = -spec.circle_speed;
  bool gone = false;
  for (Eigen::Index k = spec.circle_entry_frame; k < spec.frames; ++k) {
    if (k > spec.circle_entry_frame) {
      x += vx;
      y += vy;
      if (vy < 0 && y < wall) {
        y = 2 * wall - y;
        vy = -vy;
      }
    }
    if (x + d <= 0 || x >= w || y >= h || y + d <= 0) gone = true;
    if (gone) break;
    path[static_cast<std::size_t>(k)] = {true, x, y};
  }
  return path;
}

std::vector<ObjectPlacement> OutlineTrajectory(const SyntheticVideoSpec& spec) {
  std::vector<ObjectPlacement> path(static_cast<std::size_t>(spec.frames));
  const int size = spec.square_size;
  const int max_x = static_cast<int>(spec.width) - size;
  const int max_y = static_cast<int>(spec.height) - size;
  int x = max_x;
  int y = static_cast<int>(spec.height / 2) - size / 2;
  int vx = -spec.square_speed_x;
  int vy = spec.square_speed_y;
  for (Eigen::Index k = spec.square_entry_frame; k < spec.frames; ++k) {
    if (k > spec.square_entry_frame) {
      x += vx;
      y += vy;
      Bounce(&x, &vx, max_x);
      Bounce(&y, &vy, max_y);
    }
    path[static_cast<std::size_t>(k)] = {true, x, y};
  }
  return path;
}

nlohmann::json PlacementsToJson(const std::vector<ObjectPlacement>& path) {
  nlohmann::json out = nlohmann::json::array();
  for (const ObjectPlacement& p : path) {
    if (p.visible) {
      out.push_back({p.x, p.y});
    } else {
      out.push_back(nullptr);
    }
  }
  return out;
}

}  // namespace

long PatrolPerimeter(const SyntheticVideoSpec& spec) {
  return 2 * (spec.width - kPatrolSize) + 2 * (spec.height - kPatrolSize);
}

ObjectPlacement PatrolPosition(const SyntheticVideoSpec& spec, long distance) {
  const long span_x = spec.width - kPatrolSize;
  const long span_y = spec.height - kPatrolSize;
  const long perimeter = PatrolPerimeter(spec);
  long s = ((distance % perimeter) + perimeter) % perimeter;
  // Counter-clockwise on screen: down the left edge, right along the bottom,
  // up the right edge, left along the top.
  if (s < span_y) return {true, 0, static_cast<int>(s)};
  s -= span_y;
  if (s < span_x) return {true, static_cast<int>(s), static_cast<int>(span_y)};
  s -= span_x;
  if (s < span_y) {
    return {true, static_cast<int>(span_x), static_cast<int>(span_y - s)};
  }
  s -= span_y;
  return {true, static_cast<int>(span_x - s), 0};
}

SyntheticVideo GenerateSyntheticVideo(const SyntheticVideoSpec& spec) {
  if (spec.frames < 1 || spec.width < spec.square_size ||
      spec.height < spec.square_size) {
    throw InvalidArgument("synthetic video too small for its objects");
  }
  SyntheticVideo out;
  out.truth.seed = spec.seed;

  std::mt19937_64 rng(spec.seed);
  Image background(spec.height, spec.width);
  for (Eigen::Index i = 0; i < background.size(); ++i) {
    background.data()[i] = UniformFromBits(rng());
  }

  std::vector<ObjectPlacement> patrol(static_cast<std::size_t>(spec.frames));
  for (Eigen::Index k = 0; k < spec.frames; ++k) {
    patrol[static_cast<std::size_t>(k)] =
        PatrolPosition(spec, static_cast<long>(spec.patrol_speed) * k);
  }
  out.truth.placements = {patrol, DiscTrajectory(spec), OutlineTrajectory(spec)};

  out.video.width = spec.width;
  out.video.height = spec.height;
  out.video.frames.resize(static_cast<std::size_t>(spec.frames));
  out.truth.foreground_masks.resize(static_cast<std::size_t>(spec.frames));
  const auto& placements = out.truth.placements;

#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < spec.frames; ++k) {
    const auto f = static_cast<std::size_t>(k);
    Image frame = background;
    Mask mask = Mask::Constant(spec.height, spec.width, false);
    DrawPatrolSquare(&frame, &mask, placements[0][f]);
    if (placements[1][f].visible) {
      DrawDisc(&frame, &mask, placements[1][f], spec.circle_diameter,
               spec.circle_intensity);
    }
    if (placements[2][f].visible) {
      DrawCrossedOutline(&frame, &mask, placements[2][f], spec.square_size);
    }
    out.video.frames[f] = std::move(frame);
    out.truth.foreground_masks[f] = std::move(mask);
  }
  out.truth.background = std::move(background);
  return out;
}

double FrameBackgroundIntensity(const Eigen::Ref<const RealVector>& sparse_column,
                                const Mask& mask) {
  if (sparse_column.size() != mask.size()) {
    throw DimensionError("sparse column and mask differ in size");
  }
  double sum = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    if (!mask.data()[i]) {
      sum += std::abs(sparse_column(i));
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double MeanBackgroundIntensityError(const RealMatrix& sparse,
                                    const GroundTruth& truth,
                                    std::span<const Eigen::Index> segment_frames) {
  if (static_cast<Eigen::Index>(segment_frames.size()) != sparse.cols()) {
    throw DimensionError("sparse matrix columns != number of segment frames");
  }
  if (sparse.cols() < 2) {
    throw InsufficientFramesError("error metric needs a segment of >= 2 frames");
  }
  double sum = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index k = 0; k + 1 < sparse.cols(); ++k) {
    const Eigen::Index frame = segment_frames[static_cast<std::size_t>(k)];
    if (frame < 0 ||
        frame >= static_cast<Eigen::Index>(truth.foreground_masks.size())) {
      throw DimensionError("segment frame index outside the ground truth");
    }
    const Mask& mask = truth.foreground_masks[static_cast<std::size_t>(frame)];
    if (mask.size() != sparse.rows()) {
      throw DimensionError("sparse rows != pixels per ground-truth mask");
    }
    for (Eigen::Index i = 0; i < mask.size(); ++i) {
      if (!mask.data()[i]) {
        sum += std::abs(sparse(i, k));
        ++count;
      }
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

void WriteSyntheticVideo(const SyntheticVideo& synthetic,
                         const SyntheticVideoSpec& spec, const fs::path& dir) {
  WritePgmSequence(synthetic.video, dir / "frames");

  FrameSequence masks;
  masks.width = synthetic.video.width;
  masks.height = synthetic.video.height;
  for (const Mask& mask : synthetic.truth.foreground_masks) {
    masks.frames.push_back(mask.cast<double>());
  }
  WritePgmSequence(masks, dir / "masks", 1.0, 0, "mask_");
  WritePgm(synthetic.truth.background, dir / "background.pgm", 65535);

  nlohmann::json meta;
  meta["seed"] = spec.seed;
  meta["rng"] = "mt19937_64, 53-bit mantissa per pixel, row-major";
  meta["frames"] = spec.frames;
  meta["width"] = spec.width;
  meta["height"] = spec.height;
  meta["objects"] = nlohmann::json::array({
      {{"name", "patrol_square"},
       {"size", kPatrolSize},
       {"speed", spec.patrol_speed},
       {"placements", PlacementsToJson(synthetic.truth.placements[0])}},
      {{"name", "disc"},
       {"diameter", spec.circle_diameter},
       {"intensity", spec.circle_intensity},
       {"entry_frame", spec.circle_entry_frame},
       {"placements", PlacementsToJson(synthetic.truth.placements[1])}},
      {{"name", "crossed_outline"},
       {"size", spec.square_size},
       {"entry_frame", spec.square_entry_frame},
       {"velocity", {spec.square_speed_x, spec.square_speed_y}},
       {"placements", PlacementsToJson(synthetic.truth.placements[2])}},
  });
  std::ofstream out(dir / "groundtruth.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / "groundtruth.json").string());
  out << meta.dump(1) << '\n';
}

GroundTruth LoadGroundTruth(const fs::path& dir) {
  GroundTruth truth;
  truth.background = ReadPgm(dir / "background.pgm");
  const FrameSequence masks = LoadPgmSequence(dir / "masks");
  for (const Image& m : masks.frames) {
    truth.foreground_masks.push_back(m.array() > 0.5);
  }
  std::ifstream meta_in(dir / "groundtruth.json");
  if (meta_in) {
    const nlohmann::json meta = nlohmann::json::parse(meta_in, nullptr, false);
    if (!meta.is_discarded() && meta.contains("seed")) {
      truth.seed = meta["seed"].get<std::uint64_t>();
    }
  }
  return truth;
}

}  // namespace dmdsep
