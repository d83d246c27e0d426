#include "dmdsep/bench_harness.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "dmdsep/errors.h"

namespace dmdsep {
namespace fs = std::filesystem;
namespace {

using Clock = std::chrono::steady_clock;

void RunOnce(const FrameMatrix& segment, Method method,
             const SweepOptions& options) {
  switch (method) {
    case Method::kDmd: {
      const SeparationResult r = Separate(segment, options.dmd);
      if (r.sparse.size() == 0) throw Error("empty separation");
      break;
    }
    case Method::kRpca: {
      const PcpSolution s = SolvePcp(segment.values(), options.pcp);
      if (s.sparse.size() == 0) throw Error("empty separation");
      break;
    }
  }
}

}  // namespace

std::string MethodName(Method method) {
  return method == Method::kDmd ? "dmd" : "rpca";
}

Method ParseMethod(const std::string& name) {
  if (name == "dmd") return Method::kDmd;
  if (name == "rpca") return Method::kRpca;
  throw InvalidArgument("unknown method '" + name + "' (expected dmd or rpca)");
}

std::pair<Eigen::Index, Eigen::Index> DimensionsForPixelCount(
    Eigen::Index pixels, Eigen::Index source_width, Eigen::Index source_height) {
  if (pixels < 1 || source_width < 1 || source_height < 1) {
    throw InvalidArgument("pixel count and source size must be positive");
  }
  const double aspect =
      static_cast<double>(source_width) / static_cast<double>(source_height);
  Eigen::Index best_w = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index w = 1; w <= pixels; ++w) {
    if (pixels % w != 0) continue;
    const double gap =
        std::abs(static_cast<double>(w) / static_cast<double>(pixels / w) -
                 aspect) / aspect;
    if (gap < best_gap) {
      best_gap = gap;
      best_w = w;
    }
  }
  if (best_gap > 0.1) {
    throw InvalidArgument("cannot shape " + std::to_string(pixels) +
                          " pixels to the source aspect ratio");
  }
  return {best_w, pixels / best_w};
}

double TimeSeparation(const FrameMatrix& segment, Method method,
                      const SweepOptions& options) {
  if (options.repetitions < 1) {
    throw InvalidArgument("at least one timed repetition is required");
  }
  RunOnce(segment, method, options);  // warm-up
  double total = 0.0;
  for (int r = 0; r < options.repetitions; ++r) {
    const auto start = Clock::now();
    RunOnce(segment, method, options);
    total += std::chrono::duration<double>(Clock::now() - start).count();
  }
  return total / options.repetitions;
}

std::vector<TimingRecord> RunSweep(const FrameSequence& video,
                                   const std::vector<Eigen::Index>& pixel_grid,
                                   const std::vector<Eigen::Index>& segment_grid,
                                   const std::vector<Method>& methods,
                                   const SweepOptions& options) {
  if (pixel_grid.empty() || segment_grid.empty() || methods.empty()) {
    throw InvalidArgument("sweep grids and method list must be nonempty");
  }
  std::vector<TimingRecord> records;
  for (Eigen::Index n : pixel_grid) {
    FrameSequence scaled;
    std::string scale_error;
    try {
      const auto [w, h] = DimensionsForPixelCount(n, video.width, video.height);
      scaled = Downsample(video, w, h);
    } catch (const Error& e) {
      scale_error = e.what();
    }
    for (Eigen::Index m : segment_grid) {
      for (Method method : methods) {
        TimingRecord record;
        record.method = method;
        record.n = n;
        record.m = m;
        record.repetitions = options.repetitions;
        try {
          if (!scale_error.empty()) throw Error(scale_error);
          if (m > scaled.size()) {
            throw InsufficientFramesError(
                "video has " + std::to_string(scaled.size()) +
                " frames, segment needs " + std::to_string(m));
          }
          const FrameMatrix segment = ToFrameMatrix(scaled, {0, m});
          record.seconds = TimeSeparation(segment, method, options);
        } catch (const Error& e) {
          record.ok = false;
          record.error = e.what();
        }
        records.push_back(std::move(record));
      }
    }
  }
  return records;
}

FitResult FitPower(const std::vector<double>& sizes,
                   const std::vector<double>& seconds, int exponent) {
  if (exponent != 1 && exponent != 2) {
    throw InvalidArgument("fit exponent must be 1 or 2");
  }
  if (sizes.size() != seconds.size()) {
    throw DimensionError("fit: sizes and times differ in length");
  }
  if (sizes.size() < 3) {
    throw InvalidArgument("fit needs at least 3 points");
  }
  bool varies = false;
  for (double s : sizes) varies = varies || s != sizes.front();
  if (!varies) throw InvalidArgument("fit is degenerate: all sizes are equal");

  double num = 0.0, den = 0.0, mean_t = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double p = std::pow(sizes[i], exponent);
    num += seconds[i] * p;
    den += p * p;
    mean_t += seconds[i];
  }
  mean_t /= static_cast<double>(seconds.size());
  FitResult fit;
  fit.exponent = exponent;
  fit.c = num / den;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double predicted = fit.c * std::pow(sizes[i], exponent);
    ss_res += (seconds[i] - predicted) * (seconds[i] - predicted);
    ss_tot += (seconds[i] - mean_t) * (seconds[i] - mean_t);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return fit;
}

FitResult FitPower(const std::vector<TimingRecord>& records, Method method,
                   FitVariable variable, int exponent) {
  std::vector<double> sizes, seconds;
  for (const TimingRecord& r : records) {
    if (!r.ok || r.method != method) continue;
    sizes.push_back(static_cast<double>(
        variable == FitVariable::kSegmentLength ? r.m : r.n));
    seconds.push_back(r.seconds);
  }
  return FitPower(sizes, seconds, exponent);
}

std::vector<SpeedupRow> SpeedupRatios(const std::vector<TimingRecord>& records) {
  std::map<std::pair<Eigen::Index, Eigen::Index>, std::pair<double, double>> cells;
  for (const TimingRecord& r : records) {
    if (!r.ok) continue;
    auto& cell = cells.try_emplace({r.n, r.m}, -1.0, -1.0).first->second;
    (r.method == Method::kDmd ? cell.first : cell.second) = r.seconds;
  }
  std::vector<SpeedupRow> rows;
  for (const auto& [key, times] : cells) {
    if (times.first > 0.0 && times.second > 0.0) {
      rows.push_back({key.first, key.second, times.second / times.first});
    }
  }
  return rows;
}

void EmitReport(const std::vector<TimingRecord>& records,
                const std::vector<LabeledFit>& fits, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(10);
  out << kTimingHeader << '\n';
  for (const TimingRecord& r : records) {
    out << MethodName(r.method) << ',' << r.n << ',' << r.m << ',' << r.seconds
        << ',' << r.repetitions << ',' << (r.ok ? "ok" : "failed") << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());

  fs::path summary_path = path;
  summary_path.replace_filename(path.stem().string() + ".summary.csv");
  std::ofstream summary(summary_path, std::ios::trunc);
  if (!summary) throw IoError("cannot write " + summary_path.string());
  summary.precision(10);
  summary << "kind,label,n,m,value,r_squared\n";
  for (const LabeledFit& f : fits) {
    summary << "fit_s" << f.fit.exponent << ',' << f.label << ",,,"
            << f.fit.c << ',' << f.fit.r_squared << '\n';
  }
  for (const SpeedupRow& row : SpeedupRatios(records)) {
    summary << "speedup,rpca/dmd," << row.n << ',' << row.m << ','
            << row.ratio << ",\n";
  }
  if (!summary) throw IoError("write failed: " + summary_path.string());
}

void WriteGnuplotTsv(const std::vector<TimingRecord>& records, Method method,
                     FitVariable variable, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(10);
  out << "# size\tseconds\n";
  for (const TimingRecord& r : records) {
    if (!r.ok || r.method != method) continue;
    out << (variable == FitVariable::kSegmentLength ? r.m : r.n) << '\t'
        << r.seconds << '\n';
  }
}

}  // namespace dmdsep
