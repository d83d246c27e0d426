#include "dmdsep/cli.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmdsep/bench_harness.h"
#include "dmdsep/dmd.h"
#include "dmdsep/errors.h"
#include "dmdsep/rpca.h"
#include "dmdsep/synthetic.h"
#include "dmdsep/video.h"

namespace dmdsep {
namespace fs = std::filesystem;
namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

// Flag validation failure; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct SeparateConfig {
  std::string input;
  std::string out;
  Eigen::Index frames_per_segment = 30;
  Eigen::Index stride = 0;  // 0: same as frames_per_segment
  std::string method = "dmd";
  Eigen::Index rank = 0;  // 0: m - 1
  double omega_threshold = 1e-2;
  double lambda = 0.0;  // 0: 1 / sqrt(max(n, m))
  double brighten = 10.0;
  Eigen::Index skip_frames = 0;
  std::string downsample;
  std::optional<double> threshold;
  int jobs = 1;
  std::string groundtruth;
  bool save_matrices = false;
  int iterations = 1;  // iterate only
};

struct SynthConfig {
  std::string out;
  std::uint64_t seed = 1;
  Eigen::Index frames = 300;
  Eigen::Index width = 100;
  Eigen::Index height = 100;
};

struct BenchConfig {
  std::string input;
  std::string pixels = "720,2880,6480,11520";
  std::string segments = "20,40,80,100";
  std::string methods = "dmd,rpca";
  std::string out;
  int repetitions = 3;
  bool tsv = false;
};

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<Eigen::Index> ParseCountList(const std::string& text,
                                         const std::string& flag) {
  std::vector<Eigen::Index> values;
  for (const std::string& item : SplitList(text)) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 1) {
      throw UsageError(flag + ": '" + item + "' is not a positive integer");
    }
    values.push_back(static_cast<Eigen::Index>(v));
  }
  if (values.empty()) throw UsageError(flag + " must not be empty");
  return values;
}

std::vector<Method> ParseMethodList(const std::string& text) {
  std::vector<Method> methods;
  for (const std::string& item : SplitList(text)) {
    try {
      methods.push_back(ParseMethod(item));
    } catch (const InvalidArgument& e) {
      throw UsageError(std::string("--methods: ") + e.what());
    }
  }
  if (methods.empty()) throw UsageError("--methods must not be empty");
  return methods;
}

std::pair<Eigen::Index, Eigen::Index> ParseDimensions(const std::string& text) {
  const auto x = text.find_first_of("xX");
  try {
    if (x != std::string::npos) {
      std::size_t used_w = 0, used_h = 0;
      const long long w = std::stoll(text.substr(0, x), &used_w);
      const long long h = std::stoll(text.substr(x + 1), &used_h);
      if (used_w == x && used_h == text.size() - x - 1 && w >= 1 && h >= 1) {
        return {w, h};
      }
    }
  } catch (const std::exception&) {
  }
  throw UsageError("--downsample expects WxH, got '" + text + "'");
}

void ValidateSeparate(const SeparateConfig& c, bool iterate) {
  if (c.frames_per_segment < 2) throw UsageError("--frames-per-segment must be >= 2");
  if (c.stride < 0) throw UsageError("--stride must be >= 1");
  if (c.rank < 0) throw UsageError("--rank must be >= 1 (0 selects m-1)");
  if (c.rank >= c.frames_per_segment) {
    throw UsageError("--rank must be at most frames-per-segment - 1");
  }
  if (!(c.omega_threshold >= 0.0)) throw UsageError("--omega-threshold must be >= 0");
  if (!(c.lambda >= 0.0)) throw UsageError("--lambda must be > 0 (0 selects the default)");
  if (!(c.brighten >= 0.0)) throw UsageError("--brighten must be >= 0");
  if (c.skip_frames < 0) throw UsageError("--skip-frames must be >= 0");
  if (c.threshold && !(*c.threshold >= 0.0)) throw UsageError("--threshold must be >= 0");
  if (c.jobs < 1) throw UsageError("--jobs must be >= 1");
  if (c.method != "dmd" && c.method != "rpca" && c.method != "both") {
    throw UsageError("--method must be dmd, rpca or both");
  }
  if (iterate && c.iterations < 1) throw UsageError("--iterations must be >= 1");
  if (!c.downsample.empty()) ParseDimensions(c.downsample);
}

FrameSequence LoadInput(const SeparateConfig& c) {
  FrameSequence video = SkipFrames(LoadPgmSequence(c.input), c.skip_frames);
  if (video.size() < 2) {
    throw InsufficientFramesError("fewer than 2 frames left after --skip-frames");
  }
  if (!c.downsample.empty()) {
    const auto [w, h] = ParseDimensions(c.downsample);
    video = Downsample(video, w, h);
  }
  return video;
}

DmdOptions DmdOptionsFrom(const SeparateConfig& c) {
  DmdOptions options;
  options.max_rank = c.rank;
  options.omega_threshold = c.omega_threshold;
  return options;
}

// Moves sparse entries whose magnitude is below `threshold` into the
// low-rank part.
void ApplyIntensityThreshold(double threshold, RealMatrix* low_rank,
                             RealMatrix* sparse) {
  for (Eigen::Index i = 0; i < sparse->size(); ++i) {
    double& s = sparse->data()[i];
    if (std::abs(s) < threshold) {
      low_rank->data()[i] += s;
      s = 0.0;
    }
  }
}

struct SegmentOutput {
  RealMatrix low_rank;
  RealMatrix sparse;
  double seconds = 0.0;
  std::vector<double> trace;
};

struct Context {
  SeparateConfig config;
  FrameSequence video;
  std::optional<GroundTruth> truth;
  std::vector<SegmentRange> ranges;
  std::vector<Method> methods;
  bool iterate = false;
};

std::vector<Eigen::Index> OriginalFrames(const Context& ctx, SegmentRange r) {
  std::vector<Eigen::Index> frames;
  for (Eigen::Index k = 0; k < r.length; ++k) {
    frames.push_back(ctx.config.skip_frames + r.first + k);
  }
  return frames;
}

SegmentOutput RunSegment(const Context& ctx, SegmentRange range, Method method) {
  const FrameMatrix x = ToFrameMatrix(ctx.video, range);
  SegmentOutput out;
  const auto start = Clock::now();
  if (method == Method::kDmd) {
    SparseErrorMetric metric;
    if (ctx.truth) {
      const std::vector<Eigen::Index> frames = OriginalFrames(ctx, range);
      const GroundTruth& truth = *ctx.truth;
      metric = [frames, &truth](const RealMatrix& sparse) {
        return MeanBackgroundIntensityError(sparse, truth, frames);
      };
    }
    IterativeSeparation result = IterateDmd(
        x, ctx.iterate ? ctx.config.iterations : 1, DmdOptionsFrom(ctx.config),
        metric);
    out.low_rank = std::move(result.result.low_rank);
    out.sparse = std::move(result.result.sparse);
    out.trace = std::move(result.error_trace);
  } else {
    PcpOptions options;
    options.lambda = ctx.config.lambda;
    PcpSolution solution = SolvePcp(x.values(), options);
    out.low_rank = std::move(solution.low_rank);
    out.sparse = std::move(solution.sparse);
  }
  out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (ctx.config.threshold) {
    ApplyIntensityThreshold(*ctx.config.threshold, &out.low_rank, &out.sparse);
  }
  return out;
}

fs::path MethodRoot(const Context& ctx, Method method) {
  const fs::path root(ctx.config.out);
  return ctx.methods.size() > 1 ? root / MethodName(method) : root;
}

void WriteSegment(const Context& ctx, std::size_t segment_index, Method method,
                  const SegmentOutput& result, std::vector<MetricsRow>* metrics,
                  std::vector<std::string>* trace_rows) {
  const SegmentRange range = ctx.ranges[segment_index];
  const fs::path root = MethodRoot(ctx, method);
  const Eigen::Index first = ctx.config.skip_frames + range.first;
  WritePgmSequence(ToFrameSequence(result.low_rank, ctx.video.width, ctx.video.height),
                   root / "background", 1.0, first);
  WritePgmSequence(ToFrameSequence(result.sparse, ctx.video.width, ctx.video.height),
                   root / "foreground", ctx.config.brighten, first);
  if (ctx.config.save_matrices) {
    fs::create_directories(root / "matrices");
    char name[64];
    std::snprintf(name, sizeof(name), "segment_%04zu", segment_index);
    WriteMatrixBinary(result.low_rank, root / "matrices" / (std::string(name) + "_low_rank.dmdv"));
    WriteMatrixBinary(result.sparse, root / "matrices" / (std::string(name) + "_sparse.dmdv"));
  }
  for (Eigen::Index k = 0; k < range.length; ++k) {
    const Eigen::Index frame = first + k;
    double intensity = 0.0;
    if (ctx.truth && frame < static_cast<Eigen::Index>(ctx.truth->foreground_masks.size())) {
      intensity = FrameBackgroundIntensity(
          result.sparse.col(k),
          ctx.truth->foreground_masks[static_cast<std::size_t>(frame)]);
    } else {
      intensity = result.sparse.col(k).cwiseAbs().mean();
    }
    metrics->push_back({static_cast<Eigen::Index>(segment_index), frame,
                        MethodName(method), intensity, result.seconds});
  }
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    std::ostringstream row;
    row.precision(10);
    row << segment_index << ',' << (i + 1) << ',' << result.trace[i];
    trace_rows->push_back(row.str());
  }
}

Json SeparateFlagsJson(const SeparateConfig& c, bool iterate) {
  Json flags = {
      {"input", c.input},
      {"out", c.out},
      {"frames_per_segment", c.frames_per_segment},
      {"stride", c.stride == 0 ? c.frames_per_segment : c.stride},
      {"method", c.method},
      {"rank", c.rank},
      {"omega_threshold", c.omega_threshold},
      {"lambda", c.lambda},
      {"brighten", c.brighten},
      {"skip_frames", c.skip_frames},
      {"downsample", c.downsample},
      {"threshold", c.threshold ? Json(*c.threshold) : Json(nullptr)},
      {"jobs", c.jobs},
      {"groundtruth", c.groundtruth},
      {"save_matrices", c.save_matrices},
  };
  if (iterate) flags["iterations"] = c.iterations;
  return flags;
}

void WriteManifest(const fs::path& dir, const std::string& subcommand,
                   Json flags, Json extra) {
  Json manifest = {{"tool", "dmdsep"},
                   {"version", kVersion},
                   {"subcommand", subcommand},
                   {"flags", std::move(flags)},
                   {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                         std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                         std::to_string(EIGEN_MINOR_VERSION)}};
  for (auto& [key, value] : extra.items()) manifest[key] = value;
  std::ofstream out(dir / "run.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / "run.json").string());
  out << manifest.dump(2) << '\n';
}

int CmdSeparate(const SeparateConfig& config, bool iterate, std::ostream& out) {
  ValidateSeparate(config, iterate);
  Context ctx;
  ctx.config = config;
  ctx.iterate = iterate;
  if (iterate || config.method == "dmd") {
    ctx.methods = {Method::kDmd};
  } else if (config.method == "rpca") {
    ctx.methods = {Method::kRpca};
  } else {
    ctx.methods = {Method::kDmd, Method::kRpca};
  }
  ctx.video = LoadInput(config);
  if (!config.groundtruth.empty()) ctx.truth = LoadGroundTruth(config.groundtruth);
  SegmentPlan plan;
  plan.segment_length = config.frames_per_segment;
  plan.stride = config.stride == 0 ? config.frames_per_segment : config.stride;
  ctx.ranges = PlanSegments(ctx.video.size(), plan);

  const fs::path root(config.out);
  fs::create_directories(root);

  std::vector<MetricsRow> metrics;
  std::vector<std::string> trace_rows;
  // Separate `jobs` segments at a time, then write them in segment order.
  const auto jobs = static_cast<std::size_t>(config.jobs);
  for (std::size_t batch = 0; batch < ctx.ranges.size(); batch += jobs) {
    const std::size_t count = std::min(jobs, ctx.ranges.size() - batch);
    std::vector<std::vector<SegmentOutput>> results(count);
    std::vector<std::string> failures(count);
#pragma omp parallel for schedule(dynamic) num_threads(config.jobs)
    for (std::size_t i = 0; i < count; ++i) {
      try {
        for (Method method : ctx.methods) {
          results[i].push_back(RunSegment(ctx, ctx.ranges[batch + i], method));
        }
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
    for (std::size_t i = 0; i < count; ++i) {
      if (!failures[i].empty()) {
        throw Error("segment " + std::to_string(batch + i) + ": " + failures[i]);
      }
      for (std::size_t j = 0; j < ctx.methods.size(); ++j) {
        WriteSegment(ctx, batch + i, ctx.methods[j], results[i][j], &metrics,
                     &trace_rows);
      }
    }
  }

  WriteMetricsCsv(metrics, root / "metrics.csv");
  if (iterate) {
    std::ofstream trace(root / "error_trace.csv", std::ios::trunc);
    if (!trace) throw IoError("cannot write error_trace.csv");
    trace << "segment,iteration,error\n";
    for (const std::string& row : trace_rows) trace << row << '\n';
  }
  Json segments = Json::array();
  for (const SegmentRange& r : ctx.ranges) {
    segments.push_back({{"first", config.skip_frames + r.first}, {"length", r.length}});
  }
  WriteManifest(root, iterate ? "iterate" : "separate",
                SeparateFlagsJson(config, iterate),
                {{"width", ctx.video.width},
                 {"height", ctx.video.height},
                 {"frames", ctx.video.size()},
                 {"segments", segments}});
  out << "separated " << ctx.video.size() << " frames in " << ctx.ranges.size()
      << " segments (" << ctx.video.width << "x" << ctx.video.height << ") -> "
      << root.string() << '\n';
  return kExitOk;
}

int CmdSynth(const SynthConfig& config, std::ostream& out) {
  if (config.frames < 1 || config.width < 13 || config.height < 13) {
    throw UsageError("--frames >= 1 and --width/--height >= 13 are required");
  }
  SyntheticVideoSpec spec;
  spec.seed = config.seed;
  spec.frames = config.frames;
  spec.width = config.width;
  spec.height = config.height;
  const SyntheticVideo video = GenerateSyntheticVideo(spec);
  const fs::path root(config.out);
  fs::create_directories(root);
  WriteSyntheticVideo(video, spec, root);
  WriteManifest(root, "synth",
                {{"out", config.out},
                 {"seed", config.seed},
                 {"frames", config.frames},
                 {"width", config.width},
                 {"height", config.height}},
                Json::object());
  out << "wrote " << spec.frames << " frames (" << spec.width << "x"
      << spec.height << ", seed " << spec.seed << ") to " << root.string() << '\n';
  return kExitOk;
}

int CmdBench(const BenchConfig& config, std::ostream& out, std::ostream& err) {
  const std::vector<Eigen::Index> pixels = ParseCountList(config.pixels, "--pixels");
  const std::vector<Eigen::Index> segments =
      ParseCountList(config.segments, "--segments");
  const std::vector<Method> methods = ParseMethodList(config.methods);
  if (config.repetitions < 3) throw UsageError("--repetitions must be >= 3");
  for (Eigen::Index m : segments) {
    if (m < 2) throw UsageError("--segments entries must be >= 2");
  }

  const FrameSequence video = LoadPgmSequence(config.input);
  SweepOptions options;
  options.repetitions = config.repetitions;
  const std::vector<TimingRecord> records =
      RunSweep(video, pixels, segments, methods, options);

  std::size_t failed = 0;
  for (const TimingRecord& r : records) {
    if (!r.ok) {
      ++failed;
      err << "cell " << MethodName(r.method) << " n=" << r.n << " m=" << r.m
          << " failed: " << r.error << '\n';
    }
  }

  std::vector<LabeledFit> fits;
  for (Method method : methods) {
    for (Eigen::Index n : pixels) {
      std::vector<TimingRecord> cells;
      for (const TimingRecord& r : records) {
        if (r.n == n) cells.push_back(r);
      }
      try {
        fits.push_back({MethodName(method) + " n=" + std::to_string(n) + " vs m",
                        FitPower(cells, method, FitVariable::kSegmentLength, 2)});
      } catch (const Error&) {
        // Too few distinct segment sizes for a fit.
      }
    }
    for (Eigen::Index m : segments) {
      std::vector<TimingRecord> cells;
      for (const TimingRecord& r : records) {
        if (r.m == m) cells.push_back(r);
      }
      try {
        fits.push_back({MethodName(method) + " m=" + std::to_string(m) + " vs n",
                        FitPower(cells, method, FitVariable::kPixelCount, 1)});
      } catch (const Error&) {
      }
    }
  }

  const fs::path report(config.out);
  if (report.has_parent_path()) fs::create_directories(report.parent_path());
  EmitReport(records, fits, report);
  if (config.tsv) {
    for (Method method : methods) {
      fs::path tsv = report;
      tsv.replace_filename(report.stem().string() + "." + MethodName(method) + ".tsv");
      WriteGnuplotTsv(records, method, FitVariable::kSegmentLength, tsv);
    }
  }
  for (const LabeledFit& f : fits) {
    out << f.label << ": c=" << f.fit.c << " R^2=" << f.fit.r_squared << '\n';
  }
  out << records.size() - failed << "/" << records.size() << " cells timed -> "
      << report.string() << '\n';
  return failed == records.size() ? kExitRuntimeError : kExitOk;
}

void AddSeparateFlags(CLI::App* cmd, SeparateConfig* c, bool iterate) {
  cmd->add_option("--input", c->input, "Directory of frame_%06d.pgm files")
      ->required();
  cmd->add_option("--out", c->out, "Output directory")->required();
  cmd->add_option("--frames-per-segment", c->frames_per_segment,
                  "Frames per segment (m)");
  cmd->add_option("--stride", c->stride, "Frames between segment starts (default m)");
  if (!iterate) {
    cmd->add_option("--method", c->method, "dmd, rpca or both");
    cmd->add_option("--lambda", c->lambda,
                    "RPCA regularization (default 1/sqrt(max(n,m)))");
  }
  cmd->add_option("--rank", c->rank, "DMD truncation rank (default m-1)");
  cmd->add_option("--omega-threshold", c->omega_threshold,
                  "|omega| cutoff for background modes");
  cmd->add_option("--brighten", c->brighten, "Foreground brightening factor");
  cmd->add_option("--skip-frames", c->skip_frames, "Drop this many leading frames");
  cmd->add_option("--downsample", c->downsample, "Resize frames to WxH first");
  cmd->add_option("--threshold", c->threshold,
                  "Move foreground values below T into the background");
  cmd->add_option("--jobs", c->jobs, "Segments processed in parallel");
  cmd->add_option("--groundtruth", c->groundtruth,
                  "Synthetic-video directory with masks/ for error metrics");
  cmd->add_flag("--save-matrices", c->save_matrices,
                "Also write DMDV matrices per segment");
  if (iterate) {
    cmd->add_option("--iterations", c->iterations, "DMD passes over the sparse part");
  }
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Background/foreground separation of video segments with "
               "dynamic mode decomposition"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SeparateConfig separate_config;
  SeparateConfig iterate_config;
  SynthConfig synth_config;
  BenchConfig bench_config;

  CLI::App* separate = app.add_subcommand("separate", "Split a frame sequence into background and foreground");
  AddSeparateFlags(separate, &separate_config, false);
  CLI::App* iterate = app.add_subcommand("iterate", "Apply DMD repeatedly to the foreground");
  AddSeparateFlags(iterate, &iterate_config, true);

  CLI::App* synth = app.add_subcommand("synth", "Generate the synthetic error-analysis video");
  synth->add_option("--out", synth_config.out, "Output directory")->required();
  synth->add_option("--seed", synth_config.seed, "Background RNG seed");
  synth->add_option("--frames", synth_config.frames, "Number of frames");
  synth->add_option("--width", synth_config.width, "Frame width");
  synth->add_option("--height", synth_config.height, "Frame height");

  CLI::App* bench = app.add_subcommand("bench", "Time DMD and RPCA over resolution and segment grids");
  bench->add_option("--input", bench_config.input, "Directory of frames")->required();
  bench->add_option("--pixels", bench_config.pixels, "Comma-separated pixel counts");
  bench->add_option("--segments", bench_config.segments, "Comma-separated segment sizes");
  bench->add_option("--methods", bench_config.methods, "Comma-separated: dmd,rpca");
  bench->add_option("--out", bench_config.out, "CSV report path")->required();
  bench->add_option("--repetitions", bench_config.repetitions, "Timed runs per cell");
  bench->add_flag("--tsv", bench_config.tsv, "Also write gnuplot TSV per method");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (separate->parsed()) return CmdSeparate(separate_config, false, out);
    if (iterate->parsed()) return CmdSeparate(iterate_config, true, out);
    if (synth->parsed()) return CmdSynth(synth_config, out);
    if (bench->parsed()) return CmdBench(bench_config, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitUsage;
}

}  // namespace dmdsep
