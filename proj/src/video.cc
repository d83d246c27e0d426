#include "dmdsep/video.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>
#include <utility>

#include "dmdsep/errors.h"

namespace dmdsep {
namespace fs = std::filesystem;
namespace {

constexpr std::array<char, 4> kMatrixMagic = {'D', 'M', 'D', 'V'};
constexpr std::size_t kMatrixHeaderBytes = 12;  // magic, rows, cols

std::vector<unsigned char> ReadAllBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void WriteAllBytes(const fs::path& path, const std::vector<unsigned char>& b) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(b.data()),
            static_cast<std::streamsize>(b.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

// Reads one unsigned decimal header field of a PNM file, skipping whitespace
// and '#' comments.
long ReadPnmField(const std::vector<unsigned char>& bytes, std::size_t* pos,
                  const fs::path& path) {
  while (*pos < bytes.size()) {
    if (bytes[*pos] == '#') {
      while (*pos < bytes.size() && bytes[*pos] != '\n') ++*pos;
    } else if (std::isspace(bytes[*pos])) {
      ++*pos;
    } else {
      break;
    }
  }
  if (*pos >= bytes.size() || !std::isdigit(bytes[*pos])) {
    throw FormatError("malformed PGM header in " + path.string());
  }
  long value = 0;
  while (*pos < bytes.size() && std::isdigit(bytes[*pos])) {
    value = value * 10 + (bytes[*pos] - '0');
    if (value > (1L << 30)) {
      throw FormatError("PGM header value too large in " + path.string());
    }
    ++*pos;
  }
  return value;
}

void PutU32(std::vector<unsigned char>* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t GetU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutF64(std::vector<unsigned char>* out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out->push_back(static_cast<unsigned char>(bits >> (8 * i)));
  }
}

double GetF64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

Image ReadPgm(const fs::path& path) {
  const std::vector<unsigned char> bytes = ReadAllBytes(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a binary PGM (P5) file: " + path.string());
  }
  std::size_t pos = 2;
  const long width = ReadPnmField(bytes, &pos, path);
  const long height = ReadPnmField(bytes, &pos, path);
  const long maxval = ReadPnmField(bytes, &pos, path);
  if (width < 1 || height < 1) {
    throw FormatError("PGM has zero size: " + path.string());
  }
  if (maxval < 1 || maxval > 65535) {
    throw FormatError("PGM maxval out of range in " + path.string());
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw FormatError("malformed PGM header in " + path.string());
  }
  ++pos;  // single whitespace before the raster

  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - pos < count * sample_bytes) {
    throw FormatError("truncated PGM raster in " + path.string());
  }
  Image frame(height, width);
  const double scale = 1.0 / static_cast<double>(maxval);
  double* data = frame.data();
  for (std::size_t i = 0; i < count; ++i) {
    unsigned value = bytes[pos + i * sample_bytes];
    if (sample_bytes == 2) value = (value << 8) | bytes[pos + i * 2 + 1];
    if (value > static_cast<unsigned>(maxval)) {
      throw FormatError("PGM sample exceeds maxval in " + path.string());
    }
    data[i] = static_cast<double>(value) * scale;
  }
  return frame;
}

void WritePgm(const Image& frame, const fs::path& path, int maxval) {
  if (maxval != 255 && maxval != 65535) {
    throw InvalidArgument("PGM maxval must be 255 or 65535");
  }
  const std::string header = "P5\n" + std::to_string(frame.cols()) + " " +
                             std::to_string(frame.rows()) + "\n" +
                             std::to_string(maxval) + "\n";
  std::vector<unsigned char> bytes(header.begin(), header.end());
  const double* data = frame.data();
  for (Eigen::Index i = 0; i < frame.size(); ++i) {
    const double v = std::clamp(data[i], 0.0, 1.0);
    const auto q = static_cast<unsigned>(std::lround(v * maxval));
    if (maxval > 255) bytes.push_back(static_cast<unsigned char>(q >> 8));
    bytes.push_back(static_cast<unsigned char>(q & 0xff));
  }
  WriteAllBytes(path, bytes);
}

FrameSequence LoadPgmSequence(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError("not a directory: " + dir.string());
  }
  static const std::regex kIndexed(R"((\d+)\.pgm$)");
  std::vector<std::pair<long long, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch match;
    if (std::regex_search(name, match, kIndexed)) {
      files.emplace_back(std::stoll(match[1].str()), entry.path());
    }
  }
  if (files.empty()) {
    throw IoError("no indexed .pgm frames in " + dir.string());
  }
  std::sort(files.begin(), files.end());

  FrameSequence sequence;
  for (const auto& [index, path] : files) {
    Image frame = ReadPgm(path);
    if (sequence.frames.empty()) {
      sequence.width = frame.cols();
      sequence.height = frame.rows();
    } else if (frame.cols() != sequence.width || frame.rows() != sequence.height) {
      throw FormatError("frame size mismatch in " + path.string() + ": " +
                        std::to_string(frame.cols()) + "x" +
                        std::to_string(frame.rows()) + " vs " +
                        std::to_string(sequence.width) + "x" +
                        std::to_string(sequence.height));
    }
    sequence.frames.push_back(std::move(frame));
  }
  return sequence;
}

void WritePgmSequence(const FrameSequence& sequence, const fs::path& dir,
                      double brighten, Eigen::Index first_index,
                      const std::string& prefix) {
  if (!(brighten >= 0.0)) throw InvalidArgument("brighten must be >= 0");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  char name[32];
  for (std::size_t k = 0; k < sequence.frames.size(); ++k) {
    std::snprintf(name, sizeof(name), "%06lld.pgm",
                  static_cast<long long>(first_index) + static_cast<long long>(k));
    const Image scaled = sequence.frames[k] * brighten;
    WritePgm(scaled, dir / (prefix + name));
  }
}

FrameSequence Downsample(const FrameSequence& sequence, Eigen::Index width,
                         Eigen::Index height) {
  FrameSequence out;
  out.width = width;
  out.height = height;
  out.frame_rate = sequence.frame_rate;
  out.frames.reserve(sequence.frames.size());
  for (const Image& frame : sequence.frames) {
    out.frames.push_back(kernels::parallel::BoxDownsample(frame, width, height));
  }
  if (sequence.frames.empty()) {
    // Still validate the request.
    if (width < 1 || height < 1) throw InvalidArgument("downsample: bad size");
    if (width > sequence.width || height > sequence.height) {
      throw UnsupportedError("downsample: upsampling is not supported");
    }
  }
  return out;
}

FrameSequence SkipFrames(const FrameSequence& sequence, Eigen::Index count) {
  if (count < 0) throw InvalidArgument("skip count must be >= 0");
  FrameSequence out;
  out.width = sequence.width;
  out.height = sequence.height;
  out.frame_rate = sequence.frame_rate;
  if (count < sequence.size()) {
    out.frames.assign(sequence.frames.begin() + count, sequence.frames.end());
  }
  return out;
}

RealVector Vectorize(const Image& frame) {
  return Eigen::Map<const RealVector>(frame.data(), frame.size());
}

Image Devectorize(const Eigen::Ref<const RealVector>& column,
                  Eigen::Index width, Eigen::Index height) {
  if (column.size() != width * height) {
    throw DimensionError("devectorize: column length != width * height");
  }
  Image frame(height, width);
  Eigen::Map<RealVector>(frame.data(), frame.size()) = column;
  return frame;
}

std::vector<SegmentRange> PlanSegments(Eigen::Index frame_count,
                                       const SegmentPlan& plan) {
  if (plan.segment_length < 2 || plan.stride < 1 || plan.min_length < 2) {
    throw InvalidArgument("segment plan needs m >= 2, stride >= 1, "
                          "min_length >= 2");
  }
  if (frame_count < 2) {
    throw InsufficientFramesError("need at least 2 frames to segment, got " +
                                  std::to_string(frame_count));
  }
  std::vector<SegmentRange> ranges;
  Eigen::Index start = 0;
  for (; start + plan.segment_length <= frame_count; start += plan.stride) {
    ranges.push_back({start, plan.segment_length});
  }
  const Eigen::Index covered =
      ranges.empty() ? 0 : ranges.back().first + ranges.back().length;
  if (covered < frame_count) {
    const Eigen::Index tail_start = ranges.empty() ? 0 : std::max(start, covered);
    const Eigen::Index tail = frame_count - tail_start;
    if (ranges.empty()) {
      ranges.push_back({0, frame_count});
    } else if (tail >= plan.min_length) {
      ranges.push_back({tail_start, tail});
    } else {
      ranges.back().length = frame_count - ranges.back().first;
    }
  }
  return ranges;
}

FrameMatrix ToFrameMatrix(const FrameSequence& sequence, SegmentRange range) {
  if (range.first < 0 || range.length < 0 ||
      range.first + range.length > sequence.size()) {
    throw DimensionError("segment range outside the sequence");
  }
  RealMatrix values(sequence.pixels(), range.length);
  for (Eigen::Index k = 0; k < range.length; ++k) {
    values.col(k) = Vectorize(sequence.frames[static_cast<std::size_t>(range.first + k)]);
  }
  return FrameMatrix(std::move(values), 1.0);
}

std::vector<FrameMatrix> SegmentFrames(const FrameSequence& sequence,
                                       const SegmentPlan& plan) {
  std::vector<FrameMatrix> segments;
  for (const SegmentRange& range : PlanSegments(sequence.size(), plan)) {
    segments.push_back(ToFrameMatrix(sequence, range));
  }
  return segments;
}

FrameSequence ToFrameSequence(const RealMatrix& columns, Eigen::Index width,
                              Eigen::Index height) {
  FrameSequence out;
  out.width = width;
  out.height = height;
  out.frames.reserve(static_cast<std::size_t>(columns.cols()));
  for (Eigen::Index k = 0; k < columns.cols(); ++k) {
    out.frames.push_back(Devectorize(columns.col(k), width, height));
  }
  return out;
}

void WriteMatrixBinary(const RealMatrix& x, const fs::path& path) {
  if (x.rows() > UINT32_MAX || x.cols() > UINT32_MAX) {
    throw DimensionError("matrix too large for the DMDV format");
  }
  std::vector<unsigned char> bytes(kMatrixMagic.begin(), kMatrixMagic.end());
  bytes.reserve(kMatrixHeaderBytes + 8 * static_cast<std::size_t>(x.size()));
  PutU32(&bytes, static_cast<std::uint32_t>(x.rows()));
  PutU32(&bytes, static_cast<std::uint32_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.size(); ++i) PutF64(&bytes, x.data()[i]);
  WriteAllBytes(path, bytes);
}

RealMatrix ReadMatrixBinary(const fs::path& path) {
  const std::vector<unsigned char> bytes = ReadAllBytes(path);
  if (bytes.size() < kMatrixHeaderBytes ||
      !std::equal(kMatrixMagic.begin(), kMatrixMagic.end(), bytes.begin())) {
    throw FormatError("bad DMDV header in " + path.string());
  }
  const std::uint32_t rows = GetU32(bytes.data() + 4);
  const std::uint32_t cols = GetU32(bytes.data() + 8);
  const std::uint64_t count = static_cast<std::uint64_t>(rows) * cols;
  if (bytes.size() != kMatrixHeaderBytes + 8 * count) {
    throw FormatError("DMDV payload size mismatch in " + path.string());
  }
  RealMatrix x(rows, cols);
  for (std::uint64_t i = 0; i < count; ++i) {
    x.data()[i] = GetF64(bytes.data() + kMatrixHeaderBytes + 8 * i);
  }
  return x;
}

void WriteMetricsCsv(const std::vector<MetricsRow>& rows, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << kMetricsHeader << '\n';
  out.precision(10);
  for (const MetricsRow& row : rows) {
    out << row.segment << ',' << row.frame << ',' << row.method << ','
        << row.mean_bg_intensity << ',' << row.wall_seconds << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace dmdsep
