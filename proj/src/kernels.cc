#include "dmdsep/kernels.h"

#include <algorithm>
#include <cmath>

#include "dmdsep/errors.h"

namespace dmdsep {
namespace {

void CheckReconstructInputs(const ComplexMatrix& modes,
                            const ComplexVector& amplitudes,
                            const ComplexVector& omegas) {
  if (modes.cols() != amplitudes.size() || modes.cols() != omegas.size()) {
    throw DimensionError("reconstruct: modes, amplitudes and frequencies "
                         "disagree in length");
  }
}

// temporal(j, k) = amplitudes(j) * e^{omegas(j) * times[k]}
ComplexMatrix TemporalDynamics(const ComplexVector& amplitudes,
                               const ComplexVector& omegas,
                               std::span<const double> times) {
  const Eigen::Index rank = amplitudes.size();
  const auto count = static_cast<Eigen::Index>(times.size());
  ComplexMatrix temporal(rank, count);
  for (Eigen::Index k = 0; k < count; ++k) {
    for (Eigen::Index j = 0; j < rank; ++j) {
      temporal(j, k) = amplitudes(j) * ModeGrowth(omegas(j), times[k]);
    }
  }
  return temporal;
}

void CheckRedistributeInputs(const RealMatrix& x, const RealMatrix& modulus) {
  if (x.rows() != modulus.rows() || x.cols() != modulus.cols()) {
    throw DimensionError("redistribute: data and low-rank shapes differ");
  }
}

// Per-entry redistribution. Where the raw sparse value x - a is negative the
// residual R = x - a is folded back, giving L = R + a = x and S = 0; x is
// stored directly so rounding cannot push L below x.
inline void RedistributeEntry(double x, double a, double* l, double* s,
                              RedistributionStats* stats) {
  double sparse = x - a;
  double low = a;
  if (sparse < 0.0) {
    low = x;
    sparse = 0.0;
  }
  if (low < 0.0) {
    ++stats->clamped_entries;
    stats->clamped_mass += -low;
    sparse += low;
    low = 0.0;
  }
  *l = low;
  *s = sparse;
}

Image AllocateDownsample(const Image& frame, Eigen::Index target_width,
                         Eigen::Index target_height) {
  if (target_width < 1 || target_height < 1) {
    throw InvalidArgument("downsample: target dimensions must be positive");
  }
  if (target_width > frame.cols() || target_height > frame.rows()) {
    throw UnsupportedError("downsample: upsampling is not supported");
  }
  return Image(target_height, target_width);
}

double DownsamplePixel(const Image& frame, const std::vector<BoxTap>& row_taps,
                       const std::vector<BoxTap>& col_taps) {
  double sum = 0.0;
  for (const BoxTap& ry : row_taps) {
    double row_sum = 0.0;
    for (const BoxTap& cx : col_taps) {
      row_sum += cx.weight * frame(ry.source, cx.source);
    }
    sum += ry.weight * row_sum;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

std::vector<std::vector<BoxTap>> BoxFilterTaps(Eigen::Index source_len,
                                               Eigen::Index target_len) {
  std::vector<std::vector<BoxTap>> taps(static_cast<std::size_t>(target_len));
  // Work in units where one output sample spans `source_len` and one source
  // sample spans `target_len`, so all boundaries are integers.
  for (Eigen::Index o = 0; o < target_len; ++o) {
    const Eigen::Index lo = o * source_len;
    const Eigen::Index hi = lo + source_len;
    for (Eigen::Index s = lo / target_len; s * target_len < hi; ++s) {
      const Eigen::Index s_lo = std::max(lo, s * target_len);
      const Eigen::Index s_hi = std::min(hi, (s + 1) * target_len);
      if (s_hi > s_lo) {
        taps[static_cast<std::size_t>(o)].push_back(
            {s, static_cast<double>(s_hi - s_lo) /
                    static_cast<double>(source_len)});
      }
    }
  }
  return taps;
}

Complex ModeGrowth(Complex omega, double t) {
  if (std::isinf(omega.real()) && omega.real() < 0.0) {
    return t == 0.0 ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
  }
  return std::exp(omega * t);
}

namespace kernels {
namespace serial {

ComplexMatrix ReconstructModes(const ComplexMatrix& modes,
                               const ComplexVector& amplitudes,
                               const ComplexVector& omegas,
                               std::span<const double> times) {
  CheckReconstructInputs(modes, amplitudes, omegas);
  const ComplexMatrix temporal = TemporalDynamics(amplitudes, omegas, times);
  ComplexMatrix out = ComplexMatrix::Zero(modes.rows(), temporal.cols());
  for (Eigen::Index k = 0; k < temporal.cols(); ++k) {
    for (Eigen::Index j = 0; j < modes.cols(); ++j) {
      for (Eigen::Index i = 0; i < modes.rows(); ++i) {
        out(i, k) += modes(i, j) * temporal(j, k);
      }
    }
  }
  return out;
}

RedistributionStats RedistributeResidual(const RealMatrix& x,
                                         const RealMatrix& lowrank_modulus,
                                         RealMatrix* low_rank,
                                         RealMatrix* sparse) {
  CheckRedistributeInputs(x, lowrank_modulus);
  low_rank->resize(x.rows(), x.cols());
  sparse->resize(x.rows(), x.cols());
  RedistributionStats stats;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      RedistributeEntry(x(i, k), lowrank_modulus(i, k), &(*low_rank)(i, k),
                        &(*sparse)(i, k), &stats);
    }
  }
  return stats;
}

void ShrinkInPlace(RealMatrix* a, double tau) {
  for (Eigen::Index k = 0; k < a->cols(); ++k) {
    for (Eigen::Index i = 0; i < a->rows(); ++i) {
      (*a)(i, k) = Shrink((*a)(i, k), tau);
    }
  }
}

Image BoxDownsample(const Image& frame, Eigen::Index target_width,
                    Eigen::Index target_height) {
  Image out = AllocateDownsample(frame, target_width, target_height);
  const auto row_taps = BoxFilterTaps(frame.rows(), target_height);
  const auto col_taps = BoxFilterTaps(frame.cols(), target_width);
  for (Eigen::Index y = 0; y < target_height; ++y) {
    for (Eigen::Index x = 0; x < target_width; ++x) {
      out(y, x) = DownsamplePixel(frame, row_taps[static_cast<std::size_t>(y)],
                                  col_taps[static_cast<std::size_t>(x)]);
    }
  }
  return out;
}

}  // namespace serial

namespace parallel {

ComplexMatrix ReconstructModes(const ComplexMatrix& modes,
                               const ComplexVector& amplitudes,
                               const ComplexVector& omegas,
                               std::span<const double> times) {
  CheckReconstructInputs(modes, amplitudes, omegas);
  const ComplexMatrix temporal = TemporalDynamics(amplitudes, omegas, times);
  ComplexMatrix out(modes.rows(), temporal.cols());
  constexpr Eigen::Index kBlock = 256;
  const Eigen::Index rows = modes.rows();
  const Eigen::Index blocks = (rows + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index start = b * kBlock;
    const Eigen::Index len = std::min(kBlock, rows - start);
    out.middleRows(start, len).noalias() =
        modes.middleRows(start, len) * temporal;
  }
  return out;
}

RedistributionStats RedistributeResidual(const RealMatrix& x,
                                         const RealMatrix& lowrank_modulus,
                                         RealMatrix* low_rank,
                                         RealMatrix* sparse) {
  CheckRedistributeInputs(x, lowrank_modulus);
  low_rank->resize(x.rows(), x.cols());
  sparse->resize(x.rows(), x.cols());
  std::size_t clamped_entries = 0;
  double clamped_mass = 0.0;
  const Eigen::Index cols = x.cols();
#pragma omp parallel for schedule(static) \
    reduction(+ : clamped_entries, clamped_mass)
  for (Eigen::Index k = 0; k < cols; ++k) {
    RedistributionStats local;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      RedistributeEntry(x(i, k), lowrank_modulus(i, k), &(*low_rank)(i, k),
                        &(*sparse)(i, k), &local);
    }
    clamped_entries += local.clamped_entries;
    clamped_mass += local.clamped_mass;
  }
  return {clamped_entries, clamped_mass};
}

void ShrinkInPlace(RealMatrix* a, double tau) {
  double* data = a->data();
  const Eigen::Index size = a->size();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < size; ++i) {
    data[i] = Shrink(data[i], tau);
  }
}

Image BoxDownsample(const Image& frame, Eigen::Index target_width,
                    Eigen::Index target_height) {
  Image out = AllocateDownsample(frame, target_width, target_height);
  const auto row_taps = BoxFilterTaps(frame.rows(), target_height);
  const auto col_taps = BoxFilterTaps(frame.cols(), target_width);
#pragma omp parallel for schedule(static)
  for (Eigen::Index y = 0; y < target_height; ++y) {
    for (Eigen::Index x = 0; x < target_width; ++x) {
      out(y, x) = DownsamplePixel(frame, row_taps[static_cast<std::size_t>(y)],
                                  col_taps[static_cast<std::size_t>(x)]);
    }
  }
  return out;
}

}  // namespace parallel
}  // namespace kernels
}  // namespace dmdsep
