#include "dmdsep/dmd.h"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>

#include "dmdsep/errors.h"

namespace dmdsep {
namespace {

std::vector<double> SampleTimes(Eigen::Index frames, double dt) {
  std::vector<double> times(static_cast<std::size_t>(frames));
  for (Eigen::Index k = 0; k < frames; ++k) {
    times[static_cast<std::size_t>(k)] = static_cast<double>(k) * dt;
  }
  return times;
}

Complex FrequencyOf(Complex mu, double dt) {
  if (std::abs(mu) < DBL_MIN) {
    return {-std::numeric_limits<double>::infinity(), 0.0};
  }
  return std::log(mu) / dt;
}

}  // namespace

FrameMatrix::FrameMatrix(RealMatrix values, double dt)
    : values_(std::move(values)), dt_(dt) {
  if (values_.cols() < 2) {
    throw InsufficientFramesError("frame matrix needs at least 2 frames, got " +
                                  std::to_string(values_.cols()));
  }
  if (values_.rows() < 1) {
    throw DimensionError("frame matrix has no pixels");
  }
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
    throw InvalidArgument("frame spacing dt must be positive");
  }
  if (!values_.allFinite() || values_.minCoeff() < 0.0 ||
      values_.maxCoeff() > 1.0) {
    throw InvalidArgument("frame intensities must lie in [0, 1]");
  }
}

bool DmdDecomposition::IsDecayed(Eigen::Index j) const {
  return std::isinf(frequencies(j).real()) && frequencies(j).real() < 0.0;
}

DmdDecomposition DmdDecompose(const FrameMatrix& x, Eigen::Index max_rank,
                              double rank_tolerance) {
  const Eigen::Index m = x.frames();
  if (m < 2) {
    throw InsufficientFramesError("dmd needs at least 2 frames");
  }
  if (max_rank < 1 || max_rank > m - 1) {
    throw InvalidArgument("dmd: max_rank must lie in [1, m-1] = [1, " +
                          std::to_string(m - 1) + "], got " +
                          std::to_string(max_rank));
  }
  const auto past = x.values().leftCols(m - 1);
  const auto future = x.values().rightCols(m - 1);
  if (past.cwiseAbs().maxCoeff() == 0.0) {
    throw DegenerateDataError("dmd: the first m-1 frames are all zero");
  }

  const ThinSvd svd = ThinSvdDecompose(past, rank_tolerance, max_rank);

  // S~ = U^T X2 V Sigma^-1, the projection of the propagator onto the POD basis.
  const RealMatrix projected_future = svd.u.transpose() * future;
  const RealMatrix reduced = (projected_future * svd.v) *
                             svd.sigma.cwiseInverse().asDiagonal();
  const EigenDecomposition eig = EigDense(reduced);

  DmdDecomposition d;
  d.dt = x.dt();
  d.eigenvalues = eig.eigenvalues;
  // Eigenvalues at rounding level relative to the spectral radius are exact
  // zeros of the reduced propagator (nilpotent directions).
  const double radius = d.eigenvalues.cwiseAbs().maxCoeff();
  for (Complex& mu : d.eigenvalues) {
    if (std::abs(mu) <= 64.0 * std::numeric_limits<double>::epsilon() * radius) {
      mu = 0.0;
    }
  }
  // Phi = U W as two real products; U is real.
  d.modes.resize(svd.u.rows(), eig.eigenvectors.cols());
  d.modes.real() = svd.u * eig.eigenvectors.real();
  d.modes.imag() = svd.u * eig.eigenvectors.imag();

  // Phi = U W with orthonormal U, so pinv(Phi) x1 = pinv(W) (U^T x1).
  const ComplexVector projected_first =
      (svd.u.transpose() * x.values().col(0)).cast<Complex>();
  d.amplitudes = LeastSquares(eig.eigenvectors, projected_first);

  d.frequencies.resize(d.eigenvalues.size());
  for (Eigen::Index j = 0; j < d.eigenvalues.size(); ++j) {
    d.frequencies(j) = FrequencyOf(d.eigenvalues(j), d.dt);
  }
  return d;
}

ComplexMatrix Reconstruct(const DmdDecomposition& d,
                          std::span<const double> times) {
  for (double t : times) {
    if (!std::isfinite(t)) throw InvalidArgument("reconstruct: non-finite time");
  }
  return kernels::parallel::ReconstructModes(d.modes, d.amplitudes,
                                             d.frequencies, times);
}

ComplexMatrix Reconstruct(const DmdDecomposition& d,
                          std::span<const double> times,
                          std::span<const Eigen::Index> mode_indices) {
  for (double t : times) {
    if (!std::isfinite(t)) throw InvalidArgument("reconstruct: non-finite time");
  }
  const auto count = static_cast<Eigen::Index>(mode_indices.size());
  ComplexMatrix modes(d.modes.rows(), count);
  ComplexVector amplitudes(count), frequencies(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const Eigen::Index j = mode_indices[static_cast<std::size_t>(k)];
    if (j < 0 || j >= d.rank()) {
      throw DimensionError("reconstruct: mode index out of range");
    }
    modes.col(k) = d.modes.col(j);
    amplitudes(k) = d.amplitudes(j);
    frequencies(k) = d.frequencies(j);
  }
  return kernels::parallel::ReconstructModes(modes, amplitudes, frequencies,
                                             times);
}

std::vector<Eigen::Index> SelectBackgroundModes(
    std::span<const Complex> frequencies, double omega_threshold) {
  if (!(omega_threshold >= 0.0)) {
    throw InvalidArgument("omega threshold must be nonnegative");
  }
  std::vector<Eigen::Index> selected;
  Eigen::Index best = -1;
  double best_magnitude = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    const double magnitude = std::abs(frequencies[j]);
    if (!std::isfinite(magnitude)) continue;
    if (magnitude <= omega_threshold) {
      selected.push_back(static_cast<Eigen::Index>(j));
    }
    if (magnitude < best_magnitude) {
      best_magnitude = magnitude;
      best = static_cast<Eigen::Index>(j);
    }
  }
  if (selected.empty() && best >= 0) selected.push_back(best);
  return selected;
}

std::vector<Eigen::Index> SelectBackgroundModes(const DmdDecomposition& d,
                                                double omega_threshold) {
  return SelectBackgroundModes(
      std::span<const Complex>(d.frequencies.data(),
                               static_cast<std::size_t>(d.frequencies.size())),
      omega_threshold);
}

SeparationResult SeparateWithLowRank(const FrameMatrix& x,
                                     const RealMatrix& lowrank_modulus) {
  SeparationResult out;
  out.redistribution = kernels::parallel::RedistributeResidual(
      x.values(), lowrank_modulus, &out.low_rank, &out.sparse);
  return out;
}

SeparationResult Separate(const FrameMatrix& x, const DmdOptions& options) {
  const Eigen::Index rank =
      options.max_rank == 0 ? x.frames() - 1
                            : std::min(options.max_rank, x.frames() - 1);
  const DmdDecomposition d = DmdDecompose(x, rank, options.rank_tolerance);
  std::vector<Eigen::Index> background =
      SelectBackgroundModes(d, options.omega_threshold);

  const std::vector<double> times = SampleTimes(x.frames(), x.dt());
  RealMatrix modulus;
  if (background.empty()) {
    // Every mode fully decayed: there is no persistent background.
    modulus = RealMatrix::Zero(x.pixels(), x.frames());
  } else {
    modulus = Reconstruct(d, times, background).cwiseAbs();
  }
  SeparationResult out = SeparateWithLowRank(x, modulus);
  out.background_modes = std::move(background);
  return out;
}

double MeanSparseIntensity(const RealMatrix& sparse) {
  if (sparse.size() == 0) return 0.0;
  return sparse.cwiseAbs().mean();
}

IterativeSeparation IterateDmd(const FrameMatrix& x, int iterations,
                               const DmdOptions& options,
                               const SparseErrorMetric& metric) {
  if (iterations < 1) {
    throw InvalidArgument("iterate: at least one iteration is required");
  }
  const auto score = [&](const RealMatrix& sparse) {
    return metric ? metric(sparse) : MeanSparseIntensity(sparse);
  };

  IterativeSeparation out;
  out.result = Separate(x, options);
  out.error_trace.push_back(score(out.result.sparse));
  for (int i = 1; i < iterations; ++i) {
    const RealMatrix& previous = out.result.sparse;
    if (previous.leftCols(previous.cols() - 1).cwiseAbs().maxCoeff() == 0.0) {
      // Nothing left to separate.
      out.error_trace.push_back(out.error_trace.back());
      continue;
    }
    SeparationResult step = Separate(FrameMatrix(previous, x.dt()), options);
    out.result.low_rank += step.low_rank;
    out.result.sparse = std::move(step.sparse);
    out.result.redistribution.clamped_entries +=
        step.redistribution.clamped_entries;
    out.result.redistribution.clamped_mass += step.redistribution.clamped_mass;
    out.error_trace.push_back(score(out.result.sparse));
  }
  return out;
}

}  // namespace dmdsep
