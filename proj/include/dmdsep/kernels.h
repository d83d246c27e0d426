#ifndef DMDSEP_KERNELS_H_
#define DMDSEP_KERNELS_H_

// Data-parallel inner loops of the separation pipeline. Each kernel has a
// straightforward serial version, kept as the reference the tests compare
// against, and an OpenMP version that the library actually calls.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dmdsep/numerics.h"

namespace dmdsep {

// Row-major intensity grid: rows = image height, cols = image width.
using Image =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct RedistributionStats {
  // Entries of the low-rank part that came out negative and were clamped.
  std::size_t clamped_entries = 0;
  // Sum of the clamped magnitudes (moved into the sparse part).
  double clamped_mass = 0.0;
};

// One source sample contributing to an output sample of a box filter.
struct BoxTap {
  Eigen::Index source;
  double weight;
};

// Area-average taps along one axis when shrinking `source_len` samples to
// `target_len`. Weights of each output sample sum to 1.
std::vector<std::vector<BoxTap>> BoxFilterTaps(Eigen::Index source_len,
                                               Eigen::Index target_len);

// e^{omega t}, with a fully decayed mode (real part -inf) equal to 1 at t = 0
// and 0 afterwards.
Complex ModeGrowth(Complex omega, double t);

namespace kernels {
namespace serial {

// result(:, k) = sum_j modes(:, j) * amplitudes(j) * e^{omegas(j) * times[k]}
ComplexMatrix ReconstructModes(const ComplexMatrix& modes,
                               const ComplexVector& amplitudes,
                               const ComplexVector& omegas,
                               std::span<const double> times);

// Splits x into nonnegative low-rank and sparse parts given the modulus of the
// raw low-rank reconstruction:
//   S = x - |L|;  R = min(S, 0);  L <- R + |L|;  S <- S - R
// followed by clamping L at zero (clamped amount moved into S).
RedistributionStats RedistributeResidual(const RealMatrix& x,
                                         const RealMatrix& lowrank_modulus,
                                         RealMatrix* low_rank,
                                         RealMatrix* sparse);

// Elementwise soft threshold sign(a) * max(|a| - tau, 0), in place.
void ShrinkInPlace(RealMatrix* a, double tau);

// Area-average downsampling of one frame.
Image BoxDownsample(const Image& frame, Eigen::Index target_width,
                    Eigen::Index target_height);

}  // namespace serial

namespace parallel {

ComplexMatrix ReconstructModes(const ComplexMatrix& modes,
                               const ComplexVector& amplitudes,
                               const ComplexVector& omegas,
                               std::span<const double> times);

RedistributionStats RedistributeResidual(const RealMatrix& x,
                                         const RealMatrix& lowrank_modulus,
                                         RealMatrix* low_rank,
                                         RealMatrix* sparse);

void ShrinkInPlace(RealMatrix* a, double tau);

Image BoxDownsample(const Image& frame, Eigen::Index target_width,
                    Eigen::Index target_height);

}  // namespace parallel
}  // namespace kernels

// Scalar soft threshold.
inline double Shrink(double x, double tau) {
  const double magnitude = (x < 0.0 ? -x : x) - tau;
  if (magnitude <= 0.0) return 0.0;
  return x < 0.0 ? -magnitude : magnitude;
}

}  // namespace dmdsep

#endif  // DMDSEP_KERNELS_H_
