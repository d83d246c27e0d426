#ifndef DMDSEP_DMD_H_
#define DMDSEP_DMD_H_

#include <functional>
#include <span>
#include <vector>

#include "dmdsep/kernels.h"
#include "dmdsep/numerics.h"

namespace dmdsep {

// A segment of vectorized video frames: one frame per column, n pixels per
// frame, intensities in [0, 1].
class FrameMatrix {
 public:
  // Throws InsufficientFramesError when there are fewer than two columns and
  // InvalidArgument when an entry falls outside [0, 1] or dt <= 0.
  explicit FrameMatrix(RealMatrix values, double dt = 1.0);

  const RealMatrix& values() const { return values_; }
  Eigen::Index pixels() const { return values_.rows(); }
  Eigen::Index frames() const { return values_.cols(); }
  double dt() const { return dt_; }

 private:
  RealMatrix values_;
  double dt_;
};

struct DmdOptions {
  // Cap on the SVD truncation rank; 0 means m - 1 (no reduction).
  Eigen::Index max_rank = 0;
  // Singular values with sigma_j <= rank_tolerance * sigma_1 are dropped.
  double rank_tolerance = 1e-10;
  // Modes with |omega| <= omega_threshold form the background.
  double omega_threshold = 1e-2;
};

struct DmdDecomposition {
  ComplexMatrix modes;        // n x rank, Phi = U W
  ComplexVector eigenvalues;  // mu_j
  ComplexVector frequencies;  // omega_j = ln(mu_j) / dt, principal branch
  ComplexVector amplitudes;   // b, least-squares fit of Phi b = x_1
  double dt = 1.0;

  Eigen::Index rank() const { return eigenvalues.size(); }
  // mu_j == 0; omega_j carries a -inf real part.
  bool IsDecayed(Eigen::Index j) const;
};

struct SeparationResult {
  RealMatrix low_rank;
  RealMatrix sparse;
  std::vector<Eigen::Index> background_modes;
  RedistributionStats redistribution;
};

DmdDecomposition DmdDecompose(const FrameMatrix& x, Eigen::Index max_rank,
                              double rank_tolerance = 1e-10);

// Evaluates sum_j b_j phi_j e^{omega_j t} at each time, one column per time.
ComplexMatrix Reconstruct(const DmdDecomposition& d,
                          std::span<const double> times);

// Same, restricted to the listed modes.
ComplexMatrix Reconstruct(const DmdDecomposition& d,
                          std::span<const double> times,
                          std::span<const Eigen::Index> mode_indices);

// Indices j with |omega_j| <= threshold, or the single argmin |omega_j| (lowest
// index on ties) when none qualifies. Fully decayed modes never qualify.
std::vector<Eigen::Index> SelectBackgroundModes(const DmdDecomposition& d,
                                                double omega_threshold);
std::vector<Eigen::Index> SelectBackgroundModes(
    std::span<const Complex> frequencies, double omega_threshold);

// Background/foreground split of one segment. The low-rank part is the
// modulus of the background-mode reconstruction with negative sparse residues
// folded back into it, so L + S = X and both are nonnegative.
SeparationResult Separate(const FrameMatrix& x, const DmdOptions& options = {});

// Separation given an already computed |L_raw|; exposed for callers that
// build the background some other way.
SeparationResult SeparateWithLowRank(const FrameMatrix& x,
                                     const RealMatrix& lowrank_modulus);

// Scores a sparse component; lower is better.
using SparseErrorMetric = std::function<double(const RealMatrix& sparse)>;

struct IterativeSeparation {
  SeparationResult result;
  std::vector<double> error_trace;  // one entry per iteration
};

// Repeatedly re-separates the previous sparse component, accumulating every
// extracted low-rank part into the final background. Without a metric the
// mean sparse intensity is recorded.
IterativeSeparation IterateDmd(const FrameMatrix& x, int iterations,
                               const DmdOptions& options = {},
                               const SparseErrorMetric& metric = {});

// Mean of |sparse| over all entries.
double MeanSparseIntensity(const RealMatrix& sparse);

}  // namespace dmdsep

#endif  // DMDSEP_DMD_H_
