#ifndef DMDSEP_RPCA_H_
#define DMDSEP_RPCA_H_

#include <vector>

#include "dmdsep/numerics.h"

namespace dmdsep {

// Principal component pursuit
//
//   min ||L||_* + lambda ||S||_1   subject to   X = L + S
//
// solved with the inexact augmented Lagrange multiplier method.
struct PcpOptions {
  // <= 0 selects DefaultLambda(rows, cols).
  double lambda = 0.0;
  double tolerance = 1e-7;
  int max_iterations = 1000;
  // mu_0 = mu_scale / sigma_1(X); mu_{k+1} = min(rho mu_k, mu_bar_ratio mu_0).
  double mu_scale = 1.25;
  double rho = 1.5;
  double mu_bar_ratio = 1e7;
};

struct PcpSolution {
  RealMatrix low_rank;
  RealMatrix sparse;
  int iterations_used = 0;
  // ||X - L - S||_F / ||X||_F after the last iteration.
  double final_residual = 0.0;
  bool converged = false;
  double lambda = 0.0;
  std::vector<double> residual_history;
};

// 1 / sqrt(max(n, m)).
double DefaultLambda(Eigen::Index n, Eigen::Index m);

// Singular value thresholding: U shrink(Sigma, tau) V^T.
RealMatrix Svt(const RealMatrix& a, double tau);

// Does not throw on non-convergence; check PcpSolution::converged.
PcpSolution SolvePcp(const RealMatrix& x, const PcpOptions& options = {});

}  // namespace dmdsep

#endif  // DMDSEP_RPCA_H_
