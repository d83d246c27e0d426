#include "dmdsep/rpca.h"

#include <algorithm>
#include <cmath>

#include "dmdsep/errors.h"
#include "dmdsep/kernels.h"

namespace dmdsep {

double DefaultLambda(Eigen::Index n, Eigen::Index m) {
  if (n < 1 || m < 1) throw InvalidArgument("default_lambda: n, m >= 1");
  return 1.0 / std::sqrt(static_cast<double>(std::max(n, m)));
}

RealMatrix Svt(const RealMatrix& a, double tau) {
  if (!(tau >= 0.0)) throw InvalidArgument("svt: tau must be nonnegative");
  const ThinSvd svd = ThinSvdDecompose(a, 0.0);
  Eigen::Index keep = 0;
  while (keep < svd.rank() && svd.sigma(keep) > tau) ++keep;
  if (keep == 0) return RealMatrix::Zero(a.rows(), a.cols());
  const RealVector shrunk = svd.sigma.head(keep).array() - tau;
  return svd.u.leftCols(keep) * shrunk.asDiagonal() *
         svd.v.leftCols(keep).transpose();
}

PcpSolution SolvePcp(const RealMatrix& x, const PcpOptions& options) {
  if (x.size() == 0) throw DimensionError("solve_pcp: empty matrix");
  if (!x.allFinite()) throw InvalidArgument("solve_pcp: non-finite entry");
  if (!(options.tolerance > 0.0) || options.max_iterations < 1) {
    throw InvalidArgument("solve_pcp: tolerance > 0 and max_iterations >= 1");
  }

  PcpSolution out;
  out.lambda = options.lambda > 0.0 ? options.lambda
                                    : DefaultLambda(x.rows(), x.cols());
  const double lambda = out.lambda;

  const double x_norm = x.norm();
  if (x_norm == 0.0) {
    out.low_rank = RealMatrix::Zero(x.rows(), x.cols());
    out.sparse = RealMatrix::Zero(x.rows(), x.cols());
    out.iterations_used = 1;
    out.converged = true;
    out.residual_history.push_back(0.0);
    return out;
  }

  const double norm_two = ThinSvdDecompose(x, 0.0, 1).sigma(0);
  const double norm_inf = x.cwiseAbs().maxCoeff() / lambda;
  RealMatrix dual = x / std::max(norm_two, norm_inf);
  double mu = options.mu_scale / norm_two;
  const double mu_bar = mu * options.mu_bar_ratio;

  RealMatrix low_rank = RealMatrix::Zero(x.rows(), x.cols());
  RealMatrix sparse = RealMatrix::Zero(x.rows(), x.cols());
  RealMatrix residual(x.rows(), x.cols());

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    low_rank = Svt(x - sparse + dual / mu, 1.0 / mu);
    sparse = x - low_rank + dual / mu;
    kernels::parallel::ShrinkInPlace(&sparse, lambda / mu);

    residual = x - low_rank - sparse;
    dual += mu * residual;
    mu = std::min(mu * options.rho, mu_bar);

    const double relative = residual.norm() / x_norm;
    out.residual_history.push_back(relative);
    out.iterations_used = iter;
    out.final_residual = relative;
    if (relative <= options.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.low_rank = std::move(low_rank);
  out.sparse = std::move(sparse);
  return out;
}

}  // namespace dmdsep
