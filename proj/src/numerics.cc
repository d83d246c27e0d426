#include "dmdsep/numerics.h"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "dmdsep/errors.h"

namespace dmdsep {
namespace {

constexpr double kPseudoInverseTolerance = 1e-12;

// SVD of a matrix with rows >= cols. Reduces to a cols x cols problem with a
// Householder QR when the matrix is tall.
void TallSvd(const RealMatrix& a, RealMatrix* u, RealVector* sigma,
             RealMatrix* v) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  if (rows == cols) {
    Eigen::BDCSVD<RealMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    *u = svd.matrixU();
    *sigma = svd.singularValues();
    *v = svd.matrixV();
    return;
  }
  Eigen::HouseholderQR<RealMatrix> qr(a);
  const RealMatrix r =
      qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  Eigen::BDCSVD<RealMatrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  // U = Q [U_r; 0], applying the reflectors instead of forming Q.
  u->setZero(rows, cols);
  u->topRows(cols) = svd.matrixU();
  u->applyOnTheLeft(qr.householderQ());
  *sigma = svd.singularValues();
  *v = svd.matrixV();
}

}  // namespace

ThinSvd ThinSvdDecompose(const RealMatrix& a, double rank_tolerance) {
  return ThinSvdDecompose(a, rank_tolerance,
                          std::min(a.rows(), a.cols()));
}

ThinSvd ThinSvdDecompose(const RealMatrix& a, double rank_tolerance,
                         Eigen::Index max_rank) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw DimensionError("thin_svd: empty matrix");
  }
  if (!(rank_tolerance >= 0.0 && rank_tolerance < 1.0)) {
    throw InvalidArgument("thin_svd: rank tolerance must lie in [0, 1)");
  }
  if (max_rank < 1) {
    throw InvalidArgument("thin_svd: max_rank must be at least 1");
  }
  if (!AllFinite(a)) {
    throw InvalidArgument("thin_svd: non-finite entry");
  }

  RealMatrix u, v;
  RealVector sigma;
  if (a.rows() >= a.cols()) {
    TallSvd(a, &u, &sigma, &v);
  } else {
    TallSvd(a.transpose(), &v, &sigma, &u);
  }

  Eigen::Index rank = 1;
  const double cutoff = rank_tolerance * sigma(0);
  while (rank < sigma.size() && sigma(rank) > cutoff && sigma(rank) > 0.0) {
    ++rank;
  }
  rank = std::min(rank, max_rank);

  ThinSvd out;
  out.u = u.leftCols(rank);
  out.sigma = sigma.head(rank);
  out.v = v.leftCols(rank);
  return out;
}

EigenDecomposition EigDense(const ComplexMatrix& a) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw DimensionError("eig_dense: matrix must be square and non-empty, got " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, true);
  if (solver.info() != Eigen::Success) {
    throw DegenerateDataError("eig_dense: QR iteration did not converge");
  }
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
    const double norm = out.eigenvectors.col(j).norm();
    if (norm > 0.0) out.eigenvectors.col(j) /= norm;
  }
  return out;
}

EigenDecomposition EigDense(const RealMatrix& a) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw DimensionError("eig_dense: matrix must be square and non-empty, got " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
  Eigen::EigenSolver<RealMatrix> solver(a, true);
  if (solver.info() != Eigen::Success) {
    throw DegenerateDataError("eig_dense: QR iteration did not converge");
  }
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
    const double norm = out.eigenvectors.col(j).norm();
    if (norm > 0.0) out.eigenvectors.col(j) /= norm;
  }
  return out;
}

ComplexVector LeastSquares(const ComplexMatrix& a, const ComplexVector& rhs) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw DimensionError("least_squares: empty matrix");
  }
  if (a.rows() != rhs.size()) {
    throw DimensionError("least_squares: matrix has " +
                         std::to_string(a.rows()) + " rows but rhs has " +
                         std::to_string(rhs.size()) + " entries");
  }
  Eigen::BDCSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sigma = svd.singularValues();
  const double cutoff = kPseudoInverseTolerance * sigma(0);
  ComplexVector coeffs = svd.matrixU().adjoint() * rhs;
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    coeffs(j) = (sigma(j) > cutoff && sigma(j) > 0.0) ? coeffs(j) / sigma(j)
                                                      : Complex(0.0, 0.0);
  }
  return svd.matrixV() * coeffs;
}

bool AllFinite(const RealMatrix& a) { return a.allFinite(); }

bool AllFinite(const ComplexMatrix& a) { return a.allFinite(); }

}  // namespace dmdsep
