#ifndef DMDSEP_NUMERICS_H_
#define DMDSEP_NUMERICS_H_

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace dmdsep {

// Column-major dense storage; frames are columns.
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Thin SVD a ~= u * diag(sigma) * v^T, truncated to the numerical rank.
struct ThinSvd {
  RealMatrix u;      // rows x rank
  RealVector sigma;  // nonincreasing, >= 0
  RealMatrix v;      // cols x rank

  Eigen::Index rank() const { return sigma.size(); }
};

struct EigenDecomposition {
  ComplexVector eigenvalues;
  ComplexMatrix eigenvectors;  // unit-norm columns
};

// Computes the thin SVD of `a`, keeping the singular values with
// sigma_j > rank_tolerance * sigma_1. At least one triplet is always kept;
// an all-zero input yields rank 1 with sigma_1 = 0.
//
// Tall inputs go through a Householder QR first so the cost stays
// O(rows * cols^2), which is what makes DMD on video segments cheap.
ThinSvd ThinSvdDecompose(const RealMatrix& a, double rank_tolerance);

// Same as above but also caps the rank at `max_rank`.
ThinSvd ThinSvdDecompose(const RealMatrix& a, double rank_tolerance,
                         Eigen::Index max_rank);

// Eigen-decomposition of a small dense complex square matrix.
EigenDecomposition EigDense(const ComplexMatrix& a);

// Real input: eigenpairs come in conjugate pairs. Roughly 10x cheaper than
// the complex overload for the same size.
EigenDecomposition EigDense(const RealMatrix& a);

// Minimum-norm least-squares solution of a * x = rhs via the SVD
// pseudo-inverse (singular values below 1e-12 * sigma_1 are dropped).
ComplexVector LeastSquares(const ComplexMatrix& a, const ComplexVector& rhs);

// True when every entry is finite.
bool AllFinite(const RealMatrix& a);
bool AllFinite(const ComplexMatrix& a);

}  // namespace dmdsep

#endif  // DMDSEP_NUMERICS_H_
