#ifndef SNNE_LINALG_HPP
#define SNNE_LINALG_HPP

#include <vector>

#include "snne/matrix.hpp"

namespace snne {

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // row i is the unit eigenvector for values[i]
};

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Deterministic, including eigenvector signs (largest-magnitude entry made
// positive). Intended for covariance matrices at a few hundred dims.
SymmetricEigen symmetric_eigen(const Matrix& a);

}  // namespace snne

#endif  // SNNE_LINALG_HPP
