#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <vector>

#include "octdyn/types.hpp"

namespace octdyn {

/// Smallest `count` generalized eigenfrequencies of (K, M), both SPD, by
/// shift-invert Lanczos at sigma = 0 with full reorthogonalization in the
/// M inner product.  Verification-only oracle.
std::vector<double> smallest_frequencies(const Eigen::SparseMatrix<double>& K,
                                         const Eigen::SparseMatrix<double>& M, int count);

/// Overload reusing a prefactorized K (one factorization serves several mass
/// matrices of the same mesh).
class StiffnessFactor {
 public:
  explicit StiffnessFactor(const Eigen::SparseMatrix<double>& K);
  VectorXd solve(const VectorXd& rhs) const;
  Eigen::Index rows() const { return ldlt_.rows(); }

 private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

std::vector<double> smallest_frequencies(const StiffnessFactor& Kinv,
                                         const Eigen::SparseMatrix<double>& M, int count);

/// Diagonal mass as a sparse matrix.
Eigen::SparseMatrix<double> diagonal_matrix(const VectorXd& d);

}  // namespace octdyn
