#include "octdyn/lanczos.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

namespace octdyn {

StiffnessFactor::StiffnessFactor(const Eigen::SparseMatrix<double>& K) {
  ldlt_.compute(K);
  if (ldlt_.info() != Eigen::Success)
    throw Error("stiffness factorization failed (K must be SPD after boundary conditions)");
}

VectorXd StiffnessFactor::solve(const VectorXd& rhs) const { return ldlt_.solve(rhs); }

Eigen::SparseMatrix<double> diagonal_matrix(const VectorXd& d) {
  Eigen::SparseMatrix<double> M(d.size(), d.size());
  M.reserve(Eigen::VectorXi::Constant(static_cast<int>(d.size()), 1));
  for (Eigen::Index i = 0; i < d.size(); ++i) M.insert(i, i) = d[i];
  M.makeCompressed();
  return M;
}

std::vector<double> smallest_frequencies(const StiffnessFactor& Kinv,
                                         const Eigen::SparseMatrix<double>& M, int count) {
  const Eigen::Index n = Kinv.rows();
  if (count < 1) throw Error("smallest_frequencies: count must be >= 1");
  if (n < count) throw Error("smallest_frequencies: system smaller than mode count");

  const int m = static_cast<int>(std::min<Eigen::Index>(n, 2 * count + 80));

  MatrixXd V(n, m);       // M-orthonormal Lanczos vectors
  MatrixXd MV(n, m);      // M * V, cached for reorthogonalization
  VectorXd alpha(m), beta(m);

  std::mt19937 rng(20240229u + static_cast<unsigned>(n));
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  // Draws a fresh start vector M-orthogonal to the current basis.  Restarts
  // are needed whenever a Krylov sequence exhausts an invariant subspace,
  // which symmetry-degenerate spectra do long before `m` steps.
  auto fresh_vector = [&](int j) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      VectorXd r(n);
      for (Eigen::Index i = 0; i < n; ++i) r[i] = dist(rng);
      for (int pass = 0; pass < 2 && j > 0; ++pass) {
        const VectorXd c = MV.leftCols(j).transpose() * r;
        r.noalias() -= V.leftCols(j) * c;
      }
      const double nrm2 = r.dot(M * r);
      if (nrm2 > 1e-20) return VectorXd(r / std::sqrt(nrm2));
    }
    return VectorXd();  // space exhausted
  };

  VectorXd v = fresh_vector(0);
  int built = 0;
  double op_scale = 0.0;
  for (int j = 0; j < m; ++j) {
    if (v.size() == 0) break;  // whole space spanned
    V.col(j) = v;
    MV.col(j) = M * v;
    VectorXd w = Kinv.solve(MV.col(j));  // Op v = K^{-1} M v

    // Full reorthogonalization (twice) in the M inner product.
    for (int pass = 0; pass < 2; ++pass) {
      const VectorXd c = MV.leftCols(j + 1).transpose() * w;
      w.noalias() -= V.leftCols(j + 1) * c;
      if (pass == 0) alpha[j] = c[j];
    }
    op_scale = std::max(op_scale, std::abs(alpha[j]));

    const double b2 = w.dot(M * w);
    built = j + 1;
    if (!(b2 > 0.0) || std::sqrt(b2) < 1e-10 * op_scale) {
      // Invariant subspace reached: decouple the blocks and restart.
      beta[j] = 0.0;
      v = fresh_vector(j + 1);
      continue;
    }
    beta[j] = std::sqrt(b2);
    v = w / beta[j];
  }

  Eigen::SelfAdjointEigenSolver<MatrixXd> es;
  MatrixXd T = MatrixXd::Zero(built, built);
  for (int i = 0; i < built; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < built) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  es.compute(T, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("tridiagonal eigensolver failed");

  // Largest theta of K^{-1}M are the smallest omega^2 = 1/theta.
  std::vector<double> theta(es.eigenvalues().data(), es.eigenvalues().data() + built);
  std::sort(theta.begin(), theta.end(), std::greater<double>());
  if (static_cast<int>(theta.size()) < count)
    throw Error("Lanczos returned fewer Ritz values than requested");

  std::vector<double> omega;
  omega.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    if (!(theta[static_cast<std::size_t>(i)] > 0.0))
      throw Error("nonpositive Ritz value; (K, M) is not an SPD pencil");
    omega.push_back(1.0 / std::sqrt(theta[static_cast<std::size_t>(i)]));
  }
  return omega;
}

std::vector<double> smallest_frequencies(const Eigen::SparseMatrix<double>& K,
                                         const Eigen::SparseMatrix<double>& M, int count) {
  const StiffnessFactor f(K);
  return smallest_frequencies(f, M, count);
}

}  // namespace octdyn
