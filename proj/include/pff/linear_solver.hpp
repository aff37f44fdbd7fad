#pragma once

#include <Eigen/Sparse>
#include <memory>

namespace pff {

/// Direct solver for sparse symmetric positive definite blocks. The symbolic
/// analysis is kept between factorizations while the sparsity pattern stays
/// the same. Solutions are refined until ||Ax - b|| <= 1e-10 ||b|| (a few
/// sweeps at most).
class SparseSpdSolver {
 public:
  SparseSpdSolver();
  ~SparseSpdSolver();
  SparseSpdSolver(SparseSpdSolver&&) noexcept;
  SparseSpdSolver& operator=(SparseSpdSolver&&) noexcept;

  /// Throws LinearSolveError on a zero or negative pivot.
  void factorize(const Eigen::SparseMatrix<double>& A);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  /// Relative residual of the last solve.
  double last_residual() const { return last_residual_; }
  static const char* backend();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  mutable double last_residual_ = 0.0;
};

/// One-shot factorize and solve.
Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& rhs);

}  // namespace pff
