#include "pff/linear_solver.hpp"

#include <algorithm>
#include <cmath>

#include "pff/error.hpp"

#ifdef PFF_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#else
#include <Eigen/SparseCholesky>
#endif

namespace pff {

namespace {
constexpr double kTargetResidual = 1e-10;
constexpr int kMaxRefinements = 4;

#ifdef PFF_HAVE_CHOLMOD
using Factor = Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>, Eigen::Lower>;
#else
using Factor = Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower>;
#endif

bool same_pattern(const Eigen::SparseMatrix<double>& a, const Eigen::SparseMatrix<double>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  return std::equal(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1, b.outerIndexPtr()) &&
         std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), b.innerIndexPtr());
}
}  // namespace

struct SparseSpdSolver::Impl {
  Factor factor;
  Eigen::SparseMatrix<double> A;
  bool analyzed = false;
#ifdef PFF_HAVE_CHOLMOD
  // Failures surface as LinearSolveError; keep CHOLMOD from printing its own.
  Impl() { factor.cholmod().print = 0; }
#endif
};

SparseSpdSolver::SparseSpdSolver() : impl_(std::make_unique<Impl>()) {}
SparseSpdSolver::~SparseSpdSolver() = default;
SparseSpdSolver::SparseSpdSolver(SparseSpdSolver&&) noexcept = default;
SparseSpdSolver& SparseSpdSolver::operator=(SparseSpdSolver&&) noexcept = default;

const char* SparseSpdSolver::backend() {
#ifdef PFF_HAVE_CHOLMOD
  return "cholmod";
#else
  return "eigen-simplicial";
#endif
}

void SparseSpdSolver::factorize(const Eigen::SparseMatrix<double>& A) {
  if (A.rows() != A.cols()) throw LinearSolveError("matrix is not square");
  const bool reuse = impl_->analyzed && same_pattern(impl_->A, A);
  impl_->A = A;
  impl_->A.makeCompressed();
  if (A.rows() == 0) return;
  if (!reuse) {
    impl_->factor.analyzePattern(impl_->A);
    impl_->analyzed = true;
  }
  impl_->factor.factorize(impl_->A);
  if (impl_->factor.info() != Eigen::Success)
    throw LinearSolveError("sparse Cholesky factorization failed: matrix of size " +
                           std::to_string(A.rows()) + " is singular or not positive definite");
}

Eigen::VectorXd SparseSpdSolver::solve(const Eigen::VectorXd& rhs) const {
  const auto& A = impl_->A;
  if (rhs.size() != A.rows()) throw LinearSolveError("right-hand side size does not match the matrix");
  if (A.rows() == 0) return Eigen::VectorXd();
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    last_residual_ = 0.0;
    return Eigen::VectorXd::Zero(rhs.size());
  }
  Eigen::VectorXd x = impl_->factor.solve(rhs);
  Eigen::VectorXd r = rhs - A.selfadjointView<Eigen::Lower>() * x;
  for (int k = 0; k < kMaxRefinements && r.norm() > kTargetResidual * bnorm; ++k) {
    x += impl_->factor.solve(r);
    r = rhs - A.selfadjointView<Eigen::Lower>() * x;
  }
  last_residual_ = r.norm() / bnorm;
  if (!std::isfinite(last_residual_)) throw LinearSolveError("linear solve produced non-finite values");
  return x;
}

Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& rhs) {
  SparseSpdSolver s;
  s.factorize(A);
  return s.solve(rhs);
}

}  // namespace pff
