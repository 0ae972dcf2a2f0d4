#pragma once

// Regularized dense systems (alpha I - M / (pi i)) u0 = g and (alpha I - M / (pi i)) T u0 = g',
// their direct solution, conditioning, and the closed-form real/imaginary inversions.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipip/core.hpp"
#include "ipip/discretize.hpp"

namespace ipip {

enum class SystemKind { direct, tbc_coupled };

inline const char* to_string(SystemKind k) { return k == SystemKind::direct ? "direct" : "tbc_coupled"; }

class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition_estimate() const { return condition_; }

 private:
  double condition_;
};

/// A is shared so that several right-hand sides (models, windows) reuse one matrix.
struct InverseSystem {
  std::shared_ptr<const Eigen::MatrixXcd> A;
  RhsVector rhs;
  cplx alpha;
  SystemKind kind = SystemKind::direct;
  std::shared_ptr<const TbcMatrix> T;  ///< set for tbc_coupled only
  ZGrid grid;
};

struct Reconstruction {
  BoundaryLine u0;
  SystemKind kind;
  cplx alpha;
  double condition_estimate;
  double residual_norm;
};

/// alpha I - M / (pi i), i.e. alpha I + (i / pi) M.
inline Eigen::MatrixXcd system_matrix(const KernelMatrix& M, cplx alpha) {
  Eigen::MatrixXcd A = (I / pi) * M.entries;
  A.diagonal().array() += alpha;
  return A;
}

inline InverseSystem build_system(const KernelMatrix& M, RhsVector rhs, const Regularization& reg) {
  if (rhs.values.size() != M.entries.rows())
    throw std::invalid_argument("build_system: rhs length " + std::to_string(rhs.values.size()) +
                                " does not match matrix dimension " + std::to_string(M.entries.rows()));
  if (rhs.kind != RhsKind::g) throw std::invalid_argument("build_system: direct system needs a g right-hand side");
  const cplx alpha = reg.alpha();
  return {std::make_shared<const Eigen::MatrixXcd>(system_matrix(M, alpha)), std::move(rhs), alpha,
          SystemKind::direct, nullptr, M.grid};
}

inline InverseSystem build_system(const KernelMatrix& M, RhsVector rhs, const Regularization& reg,
                                  std::shared_ptr<const TbcMatrix> T) {
  if (!T) throw std::invalid_argument("build_system: tbc_coupled system needs a TBC matrix");
  if (rhs.values.size() != M.entries.rows() || T->entries.rows() != M.entries.rows())
    throw std::invalid_argument("build_system: dimension mismatch between M, T and rhs");
  if (rhs.kind != RhsKind::g_prime)
    throw std::invalid_argument("build_system: tbc_coupled system needs a g' right-hand side");
  const cplx alpha = reg.alpha();
  return {std::make_shared<const Eigen::MatrixXcd>(system_matrix(M, alpha)), std::move(rhs), alpha,
          SystemKind::tbc_coupled, std::move(T), M.grid};
}

/// Same matrix, different right-hand side.
inline InverseSystem with_rhs(const InverseSystem& sys, RhsVector rhs) {
  InverseSystem out = sys;
  if (rhs.values.size() != sys.A->rows()) throw std::invalid_argument("with_rhs: dimension mismatch");
  out.rhs = std::move(rhs);
  return out;
}

/// LU factorization with partial pivoting plus a 1-norm condition estimate.
class Factorization {
 public:
  explicit Factorization(std::shared_ptr<const Eigen::MatrixXcd> A) : A_(std::move(A)) {
    if (!A_ || A_->rows() != A_->cols()) throw std::invalid_argument("Factorization: matrix must be square");
    if (!A_->allFinite()) throw std::invalid_argument("Factorization: matrix has non-finite entries");
    lu_.compute(*A_);
    const auto diag = lu_.matrixLU().diagonal();
    const double scale = A_->cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
      if (!(std::abs(diag(i)) > std::numeric_limits<double>::min() * std::max(scale, 1.0))) {
        singular_ = true;
        break;
      }
    }
    const double rc = singular_ ? 0.0 : lu_.rcond();
    cond_ = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  }

  explicit Factorization(const InverseSystem& sys) : Factorization(sys.A) {}

  double condition_estimate() const { return cond_; }
  bool singular() const { return singular_; }
  const Eigen::MatrixXcd& matrix() const { return *A_; }

  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const {
    if (singular_) throw SingularSystemError("pivot underflow in LU factorization", cond_);
    return lu_.solve(b);
  }

  /// Exact 1-norm condition number from the explicit inverse.
  double condition_number_1() const {
    if (singular_) return std::numeric_limits<double>::infinity();
    const Eigen::MatrixXcd inv = lu_.inverse();
    return A_->cwiseAbs().colwise().sum().maxCoeff() * inv.cwiseAbs().colwise().sum().maxCoeff();
  }

 private:
  std::shared_ptr<const Eigen::MatrixXcd> A_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  double cond_ = 0.0;
  bool singular_ = false;
};

namespace detail {

inline double rel_residual(const Eigen::VectorXcd& r, const Eigen::VectorXcd& b) {
  const double nb = b.norm();
  return nb > 0.0 ? r.norm() / nb : r.norm();
}

}  // namespace detail

/// Solve with an existing factorization of sys.A.
inline Reconstruction solve(const InverseSystem& sys, const Factorization& lu) {
  const Eigen::VectorXcd& b = sys.rhs.values;
  Eigen::VectorXcd u;
  Eigen::VectorXcd r;
  if (sys.kind == SystemKind::direct) {
    u = lu.solve(b);
    r = (*sys.A) * u - b;
  } else {
    const Eigen::VectorXcd y = lu.solve(b);
    u = sys.T->entries.triangularView<Eigen::Upper>().solve(y);
    r = (*sys.A) * (sys.T->entries.triangularView<Eigen::Upper>() * u) - b;
  }
  if (!u.allFinite())
    throw SingularSystemError("solution has non-finite entries", lu.condition_estimate());
  std::vector<cplx> samples(u.data(), u.data() + u.size());
  return {BoundaryLine(sys.grid, std::move(samples)), sys.kind, sys.alpha, lu.condition_estimate(),
          detail::rel_residual(r, b)};
}

inline Reconstruction solve(const InverseSystem& sys) { return solve(sys, Factorization(sys)); }

/// 1-norm condition estimate (LAPACK-style estimator on the LU factors).
inline double condition_estimate(const Eigen::MatrixXcd& A) {
  return Factorization(std::make_shared<const Eigen::MatrixXcd>(A)).condition_estimate();
}

inline double condition_number_1(const Eigen::MatrixXcd& A) {
  return Factorization(std::make_shared<const Eigen::MatrixXcd>(A)).condition_number_1();
}

/// For a priori real boundary data: u0(z_n) = sqrt(z_n) Re H(z_n).
inline BoundaryLine solve_special_real(const ImageLine& image, const PhysicalParams& p, const ZGrid& grid) {
  std::vector<cplx> v(grid.size());
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double z = grid.node(n);
    v[n] = std::sqrt(z) * eval_H(image, p, z).real();
  }
  return {grid, std::move(v)};
}

/// For a priori imaginary boundary data: u0(z_n) = i sqrt(z_n) Im H(z_n).
inline BoundaryLine solve_special_imag(const ImageLine& image, const PhysicalParams& p, const ZGrid& grid) {
  std::vector<cplx> v(grid.size());
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double z = grid.node(n);
    v[n] = I * (std::sqrt(z) * eval_H(image, p, z).imag());
  }
  return {grid, std::move(v)};
}

}  // namespace ipip
