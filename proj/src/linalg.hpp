#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "errors.hpp"

namespace orss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Signed rank-one modification scale * u * u^T. Negative scale subtracts;
/// a subtraction is only legal while |scale| * u^T M^-1 u < 1, i.e. while it
/// keeps the tracked matrix positive definite.
struct RankOneUpdate {
  Vector u;
  double scale = 0.0;
};

/// Tracks a symmetric positive definite matrix M and its inverse under signed
/// rank-one updates. The inverse follows each update through the
/// Sherman-Morrison formula and is recomputed from scratch every 4*dim
/// updates to cap drift.
class MaintainedInverse {
 public:
  /// Starts from M = diagonal * I with diagonal > 0.
  MaintainedInverse(int dim, double diagonal);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }
  const Matrix& inverse() const { return inv_; }

  /// v^T M^-1 v using the maintained inverse, clamped to >= 0.
  double quadratic(const Vector& v) const;

  /// M += scale * u * u^T. Throws InvariantError if a subtraction would make
  /// M lose positive definiteness.
  void apply(const Vector& u, double scale);
  void apply(const RankOneUpdate& update) { apply(update.u, update.scale); }

  /// Recomputes the inverse from the tracked matrix via Cholesky. Throws
  /// InvariantError if the matrix is no longer positive definite.
  void refresh();

  /// Smallest eigenvalue of the tracked matrix (fresh eigensolve, probe use).
  double min_eigenvalue() const;

 private:
  Matrix mat_;
  Matrix inv_;
  int since_refresh_ = 0;
};

/// Running Gram matrix sum(scale_k * v_k v_k^T) together with a maintained
/// inverse of (gram + lambda * I).
class PsdState {
 public:
  PsdState(int dim, double lambda);

  int dim() const { return inv_.dim(); }
  double lambda() const { return lambda_; }
  std::int64_t count() const { return count_; }
  const Matrix& gram() const { return gram_; }
  const Matrix& inverse() const { return inv_.inverse(); }

  /// v^T (gram + lambda I)^-1 v via the maintained inverse (no fresh
  /// factorization), clamped to >= 0.
  double ridge_quadratic(const Vector& v) const;

  /// gram += scale * v v^T with scale >= 0; inverse updated in O(d^2).
  void absorb(const Vector& v, double scale);

  /// Factor by which det(gram + lambda I) would grow if (v, scale) were
  /// absorbed: 1 + scale * v^T (gram + lambda I)^-1 v.
  double det_ratio_after(const Vector& v, double scale) const;

 private:
  double lambda_;
  Matrix gram_;
  MaintainedInverse inv_;
  std::int64_t count_ = 0;
};

/// Outcome of the two-sided PSD sandwich check. min_eig/max_eig are the
/// extreme eigenvalues of
///   (reference + lambda I)^-1/2 (sample + lambda I) (reference + lambda I)^-1/2
/// with lambda = delta / eps; the check passes when all eigenvalues lie in
/// [1 - eps, 1 + eps] up to an additive slack of 1e-9 * (1 + |bound|).
struct Certificate {
  double min_eig = 0.0;
  double max_eig = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  bool passed = false;
  std::uint64_t kept_rows = 0;  // filled by verify-level callers
  double bound_rows = 0.0;      // theoretical row-count comparator, ditto
};

/// Whitened-ratio eigenvalue check of sample_gram against reference_gram.
/// Both inputs must be symmetric and of equal dimension; lambda = delta/eps
/// must be positive.
Certificate psd_sandwich_margins(const Matrix& reference_gram,
                                 const Matrix& sample_gram, double eps,
                                 double delta);

namespace detail {
void check_row(const Vector& v, int dim);
}

}  // namespace orss
