#include "linalg.hpp"

#include <cmath>
#include <string>

namespace orss {

namespace detail {

void check_row(const Vector& v, int dim) {
  if (v.size() != dim) {
    throw DimensionError("vector has dimension " + std::to_string(v.size()) +
                         ", expected " + std::to_string(dim));
  }
  if (!v.allFinite()) {
    throw NonFiniteError("vector contains a non-finite entry");
  }
}

}  // namespace detail

namespace {

void check_scale(double scale) {
  if (!std::isfinite(scale)) {
    throw NonFiniteError("update scale is not finite");
  }
}

constexpr double kPdDenomFloor = 1e-12;

}  // namespace

MaintainedInverse::MaintainedInverse(int dim, double diagonal) {
  if (dim < 1) {
    throw std::invalid_argument("dimension must be at least 1");
  }
  if (!std::isfinite(diagonal) || diagonal <= 0.0) {
    throw std::invalid_argument("diagonal must be positive and finite");
  }
  mat_ = diagonal * Matrix::Identity(dim, dim);
  inv_ = (1.0 / diagonal) * Matrix::Identity(dim, dim);
}

double MaintainedInverse::quadratic(const Vector& v) const {
  detail::check_row(v, dim());
  const double q = v.dot(inv_ * v);
  return q < 0.0 ? 0.0 : q;  // roundoff can push tiny values negative
}

void MaintainedInverse::apply(const Vector& u, double scale) {
  detail::check_row(u, dim());
  check_scale(scale);
  if (scale == 0.0) {
    return;
  }
  const Vector w = inv_ * u;
  const double q = u.dot(w);
  const double denom = 1.0 + scale * q;
  if (scale < 0.0 && denom <= kPdDenomFloor) {
    throw InvariantError(
        "rank-one subtraction would lose positive definiteness");
  }
  mat_.noalias() += scale * u * u.transpose();
  inv_.noalias() -= (scale / denom) * w * w.transpose();
  inv_ = (0.5 * (inv_ + inv_.transpose())).eval();
  if (++since_refresh_ >= 4 * dim()) {
    refresh();
  }
}

void MaintainedInverse::refresh() {
  Eigen::LLT<Matrix> llt(mat_);
  if (llt.info() != Eigen::Success) {
    throw InvariantError("tracked matrix is no longer positive definite");
  }
  inv_ = llt.solve(Matrix::Identity(dim(), dim()));
  inv_ = (0.5 * (inv_ + inv_.transpose())).eval();
  since_refresh_ = 0;
}

double MaintainedInverse::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

PsdState::PsdState(int dim, double lambda)
    : lambda_(lambda), gram_(Matrix::Zero(dim, dim)), inv_(dim, lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw std::invalid_argument("lambda must be strictly positive");
  }
}

double PsdState::ridge_quadratic(const Vector& v) const {
  return inv_.quadratic(v);
}

void PsdState::absorb(const Vector& v, double scale) {
  check_scale(scale);
  if (scale < 0.0) {
    throw std::invalid_argument("absorb requires scale >= 0");
  }
  inv_.apply(v, scale);  // validates v
  gram_.noalias() += scale * v * v.transpose();
  ++count_;
}

double PsdState::det_ratio_after(const Vector& v, double scale) const {
  check_scale(scale);
  if (scale < 0.0) {
    throw std::invalid_argument("det_ratio_after requires scale >= 0");
  }
  return 1.0 + scale * inv_.quadratic(v);
}

namespace {

void check_symmetric(const Matrix& m, const char* name) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(name) + " is not square");
  }
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument(std::string(name) + " is not symmetric");
  }
}

}  // namespace

Certificate psd_sandwich_margins(const Matrix& reference_gram,
                                 const Matrix& sample_gram, double eps,
                                 double delta) {
  check_symmetric(reference_gram, "reference gram");
  check_symmetric(sample_gram, "sample gram");
  if (sample_gram.rows() != reference_gram.rows()) {
    throw DimensionError("gram matrices have different dimensions");
  }
  const double lambda = delta / eps;
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw std::invalid_argument("delta/eps must be strictly positive");
  }
  const int d = static_cast<int>(reference_gram.rows());
  const Matrix ref = reference_gram + lambda * Matrix::Identity(d, d);
  const Matrix smp = sample_gram + lambda * Matrix::Identity(d, d);

  Eigen::SelfAdjointEigenSolver<Matrix> ref_es(ref);
  if (ref_es.info() != Eigen::Success) {
    throw InvariantError("eigendecomposition of reference gram failed");
  }
  const Matrix whitener = ref_es.operatorInverseSqrt();
  Matrix ratio = whitener * smp * whitener;
  ratio = (0.5 * (ratio + ratio.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> es(ratio, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw InvariantError("eigendecomposition of whitened ratio failed");
  }

  Certificate cert;
  cert.eps = eps;
  cert.delta = delta;
  cert.min_eig = es.eigenvalues().minCoeff();
  cert.max_eig = es.eigenvalues().maxCoeff();
  const double lo = 1.0 - eps;
  const double hi = 1.0 + eps;
  const double lo_slack = 1e-9 * (1.0 + std::abs(lo));
  const double hi_slack = 1e-9 * (1.0 + std::abs(hi));
  cert.passed = cert.min_eig >= lo - lo_slack && cert.max_eig <= hi + hi_slack;
  return cert;
}

}  // namespace orss
