#include "leverage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace orss {

namespace {

void check_stream_row(const Vector& row, int d, std::size_t index) {
  if (row.size() != d) {
    throw DimensionError("row " + std::to_string(index) + " has dimension " +
                         std::to_string(row.size()) + ", expected " +
                         std::to_string(d));
  }
  if (!row.allFinite()) {
    throw NonFiniteError("row " + std::to_string(index) +
                         " contains a non-finite entry");
  }
}

double check_lambda(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw std::invalid_argument("lambda must be strictly positive");
  }
  return lambda;
}

double largest_eigenvalue(const Matrix& gram) {
  if (gram.rows() == 0) {
    return 0.0;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

// Quadratic form v^T (gram + lambda I)^-1 v by a fresh LDLT solve. Exact
// route on purpose: these scores serve as oracles for the samplers.
double ridge_solve(const Matrix& gram, double lambda, const Vector& v) {
  const int d = static_cast<int>(gram.rows());
  const Matrix regularized = gram + lambda * Matrix::Identity(d, d);
  const double q = v.dot(Eigen::LDLT<Matrix>(regularized).solve(v));
  return q < 0.0 ? 0.0 : q;
}

enum class GramMode { exclusive, inclusive, full };

ScoreTrace scores_with_mode(const std::vector<Vector>& rows, double lambda,
                            GramMode mode) {
  ScoreTrace trace;
  trace.lambda = check_lambda(lambda);
  if (rows.empty()) {
    return trace;
  }
  const int d = static_cast<int>(rows.front().size());
  Matrix gram = Matrix::Zero(d, d);
  if (mode == GramMode::full) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      check_stream_row(rows[i], d, i);
      gram.noalias() += rows[i] * rows[i].transpose();
    }
    trace.spectral_norm_sq = largest_eigenvalue(gram);
    trace.scores.reserve(rows.size());
    for (const Vector& row : rows) {
      trace.scores.push_back(std::min(ridge_solve(gram, lambda, row), 1.0));
    }
    return trace;
  }

  trace.scores.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check_stream_row(rows[i], d, i);
    if (mode == GramMode::inclusive) {
      gram.noalias() += rows[i] * rows[i].transpose();
      trace.scores.push_back(std::min(ridge_solve(gram, lambda, rows[i]), 1.0));
    } else {
      trace.scores.push_back(std::min(ridge_solve(gram, lambda, rows[i]), 1.0));
      gram.noalias() += rows[i] * rows[i].transpose();
    }
  }
  trace.spectral_norm_sq = largest_eigenvalue(gram);
  return trace;
}

}  // namespace

double ScoreTrace::sum() const {
  return std::accumulate(scores.begin(), scores.end(), 0.0);
}

ScoreTrace online_ridge_scores(const std::vector<Vector>& rows,
                               double lambda) {
  return scores_with_mode(rows, lambda, GramMode::exclusive);
}

ScoreTrace online_ridge_scores_inclusive(const std::vector<Vector>& rows,
                                         double lambda) {
  return scores_with_mode(rows, lambda, GramMode::inclusive);
}

ScoreTrace offline_ridge_scores(const std::vector<Vector>& rows,
                                double lambda) {
  return scores_with_mode(rows, lambda, GramMode::full);
}

double score_sum_bound(int d, double spectral_norm_sq, double lambda) {
  check_lambda(lambda);
  if (d < 0 || !std::isfinite(spectral_norm_sq) || spectral_norm_sq < 0.0) {
    throw std::invalid_argument("invalid arguments to score_sum_bound");
  }
  return 2.0 * d * std::log1p(spectral_norm_sq / lambda);
}

}  // namespace orss
