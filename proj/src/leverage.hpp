#pragma once

#include <vector>

#include "linalg.hpp"

namespace orss {

/// Per-row ridge leverage scores of a stream, plus the quantities needed to
/// audit the deterministic sum bound afterwards.
struct ScoreTrace {
  std::vector<double> scores;    // each in [0, 1]
  double lambda = 0.0;           // ridge used
  double spectral_norm_sq = 0.0; // largest eigenvalue of the full Gram
  double sum() const;
};

/// Score of row i against the Gram of rows 1..i-1 plus lambda I, clamped to
/// at most 1. The first row is scored against lambda I alone.
ScoreTrace online_ridge_scores(const std::vector<Vector>& rows, double lambda);

/// Variant that includes the current row in the Gram; always <= the
/// exclusive score at the same index.
ScoreTrace online_ridge_scores_inclusive(const std::vector<Vector>& rows,
                                         double lambda);

/// Scores against the full-matrix Gram; elementwise <= the online scores.
ScoreTrace offline_ridge_scores(const std::vector<Vector>& rows,
                                double lambda);

/// Deterministic upper bound on the sum of online ridge scores:
/// 2 d ln(1 + spectral_norm_sq / lambda).
double score_sum_bound(int d, double spectral_norm_sq, double lambda);

}  // namespace orss
