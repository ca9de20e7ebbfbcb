#pragma once

#include <cstdint>
#include <vector>

#include "leverage.hpp"
#include "linalg.hpp"

namespace orss {

/// Two-sided spectral check of a kept-row sample against the original rows.
/// Kept rows are expected with their rescale already applied (as samplers
/// emit them), so both Grams are plain sums of outer products. bound_rows is
/// the theoretical row-count comparator
///   d ln(d) ln(eps ||A||^2 / delta) / eps^2
/// when the log argument exceeds e, else d ln(d) / eps^2.
Certificate certify(const std::vector<Vector>& original_rows,
                    const std::vector<Vector>& kept_rows, double eps,
                    double delta);

struct ScoreBoundReport {
  double sum = 0.0;
  double bound = 0.0;
  double slack_ratio = 0.0;  // sum / bound
  bool ok = false;           // sum <= bound
};

/// Audits a score trace against the deterministic sum bound.
ScoreBoundReport audit_score_bound(const ScoreTrace& trace, int d);

struct CountEstimate {
  double mean = 0.0;
  double ci_low = 0.0;    // normal-approximation 95% interval
  double ci_high = 0.0;
  double comparator = 0.0;  // (8/eps^2) * sum of 2*delta/eps ridge scores
  int trials = 0;
};

/// Monte-Carlo estimate of the barrier sampler's kept-row count over
/// `trials` runs with per-trial seeds derived from `seed`. The comparator is
/// the theoretical expected-count bound.
CountEstimate expected_count_bss(const std::vector<Vector>& rows, double eps,
                                 double delta, int trials,
                                 std::uint64_t seed = 0);

}  // namespace orss
