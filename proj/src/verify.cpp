#include "verify.hpp"

#include <cmath>

#include "samplers.hpp"

namespace orss {

namespace {

Matrix gram_of(const std::vector<Vector>& rows, int d) {
  Matrix gram = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    detail::check_row(rows[i], d);
    gram.noalias() += rows[i] * rows[i].transpose();
  }
  return gram;
}

}  // namespace

Certificate certify(const std::vector<Vector>& original_rows,
                    const std::vector<Vector>& kept_rows, double eps,
                    double delta) {
  if (original_rows.empty()) {
    throw std::invalid_argument("certify requires a nonempty original matrix");
  }
  const int d = static_cast<int>(original_rows.front().size());
  const Matrix original_gram = gram_of(original_rows, d);
  const Matrix kept_gram = gram_of(kept_rows, d);

  Certificate cert = psd_sandwich_margins(original_gram, kept_gram, eps, delta);
  cert.kept_rows = kept_rows.size();

  Eigen::SelfAdjointEigenSolver<Matrix> es(original_gram,
                                           Eigen::EigenvaluesOnly);
  const double norm_sq = std::max(0.0, es.eigenvalues().maxCoeff());
  const double log_arg = eps * norm_sq / delta;
  const double ln_d = std::log(static_cast<double>(d));
  cert.bound_rows = log_arg > std::exp(1.0)
                        ? d * ln_d * std::log(log_arg) / (eps * eps)
                        : d * ln_d / (eps * eps);
  return cert;
}

ScoreBoundReport audit_score_bound(const ScoreTrace& trace, int d) {
  ScoreBoundReport report;
  report.sum = trace.sum();
  report.bound = score_sum_bound(d, trace.spectral_norm_sq, trace.lambda);
  report.slack_ratio = report.bound > 0.0 ? report.sum / report.bound
                                          : (report.sum > 0.0 ? HUGE_VAL : 0.0);
  report.ok = report.sum <= report.bound;
  return report;
}

CountEstimate expected_count_bss(const std::vector<Vector>& rows, double eps,
                                 double delta, int trials,
                                 std::uint64_t seed) {
  if (trials < 2) {
    throw std::invalid_argument("expected_count_bss requires trials >= 2");
  }
  CountEstimate estimate;
  estimate.trials = trials;
  if (rows.empty()) {
    return estimate;
  }
  const int d = static_cast<int>(rows.front().size());

  double sum = 0.0;
  double sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    BssSampler sampler(d, eps, delta, derive_seed(seed, 0x6273730ULL + t));
    sampler.set_buffering(false);
    for (const Vector& row : rows) {
      sampler.step(row);
    }
    const double kept = static_cast<double>(sampler.stats().rows_kept);
    sum += kept;
    sum_sq += kept * kept;
  }
  estimate.mean = sum / trials;
  const double variance =
      std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1));
  const double half_width = 1.959963984540054 * std::sqrt(variance / trials);
  estimate.ci_low = estimate.mean - half_width;
  estimate.ci_high = estimate.mean + half_width;

  const ScoreTrace trace =
      online_ridge_scores_inclusive(rows, 2.0 * delta / eps);
  estimate.comparator = 8.0 / (eps * eps) * trace.sum();
  return estimate;
}

}  // namespace orss
