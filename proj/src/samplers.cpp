#include "samplers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "leverage.hpp"

namespace orss {

namespace {

void check_params(int dim, double eps, double delta) {
  if (dim < 1) {
    throw std::invalid_argument("dimension must be at least 1");
  }
  if (!std::isfinite(eps) || eps <= 0.0 || eps >= 1.0) {
    throw std::invalid_argument("eps must lie in (0, 1)");
  }
  if (!std::isfinite(delta) || delta <= 0.0) {
    throw std::invalid_argument("delta must be positive");
  }
}

constexpr std::uint64_t kSlimInnerTag = 0x1;
constexpr std::uint64_t kSlimOuterTag = 0x2;

}  // namespace

double sampling_constant(int d, double eps) {
  const double ln_d = d <= 1 ? 1.0 : std::log(static_cast<double>(d));
  return 8.0 * ln_d / (eps * eps);
}

RowSampler::RowSampler(int dim, double eps, double delta)
    : dim_(dim), eps_(eps), delta_(delta) {
  check_params(dim, eps, delta);
}

SampleDecision RowSampler::step(const Vector& row) {
  detail::check_row(row, dim_);
  ++stats_.rows_seen;
  return do_step(row);
}

void RowSampler::deliver(const Vector& scaled_row, double weight) {
  ++stats_.rows_kept;
  if (buffering_) {
    kept_rows_.push_back(scaled_row);
    kept_weights_.push_back(weight);
  }
  if (sink_) {
    sink_(scaled_row, weight);
  }
}

bool RowSampler::draw_keep(double p, Rng& rng) {
  if (p >= 1.0) {
    return true;  // deterministic keep, no randomness consumed
  }
  if (p <= 0.0) {
    return false;
  }
  return rng.uniform() < p;
}

OnlineSampler::OnlineSampler(int dim, double eps, double delta,
                             std::uint64_t seed)
    : RowSampler(dim, eps, delta),
      c_(sampling_constant(dim, eps)),
      kept_state_(dim, delta / eps),
      rng_(seed) {}

double OnlineSampler::approx_score(const Vector& row) const {
  return std::min((1.0 + eps_) * kept_state_.ridge_quadratic(row), 1.0);
}

SampleDecision OnlineSampler::do_step(const Vector& row) {
  const double score = approx_score(row);
  const double p = std::min(c_ * score, 1.0);
  return apply_decision(row, p, score);
}

SampleDecision OnlineSampler::step_with_probability(const Vector& row,
                                                    double probability,
                                                    double score) {
  detail::check_row(row, dim_);
  ++stats_.rows_seen;
  return apply_decision(row, probability, score);
}

SampleDecision OnlineSampler::apply_decision(const Vector& row,
                                             double probability,
                                             double score) {
  SampleDecision decision;
  decision.score_used = score;
  decision.probability = probability;
  stats_.sum_scores += score;
  decision.kept = draw_keep(probability, rng_);
  if (decision.kept) {
    decision.rescale = 1.0 / std::sqrt(probability);
    kept_state_.absorb(row, 1.0 / probability);
    deliver(decision.rescale * row, decision.rescale);
  }
  stats_.peak_working_rows =
      std::max(stats_.peak_working_rows, stats_.rows_kept);
  return decision;
}

std::vector<double> OnlineSampler::sketch_quadratics(
    const std::vector<Vector>& block, int sketch_dim) {
  if (sketch_dim < 1) {
    throw std::invalid_argument("sketch_dim must be at least 1");
  }
  std::vector<double> estimates;
  estimates.reserve(block.size());
  if (sketch_dim >= dim_) {
    // An isometry leaves the quadratic unchanged; use the factor directly.
    for (const Vector& row : block) {
      estimates.push_back(kept_state_.ridge_quadratic(row));
    }
    return estimates;
  }
  Eigen::LLT<Matrix> llt(kept_state_.inverse());
  if (llt.info() != Eigen::Success) {
    throw InvariantError("maintained inverse is not positive definite");
  }
  const Matrix factor_t = Matrix(llt.matrixL()).transpose();  // inv = L L^T
  Matrix projection(sketch_dim, dim_);
  const double entry = 1.0 / std::sqrt(static_cast<double>(sketch_dim));
  for (int i = 0; i < sketch_dim; ++i) {
    for (int j = 0; j < dim_; ++j) {
      projection(i, j) = (rng_.next_u64() & 1) ? entry : -entry;
    }
  }
  const Matrix sketch = projection * factor_t;  // sketch_dim x d
  for (const Vector& row : block) {
    detail::check_row(row, dim_);
    estimates.push_back((sketch * row).squaredNorm());
  }
  return estimates;
}

std::vector<double> OnlineSampler::batch_scores(
    const std::vector<Vector>& block, int sketch_dim) {
  const std::vector<double> quadratics = sketch_quadratics(block, sketch_dim);
  std::vector<double> probabilities;
  probabilities.reserve(quadratics.size());
  for (double q : quadratics) {
    const double score = std::min((1.0 + eps_) * q, 1.0);
    probabilities.push_back(std::min(c_ * score, 1.0));
  }
  return probabilities;
}

SlimSampler::SlimSampler(int dim, double eps, double delta, std::uint64_t seed)
    : RowSampler(dim, eps, delta),
      c_(sampling_constant(dim, eps)),
      inner_(dim, 0.5, delta / (2.0 * eps), derive_seed(seed, kSlimInnerTag)),
      rng_(derive_seed(seed, kSlimOuterTag)) {
  inner_.set_buffering(false);  // inner state is the whole working set
}

SampleDecision SlimSampler::do_step(const Vector& row) {
  const SampleDecision inner_decision = inner_.step(row);
  const double score = inner_decision.score_used;
  const double p = std::min(c_ * score, 1.0);
  SampleDecision decision;
  decision.score_used = score;
  decision.probability = p;
  stats_.sum_scores += score;
  decision.kept = draw_keep(p, rng_);
  if (decision.kept) {
    decision.rescale = 1.0 / std::sqrt(p);
    deliver(decision.rescale * row, decision.rescale);
  }
  stats_.peak_working_rows =
      std::max(stats_.peak_working_rows, inner_.stats().rows_kept);
  return decision;
}

BssSampler::BssSampler(int dim, double eps, double delta, std::uint64_t seed)
    : RowSampler(dim, eps, delta),
      c_upper_(2.0 / eps + 1.0),
      c_lower_(2.0 / eps - 1.0),
      upper_gap_(dim, delta),
      lower_gap_(dim, delta),
      rng_(seed) {
  stats_.peak_working_rows = dim;  // two d x d gap matrices, d rows' worth
}

SampleDecision BssSampler::do_step(const Vector& row) {
  const double q_upper = upper_gap_.quadratic(row);
  const double q_lower = lower_gap_.quadratic(row);
  const double score = c_upper_ * q_upper + c_lower_ * q_lower;
  const double p = std::min(score, 1.0);

  SampleDecision decision;
  decision.score_used = score;
  decision.probability = p;
  stats_.sum_scores += score;
  decision.kept = draw_keep(p, rng_);

  if (p >= 1.0) {
    // Deterministic keep: sample and barrier moves compose to +eps a a^T on
    // both gaps, an addition that cannot threaten positive definiteness.
    decision.rescale = 1.0;
    upper_gap_.apply(row, eps_);
    lower_gap_.apply(row, eps_);
    deliver(row, 1.0);
  } else if (p > 0.0) {
    if (decision.kept) {
      decision.rescale = 1.0 / std::sqrt(p);
      const double inv_p = 1.0 / p;
      upper_gap_.apply(row, -inv_p);  // sample update first
      lower_gap_.apply(row, inv_p);
      deliver(decision.rescale * row, decision.rescale);
    }
    upper_gap_.apply(row, 1.0 + eps_);  // then the barrier update
    lower_gap_.apply(row, -(1.0 - eps_));
  }
  // p == 0 only for a zero row: discard, barriers unchanged.
  return decision;
}

std::unique_ptr<RowSampler> make_sampler(Algorithm algo, int dim, double eps,
                                         double delta, std::uint64_t seed) {
  switch (algo) {
    case Algorithm::online:
      return std::make_unique<OnlineSampler>(dim, eps, delta, seed);
    case Algorithm::slim:
      return std::make_unique<SlimSampler>(dim, eps, delta, seed);
    case Algorithm::bss:
      return std::make_unique<BssSampler>(dim, eps, delta, seed);
    case Algorithm::offline:
      break;
  }
  throw std::invalid_argument(
      "offline sampling needs the whole matrix; use offline_sample()");
}

RunResult offline_sample(const std::vector<Vector>& rows, double eps,
                         double delta, std::uint64_t seed) {
  if (rows.empty()) {
    return {};
  }
  const int d = static_cast<int>(rows.front().size());
  check_params(d, eps, delta);
  const double c = sampling_constant(d, eps);
  const ScoreTrace trace = offline_ridge_scores(rows, delta / eps);
  Rng rng(seed);
  RunResult result;
  result.stats.rows_seen = static_cast<std::int64_t>(rows.size());
  result.stats.peak_working_rows = static_cast<std::int64_t>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double score = trace.scores[i];
    result.stats.sum_scores += score;
    const double p = std::min(c * score, 1.0);
    bool kept = p >= 1.0 || (p > 0.0 && rng.uniform() < p);
    if (kept) {
      const double rescale = 1.0 / std::sqrt(p);
      result.kept_rows.push_back(rescale * rows[i]);
      result.kept_weights.push_back(rescale);
      ++result.stats.rows_kept;
    }
  }
  return result;
}

RunResult run_sampler(Algorithm algo, RowSource& stream, double eps,
                      double delta, std::uint64_t seed,
                      const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;

  if (algo == Algorithm::offline) {
    std::vector<Vector> rows;
    Vector row;
    while (stream.next(row)) {
      rows.push_back(row);
    }
    result = offline_sample(rows, eps, delta, seed);
    if (options.sink) {
      for (std::size_t i = 0; i < result.kept_rows.size(); ++i) {
        options.sink(result.kept_rows[i], result.kept_weights[i]);
      }
    }
    if (!options.buffer_kept) {
      result.kept_rows.clear();
      result.kept_weights.clear();
    }
  } else {
    if (options.batch_size > 0 && algo != Algorithm::online) {
      throw std::invalid_argument("batch mode requires the online sampler");
    }
    auto sampler = make_sampler(algo, stream.dim(), eps, delta, seed);
    sampler->set_buffering(options.buffer_kept);
    if (options.sink) {
      sampler->set_sink(options.sink);
    }
    Vector row;
    if (options.batch_size > 0) {
      auto* online = static_cast<OnlineSampler*>(sampler.get());
      std::vector<Vector> block;
      block.reserve(static_cast<std::size_t>(options.batch_size));
      auto flush = [&] {
        if (block.empty()) {
          return;
        }
        const std::vector<double> quadratics =
            online->sketch_quadratics(block, options.sketch_dim);
        for (std::size_t i = 0; i < block.size(); ++i) {
          const double score = std::min((1.0 + eps) * quadratics[i], 1.0);
          const double p = std::min(online->c() * score, 1.0);
          online->step_with_probability(block[i], p, score);
        }
        block.clear();
      };
      while (stream.next(row)) {
        block.push_back(row);
        if (static_cast<int>(block.size()) == options.batch_size) {
          flush();
        }
      }
      flush();
    } else {
      while (stream.next(row)) {
        sampler->step(row);
      }
    }
    result.stats = sampler->stats();
    if (options.buffer_kept) {
      result.kept_rows = sampler->kept_rows();
      result.kept_weights = sampler->kept_weights();
    }
  }

  result.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace orss
