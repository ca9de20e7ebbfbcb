#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"
#include "streams.hpp"

namespace orss {

/// Irrevocable per-row outcome. probability is the sampling probability the
/// row was drawn with (0 only for zero rows, which are discarded outright);
/// kept rows carry rescale = 1/sqrt(probability). score_used is the
/// approximate leverage score or barrier quadratic behind the probability.
struct SampleDecision {
  bool kept = false;
  double probability = 0.0;
  double rescale = 0.0;
  double score_used = 0.0;
};

struct SamplerStats {
  std::int64_t rows_seen = 0;
  std::int64_t rows_kept = 0;
  double sum_scores = 0.0;
  std::int64_t peak_working_rows = 0;
  double seconds = 0.0;  // filled by run_sampler
};

/// Receives each kept row (rescale already applied) the moment it is decided.
using RowSink = std::function<void(const Vector& scaled_row, double weight)>;

enum class Algorithm { online, slim, bss, offline };

/// Streaming sampler interface: feed rows one at a time, each returning an
/// irrevocable decision. Instances are strictly sequential; distinct
/// instances may run in parallel.
class RowSampler {
 public:
  virtual ~RowSampler() = default;

  int dim() const { return dim_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }
  const SamplerStats& stats() const { return stats_; }

  SampleDecision step(const Vector& row);

  /// When buffering is on (default), kept rows are retained for retrieval;
  /// switch it off to run in pure streaming mode with a sink.
  void set_buffering(bool on) { buffering_ = on; }
  void set_sink(RowSink sink) { sink_ = std::move(sink); }

  const std::vector<Vector>& kept_rows() const { return kept_rows_; }
  const std::vector<double>& kept_weights() const { return kept_weights_; }

 protected:
  RowSampler(int dim, double eps, double delta);

  virtual SampleDecision do_step(const Vector& row) = 0;

  /// Records a kept row: buffer and/or sink.
  void deliver(const Vector& scaled_row, double weight);

  static bool draw_keep(double p, Rng& rng);

  int dim_;
  double eps_;
  double delta_;
  bool buffering_ = true;
  RowSink sink_;
  SamplerStats stats_;
  std::vector<Vector> kept_rows_;
  std::vector<double> kept_weights_;
};

/// 8 ln(d) / eps^2 (ln clamped below by taking 1 at d = 1, where ln d = 0
/// would disable sampling entirely).
double sampling_constant(int d, double eps);

/// Basic online sampler: scores each row against the Gram of the rows kept
/// so far plus lambda I with lambda = delta/eps, keeps with probability
/// min(c * score, 1), and rescales kept rows by 1/sqrt(p).
class OnlineSampler : public RowSampler {
 public:
  OnlineSampler(int dim, double eps, double delta, std::uint64_t seed);

  double lambda() const { return kept_state_.lambda(); }
  double c() const { return c_; }
  const PsdState& kept_state() const { return kept_state_; }

  /// Approximate online score min((1+eps) * q, 1) of a row against the
  /// current kept-Gram; does not change state.
  double approx_score(const Vector& row) const;

  /// Sampling probabilities for a whole block, all scored against the
  /// kept-Gram frozen at the block boundary. Quadratics are estimated with a
  /// random-sign projection of sketch_dim columns applied to the Cholesky
  /// factor of the maintained inverse; sketch_dim >= dim uses the factor
  /// directly (an orthonormal completion changes nothing) and is exact.
  std::vector<double> batch_scores(const std::vector<Vector>& block,
                                   int sketch_dim);

  /// Raw sketched quadratic estimates behind batch_scores (test hook).
  std::vector<double> sketch_quadratics(const std::vector<Vector>& block,
                                        int sketch_dim);

  /// Applies a pre-computed probability/score pair to one row: same draw,
  /// bookkeeping and delivery as step(). Used by the batch driver.
  SampleDecision step_with_probability(const Vector& row, double probability,
                                       double score);

 private:
  SampleDecision do_step(const Vector& row) override;
  SampleDecision apply_decision(const Vector& row, double probability,
                                double score);

  double c_;
  PsdState kept_state_;
  Rng rng_;
};

/// Low-memory variant: probabilities are driven by the approximate scores of
/// an independent internal OnlineSampler running at (eps = 1/2,
/// delta' = delta/(2 eps)); only that inner instance's state is retained,
/// while this sampler's own kept rows go straight to the sink/buffer.
class SlimSampler : public RowSampler {
 public:
  SlimSampler(int dim, double eps, double delta, std::uint64_t seed);

  const OnlineSampler& inner() const { return inner_; }
  double c() const { return c_; }

 private:
  SampleDecision do_step(const Vector& row) override;

  double c_;
  OnlineSampler inner_;
  Rng rng_;
};

/// Barrier-based sampler. Maintains gap matrices X^U = B^U - sample Gram and
/// X^L = sample Gram - B^L, both positive definite at all times, with
/// B^U/B^L advancing by (1 +- eps) a a^T per row. Keep probability is
/// min(c_U a^T (X^U)^-1 a + c_L a^T (X^L)^-1 a, 1). Never produces an
/// invalid approximation; the expected output size loses the log d factor.
class BssSampler : public RowSampler {
 public:
  BssSampler(int dim, double eps, double delta, std::uint64_t seed);

  double c_upper() const { return c_upper_; }
  double c_lower() const { return c_lower_; }
  const MaintainedInverse& upper_gap() const { return upper_gap_; }
  const MaintainedInverse& lower_gap() const { return lower_gap_; }

 private:
  SampleDecision do_step(const Vector& row) override;

  double c_upper_;
  double c_lower_;
  MaintainedInverse upper_gap_;
  MaintainedInverse lower_gap_;
  Rng rng_;
};

/// Streaming samplers only (offline needs the whole matrix up front).
std::unique_ptr<RowSampler> make_sampler(Algorithm algo, int dim, double eps,
                                         double delta, std::uint64_t seed);

struct RunResult {
  std::vector<Vector> kept_rows;
  std::vector<double> kept_weights;
  SamplerStats stats;
};

/// Independent-sampling baseline: scores every row against the full-matrix
/// ridge Gram at lambda = delta/eps and samples rows independently with
/// probability min(c * score, 1).
RunResult offline_sample(const std::vector<Vector>& rows, double eps,
                         double delta, std::uint64_t seed);

struct RunOptions {
  bool buffer_kept = true;
  RowSink sink;
  int batch_size = 0;   // online only; 0 = per-row
  int sketch_dim = 0;   // required when batch_size > 0
};

/// Drives a full stream through the chosen sampler and reports kept rows
/// (when buffered) plus stats including wall time.
RunResult run_sampler(Algorithm algo, RowSource& stream, double eps,
                      double delta, std::uint64_t seed,
                      const RunOptions& options = {});

}  // namespace orss
