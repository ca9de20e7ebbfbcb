// Acceptance suite: one checkable criterion per case, one [PASS]/[FAIL] line
// each. Run with no arguments for the full suite or with a criterion number.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "leverage.hpp"
#include "linalg.hpp"
#include "rng.hpp"
#include "samplers.hpp"
#include "streams.hpp"
#include "verify.hpp"

using namespace orss;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return buffer;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::vector<Vector> identity_rows(int d) {
  std::vector<Vector> rows;
  for (int i = 0; i < d; ++i) {
    rows.push_back(Vector::Unit(d, i));
  }
  return rows;
}

std::vector<Vector> repeated_e1(int n, int d) {
  return std::vector<Vector>(static_cast<std::size_t>(n), Vector::Unit(d, 0));
}

std::vector<Vector> clique_stream(int d, int copies, double eps,
                                  double delta) {
  GraphStreamSpec spec;
  spec.d = d;
  spec.copies = copies;
  spec.base_edge_weight = clique_base_weight(d, eps, delta);
  return gen_doubling_cliques(spec);
}

std::vector<Vector> spiked_gaussian(int n, int d, std::uint64_t seed) {
  auto rows = gen_gaussian(n, d, seed);
  for (int i = 0; i < 5 && i < d; ++i) {
    rows.push_back(50.0 * Vector::Unit(d, i));
  }
  return permute_rows(std::move(rows), seed + 1);
}

// 1. Deterministic score-sum bound, zero tolerance, across the stream suite
//    and 3 permutations each, in under 10 seconds.
Outcome criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  struct Entry {
    const char* name;
    std::vector<Vector> rows;
    int d;
  };
  std::vector<Entry> suite;
  suite.push_back({"gaussian-500x10", gen_gaussian(500, 10, 11), 10});
  suite.push_back({"identity-10", identity_rows(10), 10});
  suite.push_back({"repeated-e1-1000", repeated_e1(1000, 4), 4});
  suite.push_back({"cliques-d6-N8", clique_stream(6, 8, 0.5, 1.0), 6});

  const double lambda = 1.0;
  int checks = 0;
  double worst_slack = 0.0;
  for (const Entry& entry : suite) {
    for (std::uint64_t perm = 0; perm < 4; ++perm) {
      const auto rows =
          perm == 0 ? entry.rows : permute_rows(entry.rows, perm);
      const ScoreTrace trace = online_ridge_scores(rows, lambda);
      const double bound =
          score_sum_bound(entry.d, trace.spectral_norm_sq, lambda);
      ++checks;
      worst_slack = std::max(worst_slack, trace.sum() / bound);
      if (trace.sum() > bound) {
        return {false, fmt("%s permutation %llu: sum %.6f > bound %.6f",
                           entry.name, (unsigned long long)perm, trace.sum(),
                           bound)};
      }
    }
  }
  const double seconds = elapsed_seconds(start);
  if (seconds >= 10.0) {
    return {false, fmt("runtime %.2fs exceeds 10s", seconds)};
  }
  return {true, fmt("%d stream variants, worst sum/bound %.3f, %.2fs", checks,
                    worst_slack, seconds)};
}

// 2. Online scores dominate offline scores elementwise on random matrices.
Outcome criterion_2() {
  const double tolerance = 1e-10;
  double worst_gap = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rows = gen_gaussian(50, 8, 7000 + seed);
    const ScoreTrace online = online_ridge_scores(rows, 1.0);
    const ScoreTrace offline = offline_ridge_scores(rows, 1.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double gap = offline.scores[i] - online.scores[i];
      worst_gap = std::max(worst_gap, gap);
      if (gap > tolerance) {
        return {false,
                fmt("matrix %llu row %zu: offline %.12f > online %.12f",
                    (unsigned long long)seed, i, offline.scores[i],
                    online.scores[i])};
      }
    }
  }
  return {true, fmt("20 matrices, worst offline-online gap %.2e", worst_gap)};
}

// 3. The barrier sampler always certifies and its gap matrices stay positive
//    definite at every step.
Outcome criterion_3() {
  const auto start = std::chrono::steady_clock::now();
  struct Entry {
    const char* name;
    std::vector<Vector> rows;
    int d;
  };
  std::vector<Entry> suite;
  suite.push_back({"gaussian", gen_gaussian(400, 10, 31), 10});
  suite.push_back({"identity", identity_rows(10), 10});
  suite.push_back({"repeated-e1", repeated_e1(500, 8), 8});
  suite.push_back({"cliques", clique_stream(6, 4, 0.5, 1.0), 6});
  suite.push_back({"spiked", spiked_gaussian(300, 10, 77), 10});

  int runs = 0;
  double min_probe = HUGE_VAL;
  for (const Entry& entry : suite) {
    for (double eps : {0.3, 0.7}) {
      for (double delta : {0.05, 0.5}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
          BssSampler sampler(entry.d, eps, delta, 500 + seed);
          for (const Vector& row : entry.rows) {
            sampler.step(row);
            const double upper = sampler.upper_gap().min_eigenvalue();
            const double lower = sampler.lower_gap().min_eigenvalue();
            min_probe = std::min({min_probe, upper, lower});
            if (upper <= 0.0 || lower <= 0.0) {
              return {false,
                      fmt("%s eps=%.2f delta=%.2f seed=%llu: gap eigenvalue "
                          "%.3e <= 0",
                          entry.name, eps, delta, (unsigned long long)seed,
                          std::min(upper, lower))};
            }
          }
          const Certificate cert =
              certify(entry.rows, sampler.kept_rows(), eps, delta);
          ++runs;
          if (!cert.passed) {
            return {false,
                    fmt("%s eps=%.2f delta=%.2f seed=%llu: certificate failed "
                        "margins [%.6f, %.6f]",
                        entry.name, eps, delta, (unsigned long long)seed,
                        cert.min_eig, cert.max_eig)};
          }
        }
      }
    }
  }
  const double seconds = elapsed_seconds(start);
  if (seconds >= 120.0) {
    return {false, fmt("runtime %.1fs exceeds 2 minutes", seconds)};
  }
  return {true, fmt("%d runs all certified, min gap eigenvalue %.3e, %.1fs",
                    runs, min_probe, seconds)};
}

// 4. Expected kept-row count of the barrier sampler stays below the
//    theoretical comparator with no slack.
Outcome criterion_4() {
  const auto rows = gen_gaussian(300, 8, 202);
  const double eps = 0.7, delta = 0.5;
  const CountEstimate estimate = expected_count_bss(rows, eps, delta, 50, 99);
  const double ratio = estimate.mean / estimate.comparator;
  if (estimate.mean > estimate.comparator) {
    return {false, fmt("mean kept %.2f > comparator %.2f", estimate.mean,
                       estimate.comparator)};
  }
  return {true,
          fmt("mean kept %.2f vs comparator %.2f (ratio %.3f, ci [%.1f, %.1f])",
              estimate.mean, estimate.comparator, ratio, estimate.ci_low,
              estimate.ci_high)};
}

// 5. Online sampler: certificate pass rate >= 90% over 50 seeds and kept
//    count within 4x the theoretical comparator on every seed.
Outcome criterion_5() {
  const auto rows = gen_gaussian(500, 20, 606);
  const double eps = 0.5, delta = 0.1;
  const double bound = certify(rows, rows, eps, delta).bound_rows;
  int passes = 0;
  std::int64_t max_kept = 0;
  const int seeds = 50;
  for (int seed = 0; seed < seeds; ++seed) {
    OnlineSampler sampler(20, eps, delta, 8000 + seed);
    for (const Vector& row : rows) {
      sampler.step(row);
    }
    max_kept = std::max(max_kept, sampler.stats().rows_kept);
    if (sampler.stats().rows_kept > 4.0 * bound) {
      return {false, fmt("seed %d kept %lld > 4x comparator %.1f", seed,
                         (long long)sampler.stats().rows_kept, bound)};
    }
    if (certify(rows, sampler.kept_rows(), eps, delta).passed) {
      ++passes;
    }
  }
  if (passes < 45) {
    return {false, fmt("pass rate %d/50 below 90%%", passes)};
  }
  return {true, fmt("pass rate %d/50, max kept %lld vs 4x comparator %.1f",
                    passes, (long long)max_kept, 4.0 * bound)};
}

// 6. Slim sampler memory: inner peak kept-row count at most half the mean
//    online kept count at the same eps, while the output still certifies.
Outcome criterion_6() {
  const auto rows = gen_gaussian(500, 20, 606);
  const double eps = 0.2, delta = 0.1;
  const int seeds = 20;

  double online_kept_total = 0.0;
  for (int seed = 0; seed < seeds; ++seed) {
    OnlineSampler sampler(20, eps, delta, 8600 + seed);
    sampler.set_buffering(false);
    for (const Vector& row : rows) {
      sampler.step(row);
    }
    online_kept_total += double(sampler.stats().rows_kept);
  }
  const double online_mean = online_kept_total / seeds;

  double inner_peak_total = 0.0;
  int cert_passes = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    SlimSampler sampler(20, eps, delta, 8700 + seed);
    for (const Vector& row : rows) {
      sampler.step(row);
    }
    inner_peak_total += double(sampler.stats().peak_working_rows);
    if (certify(rows, sampler.kept_rows(), eps, delta).passed) {
      ++cert_passes;
    }
  }
  const double inner_peak_mean = inner_peak_total / seeds;

  const bool memory_ok = inner_peak_mean <= 0.5 * online_mean;
  const bool cert_ok = cert_passes >= int(0.9 * seeds);
  const std::string detail =
      fmt("inner peak mean %.1f vs 0.5 x online mean %.1f = %.1f, "
          "certification %d/%d",
          inner_peak_mean, online_mean, 0.5 * online_mean, cert_passes, seeds);
  return {memory_ok && cert_ok, detail};
}

// 7. Maintained inverse accuracy after 10^4 rank-one absorbs at d = 16.
Outcome criterion_7() {
  const int d = 16;
  PsdState state(d, 1.0);
  Rng rng(7777);
  for (int i = 0; i < 10000; ++i) {
    Vector v(d);
    for (int j = 0; j < d; ++j) {
      v[j] = rng.gaussian();
    }
    state.absorb(v, rng.uniform() * 2.0);
  }
  const Matrix fresh = (state.gram() + Matrix::Identity(d, d))
                           .fullPivLu()
                           .inverse();
  const double rel_error = (state.inverse() - fresh).norm() / fresh.norm();
  if (!(rel_error < 1e-7)) {
    return {false, fmt("relative error %.3e >= 1e-7", rel_error)};
  }
  return {true, fmt("relative error %.3e after 10000 absorbs", rel_error)};
}

// 8. Doubling-clique streams force kept counts that grow with the number of
//    copies: monotone in N and at least 3x from N=2 to N=8.
Outcome criterion_8() {
  const double eps = 0.25, delta = 0.1;
  const int d = 8, seeds = 20;
  std::vector<double> means;
  for (int copies : {2, 4, 8}) {
    const auto rows = clique_stream(d, copies, eps, delta);
    double total = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
      BssSampler sampler(d, eps, delta, 1200 + seed);
      sampler.set_buffering(false);
      for (const Vector& row : rows) {
        sampler.step(row);
      }
      total += double(sampler.stats().rows_kept);
    }
    means.push_back(total / seeds);
  }
  const bool monotone = means[0] < means[1] && means[1] < means[2];
  const bool ratio_ok = means[2] >= 3.0 * means[0];
  return {monotone && ratio_ok,
          fmt("mean kept N=2: %.1f, N=4: %.1f, N=8: %.1f (ratio %.2f)",
              means[0], means[1], means[2], means[2] / means[0])};
}

// 9. Batch scoring: exact-sketch batches reproduce the per-row pipeline and
//    a 64-column sketch keeps 95% of estimates within a factor of two.
Outcome criterion_9() {
  const int d = 10;
  {
    const auto rows = gen_gaussian(200, d, 42);
    OnlineSampler per_row(d, 0.5, 0.1, 4242);
    std::vector<double> per_row_probs;
    for (const Vector& row : rows) {
      per_row_probs.push_back(per_row.step(row).probability);
    }
    OnlineSampler batched(d, 0.5, 0.1, 4242);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double quadratic =
          batched.sketch_quadratics({rows[i]}, d)[0];
      const double score = std::min((1.0 + batched.eps()) * quadratic, 1.0);
      const double p = std::min(batched.c() * score, 1.0);
      if (std::abs(p - per_row_probs[i]) > 1e-9) {
        return {false, fmt("row %zu: batch p %.12f vs per-row p %.12f", i, p,
                           per_row_probs[i])};
      }
      batched.step_with_probability(rows[i], p, score);
    }
  }

  int within = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rows = gen_gaussian(200, d, 9100 + seed);
    OnlineSampler sampler(d, 0.5, 0.1, 9200 + seed);
    for (int i = 0; i < 100; ++i) {
      sampler.step(rows[static_cast<std::size_t>(i)]);
    }
    std::vector<Vector> block(rows.begin() + 100, rows.end());
    const std::vector<double> estimates = sampler.sketch_quadratics(block, 64);
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double exact = sampler.kept_state().ridge_quadratic(block[i]);
      if (exact == 0.0) {
        continue;
      }
      ++total;
      if (estimates[i] >= 0.5 * exact && estimates[i] <= 2.0 * exact) {
        ++within;
      }
    }
  }
  const double fraction = double(within) / double(total);
  if (fraction < 0.95) {
    return {false, fmt("only %.1f%% of sketched estimates within factor 2",
                       100.0 * fraction)};
  }
  return {true, fmt("exact batches match to 1e-9; %.1f%% of %d sketched "
                    "estimates within factor 2",
                    100.0 * fraction, total)};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

const Criterion kCriteria[] = {
    {1, "deterministic score-sum bound", criterion_1},
    {2, "online scores dominate offline scores", criterion_2},
    {3, "barrier sampler never fails", criterion_3},
    {4, "barrier sampler expected count", criterion_4},
    {5, "online sampler certification", criterion_5},
    {6, "slim sampler working memory", criterion_6},
    {7, "maintained inverse accuracy", criterion_7},
    {8, "doubling-clique kept-count growth", criterion_8},
    {9, "batch scoring equivalence", criterion_9},
};

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  if (argc > 1) {
    selected = std::atoi(argv[1]);
    if (selected < 1 || selected > 9) {
      std::fprintf(stderr, "usage: %s [criterion 1..9]\n", argv[0]);
      return 2;
    }
  }
  int failures = 0;
  for (const Criterion& criterion : kCriteria) {
    if (selected != 0 && criterion.number != selected) {
      continue;
    }
    const Outcome outcome = criterion.run();
    std::printf("[%s] criterion %d: %s — %s\n",
                outcome.passed ? "PASS" : "FAIL", criterion.number,
                criterion.name, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.passed) {
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
