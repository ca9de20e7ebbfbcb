#include <cmath>

#include "doctest.h"
#include "leverage.hpp"
#include "samplers.hpp"
#include "streams.hpp"
#include "test_util.hpp"
#include "verify.hpp"

using namespace orss;
using test::identity_rows;
using test::random_rows;
using test::repeated_e1;

TEST_CASE("verify: keeping every row verbatim passes with unit margins") {
  const auto rows = random_rows(40, 5, 3);
  const Certificate cert = certify(rows, rows, 0.3, 0.2);
  CHECK(cert.passed);
  CHECK(cert.min_eig == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cert.max_eig == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cert.kept_rows == rows.size());
  CHECK(cert.bound_rows > 0.0);
}

TEST_CASE("verify: an empty sample of the identity fails") {
  const Certificate cert = certify(identity_rows(5), {}, 0.5, 0.01);
  CHECK_FALSE(cert.passed);
  CHECK(cert.kept_rows == 0);
}

TEST_CASE("verify: empty original matrix is an error") {
  CHECK_THROWS_AS(certify({}, {}, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("verify: certificate is insensitive to the row order of A") {
  const auto rows = random_rows(50, 4, 9);
  const auto shuffled = permute_rows(rows, 17);
  const Certificate a = certify(rows, rows, 0.4, 0.3);
  const Certificate b = certify(shuffled, rows, 0.4, 0.3);
  CHECK(a.passed == b.passed);
  CHECK(a.min_eig == doctest::Approx(b.min_eig).epsilon(1e-10));
  CHECK(a.max_eig == doctest::Approx(b.max_eig).epsilon(1e-10));
}

TEST_CASE("verify: comparator uses the logarithmic regime only when it helps") {
  // Identity rows: |A|^2 = 1. With eps * 1 / delta <= e the bound is
  // d ln d / eps^2.
  const auto rows = identity_rows(6);
  const double eps = 0.5;
  const Certificate flat = certify(rows, rows, eps, 1.0);
  CHECK(flat.bound_rows ==
        doctest::Approx(6.0 * std::log(6.0) / (eps * eps)).epsilon(1e-12));
  const Certificate log_regime = certify(rows, rows, eps, 1e-4);
  CHECK(log_regime.bound_rows ==
        doctest::Approx(6.0 * std::log(6.0) * std::log(eps * 1.0 / 1e-4) /
                        (eps * eps))
            .epsilon(1e-12));
}

TEST_CASE("verify: online sampler passes certification on most seeds") {
  const auto rows = test::random_rows(400, 10, 2);
  int passes = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    VectorSource source(rows);
    const RunResult result =
        run_sampler(Algorithm::online, source, 0.5, 0.1, 5000 + seed);
    if (certify(rows, result.kept_rows, 0.5, 0.1).passed) {
      ++passes;
    }
  }
  CHECK(passes >= int(0.9 * seeds));
}

TEST_CASE("verify: score bound audit on the identity stream") {
  const int d = 10;
  const ScoreTrace trace = online_ridge_scores(identity_rows(d), 1.0);
  const ScoreBoundReport report = audit_score_bound(trace, d);
  CHECK(report.ok);
  CHECK(report.sum == doctest::Approx(double(d)));
  CHECK(report.bound == doctest::Approx(2.0 * d * std::log(2.0)));
  CHECK(report.slack_ratio ==
        doctest::Approx(1.0 / (2.0 * std::log(2.0))).epsilon(1e-12));
}

TEST_CASE("verify: score bound audit on a repeated row") {
  const int n = 1000;
  const ScoreTrace trace = online_ridge_scores(repeated_e1(n, 1), 1.0);
  const ScoreBoundReport report = audit_score_bound(trace, 1);
  CHECK(report.ok);
  CHECK(report.bound == doctest::Approx(2.0 * std::log(1001.0)).epsilon(1e-12));
}

TEST_CASE("verify: score bound audit on the doubling-clique stream") {
  GraphStreamSpec spec;
  spec.d = 6;
  spec.copies = 8;
  spec.base_edge_weight = clique_base_weight(6, 0.5, 1.0);
  const auto rows = gen_doubling_cliques(spec);
  const ScoreTrace trace = online_ridge_scores(rows, 1.0);
  CHECK(audit_score_bound(trace, 6).ok);
}

TEST_CASE("verify: bss count estimate stays below its comparator") {
  const auto rows = identity_rows(5);
  const CountEstimate estimate = expected_count_bss(rows, 0.9, 0.9, 20, 7);
  CHECK(estimate.mean <= estimate.comparator);
  CHECK(estimate.ci_low <= estimate.mean);
  CHECK(estimate.ci_high >= estimate.mean);
}

TEST_CASE("verify: bss count estimate is near zero when lambda dominates") {
  const auto rows = random_rows(100, 4, 21, 0.1);
  const CountEstimate estimate = expected_count_bss(rows, 0.5, 1e6, 5, 3);
  CHECK(estimate.mean <= 1.0);
}

TEST_CASE("verify: bss count estimate smoke and validation") {
  const auto rows = identity_rows(3);
  CHECK_NOTHROW(expected_count_bss(rows, 0.5, 0.5, 2, 1));
  CHECK_THROWS_AS(expected_count_bss(rows, 0.5, 0.5, 1, 1),
                  std::invalid_argument);
}
