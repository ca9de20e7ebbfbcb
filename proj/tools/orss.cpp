// orss command line: generators, streaming samplers, verification and
// benchmarks over row-stream files. Talks to the library exclusively through
// the C API in orss.h.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "orss.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCertificateFail = 1;
constexpr int kExitUsage = 2;

[[noreturn]] void die(const std::string& message, orss_status status) {
  std::cerr << "error: " << message;
  const char* detail = orss_last_error();
  if (status != ORSS_OK && detail != nullptr && detail[0] != '\0') {
    std::cerr << ": " << detail;
  }
  std::cerr << "\n";
  std::exit(kExitUsage);
}

void check(orss_status status, const std::string& context) {
  if (status != ORSS_OK) {
    die(context + " (" + orss_status_name(status) + ")", status);
  }
}

struct Options {
  std::string algo = "online";
  double eps = 0.5;
  double delta = 0.1;
  std::uint64_t seed = 0;
  std::string input;
  std::string output;
  std::string kept;
  std::string generator;
  int batch = 0;
  int sketch_dim = 0;
  int trials = 1;
  std::int64_t n = 0;
  int d = 0;
  int copies = 1;  // --N
};

orss_algorithm parse_algorithm(const std::string& name) {
  if (name == "online") return ORSS_ALGO_ONLINE;
  if (name == "slim") return ORSS_ALGO_SLIM;
  if (name == "bss") return ORSS_ALGO_BSS;
  if (name == "offline") return ORSS_ALGO_OFFLINE;
  die("unknown algorithm '" + name + "'", ORSS_OK);
}

json certificate_json(const orss_certificate& cert) {
  return json{{"min_eig", cert.min_eig},   {"max_eig", cert.max_eig},
              {"eps", cert.eps},           {"delta", cert.delta},
              {"passed", cert.passed != 0}, {"kept_rows", cert.kept_rows},
              {"bound_rows", cert.bound_rows}};
}

// ---- generate -------------------------------------------------------------

int cmd_generate(const Options& opt) {
  if (opt.output.empty()) {
    die("generate requires --out", ORSS_OK);
  }
  double* rows = nullptr;
  std::int64_t n = 0;
  int d = opt.d;
  if (opt.generator == "gaussian") {
    if (opt.n <= 0 || opt.d <= 0) {
      die("gaussian generator requires --n and --d", ORSS_OK);
    }
    check(orss_gen_gaussian(opt.n, opt.d, opt.seed, &rows),
          "generating gaussian rows");
    n = opt.n;
  } else if (opt.generator == "cliques") {
    double base = 0.0;
    check(orss_clique_base_weight(opt.d, opt.eps, opt.delta, &base),
          "computing clique edge weight");
    check(orss_gen_cliques(opt.d, opt.copies, base, 1, &rows, &n),
          "generating clique stream");
  } else if (opt.generator == "permute") {
    if (opt.input.empty()) {
      die("permute generator requires --in", ORSS_OK);
    }
    double* original = nullptr;
    std::int64_t in_n = 0;
    int32_t in_d = 0;
    check(orss_read_rows(opt.input.c_str(), 0, &original, &in_n, &in_d,
                         nullptr),
          "reading " + opt.input);
    check(orss_permute(original, in_n, in_d, opt.seed, &rows),
          "permuting rows");
    orss_free(original);
    n = in_n;
    d = in_d;
  } else {
    die("unknown generator '" + opt.generator + "'", ORSS_OK);
  }
  check(orss_write_rows(opt.output.c_str(), ORSS_FORMAT_AUTO, rows, n, d,
                        nullptr),
        "writing " + opt.output);
  orss_free(rows);
  std::cerr << "wrote " << n << " rows of dimension " << d << " to "
            << opt.output << "\n";
  return kExitOk;
}

// ---- sample ---------------------------------------------------------------

void emit_stats(std::int64_t kept, std::int64_t n, int d, double sum_scores,
                std::int64_t peak_rows, double seconds) {
  const json stats = {{"kept", kept},
                      {"n", n},
                      {"d", d},
                      {"sum_scores", sum_scores},
                      {"peak_memory_rows", peak_rows},
                      {"seconds", seconds}};
  std::cout << stats.dump() << "\n";
}

int cmd_sample(const Options& opt) {
  if (opt.input.empty() || opt.output.empty()) {
    die("sample requires --in and --out", ORSS_OK);
  }
  const orss_algorithm algo = parse_algorithm(opt.algo);
  const auto start = std::chrono::steady_clock::now();

  if (algo == ORSS_ALGO_OFFLINE) {
    double* rows = nullptr;
    std::int64_t n = 0;
    int32_t d = 0;
    check(orss_read_rows(opt.input.c_str(), 0, &rows, &n, &d, nullptr),
          "reading " + opt.input);
    double* kept_rows = nullptr;
    double* weights = nullptr;
    std::int64_t kept = 0;
    orss_summary summary;
    check(orss_offline_run(rows, n, d, opt.eps, opt.delta, opt.seed,
                           &kept_rows, &weights, &kept, &summary),
          "offline sampling");
    orss_free(rows);
    check(orss_write_rows(opt.output.c_str(), ORSS_FORMAT_AUTO, kept_rows,
                          kept, d, weights),
          "writing " + opt.output);
    orss_free(kept_rows);
    orss_free(weights);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    emit_stats(kept, n, d, summary.sum_scores, summary.peak_working_rows,
               seconds);
    std::cerr << "offline: kept " << kept << " of " << n << " rows\n";
    return kExitOk;
  }

  if (opt.batch > 0 && algo != ORSS_ALGO_ONLINE) {
    die("--batch requires --algo online", ORSS_OK);
  }

  orss_reader* reader = nullptr;
  int32_t d = 0;
  check(orss_reader_open(opt.input.c_str(), 0, &reader, &d),
        "reading " + opt.input);
  orss_sampler* sampler = nullptr;
  check(orss_sampler_create(algo, d, opt.eps, opt.delta, opt.seed, &sampler),
        "creating sampler");
  check(orss_sampler_set_buffering(sampler, 0), "configuring sampler");
  orss_writer* writer = nullptr;
  check(orss_writer_open(opt.output.c_str(), ORSS_FORMAT_AUTO, d, 1, &writer),
        "writing " + opt.output);

  std::vector<double> row(static_cast<std::size_t>(d));
  std::vector<double> scaled(static_cast<std::size_t>(d));
  std::int64_t n = 0;
  int32_t has_row = 0;

  auto write_kept = [&](const double* data, const orss_decision& decision) {
    if (!decision.kept) {
      return;
    }
    for (int j = 0; j < d; ++j) {
      scaled[static_cast<std::size_t>(j)] = data[j] * decision.rescale;
    }
    check(orss_writer_row(writer, scaled.data(), decision.rescale),
          "writing kept row");
  };

  if (opt.batch > 0) {
    const int sketch = opt.sketch_dim > 0 ? opt.sketch_dim : d;
    std::vector<double> block;
    std::vector<orss_decision> decisions;
    auto flush = [&] {
      const std::int64_t len = static_cast<std::int64_t>(block.size()) / d;
      if (len == 0) {
        return;
      }
      decisions.resize(static_cast<std::size_t>(len));
      check(orss_sampler_step_block(sampler, block.data(), len, d, sketch,
                                    decisions.data()),
            "sampling block");
      for (std::int64_t i = 0; i < len; ++i) {
        write_kept(block.data() + i * d, decisions[static_cast<std::size_t>(i)]);
      }
      block.clear();
    };
    while (true) {
      check(orss_reader_next(reader, row.data(), nullptr, &has_row),
            "reading " + opt.input);
      if (!has_row) {
        break;
      }
      ++n;
      block.insert(block.end(), row.begin(), row.end());
      if (static_cast<int>(block.size()) / d == opt.batch) {
        flush();
      }
    }
    flush();
  } else {
    orss_decision decision;
    while (true) {
      check(orss_reader_next(reader, row.data(), nullptr, &has_row),
            "reading " + opt.input);
      if (!has_row) {
        break;
      }
      ++n;
      check(orss_sampler_step(sampler, row.data(), d, &decision),
            "sampling row");
      write_kept(row.data(), decision);
    }
  }

  orss_reader_close(reader);
  check(orss_writer_close(writer), "closing " + opt.output);
  orss_summary summary;
  check(orss_sampler_summary(sampler, &summary), "collecting stats");
  orss_sampler_destroy(sampler);

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  emit_stats(summary.rows_kept, n, d, summary.sum_scores,
             summary.peak_working_rows, seconds);
  std::cerr << opt.algo << ": kept " << summary.rows_kept << " of " << n
            << " rows\n";
  return kExitOk;
}

// ---- verify ---------------------------------------------------------------

int cmd_verify(const Options& opt) {
  if (opt.input.empty() || opt.kept.empty()) {
    die("verify requires --in and --kept", ORSS_OK);
  }
  double* original = nullptr;
  std::int64_t n = 0;
  int32_t d = 0;
  check(orss_read_rows(opt.input.c_str(), 0, &original, &n, &d, nullptr),
        "reading " + opt.input);
  double* kept = nullptr;
  std::int64_t kept_n = 0;
  int32_t kept_d = 0;
  check(orss_read_rows(opt.kept.c_str(), 1, &kept, &kept_n, &kept_d, nullptr),
        "reading " + opt.kept);
  if (kept_d != d) {
    die("dimension mismatch between --in and --kept", ORSS_OK);
  }
  orss_certificate cert;
  check(orss_certify(original, n, d, kept, kept_n, opt.eps, opt.delta, &cert),
        "certifying");
  orss_free(original);
  orss_free(kept);
  std::cout << certificate_json(cert).dump() << "\n";
  std::cerr << (cert.passed ? "PASS" : "FAIL") << ": eigenvalue margins ["
            << cert.min_eig << ", " << cert.max_eig << "] vs [" << 1 - opt.eps
            << ", " << 1 + opt.eps << "]\n";
  return cert.passed ? kExitOk : kExitCertificateFail;
}

// ---- bench ----------------------------------------------------------------

struct TrialResult {
  std::uint64_t seed = 0;
  std::int64_t kept = 0;
  bool passed = false;
  double sum_scores = 0.0;
};

TrialResult run_trial(orss_algorithm algo, const Options& opt,
                      const double* rows, std::int64_t n, int d,
                      std::uint64_t seed) {
  TrialResult result;
  result.seed = seed;
  std::vector<double> kept_rows;
  if (algo == ORSS_ALGO_OFFLINE) {
    double* kept = nullptr;
    std::int64_t kept_n = 0;
    orss_summary summary;
    check(orss_offline_run(rows, n, d, opt.eps, opt.delta, seed, &kept,
                           nullptr, &kept_n, &summary),
          "offline trial");
    kept_rows.assign(kept, kept + kept_n * d);
    orss_free(kept);
    result.kept = kept_n;
    result.sum_scores = summary.sum_scores;
  } else {
    orss_sampler* sampler = nullptr;
    check(orss_sampler_create(algo, d, opt.eps, opt.delta, seed, &sampler),
          "creating sampler");
    for (std::int64_t i = 0; i < n; ++i) {
      check(orss_sampler_step(sampler, rows + i * d, d, nullptr),
            "sampling row");
    }
    orss_summary summary;
    check(orss_sampler_summary(sampler, &summary), "collecting stats");
    result.kept = summary.rows_kept;
    result.sum_scores = summary.sum_scores;
    kept_rows.resize(static_cast<std::size_t>(result.kept) * d);
    check(orss_sampler_copy_kept(sampler, kept_rows.data(), nullptr),
          "copying kept rows");
    orss_sampler_destroy(sampler);
  }
  orss_certificate cert;
  check(orss_certify(rows, n, d, kept_rows.data(), result.kept, opt.eps,
                     opt.delta, &cert),
        "certifying trial");
  result.passed = cert.passed != 0;
  return result;
}

int bench_threads(int trials) {
  unsigned threads = std::thread::hardware_concurrency();
  if (threads == 0) {
    threads = 1;
  }
  if (const char* env = std::getenv("ORSS_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) {
      threads = std::min<unsigned>(threads, static_cast<unsigned>(cap));
    }
  }
  return static_cast<int>(
      std::min<unsigned>(threads, static_cast<unsigned>(trials)));
}

int cmd_bench(const Options& opt) {
  if (opt.input.empty()) {
    die("bench requires --in", ORSS_OK);
  }
  if (opt.trials < 1) {
    die("--trials must be at least 1", ORSS_OK);
  }
  const orss_algorithm algo = parse_algorithm(opt.algo);
  double* rows = nullptr;
  std::int64_t n = 0;
  int32_t d = 0;
  check(orss_read_rows(opt.input.c_str(), 0, &rows, &n, &d, nullptr),
        "reading " + opt.input);

  // Theoretical comparator for the kept-row count: the barrier sampler uses
  // its expected-count bound, everything else the certificate comparator.
  double bound = 0.0;
  if (algo == ORSS_ALGO_BSS) {
    double sum = 0.0;
    std::vector<double> scores(static_cast<std::size_t>(n));
    check(orss_ridge_scores(rows, n, d, 2.0 * opt.delta / opt.eps,
                            ORSS_SCORES_INCLUSIVE, scores.data(), &sum,
                            nullptr),
          "scoring input");
    bound = 8.0 / (opt.eps * opt.eps) * sum;
  } else {
    orss_certificate cert;
    check(orss_certify(rows, n, d, rows, n, opt.eps, opt.delta, &cert),
          "computing comparator");
    bound = cert.bound_rows;
  }

  std::vector<TrialResult> results(static_cast<std::size_t>(opt.trials));
  std::atomic<int> next{0};
  const int workers = bench_threads(opt.trials);
  auto worker = [&] {
    while (true) {
      const int t = next.fetch_add(1);
      if (t >= opt.trials) {
        return;
      }
      results[static_cast<std::size_t>(t)] =
          run_trial(algo, opt, rows, n, d, opt.seed + static_cast<std::uint64_t>(t));
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) {
    pool.emplace_back(worker);
  }
  worker();
  for (std::thread& thread : pool) {
    thread.join();
  }
  orss_free(rows);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!opt.output.empty()) {
    file.open(opt.output);
    if (!file) {
      die("cannot open " + opt.output, ORSS_OK);
    }
    out = &file;
  }
  *out << "seed,algorithm,kept,passed,sum_scores,bound\n";
  std::int64_t kept_total = 0;
  int pass_total = 0;
  for (const TrialResult& r : results) {
    *out << r.seed << ',' << opt.algo << ',' << r.kept << ','
         << (r.passed ? 1 : 0) << ',' << r.sum_scores << ',' << bound << "\n";
    kept_total += r.kept;
    pass_total += r.passed ? 1 : 0;
  }
  std::cerr << "bench: mean kept " << double(kept_total) / opt.trials
            << ", pass rate " << double(pass_total) / opt.trials << ", bound "
            << bound << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online row sampling for spectral approximation"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--eps", opt.eps, "multiplicative error in (0,1)");
    cmd->add_option("--delta", opt.delta, "additive error > 0");
    cmd->add_option("--seed", opt.seed, "rng seed");
  };

  CLI::App* generate = app.add_subcommand("generate", "write a row stream");
  add_common(generate);
  generate->add_option("--gen", opt.generator, "gaussian|cliques|permute")
      ->required();
  generate->add_option("--n", opt.n, "rows (gaussian)");
  generate->add_option("--d", opt.d, "dimension / vertex count");
  generate->add_option("--N", opt.copies, "clique copies");
  generate->add_option("--in", opt.input, "input stream (permute)");
  generate->add_option("--out", opt.output, "output path")->required();

  CLI::App* sample = app.add_subcommand("sample", "stream rows through a sampler");
  add_common(sample);
  sample->add_option("--algo", opt.algo, "online|slim|bss|offline");
  sample->add_option("--in", opt.input, "input stream")->required();
  sample->add_option("--out", opt.output, "kept rows output")->required();
  sample->add_option("--batch", opt.batch, "block size (online only)");
  sample->add_option("--sketch-dim", opt.sketch_dim,
                     "sketch columns for batch scoring");

  CLI::App* verify = app.add_subcommand("verify", "certify kept rows");
  add_common(verify);
  verify->add_option("--in", opt.input, "original stream")->required();
  verify->add_option("--kept", opt.kept, "kept rows with weights")->required();

  CLI::App* bench = app.add_subcommand("bench", "repeated trials, csv output");
  add_common(bench);
  bench->add_option("--algo", opt.algo, "online|slim|bss|offline");
  bench->add_option("--in", opt.input, "input stream")->required();
  bench->add_option("--trials", opt.trials, "number of trials");
  bench->add_option("--out", opt.output, "csv path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(opt);
    if (sample->parsed()) return cmd_sample(opt);
    if (verify->parsed()) return cmd_verify(opt);
    if (bench->parsed()) return cmd_bench(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
