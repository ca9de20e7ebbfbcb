#include "orss.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "leverage.hpp"
#include "linalg.hpp"
#include "samplers.hpp"
#include "streams.hpp"
#include "verify.hpp"

namespace {

thread_local std::string g_last_error;

orss_status fail(orss_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
orss_status guarded(Fn&& fn) {
  try {
    fn();
    return ORSS_OK;
  } catch (const orss::DimensionError& e) {
    return fail(ORSS_ERR_DIMENSION_MISMATCH, e.what());
  } catch (const orss::NonFiniteError& e) {
    return fail(ORSS_ERR_NONFINITE, e.what());
  } catch (const orss::ParseError& e) {
    return fail(ORSS_ERR_PARSE, e.what());
  } catch (const orss::IoError& e) {
    return fail(ORSS_ERR_IO, e.what());
  } catch (const orss::InvariantError& e) {
    return fail(ORSS_ERR_INVARIANT, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(ORSS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(ORSS_ERR_UNKNOWN, e.what());
  } catch (...) {
    return fail(ORSS_ERR_UNKNOWN, "unknown error");
  }
}

void require(bool condition, const char* message) {
  if (!condition) {
    throw std::invalid_argument(message);
  }
}

std::vector<orss::Vector> to_rows(const double* rows, int64_t n, int32_t d) {
  require(rows != nullptr || n == 0, "rows must not be NULL");
  require(n >= 0, "row count must be nonnegative");
  require(d >= 1, "dimension must be at least 1");
  std::vector<orss::Vector> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    out.push_back(Eigen::Map<const orss::Vector>(rows + i * d, d));
  }
  return out;
}

double* alloc_doubles(std::size_t count) {
  double* p = static_cast<double*>(std::malloc(count * sizeof(double)));
  if (p == nullptr && count > 0) {
    throw std::bad_alloc();
  }
  return p;
}

double* flatten_rows(const std::vector<orss::Vector>& rows, int d) {
  double* out = alloc_doubles(rows.size() * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::memcpy(out + i * d, rows[i].data(), sizeof(double) * d);
  }
  return out;
}

orss::Algorithm to_algorithm(orss_algorithm algorithm) {
  switch (algorithm) {
    case ORSS_ALGO_ONLINE:
      return orss::Algorithm::online;
    case ORSS_ALGO_SLIM:
      return orss::Algorithm::slim;
    case ORSS_ALGO_BSS:
      return orss::Algorithm::bss;
    case ORSS_ALGO_OFFLINE:
      return orss::Algorithm::offline;
  }
  throw std::invalid_argument("unknown algorithm");
}

orss::FileFormat to_format(orss_format format) {
  switch (format) {
    case ORSS_FORMAT_AUTO:
      return orss::FileFormat::auto_detect;
    case ORSS_FORMAT_TEXT:
      return orss::FileFormat::text;
    case ORSS_FORMAT_BINARY:
      return orss::FileFormat::binary;
  }
  throw std::invalid_argument("unknown file format");
}

void fill_summary(const orss::SamplerStats& stats, orss_summary* out) {
  out->rows_seen = stats.rows_seen;
  out->rows_kept = stats.rows_kept;
  out->sum_scores = stats.sum_scores;
  out->peak_working_rows = stats.peak_working_rows;
}

void fill_certificate(const orss::Certificate& cert, orss_certificate* out) {
  out->min_eig = cert.min_eig;
  out->max_eig = cert.max_eig;
  out->eps = cert.eps;
  out->delta = cert.delta;
  out->passed = cert.passed ? 1 : 0;
  out->kept_rows = static_cast<int64_t>(cert.kept_rows);
  out->bound_rows = cert.bound_rows;
}

}  // namespace

struct orss_sampler {
  std::unique_ptr<orss::RowSampler> impl;
};

struct orss_reader {
  std::unique_ptr<orss::FileRowSource> impl;
};

struct orss_writer {
  std::unique_ptr<orss::RowWriter> impl;
};

extern "C" {

const char* orss_version(void) { return "0.1.0"; }

const char* orss_last_error(void) { return g_last_error.c_str(); }

const char* orss_status_name(orss_status status) {
  switch (status) {
    case ORSS_OK:
      return "ok";
    case ORSS_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case ORSS_ERR_DIMENSION_MISMATCH:
      return "dimension mismatch";
    case ORSS_ERR_NONFINITE:
      return "non-finite input";
    case ORSS_ERR_IO:
      return "i/o error";
    case ORSS_ERR_PARSE:
      return "parse error";
    case ORSS_ERR_INVARIANT:
      return "invariant violation";
    case ORSS_ERR_UNKNOWN:
      break;
  }
  return "unknown error";
}

void orss_free(void* ptr) { std::free(ptr); }

orss_status orss_sampler_create(orss_algorithm algorithm, int32_t d,
                                double eps, double delta, uint64_t seed,
                                orss_sampler** out_sampler) {
  return guarded([&] {
    require(out_sampler != nullptr, "out_sampler must not be NULL");
    auto impl = orss::make_sampler(to_algorithm(algorithm), d, eps, delta,
                                 seed);
    *out_sampler = new orss_sampler{std::move(impl)};
  });
}

orss_status orss_sampler_set_buffering(orss_sampler* sampler,
                                       int32_t enabled) {
  return guarded([&] {
    require(sampler != nullptr, "sampler must not be NULL");
    sampler->impl->set_buffering(enabled != 0);
  });
}

orss_status orss_sampler_step(orss_sampler* sampler, const double* row,
                              int32_t d, orss_decision* out_decision) {
  return guarded([&] {
    require(sampler != nullptr && row != nullptr, "NULL argument");
    const orss::Vector v = Eigen::Map<const orss::Vector>(row, d);
    const orss::SampleDecision decision = sampler->impl->step(v);
    if (out_decision != nullptr) {
      out_decision->kept = decision.kept ? 1 : 0;
      out_decision->probability = decision.probability;
      out_decision->rescale = decision.rescale;
      out_decision->score_used = decision.score_used;
    }
  });
}

orss_status orss_sampler_step_block(orss_sampler* sampler, const double* rows,
                                    int64_t block_len, int32_t d,
                                    int32_t sketch_dim,
                                    orss_decision* out_decisions) {
  return guarded([&] {
    require(sampler != nullptr, "sampler must not be NULL");
    auto* online = dynamic_cast<orss::OnlineSampler*>(sampler->impl.get());
    require(online != nullptr, "block stepping requires the online sampler");
    const std::vector<orss::Vector> block = to_rows(rows, block_len, d);
    const std::vector<double> quadratics =
        online->sketch_quadratics(block, sketch_dim);
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double score =
          std::min((1.0 + online->eps()) * quadratics[i], 1.0);
      const double p = std::min(online->c() * score, 1.0);
      const orss::SampleDecision decision =
          online->step_with_probability(block[i], p, score);
      if (out_decisions != nullptr) {
        out_decisions[i].kept = decision.kept ? 1 : 0;
        out_decisions[i].probability = decision.probability;
        out_decisions[i].rescale = decision.rescale;
        out_decisions[i].score_used = decision.score_used;
      }
    }
  });
}

orss_status orss_sampler_summary(const orss_sampler* sampler,
                                 orss_summary* out_summary) {
  return guarded([&] {
    require(sampler != nullptr && out_summary != nullptr, "NULL argument");
    fill_summary(sampler->impl->stats(), out_summary);
  });
}

int64_t orss_sampler_kept_count(const orss_sampler* sampler) {
  return sampler == nullptr ? 0 : sampler->impl->stats().rows_kept;
}

orss_status orss_sampler_copy_kept(const orss_sampler* sampler,
                                   double* out_rows, double* out_weights) {
  return guarded([&] {
    require(sampler != nullptr, "sampler must not be NULL");
    const auto& rows = sampler->impl->kept_rows();
    const auto& weights = sampler->impl->kept_weights();
    const int d = sampler->impl->dim();
    if (out_rows != nullptr) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        std::memcpy(out_rows + i * d, rows[i].data(), sizeof(double) * d);
      }
    }
    if (out_weights != nullptr) {
      std::memcpy(out_weights, weights.data(),
                  sizeof(double) * weights.size());
    }
  });
}

void orss_sampler_destroy(orss_sampler* sampler) { delete sampler; }

orss_status orss_offline_run(const double* rows, int64_t n, int32_t d,
                             double eps, double delta, uint64_t seed,
                             double** out_kept_rows, double** out_weights,
                             int64_t* out_kept, orss_summary* out_summary) {
  return guarded([&] {
    require(out_kept != nullptr, "out_kept must not be NULL");
    const orss::RunResult result =
        orss::offline_sample(to_rows(rows, n, d), eps, delta, seed);
    *out_kept = result.stats.rows_kept;
    if (out_kept_rows != nullptr) {
      *out_kept_rows = flatten_rows(result.kept_rows, d);
    }
    if (out_weights != nullptr) {
      *out_weights = alloc_doubles(result.kept_weights.size());
      std::memcpy(*out_weights, result.kept_weights.data(),
                  sizeof(double) * result.kept_weights.size());
    }
    if (out_summary != nullptr) {
      fill_summary(result.stats, out_summary);
    }
  });
}

orss_status orss_ridge_scores(const double* rows, int64_t n, int32_t d,
                              double lambda, orss_score_mode mode,
                              double* out_scores, double* out_sum,
                              double* out_spectral_norm_sq) {
  return guarded([&] {
    require(out_scores != nullptr || n == 0, "out_scores must not be NULL");
    const std::vector<orss::Vector> input = to_rows(rows, n, d);
    orss::ScoreTrace trace;
    switch (mode) {
      case ORSS_SCORES_ONLINE:
        trace = orss::online_ridge_scores(input, lambda);
        break;
      case ORSS_SCORES_INCLUSIVE:
        trace = orss::online_ridge_scores_inclusive(input, lambda);
        break;
      case ORSS_SCORES_OFFLINE:
        trace = orss::offline_ridge_scores(input, lambda);
        break;
      default:
        throw std::invalid_argument("unknown score mode");
    }
    if (out_scores != nullptr) {
      std::memcpy(out_scores, trace.scores.data(),
                  sizeof(double) * trace.scores.size());
    }
    if (out_sum != nullptr) {
      *out_sum = trace.sum();
    }
    if (out_spectral_norm_sq != nullptr) {
      *out_spectral_norm_sq = trace.spectral_norm_sq;
    }
  });
}

orss_status orss_score_sum_bound(int32_t d, double spectral_norm_sq,
                                 double lambda, double* out_bound) {
  return guarded([&] {
    require(out_bound != nullptr, "out_bound must not be NULL");
    *out_bound = orss::score_sum_bound(d, spectral_norm_sq, lambda);
  });
}

orss_status orss_certify(const double* original_rows, int64_t n, int32_t d,
                         const double* kept_rows, int64_t kept, double eps,
                         double delta, orss_certificate* out_certificate) {
  return guarded([&] {
    require(out_certificate != nullptr, "out_certificate must not be NULL");
    const orss::Certificate cert =
        orss::certify(to_rows(original_rows, n, d),
                      to_rows(kept_rows, kept, d), eps, delta);
    fill_certificate(cert, out_certificate);
  });
}

orss_status orss_gen_gaussian(int64_t n, int32_t d, uint64_t seed,
                              double** out_rows) {
  return guarded([&] {
    require(out_rows != nullptr, "out_rows must not be NULL");
    const std::vector<orss::Vector> rows = orss::gen_gaussian(n, d, seed);
    *out_rows = flatten_rows(rows, d);
  });
}

orss_status orss_gen_cliques(int32_t d, int32_t copies, double base_weight,
                             int32_t doubling, double** out_rows,
                             int64_t* out_n) {
  return guarded([&] {
    require(out_rows != nullptr && out_n != nullptr, "NULL argument");
    orss::GraphStreamSpec spec;
    spec.d = d;
    spec.copies = copies;
    spec.base_edge_weight = base_weight;
    spec.doubling = doubling != 0;
    const std::vector<orss::Vector> rows = orss::gen_doubling_cliques(spec);
    *out_rows = flatten_rows(rows, d);
    *out_n = static_cast<int64_t>(rows.size());
  });
}

orss_status orss_clique_base_weight(int32_t d, double eps, double delta,
                                    double* out_weight) {
  return guarded([&] {
    require(out_weight != nullptr, "out_weight must not be NULL");
    *out_weight = orss::clique_base_weight(d, eps, delta);
  });
}

orss_status orss_permute(const double* rows, int64_t n, int32_t d,
                         uint64_t seed, double** out_rows) {
  return guarded([&] {
    require(out_rows != nullptr, "out_rows must not be NULL");
    const std::vector<orss::Vector> permuted =
        orss::permute_rows(to_rows(rows, n, d), seed);
    *out_rows = flatten_rows(permuted, d);
  });
}

orss_status orss_write_rows(const char* path, orss_format format,
                            const double* rows, int64_t n, int32_t d,
                            const double* weights) {
  return guarded([&] {
    require(path != nullptr, "path must not be NULL");
    std::vector<double> weight_vec;
    if (weights != nullptr) {
      weight_vec.assign(weights, weights + n);
    }
    orss::write_rows(path, to_format(format), to_rows(rows, n, d),
                     weight_vec);
  });
}

orss_status orss_read_rows(const char* path, int32_t with_weights,
                           double** out_rows, int64_t* out_n, int32_t* out_d,
                           double** out_weights) {
  return guarded([&] {
    require(path != nullptr && out_rows != nullptr && out_n != nullptr &&
                out_d != nullptr,
            "NULL argument");
    const orss::RowFile file = orss::read_rows(path, with_weights != 0);
    *out_rows = flatten_rows(file.rows, file.d);
    *out_n = static_cast<int64_t>(file.rows.size());
    *out_d = file.d;
    if (out_weights != nullptr) {
      if (file.weights.empty()) {
        *out_weights = nullptr;
      } else {
        *out_weights = alloc_doubles(file.weights.size());
        std::memcpy(*out_weights, file.weights.data(),
                    sizeof(double) * file.weights.size());
      }
    }
  });
}

orss_status orss_reader_open(const char* path, int32_t with_weights,
                             orss_reader** out_reader, int32_t* out_d) {
  return guarded([&] {
    require(path != nullptr && out_reader != nullptr, "NULL argument");
    auto impl =
        std::make_unique<orss::FileRowSource>(path, with_weights != 0);
    if (out_d != nullptr) {
      *out_d = impl->dim();
    }
    *out_reader = new orss_reader{std::move(impl)};
  });
}

orss_status orss_reader_next(orss_reader* reader, double* row,
                             double* out_weight, int32_t* out_has_row) {
  return guarded([&] {
    require(reader != nullptr && row != nullptr && out_has_row != nullptr,
            "NULL argument");
    orss::Vector v;
    if (reader->impl->next(v)) {
      std::memcpy(row, v.data(), sizeof(double) * v.size());
      if (out_weight != nullptr) {
        *out_weight = reader->impl->last_weight();
      }
      *out_has_row = 1;
    } else {
      *out_has_row = 0;
    }
  });
}

void orss_reader_close(orss_reader* reader) { delete reader; }

orss_status orss_writer_open(const char* path, orss_format format, int32_t d,
                             int32_t with_weights, orss_writer** out_writer) {
  return guarded([&] {
    require(path != nullptr && out_writer != nullptr, "NULL argument");
    auto impl = std::make_unique<orss::RowWriter>(path, to_format(format), d,
                                                  with_weights != 0);
    *out_writer = new orss_writer{std::move(impl)};
  });
}

orss_status orss_writer_row(orss_writer* writer, const double* row,
                            double weight) {
  return guarded([&] {
    require(writer != nullptr && row != nullptr, "NULL argument");
    writer->impl->write(
        Eigen::Map<const orss::Vector>(row, writer->impl->dim()), weight);
  });
}

orss_status orss_writer_close(orss_writer* writer) {
  orss_status status = guarded([&] {
    if (writer != nullptr) {
      writer->impl->close();
    }
  });
  delete writer;
  return status;
}

}  // extern "C"
