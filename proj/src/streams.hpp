#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace orss {

/// Single-consumer row iterator: fixed dimension, rows in order.
class RowSource {
 public:
  virtual ~RowSource() = default;
  virtual int dim() const = 0;
  /// Fills `out` with the next row and returns true, or returns false at end.
  virtual bool next(Vector& out) = 0;
};

/// RowSource over materialized rows.
class VectorSource : public RowSource {
 public:
  explicit VectorSource(std::vector<Vector> rows, int dim_if_empty = 0);
  int dim() const override { return dim_; }
  bool next(Vector& out) override;

 private:
  std::vector<Vector> rows_;
  std::size_t pos_ = 0;
  int dim_;
};

/// n i.i.d. standard normal rows in dimension d, deterministic per seed.
std::vector<Vector> gen_gaussian(std::int64_t n, int d, std::uint64_t seed);

/// Parameters of the doubling-clique stream: `copies` complete graphs on
/// `d` vertices, copy k carrying edge weight base_edge_weight * 2^(k-1)
/// when `doubling` is set.
struct GraphStreamSpec {
  int d = 0;
  int copies = 1;
  double base_edge_weight = 0.0;
  bool doubling = true;
};

/// Base edge weight delta / (d * eps), which gives the first copy's Laplacian
/// all nonzero eigenvalues equal to delta / eps.
double clique_base_weight(int d, double eps, double delta);

/// Scaled incidence rows sqrt(w) * (e_u - e_v) of the clique copies, edges in
/// lexicographic order (u < v) within each copy. copies * d * (d-1) / 2 rows.
std::vector<Vector> gen_doubling_cliques(const GraphStreamSpec& spec);

/// Uniform random permutation of the rows, deterministic per seed.
std::vector<Vector> permute_rows(std::vector<Vector> rows,
                                 std::uint64_t seed);

enum class FileFormat {
  auto_detect,  // by extension on write (.csv/.txt => text), by magic on read
  text,
  binary,
};

/// Rows plus optional per-row weights (used for kept-row files, where the
/// rescale 1/sqrt(p) is already applied to the row and the weight is kept
/// for audit).
struct RowFile {
  std::vector<Vector> rows;
  std::vector<double> weights;  // empty when the file carries none
  int d = 0;
};

/// Writes rows (and weights, when non-empty) to `path`.
/// Text: header line "d=<int>", then one row per line of comma-separated
/// decimals; weighted files carry the weight as an extra trailing field.
/// Binary: magic "ORSS", u32 version=1, u32 d, row-major little-endian f64;
/// weighted files append one f64 weight per row after the row section.
void write_rows(const std::string& path, FileFormat format,
                const std::vector<Vector>& rows,
                const std::vector<double>& weights = {});

/// Reads a row file. `expect_weights` tells the binary reader whether the
/// trailing weight section is present (the text reader detects it from the
/// field count). Errors carry the offending line number for text files.
RowFile read_rows(const std::string& path, bool expect_weights = false);

/// Streaming reader over a row file; text or binary detected from the leading
/// bytes. Rows are surfaced one at a time, so arbitrarily long streams can be
/// consumed in O(d) memory.
class FileRowSource : public RowSource {
 public:
  FileRowSource(const std::string& path, bool expect_weights = false);
  ~FileRowSource() override;
  int dim() const override;
  bool next(Vector& out) override;
  /// Weight attached to the row most recently returned (1.0 when absent).
  double last_weight() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Streaming writer counterpart; rows are written as they arrive.
class RowWriter {
 public:
  RowWriter(const std::string& path, FileFormat format, int d,
            bool with_weights);
  ~RowWriter();
  int dim() const;
  void write(const Vector& row, double weight = 1.0);
  /// Flushes and closes; throws IoError on failure. Idempotent.
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace orss
