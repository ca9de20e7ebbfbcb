#include "streams.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <utility>

#include "rng.hpp"

namespace orss {

VectorSource::VectorSource(std::vector<Vector> rows, int dim_if_empty)
    : rows_(std::move(rows)), dim_(dim_if_empty) {
  if (!rows_.empty()) {
    dim_ = static_cast<int>(rows_.front().size());
  }
}

bool VectorSource::next(Vector& out) {
  if (pos_ >= rows_.size()) {
    return false;
  }
  out = rows_[pos_++];
  return true;
}

std::vector<Vector> gen_gaussian(std::int64_t n, int d, std::uint64_t seed) {
  if (n < 0 || d < 1) {
    throw std::invalid_argument("gen_gaussian requires n >= 0 and d >= 1");
  }
  Rng rng(seed);
  std::vector<Vector> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    Vector row(d);
    for (int j = 0; j < d; ++j) {
      row[j] = rng.gaussian();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double clique_base_weight(int d, double eps, double delta) {
  if (d < 2) {
    throw std::invalid_argument("clique streams require d >= 2");
  }
  if (!(eps > 0.0) || !(delta > 0.0)) {
    throw std::invalid_argument("eps and delta must be positive");
  }
  return delta / (static_cast<double>(d) * eps);
}

std::vector<Vector> gen_doubling_cliques(const GraphStreamSpec& spec) {
  if (spec.d < 2) {
    throw std::invalid_argument("clique streams require d >= 2");
  }
  if (spec.copies < 1) {
    throw std::invalid_argument("clique streams require at least one copy");
  }
  if (!std::isfinite(spec.base_edge_weight) || spec.base_edge_weight <= 0.0) {
    throw std::invalid_argument("edge weight must be positive");
  }
  std::vector<Vector> rows;
  rows.reserve(static_cast<std::size_t>(spec.copies) * spec.d * (spec.d - 1) /
               2);
  double weight = spec.base_edge_weight;
  for (int copy = 0; copy < spec.copies; ++copy) {
    const double s = std::sqrt(weight);
    for (int u = 0; u < spec.d; ++u) {
      for (int v = u + 1; v < spec.d; ++v) {
        Vector row = Vector::Zero(spec.d);
        row[u] = s;
        row[v] = -s;
        rows.push_back(std::move(row));
      }
    }
    if (spec.doubling) {
      weight *= 2.0;
    }
  }
  return rows;
}

std::vector<Vector> permute_rows(std::vector<Vector> rows,
                                 std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = rows.size(); i > 1; --i) {
    std::swap(rows[i - 1], rows[rng.below(i)]);
  }
  return rows;
}

namespace {

constexpr char kMagic[4] = {'O', 'R', 'S', 'S'};
constexpr std::uint32_t kVersion = 1;

bool text_by_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) {
    return false;
  }
  const std::string ext = path.substr(dot);
  return ext == ".csv" || ext == ".txt" || ext == ".text";
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) {
    buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  }
  return v;
}

void write_f64(std::ostream& out, double x) {
  static_assert(sizeof(double) == 8);
  out.write(reinterpret_cast<const char*>(&x), 8);  // host is little-endian
}

double read_f64(std::istream& in) {
  double x = 0.0;
  in.read(reinterpret_cast<char*>(&x), 8);
  return x;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

/// Splits a comma-separated line into doubles. Returns false on any
/// malformed field.
bool parse_fields(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(',', start);
    std::size_t stop = end == std::string::npos ? line.size() : end;
    while (start < stop && (line[start] == ' ' || line[start] == '\t')) {
      ++start;
    }
    std::size_t trimmed = stop;
    while (trimmed > start &&
           (line[trimmed - 1] == ' ' || line[trimmed - 1] == '\t' ||
            line[trimmed - 1] == '\r')) {
      --trimmed;
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(line.data() + start, line.data() + trimmed, value);
    if (ec != std::errc() || ptr != line.data() + trimmed) {
      return false;
    }
    out.push_back(value);
    if (end == std::string::npos) {
      return true;
    }
    start = end + 1;
  }
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

int parse_header(const std::string& path, const std::string& line) {
  if (line.rfind("d=", 0) != 0) {
    parse_fail(path, 1, "expected header line \"d=<int>\"");
  }
  int d = 0;
  std::size_t stop = line.size();
  while (stop > 2 && (line[stop - 1] == '\r' || line[stop - 1] == ' ')) {
    --stop;
  }
  const auto [ptr, ec] = std::from_chars(line.data() + 2, line.data() + stop, d);
  if (ec != std::errc() || ptr != line.data() + stop || d < 1) {
    parse_fail(path, 1, "invalid dimension in header");
  }
  return d;
}

}  // namespace

void write_rows(const std::string& path, FileFormat format,
                const std::vector<Vector>& rows,
                const std::vector<double>& weights) {
  if (!weights.empty() && weights.size() != rows.size()) {
    throw std::invalid_argument("weights must be empty or match row count");
  }
  FileFormat fmt = format;
  if (fmt == FileFormat::auto_detect) {
    fmt = text_by_extension(path) ? FileFormat::text : FileFormat::binary;
  }
  int d = rows.empty() ? 1 : static_cast<int>(rows.front().size());
  RowWriter writer(path, fmt, d, !weights.empty());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    writer.write(rows[i], weights.empty() ? 1.0 : weights[i]);
  }
  writer.close();
}

RowFile read_rows(const std::string& path, bool expect_weights) {
  FileRowSource source(path, expect_weights);
  RowFile file;
  file.d = source.dim();
  Vector row;
  while (source.next(row)) {
    file.rows.push_back(row);
    file.weights.push_back(source.last_weight());
  }
  if (!expect_weights) {
    // Text files may still carry weights; keep them only if any differ from 1.
    const bool meaningful =
        std::any_of(file.weights.begin(), file.weights.end(),
                    [](double w) { return w != 1.0; });
    if (!meaningful) {
      file.weights.clear();
    }
  }
  return file;
}

struct FileRowSource::Impl {
  std::string path;
  std::ifstream in;
  bool binary = false;
  bool has_weights = false;
  int d = 0;
  std::int64_t rows_total = 0;   // binary only
  std::int64_t rows_read = 0;
  std::vector<double> weight_section;  // binary weighted files
  std::size_t line_no = 1;       // text: last line consumed
  double last_weight = 1.0;
  int text_fields = 0;           // 0 until the first data line fixes it
};

FileRowSource::FileRowSource(const std::string& path, bool expect_weights)
    : impl_(new Impl) {
  impl_->path = path;
  impl_->in.open(path, std::ios::binary);
  if (!impl_->in) {
    throw IoError("cannot open " + path);
  }
  char magic[4] = {0, 0, 0, 0};
  impl_->in.read(magic, 4);
  if (impl_->in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) {
    impl_->binary = true;
    const std::uint32_t version = read_u32(impl_->in);
    if (version != kVersion) {
      throw ParseError(path + ": unsupported version " +
                       std::to_string(version));
    }
    const std::uint32_t d = read_u32(impl_->in);
    if (!impl_->in || d < 1) {
      throw ParseError(path + ": invalid header");
    }
    impl_->d = static_cast<int>(d);
    impl_->has_weights = expect_weights;
    impl_->in.seekg(0, std::ios::end);
    const std::int64_t payload = static_cast<std::int64_t>(impl_->in.tellg()) - 12;
    impl_->in.seekg(12, std::ios::beg);
    const std::int64_t row_bytes =
        8 * static_cast<std::int64_t>(d) + (expect_weights ? 8 : 0);
    if (payload < 0 || payload % row_bytes != 0) {
      throw ParseError(path + ": file size does not match header");
    }
    impl_->rows_total = payload / row_bytes;
    if (expect_weights && impl_->rows_total > 0) {
      // Weight section trails all rows; load it up front (n doubles).
      impl_->weight_section.resize(static_cast<std::size_t>(impl_->rows_total));
      impl_->in.seekg(12 + 8 * impl_->rows_total * d, std::ios::beg);
      impl_->in.read(reinterpret_cast<char*>(impl_->weight_section.data()),
                     8 * impl_->rows_total);
      if (!impl_->in) {
        throw IoError(path + ": failed reading weight section");
      }
      impl_->in.seekg(12, std::ios::beg);
    }
  } else {
    // Text stream: first line is the header.
    impl_->in.close();
    impl_->in.open(path);
    if (!impl_->in) {
      throw IoError("cannot open " + path);
    }
    std::string header;
    if (!std::getline(impl_->in, header)) {
      throw ParseError(path + ":1: missing header line");
    }
    impl_->d = parse_header(path, header);
  }
}

FileRowSource::~FileRowSource() = default;

int FileRowSource::dim() const { return impl_->d; }

double FileRowSource::last_weight() const { return impl_->last_weight; }

bool FileRowSource::next(Vector& out) {
  Impl& s = *impl_;
  if (s.binary) {
    if (s.rows_read >= s.rows_total) {
      return false;
    }
    out.resize(s.d);
    for (int j = 0; j < s.d; ++j) {
      out[j] = read_f64(s.in);
    }
    if (!s.in) {
      throw IoError(s.path + ": truncated row data");
    }
    s.last_weight = s.has_weights
                        ? s.weight_section[static_cast<std::size_t>(s.rows_read)]
                        : 1.0;
    ++s.rows_read;
    return true;
  }
  std::string line;
  std::vector<double> fields;
  while (std::getline(s.in, line)) {
    ++s.line_no;
    if (is_blank(line)) {
      continue;
    }
    if (!parse_fields(line, fields)) {
      parse_fail(s.path, s.line_no, "malformed row");
    }
    const int n = static_cast<int>(fields.size());
    if (s.text_fields == 0) {
      if (n != s.d && n != s.d + 1) {
        parse_fail(s.path, s.line_no,
                   "row has " + std::to_string(n) + " fields, expected " +
                       std::to_string(s.d) + " (or " + std::to_string(s.d + 1) +
                       " with a weight)");
      }
      s.text_fields = n;
    } else if (n != s.text_fields) {
      parse_fail(s.path, s.line_no,
                 "row has " + std::to_string(n) + " fields, expected " +
                     std::to_string(s.text_fields));
    }
    out.resize(s.d);
    for (int j = 0; j < s.d; ++j) {
      out[j] = fields[static_cast<std::size_t>(j)];
    }
    s.last_weight = s.text_fields == s.d + 1
                        ? fields[static_cast<std::size_t>(s.d)]
                        : 1.0;
    return true;
  }
  return false;
}

struct RowWriter::Impl {
  std::string path;
  std::ofstream out;
  bool binary = false;
  bool with_weights = false;
  int d = 0;
  std::vector<double> weights;  // binary: flushed after the row section
  bool closed = false;
};

RowWriter::RowWriter(const std::string& path, FileFormat format, int d,
                     bool with_weights)
    : impl_(new Impl) {
  if (d < 1) {
    throw std::invalid_argument("row files require d >= 1");
  }
  FileFormat fmt = format;
  if (fmt == FileFormat::auto_detect) {
    fmt = text_by_extension(path) ? FileFormat::text : FileFormat::binary;
  }
  impl_->path = path;
  impl_->binary = fmt == FileFormat::binary;
  impl_->with_weights = with_weights;
  impl_->d = d;
  impl_->out.open(path, impl_->binary ? std::ios::binary | std::ios::trunc
                                      : std::ios::trunc);
  if (!impl_->out) {
    throw IoError("cannot open " + path + " for writing");
  }
  if (impl_->binary) {
    impl_->out.write(kMagic, 4);
    write_u32(impl_->out, kVersion);
    write_u32(impl_->out, static_cast<std::uint32_t>(d));
  } else {
    impl_->out << "d=" << d << "\n";
  }
}

RowWriter::~RowWriter() {
  try {
    close();
  } catch (...) {
    // destructor must not throw; close() explicitly to observe errors
  }
}

int RowWriter::dim() const { return impl_->d; }

void RowWriter::write(const Vector& row, double weight) {
  Impl& s = *impl_;
  if (s.closed) {
    throw IoError("writer for " + s.path + " already closed");
  }
  detail::check_row(row, s.d);
  if (s.binary) {
    for (int j = 0; j < s.d; ++j) {
      write_f64(s.out, row[j]);
    }
    if (s.with_weights) {
      s.weights.push_back(weight);
    }
  } else {
    for (int j = 0; j < s.d; ++j) {
      if (j > 0) {
        s.out << ',';
      }
      s.out << format_double(row[j]);
    }
    if (s.with_weights) {
      s.out << ',' << format_double(weight);
    }
    s.out << '\n';
  }
}

void RowWriter::close() {
  Impl& s = *impl_;
  if (s.closed) {
    return;
  }
  s.closed = true;
  if (s.binary && s.with_weights) {
    for (double w : s.weights) {
      write_f64(s.out, w);
    }
  }
  s.out.flush();
  if (!s.out) {
    throw IoError("failed writing " + s.path);
  }
  s.out.close();
}

}  // namespace orss
