#include "dnaol/data_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

namespace dnaol {

namespace {

constexpr char kMatrixMagic[4] = {'D', 'N', 'A', 'M'};
constexpr char kModelMagic[4] = {'D', 'N', 'M', 'O'};
constexpr std::uint32_t kModelVersion = 1;

[[noreturn]] void fail(const std::string& msg) { throw ParseError(msg); }

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) fail("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) fail("cannot open " + path + " for writing");
  return out;
}

// --- little-endian primitives -------------------------------------------

struct ByteReader {
  std::istream& in;
  const std::string& path;
  std::uint64_t offset = 0;

  void bytes(void* dst, std::size_t n) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
      fail("truncated file " + path + " at byte offset " +
           std::to_string(offset + static_cast<std::size_t>(in.gcount())));
    offset += n;
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
           std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
  }
  std::uint64_t u64() {
    std::uint64_t lo = u32(), hi = u32();
    return lo | hi << 32;
  }
  std::uint8_t u8() {
    unsigned char b;
    bytes(&b, 1);
    return b;
  }
  double f64() { return std::bit_cast<double>(u64()); }
};

struct ByteWriter {
  std::ostream& out;

  void bytes(const void* src, std::size_t n) {
    out.write(static_cast<const char*>(src), static_cast<std::streamsize>(n));
  }
  void u32(std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    u32(static_cast<std::uint32_t>(v));
    u32(static_cast<std::uint32_t>(v >> 32));
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
};

// Raw matrix block: magic | u32 rows | u32 cols | row-major float64.
void write_matrix_block(ByteWriter& w, const Matrix& M) {
  w.bytes(kMatrixMagic, 4);
  w.u32(static_cast<std::uint32_t>(M.rows()));
  w.u32(static_cast<std::uint32_t>(M.cols()));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) w.f64(M(i, j));
}

Matrix read_matrix_block(ByteReader& r) {
  char magic[4];
  r.bytes(magic, 4);
  if (!std::equal(magic, magic + 4, kMatrixMagic))
    fail("bad matrix magic in " + r.path + " at byte offset " +
         std::to_string(r.offset - 4));
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  Matrix M(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) M(i, j) = r.f64();
  return M;
}

// Model files carry each matrix block behind a u64 byte-length prefix so a
// reader can skip or bounds-check blocks without decoding them.
std::uint64_t matrix_block_size(const Matrix& M) {
  return 4 + 4 + 4 +
         8 * static_cast<std::uint64_t>(M.rows()) *
             static_cast<std::uint64_t>(M.cols());
}

void write_prefixed_block(ByteWriter& w, const Matrix& M) {
  w.u64(matrix_block_size(M));
  write_matrix_block(w, M);
}

Matrix read_prefixed_block(ByteReader& r) {
  const std::uint64_t declared = r.u64();
  const std::uint64_t start = r.offset;
  Matrix M = read_matrix_block(r);
  if (r.offset - start != declared)
    fail("matrix block length mismatch in " + r.path + " at byte offset " +
         std::to_string(start) + " (declared " + std::to_string(declared) +
         ", decoded " + std::to_string(r.offset - start) + ")");
  return M;
}

// --- CSV -----------------------------------------------------------------

bool parse_cell(const std::string& cell, double& value) {
  std::size_t begin = cell.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return false;
  std::size_t end = cell.find_last_not_of(" \t\r") + 1;
  const char* first = cell.data() + begin;
  const char* last = cell.data() + end;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

bool blank_line(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

Matrix load_matrix_csv(const std::string& path) {
  std::ifstream in = open_in(path, false);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_line(line)) continue;
    std::vector<std::string> cells = split_line(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t j = 0; j < cells.size(); ++j)
      if (!parse_cell(cells[j], row[j])) {
        numeric = false;
        break;
      }
    if (!numeric) {
      if (first_content) {  // header row
        first_content = false;
        continue;
      }
      fail(path + ": parse error on line " + std::to_string(line_no) +
           ": non-numeric cell");
    }
    first_content = false;
    if (width == 0) width = row.size();
    if (row.size() != width)
      fail(path + ": parse error on line " + std::to_string(line_no) + ": got " +
           std::to_string(row.size()) + " cells, expected " +
           std::to_string(width));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path + ": no data rows");
  Matrix X(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      X(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rows[i][j];
  return X;
}

Matrix load_matrix_binary(const std::string& path) {
  std::ifstream in = open_in(path, true);
  ByteReader r{in, path};
  Matrix samples_as_rows = read_matrix_block(r);
  return samples_as_rows.transpose();
}

Matrix load_matrix(const std::string& path) {
  {
    std::ifstream in = open_in(path, true);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::equal(magic, magic + 4, kMatrixMagic))
      return load_matrix_binary(path);
  }
  return load_matrix_csv(path);
}

void save_matrix_csv(const std::string& path, const Matrix& X) {
  std::ofstream out = open_out(path, false);
  out.precision(17);
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    for (Eigen::Index j = 0; j < X.rows(); ++j) {
      if (j) out << ',';
      out << X(j, i);
    }
    out << '\n';
  }
  if (!out) fail("write failed: " + path);
}

void save_matrix_binary(const std::string& path, const Matrix& X) {
  std::ofstream out = open_out(path, true);
  ByteWriter w{out};
  write_matrix_block(w, X.transpose());
  if (!out) fail("write failed: " + path);
}

std::vector<int> load_labels(const std::string& path) {
  std::ifstream in = open_in(path, false);
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_line(line)) continue;
    double v;
    if (!parse_cell(line, v) || v != static_cast<int>(v))
      fail(path + ": parse error on line " + std::to_string(line_no) +
           ": expected an integer label");
    labels.push_back(static_cast<int>(v));
  }
  if (labels.empty()) fail(path + ": no labels");
  return labels;
}

void save_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out = open_out(path, false);
  for (int l : labels) out << l << '\n';
  if (!out) fail("write failed: " + path);
}

NormalizeResult normalize_unit_l2(const Matrix& X) {
  NormalizeResult result{X, 0};
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    const double norm = result.X.col(i).norm();
    if (norm > 0.0)
      result.X.col(i) /= norm;
    else
      ++result.zero_columns;
  }
  return result;
}

SyntheticDataset gen_synthetic(int classes, int per_class, int dim,
                               double separation, double noise,
                               std::uint64_t seed) {
  if (classes < 1 || per_class < 1 || dim < 1)
    throw std::invalid_argument("gen_synthetic: classes, per_class and dim must be >= 1");
  if (separation < 0.0 || noise < 0.0)
    throw std::invalid_argument("gen_synthetic: separation and noise must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);

  SyntheticDataset ds;
  ds.means.resize(dim, classes);
  for (int c = 0; c < classes; ++c) {
    Vector g(dim);
    for (int i = 0; i < dim; ++i) g[i] = n01(rng);
    const double norm = g.norm();
    ds.means.col(c) = norm > 0.0 ? Vector(separation * g / norm)
                                 : Vector(Vector::Zero(dim));
  }
  ds.X.resize(dim, static_cast<Eigen::Index>(classes) * per_class);
  ds.labels.reserve(static_cast<std::size_t>(classes) * per_class);
  Eigen::Index col = 0;
  for (int c = 0; c < classes; ++c) {
    for (int s = 0; s < per_class; ++s, ++col) {
      for (int i = 0; i < dim; ++i)
        ds.X(i, col) = ds.means(i, c) + noise * n01(rng);
      ds.labels.push_back(c);
    }
  }
  return ds;
}

SplitResult split_train_test(const Matrix& X, const std::vector<int>& labels,
                             int train_per_class, std::uint64_t seed) {
  if (static_cast<Eigen::Index>(labels.size()) != X.cols())
    throw std::invalid_argument("split: label count does not match samples");
  if (train_per_class < 1)
    throw std::invalid_argument("split: train_per_class must be >= 1");
  const int C = count_classes(labels);
  std::vector<std::vector<int>> members(C);
  for (std::size_t i = 0; i < labels.size(); ++i)
    members[labels[i]].push_back(static_cast<int>(i));

  std::mt19937_64 rng(seed);
  SplitResult split;
  for (int c = 0; c < C; ++c) {
    if (static_cast<int>(members[c].size()) < train_per_class)
      throw std::invalid_argument(
          "split: class " + std::to_string(c) + " has only " +
          std::to_string(members[c].size()) + " samples, need " +
          std::to_string(train_per_class));
    std::shuffle(members[c].begin(), members[c].end(), rng);
    for (std::size_t k = 0; k < members[c].size(); ++k) {
      if (static_cast<int>(k) < train_per_class)
        split.train_index.push_back(members[c][k]);
      else
        split.test_index.push_back(members[c][k]);
    }
  }
  std::sort(split.train_index.begin(), split.train_index.end());
  std::sort(split.test_index.begin(), split.test_index.end());

  auto take = [&](const std::vector<int>& idx, Matrix& M, std::vector<int>& y) {
    M.resize(X.rows(), static_cast<Eigen::Index>(idx.size()));
    y.reserve(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      M.col(static_cast<Eigen::Index>(k)) = X.col(idx[k]);
      y.push_back(labels[idx[k]]);
    }
  };
  take(split.train_index, split.train_X, split.train_labels);
  take(split.test_index, split.test_X, split.test_labels);
  return split;
}

namespace {

void write_hyperparams(ByteWriter& w, const HyperParams& hp) {
  w.f64(hp.alpha);
  w.f64(hp.tau);
  w.f64(hp.sigma2);
  w.f64(hp.rho);
  w.f64(hp.epsilon);
  w.f64(hp.residual_tol);
  w.u32(static_cast<std::uint32_t>(hp.max_outer));
  w.u32(static_cast<std::uint32_t>(hp.warm_start));
  w.u32(static_cast<std::uint32_t>(hp.inner_iterations));
  w.u64(hp.seed);
}

HyperParams read_hyperparams(ByteReader& r) {
  HyperParams hp;
  hp.alpha = r.f64();
  hp.tau = r.f64();
  hp.sigma2 = r.f64();
  hp.rho = r.f64();
  hp.epsilon = r.f64();
  hp.residual_tol = r.f64();
  hp.max_outer = static_cast<int>(r.u32());
  hp.warm_start = static_cast<int>(r.u32());
  hp.inner_iterations = static_cast<int>(r.u32());
  hp.seed = r.u64();
  return hp;
}

}  // namespace

void save_model(const std::string& path, const TrainedModel& model,
                const HyperParams& hp) {
  std::ofstream out = open_out(path, true);
  ByteWriter w{out};
  w.bytes(kModelMagic, 4);
  w.u32(kModelVersion);
  const bool sep = std::holds_alternative<SepModel>(model);
  w.u8(sep ? 0 : 1);
  write_hyperparams(w, hp);
  if (sep) {
    const SepModel& m = std::get<SepModel>(model);
    w.u32(static_cast<std::uint32_t>(m.classes.size()));
    for (const ClassModel& cm : m.classes) {
      w.f64(cm.model.selector.lambda);
      write_prefixed_block(w, cm.model.A);
      write_prefixed_block(w, cm.W);
    }
  } else {
    const NonSepModel& m = std::get<NonSepModel>(model);
    w.u32(static_cast<std::uint32_t>(m.W.rows()));
    w.f64(m.model.selector.lambda);
    write_prefixed_block(w, m.model.A);
    write_prefixed_block(w, m.W);
  }
  if (!out) fail("write failed: " + path);
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in = open_in(path, true);
  ByteReader r{in, path};
  char magic[4];
  r.bytes(magic, 4);
  if (!std::equal(magic, magic + 4, kModelMagic))
    fail(path + ": not a model file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kModelVersion)
    fail(path + ": unsupported model version " + std::to_string(version));
  const std::uint8_t scheme = r.u8();
  LoadedModel loaded;
  loaded.hp = read_hyperparams(r);
  if (scheme == 0) {
    SepModel m;
    const std::uint32_t C = r.u32();
    m.classes.resize(C);
    for (std::uint32_t c = 0; c < C; ++c) {
      const double lambda = r.f64();
      m.classes[c].model.A = read_prefixed_block(r);
      m.classes[c].model.selector = FeatureSelector(lambda);
      m.classes[c].W = read_prefixed_block(r);
    }
    loaded.model = std::move(m);
  } else if (scheme == 1) {
    NonSepModel m;
    const std::uint32_t C = r.u32();
    const double lambda = r.f64();
    m.model.A = read_prefixed_block(r);
    m.model.selector = FeatureSelector(lambda);
    m.W = read_prefixed_block(r);
    if (m.W.rows() != static_cast<Eigen::Index>(C))
      fail(path + ": class count does not match classifier shape");
    loaded.model = std::move(m);
  } else {
    fail(path + ": unknown scheme id " + std::to_string(scheme));
  }
  return loaded;
}

}  // namespace dnaol
