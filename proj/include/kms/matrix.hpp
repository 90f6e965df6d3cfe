#pragma once

// Concrete matrix realizations: dense or banded complex storage, the
// indexing schemes that place coefficient samples along the diagonals, and
// the plain-text dump format.

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "kms/error.hpp"
#include "kms/numeric.hpp"

namespace kms {

// ---------------------------------------------------------------------------
// Indexing schemes

struct Midpoint {};  // (i+j)/(2n+2)
struct MinIndex {};  // min(i,j)/(n+1)
struct MaxIndex {};  // max(i,j)/(n+1)
struct RowIndex {};  // i/n
struct ShiftedSchrodinger {
  double epsilon = 1.0;  // (min(i,j)+epsilon)/(n+1)
};
/// User partition 0 = node_0 < ... < node_{n+1} = 1 with one tag per cell;
/// entry (i,j) samples at tags[min(i,j)].
struct Tagged {
  std::vector<double> nodes;
  std::vector<double> tags;
};

using IndexingScheme = std::variant<Midpoint, MinIndex, MaxIndex, RowIndex, ShiftedSchrodinger, Tagged>;

inline std::string scheme_name(const IndexingScheme& s) {
  struct {
    std::string operator()(const Midpoint&) const { return "midpoint"; }
    std::string operator()(const MinIndex&) const { return "min"; }
    std::string operator()(const MaxIndex&) const { return "max"; }
    std::string operator()(const RowIndex&) const { return "row"; }
    std::string operator()(const ShiftedSchrodinger& v) const {
      return "shifted(" + numeric::format_double(v.epsilon) + ")";
    }
    std::string operator()(const Tagged&) const { return "tagged"; }
  } visitor;
  return std::visit(visitor, s);
}

/// Inverse of scheme_name for every scheme except Tagged (whose partition is not encoded).
inline IndexingScheme parse_scheme_name(const std::string& name) {
  if (name == "midpoint") return Midpoint{};
  if (name == "min") return MinIndex{};
  if (name == "max") return MaxIndex{};
  if (name == "row") return RowIndex{};
  if (name == "tagged") return Tagged{};
  if (name.starts_with("shifted(") && name.ends_with(")"))
    return ShiftedSchrodinger{numeric::parse_double(name.substr(8, name.size() - 9))};
  throw SchemeError("unknown indexing scheme '" + name + "'");
}

/// Validates a scheme for matrices of order n+1; returns warnings.
inline std::vector<std::string> validate_scheme(const IndexingScheme& s, std::size_t n) {
  std::vector<std::string> warnings;
  if (const auto* tg = std::get_if<Tagged>(&s)) {
    if (tg->nodes.size() != n + 2 || tg->tags.size() != n + 1)
      throw SchemeError("tagged partition for order " + std::to_string(n + 1) + " needs " + std::to_string(n + 2) +
                        " nodes and " + std::to_string(n + 1) + " tags");
    if (tg->nodes.front() != 0.0 || tg->nodes.back() != 1.0)
      throw SchemeError("tagged partition must start at 0 and end at 1");
    double mesh = 0.0;
    for (std::size_t i = 0; i + 1 < tg->nodes.size(); ++i) {
      if (!(tg->nodes[i + 1] > tg->nodes[i])) throw SchemeError("tagged partition nodes must be strictly increasing");
      if (tg->tags[i] < tg->nodes[i] || tg->tags[i] > tg->nodes[i + 1])
        throw SchemeError("tag " + std::to_string(i) + " lies outside its cell");
      mesh = std::max(mesh, tg->nodes[i + 1] - tg->nodes[i]);
    }
    if (mesh > 2.0 / static_cast<double>(n + 1))
      warnings.push_back("tagged partition mesh " + numeric::format_double(mesh) + " exceeds 2/(n+1)");
  }
  return warnings;
}

/// Sample point for entry (i,j) of an order-(n+1) matrix.
inline double sample_point(const IndexingScheme& s, std::size_t i, std::size_t j, std::size_t n) {
  const auto lo = static_cast<double>(std::min(i, j));
  const auto hi = static_cast<double>(std::max(i, j));
  const auto np1 = static_cast<double>(n + 1);
  struct {
    double lo, hi, np1;
    std::size_t i, j, n;
    double operator()(const Midpoint&) const { return (lo + hi) / (2.0 * np1); }
    double operator()(const MinIndex&) const { return lo / np1; }
    double operator()(const MaxIndex&) const { return hi / np1; }
    double operator()(const RowIndex&) const { return n == 0 ? 0.0 : static_cast<double>(i) / static_cast<double>(n); }
    double operator()(const ShiftedSchrodinger& v) const { return (lo + v.epsilon) / np1; }
    double operator()(const Tagged& v) const { return v.tags[std::min(i, j)]; }
  } visitor{lo, hi, np1, i, j, n};
  return std::visit(visitor, s);
}

// ---------------------------------------------------------------------------
// Storage

struct RealizationInfo {
  std::string scheme = "dense";
  std::string label;
  std::vector<std::string> warnings;
  std::optional<std::size_t> perturbation_rank;   // rank bound of an applied update
  std::optional<double> perturbation_entry_bound;  // entrywise bound of applied noise
};

/// Banded storage is used when the band width (q - p) is at most a quarter of
/// the larger dimension; wider bands are stored densely.
inline bool prefers_banded(std::size_t rows, std::size_t cols, int lower, int upper) {
  return static_cast<double>(upper - lower) <= static_cast<double>(std::max(rows, cols)) / 4.0;
}

class MatrixRealization {
 public:
  MatrixRealization() = default;

  static MatrixRealization dense(std::size_t rows, std::size_t cols) {
    MatrixRealization m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.banded_ = false;
    m.lower_ = -static_cast<int>(rows > 0 ? rows - 1 : 0);
    m.upper_ = static_cast<int>(cols > 0 ? cols - 1 : 0);
    m.data_.assign(rows * cols, cplx(0.0));
    return m;
  }

  /// Entries with j - i outside [lower, upper] are structurally zero.
  static MatrixRealization banded(std::size_t rows, std::size_t cols, int lower, int upper) {
    if (lower > upper) throw ShapeError("band lower bound exceeds upper bound");
    MatrixRealization m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.banded_ = true;
    m.lower_ = lower;
    m.upper_ = upper;
    m.data_.assign(rows * m.width(), cplx(0.0));
    return m;
  }

  /// Banded when prefers_banded() says so, dense otherwise.
  static MatrixRealization with_band(std::size_t rows, std::size_t cols, int lower, int upper) {
    return prefers_banded(rows, cols, lower, upper) ? banded(rows, cols, lower, upper) : dense(rows, cols);
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool is_banded() const noexcept { return banded_; }
  int lower() const noexcept { return lower_; }
  int upper() const noexcept { return upper_; }

  bool in_band(std::size_t i, std::size_t j) const noexcept {
    const long d = static_cast<long>(j) - static_cast<long>(i);
    return d >= lower_ && d <= upper_;
  }

  cplx operator()(std::size_t i, std::size_t j) const {
    if (banded_) {
      if (!in_band(i, j)) return 0.0;
      return data_[i * width() + static_cast<std::size_t>(static_cast<long>(j) - static_cast<long>(i) - lower_)];
    }
    return data_[i * cols_ + j];
  }

  void set(std::size_t i, std::size_t j, cplx v) {
    if (i >= rows_ || j >= cols_) throw ShapeError("entry outside matrix");
    if (banded_) {
      if (!in_band(i, j)) {
        if (v == cplx(0.0)) return;
        throw ShapeError("nonzero entry outside declared band");
      }
      data_[i * width() + static_cast<std::size_t>(static_cast<long>(j) - static_cast<long>(i) - lower_)] = v;
      return;
    }
    data_[i * cols_ + j] = v;
  }

  void add(std::size_t i, std::size_t j, cplx v) { set(i, j, (*this)(i, j) + v); }

  /// Column range [first, last) that may hold nonzeros in row i.
  std::pair<std::size_t, std::size_t> row_span(std::size_t i) const {
    if (!banded_) return {0, cols_};
    const long first = std::max(0L, static_cast<long>(i) + lower_);
    const long last = std::min(static_cast<long>(cols_), static_cast<long>(i) + upper_ + 1);
    if (first >= last) return {0, 0};
    return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
  }

  /// Smallest [p, q] containing the diagonal offsets of every nonzero entry.
  std::pair<int, int> nonzero_band() const {
    int p = 0, q = 0;
    bool any = false;
    for (std::size_t i = 0; i < rows_; ++i) {
      auto [a, b] = row_span(i);
      for (std::size_t j = a; j < b; ++j) {
        if ((*this)(i, j) == cplx(0.0)) continue;
        const int d = static_cast<int>(static_cast<long>(j) - static_cast<long>(i));
        p = any ? std::min(p, d) : d;
        q = any ? std::max(q, d) : d;
        any = true;
      }
    }
    return {std::min(p, 0), std::max(q, 0)};
  }

  /// Exact M == M^*.
  bool is_hermitian() const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i) {
      auto [a, b] = row_span(i);
      for (std::size_t j = a; j < b; ++j)
        if ((*this)(i, j) != std::conj((*this)(j, i))) return false;
    }
    return true;
  }

  MatrixRealization adjoint() const {
    MatrixRealization m = banded_ ? banded(cols_, rows_, -upper_, -lower_) : dense(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      auto [a, b] = row_span(i);
      for (std::size_t j = a; j < b; ++j) m.set(j, i, std::conj((*this)(i, j)));
    }
    m.info_ = info_;
    return m;
  }

  MatrixRealization to_dense() const {
    if (!banded_) return *this;
    auto m = dense(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      auto [a, b] = row_span(i);
      for (std::size_t j = a; j < b; ++j) m.set(i, j, (*this)(i, j));
    }
    m.info_ = info_;
    return m;
  }

  /// Row-major dense copy.
  std::vector<cplx> dense_data() const {
    std::vector<cplx> out(rows_ * cols_, cplx(0.0));
    for (std::size_t i = 0; i < rows_; ++i) {
      auto [a, b] = row_span(i);
      for (std::size_t j = a; j < b; ++j) out[i * cols_ + j] = (*this)(i, j);
    }
    return out;
  }

  cplx trace() const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
  }

  double max_abs() const {
    double m = 0.0;
    for (auto v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  const RealizationInfo& info() const noexcept { return info_; }
  RealizationInfo& info() noexcept { return info_; }

  /// Same shape and entries (storage kind and metadata are ignored).
  friend bool operator==(const MatrixRealization& a, const MatrixRealization& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j)
        if (a(i, j) != b(i, j)) return false;
    return true;
  }

 private:
  std::size_t width() const noexcept { return static_cast<std::size_t>(upper_ - lower_ + 1); }

  std::size_t rows_ = 0, cols_ = 0;
  bool banded_ = false;
  int lower_ = 0, upper_ = 0;
  std::vector<cplx> data_;
  RealizationInfo info_;
};

/// A * B, banded when both factors are banded.
inline MatrixRealization multiply(const MatrixRealization& a, const MatrixRealization& b) {
  if (a.cols() != b.rows()) throw ShapeError("inner dimensions differ in product");
  MatrixRealization c;
  if (a.is_banded() && b.is_banded()) {
    const int lo = std::max(a.lower() + b.lower(), -static_cast<int>(a.rows()));
    const int hi = std::min(a.upper() + b.upper(), static_cast<int>(b.cols()));
    c = MatrixRealization::banded(a.rows(), b.cols(), std::min(lo, 0), std::max(hi, 0));
  } else {
    c = MatrixRealization::dense(a.rows(), b.cols());
  }
  if (!a.is_banded() && !b.is_banded()) {
    const auto ad = a.dense_data(), bd = b.dense_data();
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    std::vector<cplx> out(n * m, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < k; ++l) {
        const cplx v = ad[i * k + l];
        if (v == cplx(0.0)) continue;
        const cplx* brow = &bd[l * m];
        cplx* orow = &out[i * m];
        for (std::size_t j = 0; j < m; ++j) orow[j] += v * brow[j];
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) c.set(i, j, out[i * m + j]);
    return c;
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto [a0, a1] = a.row_span(i);
    std::vector<cplx> acc(b.cols(), cplx(0.0));
    for (std::size_t l = a0; l < a1; ++l) {
      const cplx v = a(i, l);
      if (v == cplx(0.0)) continue;
      auto [b0, b1] = b.row_span(l);
      for (std::size_t j = b0; j < b1; ++j) acc[j] += v * b(l, j);
    }
    auto [c0, c1] = c.row_span(i);
    for (std::size_t j = c0; j < c1; ++j) c.set(i, j, acc[j]);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Dump format:
//   kms-matrix <rows> <cols> <p> <q> <scheme>
//   i j re im        (one line per stored nonzero entry, row-major)

inline void write_dump(std::ostream& os, const MatrixRealization& m) {
  const auto [p, q] = m.is_banded() ? std::pair{m.lower(), m.upper()} : m.nonzero_band();
  os << "kms-matrix " << m.rows() << ' ' << m.cols() << ' ' << p << ' ' << q << ' ' << m.info().scheme << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto [a, b] = m.row_span(i);
    for (std::size_t j = a; j < b; ++j) {
      const cplx v = m(i, j);
      if (v == cplx(0.0)) continue;
      os << i << ' ' << j << ' ' << numeric::format_double(v.real()) << ' ' << numeric::format_double(v.imag())
         << '\n';
    }
  }
}

inline MatrixRealization read_dump(std::istream& is) {
  std::string magic, scheme;
  std::size_t rows = 0, cols = 0;
  int p = 0, q = 0;
  std::string header;
  if (!std::getline(is, header)) throw ParseError("empty matrix dump", 1, 1);
  std::istringstream hs(header);
  if (!(hs >> magic >> rows >> cols >> p >> q >> scheme) || magic != "kms-matrix")
    throw ParseError("malformed matrix dump header", 1, 1);
  auto m = MatrixRealization::with_band(rows, cols, p, q);
  m.info().scheme = scheme;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t i = 0, j = 0;
    std::string re, im;
    if (!(ls >> i >> j >> re >> im)) throw ParseError("malformed matrix entry", lineno, 1);
    if (i >= rows || j >= cols) throw ParseError("matrix entry out of range", lineno, 1);
    m.set(i, j, cplx(numeric::parse_double(re), numeric::parse_double(im)));
  }
  return m;
}

}  // namespace kms
