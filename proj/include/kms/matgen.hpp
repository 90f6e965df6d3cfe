#pragma once

// Builders for KMS realizations: scalar and block symbols under an indexing
// scheme, discrete Schroedinger matrices, rectangular matrices, the Lame
// matrix, and perturbations.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "kms/error.hpp"
#include "kms/matrix.hpp"
#include "kms/numeric.hpp"
#include "kms/symbol.hpp"

namespace kms {

/// T_n(a): order n+1, entry (i,j) = a_{j-i}(xi) with xi from the scheme.
inline MatrixRealization build_kms(const BandSymbol& s, std::size_t n, const IndexingScheme& scheme) {
  auto warnings = validate_scheme(scheme, n);
  const std::size_t dim = n + 1;
  const int p = std::max(s.lowest(), -static_cast<int>(n));
  const int q = std::min(s.highest(), static_cast<int>(n));
  auto m = MatrixRealization::with_band(dim, dim, p, q);
  for (std::size_t i = 0; i < dim; ++i) {
    for (const auto& [k, fn] : s.bands()) {
      const long j = static_cast<long>(i) + k;
      if (j < 0 || j >= static_cast<long>(dim)) continue;
      const double xi = sample_point(scheme, i, static_cast<std::size_t>(j), n);
      require_unit_interval(xi, "build_kms");
      m.set(i, static_cast<std::size_t>(j), fn(xi));
    }
  }
  m.info().scheme = scheme_name(scheme);
  m.info().label = s.label();
  m.info().warnings = std::move(warnings);
  return m;
}

/// T_n(f; eps): order n, diagonal f((j-1+eps)/n), off-diagonals -1.
inline MatrixRealization build_schrodinger(const PiecewisePotential& f, std::size_t n, double eps = 1.0) {
  if (n < 1) throw DomainError("Schroedinger matrix needs n >= 1");
  auto m = MatrixRealization::with_band(n, n, -1, 1);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = (static_cast<double>(j) + eps) / static_cast<double>(n);
    if (!(x >= 0.0 && x <= 1.0))
      throw DomainError("diagonal sample (j-1+eps)/n = " + numeric::format_double(x) + " leaves [0,1]");
    m.set(j, j, f(x));
    if (j + 1 < n) {
      m.set(j, j + 1, -1.0);
      m.set(j + 1, j, -1.0);
    }
  }
  m.info().scheme = "shifted(" + numeric::format_double(eps) + ")";
  m.info().label = f.label();
  return m;
}

/// T_{m,n}(a): (m+1) x (n+1), entry (i,j) = a_{j-i}((i+j)/(2 max(m,n) + 2)).
inline MatrixRealization build_rectangular(const BandSymbol& s, std::size_t m, std::size_t n) {
  const std::size_t rows = m + 1, cols = n + 1;
  const double denom = 2.0 * static_cast<double>(std::max(m, n)) + 2.0;
  const int p = std::max(s.lowest(), -static_cast<int>(m));
  const int q = std::min(s.highest(), static_cast<int>(n));
  auto out = MatrixRealization::with_band(rows, cols, p, q);
  for (std::size_t i = 0; i < rows; ++i) {
    for (const auto& [k, fn] : s.bands()) {
      const long j = static_cast<long>(i) + k;
      if (j < 0 || j >= static_cast<long>(cols)) continue;
      out.set(i, static_cast<std::size_t>(j), fn(static_cast<double>(i + static_cast<std::size_t>(j)) / denom));
    }
  }
  out.info().scheme = "midpoint";
  out.info().label = s.label();
  return out;
}

/// Matrix-valued banded symbol A(x,t) = sum_k A_k(x) e^{ikt}; every
/// coefficient returns a row-major k x k block.
class BlockBandSymbol {
 public:
  using BlockFn = std::function<std::vector<cplx>(double)>;

  BlockBandSymbol(std::size_t order, std::map<int, BlockFn> bands, std::string label = {})
      : order_(order), bands_(std::move(bands)), label_(std::move(label)) {
    if (order_ == 0) throw ShapeError("block order must be positive");
  }

  std::size_t order() const noexcept { return order_; }
  const std::map<int, BlockFn>& bands() const noexcept { return bands_; }
  const std::string& label() const noexcept { return label_; }
  int lowest() const noexcept { return bands_.empty() ? 0 : std::min(0, bands_.begin()->first); }
  int highest() const noexcept { return bands_.empty() ? 0 : std::max(0, bands_.rbegin()->first); }

  std::vector<cplx> block(int k, double x) const {
    require_unit_interval(x, "block coefficient");
    auto it = bands_.find(k);
    if (it == bands_.end()) return std::vector<cplx>(order_ * order_, cplx(0.0));
    auto b = it->second(x);
    if (b.size() != order_ * order_)
      throw ShapeError("block coefficient " + std::to_string(k) + " returned " + std::to_string(b.size()) +
                       " entries, expected " + std::to_string(order_ * order_));
    return b;
  }

  /// Row-major k x k matrix A(x,t).
  std::vector<cplx> operator()(double x, double t) const {
    std::vector<cplx> out(order_ * order_, cplx(0.0));
    for (const auto& [k, fn] : bands_) {
      const auto b = block(k, x);
      const cplx e = std::polar(1.0, static_cast<double>(k) * t);
      for (std::size_t r = 0; r < out.size(); ++r) out[r] += b[r] * e;
    }
    return out;
  }

 private:
  std::size_t order_;
  std::map<int, BlockFn> bands_;
  std::string label_;
};

/// T_n(A): order k(n+1), block (p,q) = A_{q-p}(xi(p,q)).
inline MatrixRealization build_block(const BlockBandSymbol& A, std::size_t n, const IndexingScheme& scheme) {
  auto warnings = validate_scheme(scheme, n);
  const std::size_t k = A.order();
  const std::size_t dim = k * (n + 1);
  const int kk = static_cast<int>(k);
  const int p = std::max(kk * A.lowest() - (kk - 1), -static_cast<int>(dim - 1));
  const int q = std::min(kk * A.highest() + (kk - 1), static_cast<int>(dim - 1));
  auto m = MatrixRealization::with_band(dim, dim, p, q);
  for (std::size_t bp = 0; bp <= n; ++bp) {
    for (const auto& [d, fn] : A.bands()) {
      const long bq = static_cast<long>(bp) + d;
      if (bq < 0 || bq > static_cast<long>(n)) continue;
      const double xi = sample_point(scheme, bp, static_cast<std::size_t>(bq), n);
      const auto blk = A.block(d, xi);
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c)
          m.set(k * bp + r, k * static_cast<std::size_t>(bq) + c, blk[r * k + c]);
    }
  }
  m.info().scheme = scheme_name(scheme);
  m.info().label = A.label();
  m.info().warnings = std::move(warnings);
  return m;
}

/// mu_m = m (m - 1 + 6 rho).
inline double lame_mu(double m, double rho) { return m * (m - 1.0 + 6.0 * rho); }

/// Lame matrix of order n: b_{j,j-1} = 1 - mu_{j-2}/mu_n, b_{j,j+2} = j(j+1)/mu_n (1-based).
inline MatrixRealization build_lame(std::size_t n, double rho) {
  if (n < 3) throw DomainError("Lame matrix needs n >= 3");
  if (!(rho > 0.0)) throw DomainError("Lame parameter rho must be positive");
  const double mun = lame_mu(static_cast<double>(n), rho);
  auto m = MatrixRealization::with_band(n, n, -1, 2);
  for (std::size_t j = 1; j <= n; ++j) {
    const double jd = static_cast<double>(j);
    if (j >= 2) m.set(j - 1, j - 2, 1.0 - lame_mu(jd - 2.0, rho) / mun);
    if (j + 2 <= n) m.set(j - 1, j + 1, jd * (jd + 1.0) / mun);
  }
  m.info().scheme = "lame";
  m.info().label = "lame(" + numeric::format_double(rho) + ")";
  return m;
}

// ---------------------------------------------------------------------------
// Perturbations

/// Entries uniform in [-magnitude, magnitude] (real, or complex with
/// independent parts). Hermitian noise mirrors the upper triangle.
struct EntrywiseNoise {
  double magnitude = 0.0;
  std::uint64_t seed = 0;
  bool hermitian = true;
  bool complex_entries = false;
};

/// sum_r weights[r] * left[r] * right[r]^*.
struct LowRankUpdate {
  std::vector<std::vector<cplx>> left;
  std::vector<std::vector<cplx>> right;
  std::vector<cplx> weights;
};

using Perturbation = std::variant<EntrywiseNoise, LowRankUpdate>;

inline MatrixRealization apply_perturbation(const MatrixRealization& M, const Perturbation& P) {
  if (const auto* up = std::get_if<LowRankUpdate>(&P)) {
    if (up->left.size() != up->right.size() || up->left.size() != up->weights.size())
      throw ShapeError("rank update needs matching left, right and weight lists");
    if (up->left.empty()) return M;
    auto out = M.to_dense();
    for (std::size_t r = 0; r < up->left.size(); ++r) {
      const auto& u = up->left[r];
      const auto& v = up->right[r];
      if (u.size() != M.rows() || v.size() != M.cols()) throw ShapeError("rank update vectors do not match matrix shape");
      for (std::size_t i = 0; i < M.rows(); ++i) {
        if (u[i] == cplx(0.0)) continue;
        for (std::size_t j = 0; j < M.cols(); ++j) out.add(i, j, up->weights[r] * u[i] * std::conj(v[j]));
      }
    }
    out.info().perturbation_rank = up->left.size() + M.info().perturbation_rank.value_or(0);
    return out;
  }
  const auto& noise = std::get<EntrywiseNoise>(P);
  if (noise.hermitian && !M.square()) throw ShapeError("Hermitian noise needs a square matrix");
  if (!(noise.magnitude >= 0.0)) throw DomainError("noise magnitude must be nonnegative");
  auto out = M.to_dense();
  std::mt19937_64 rng(noise.seed);
  std::uniform_real_distribution<double> u(-noise.magnitude, noise.magnitude);
  auto draw = [&]() { return noise.complex_entries ? cplx(u(rng), u(rng)) : cplx(u(rng), 0.0); };
  for (std::size_t i = 0; i < M.rows(); ++i) {
    for (std::size_t j = noise.hermitian ? i : 0; j < M.cols(); ++j) {
      cplx e = draw();
      if (noise.hermitian && i == j) e = cplx(e.real(), 0.0);
      out.add(i, j, e);
      if (noise.hermitian && i != j) out.add(j, i, std::conj(e));
    }
  }
  const double bound = noise.complex_entries ? noise.magnitude * std::sqrt(2.0) : noise.magnitude;
  out.info().perturbation_entry_bound = bound + M.info().perturbation_entry_bound.value_or(0.0);
  return out;
}

}  // namespace kms
