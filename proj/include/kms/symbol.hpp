#pragma once

// Two-variable symbols a(x,t) = sum_k a_k(x) e^{ikt} with finitely many bands,
// and piecewise potentials f for discrete Schroedinger operators.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "kms/error.hpp"
#include "kms/numeric.hpp"

namespace kms {

using CoefficientFn = std::function<cplx(double)>;
using RealFn = std::function<double(double)>;

inline void require_unit_interval(double x, const char* where) {
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError(std::string(where) + ": x = " + numeric::format_double(x) + " outside [0,1]");
}

/// Banded two-variable symbol. Immutable once built; copies share the
/// coefficient table.
class BandSymbol {
 public:
  BandSymbol() : data_(std::make_shared<Data>()) {}

  explicit BandSymbol(std::map<int, CoefficientFn> bands, std::string label = {},
                      std::map<int, CoefficientFn> d_bands = {})
      : data_(std::make_shared<Data>(Data{std::move(bands), std::move(d_bands), std::move(label)})) {
    for (const auto& [k, fn] : data_->bands)
      if (!fn) throw DomainError("band " + std::to_string(k) + " has no coefficient function");
    if (!data_->d_bands.empty()) {
      for (const auto& [k, fn] : data_->bands)
        if (!data_->d_bands.contains(k))
          throw DomainError("derivative table lacks band " + std::to_string(k));
    }
  }

  /// x-independent symbol from constant Fourier coefficients.
  static BandSymbol constant_bands(const std::map<int, cplx>& coeffs, std::string label = {}) {
    std::map<int, CoefficientFn> bands, d;
    for (const auto& [k, c] : coeffs) {
      bands[k] = [c](double) { return c; };
      d[k] = [](double) { return cplx(0.0); };
    }
    return BandSymbol(std::move(bands), std::move(label), std::move(d));
  }

  const std::map<int, CoefficientFn>& bands() const noexcept { return data_->bands; }
  const std::string& label() const noexcept { return data_->label; }
  bool has_derivatives() const noexcept { return !data_->d_bands.empty(); }

  /// Band range [p, q] with p <= 0 <= q.
  int lowest() const noexcept { return data_->bands.empty() ? 0 : std::min(0, data_->bands.begin()->first); }
  int highest() const noexcept { return data_->bands.empty() ? 0 : std::max(0, data_->bands.rbegin()->first); }

  cplx coefficient(int k, double x) const {
    require_unit_interval(x, "coefficient");
    auto it = data_->bands.find(k);
    return it == data_->bands.end() ? cplx(0.0) : it->second(x);
  }

  /// d/dx a_k(x); analytic when a derivative table was supplied, otherwise a
  /// second-order difference that stays inside [0,1].
  cplx coefficient_dx(int k, double x, double h = 1e-5) const {
    require_unit_interval(x, "coefficient_dx");
    if (has_derivatives()) {
      auto it = data_->d_bands.find(k);
      return it == data_->d_bands.end() ? cplx(0.0) : it->second(x);
    }
    return difference_dx([&](double s) { return coefficient(k, s); }, x, h);
  }

  cplx operator()(double x, double t) const {
    require_unit_interval(x, "eval_symbol");
    cplx s = 0.0;
    for (const auto& [k, fn] : data_->bands) s += fn(x) * std::polar(1.0, static_cast<double>(k) * t);
    return s;
  }

  /// partial_t a(x,t) = sum_k i k a_k(x) e^{ikt}.
  cplx dt(double x, double t) const {
    require_unit_interval(x, "eval_symbol");
    cplx s = 0.0;
    for (const auto& [k, fn] : data_->bands)
      s += cplx(0.0, static_cast<double>(k)) * fn(x) * std::polar(1.0, static_cast<double>(k) * t);
    return s;
  }

  /// partial_x a(x,t).
  cplx dx(double x, double t, double h = 1e-5) const {
    if (has_derivatives()) {
      require_unit_interval(x, "eval_symbol");
      cplx s = 0.0;
      for (const auto& [k, fn] : data_->d_bands) s += fn(x) * std::polar(1.0, static_cast<double>(k) * t);
      return s;
    }
    return difference_dx([&](double u) { return (*this)(u, t); }, x, h);
  }

  /// c * a(x,t).
  BandSymbol scaled(cplx c) const {
    std::map<int, CoefficientFn> b, d;
    for (const auto& [k, fn] : data_->bands) b[k] = [fn, c](double x) { return c * fn(x); };
    for (const auto& [k, fn] : data_->d_bands) d[k] = [fn, c](double x) { return c * fn(x); };
    return BandSymbol(std::move(b), label(), std::move(d));
  }

  template <typename G>
  static cplx difference_dx(G&& g, double x, double h) {
    if (x - h >= 0.0 && x + h <= 1.0) return (g(x + h) - g(x - h)) / (2.0 * h);
    if (x - h < 0.0) return (-3.0 * g(x) + 4.0 * g(x + h) - g(x + 2.0 * h)) / (2.0 * h);
    return (3.0 * g(x) - 4.0 * g(x - h) + g(x - 2.0 * h)) / (2.0 * h);
  }

 private:
  struct Data {
    std::map<int, CoefficientFn> bands;
    std::map<int, CoefficientFn> d_bands;
    std::string label;
  };
  std::shared_ptr<const Data> data_;
};

inline cplx eval_symbol(const BandSymbol& s, double x, double t) { return s(x, t); }

/// sum_k max_i |a_k(x_i)| over n_x equispaced samples of [0,1]; a lower bound
/// of the decay norm, exact for coefficients whose modulus peaks at a node.
inline double band_norm(const BandSymbol& s, std::size_t n_x) {
  if (n_x < 2) throw DomainError("band_norm needs at least 2 samples");
  const auto xs = numeric::unit_nodes(n_x);
  double total = 0.0;
  for (const auto& [k, fn] : s.bands()) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::abs(fn(x)));
    total += m;
  }
  return total;
}

/// Largest disagreement between the supplied derivative table and a central
/// difference of the coefficients, over 10 interior probe points.
inline double derivative_mismatch(const BandSymbol& s) {
  if (!s.has_derivatives()) return 0.0;
  double worst = 0.0;
  const double h = 1e-5;
  for (const auto& [k, fn] : s.bands()) {
    for (int i = 1; i <= 10; ++i) {
      const double x = static_cast<double>(i) / 11.0;
      const cplx fd = (fn(x + h) - fn(x - h)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - s.coefficient_dx(k, x)));
    }
  }
  return worst;
}

enum class Continuity { Left, Right };

inline const char* to_string(Continuity c) { return c == Continuity::Left ? "left" : "right"; }

struct Breakpoint {
  double at;
  Continuity side;
};

/// Real potential f on [0,1], smooth between finitely many breakpoints.
/// Piece i lives on [c_{i-1}, c_i] with c_0 = 0 and c_{r+1} = 1; at a
/// breakpoint the side flag decides which piece supplies f(c).
class PiecewisePotential {
 public:
  PiecewisePotential() = default;

  explicit PiecewisePotential(RealFn f, std::string label = {})
      : pieces_{std::move(f)}, label_(std::move(label)) {}

  PiecewisePotential(std::vector<RealFn> pieces, std::vector<Breakpoint> breaks, std::string label = {})
      : pieces_(std::move(pieces)), breaks_(std::move(breaks)), label_(std::move(label)) {
    if (pieces_.size() != breaks_.size() + 1)
      throw DomainError("piecewise potential needs exactly one more piece than breakpoints");
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      if (!(breaks_[i].at > 0.0 && breaks_[i].at < 1.0))
        throw DomainError("breakpoints must lie in (0,1)");
      if (i > 0 && !(breaks_[i].at > breaks_[i - 1].at))
        throw DomainError("breakpoints must be strictly increasing");
    }
  }

  double operator()(double x) const {
    require_unit_interval(x, "potential");
    return pieces_[piece_index(x)](x);
  }

  std::size_t piece_index(double x) const {
    std::size_t i = 0;
    while (i < breaks_.size()) {
      const auto& b = breaks_[i];
      if (x < b.at || (x == b.at && b.side == Continuity::Left)) break;
      ++i;
    }
    return i;
  }

  const std::vector<Breakpoint>& breakpoints() const noexcept { return breaks_; }
  const RealFn& piece(std::size_t i) const { return pieces_.at(i); }
  std::size_t piece_count() const noexcept { return pieces_.size(); }
  const std::string& label() const noexcept { return label_; }

  double left_limit(std::size_t j) const { return pieces_.at(j)(breaks_.at(j).at); }
  double right_limit(std::size_t j) const { return pieces_.at(j + 1)(breaks_.at(j).at); }

  /// End points [lo, hi] of piece i.
  std::pair<double, double> piece_interval(std::size_t i) const {
    const double lo = i == 0 ? 0.0 : breaks_.at(i - 1).at;
    const double hi = i == breaks_.size() ? 1.0 : breaks_.at(i).at;
    return {lo, hi};
  }

  /// Minimum over `samples` equispaced points of every piece (end points included).
  double sampled_min(std::size_t samples = 20001) const {
    double m = HUGE_VAL;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      auto [lo, hi] = piece_interval(i);
      for (std::size_t j = 0; j < samples; ++j) {
        const double x = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(samples - 1);
        m = std::min(m, pieces_[i](x));
      }
    }
    return m;
  }

  /// Throws DomainError unless f > bound everywhere on a dense sample.
  void require_above(double bound, std::size_t samples = 20001) const {
    const double m = sampled_min(samples);
    if (!(m > bound))
      throw DomainError("potential must exceed " + numeric::format_double(bound) +
                        " on [0,1]; sampled minimum is " + numeric::format_double(m));
  }

  /// The symbol f(x) - 2 cos t.
  BandSymbol symbol() const {
    auto self = *this;
    std::map<int, CoefficientFn> bands{
        {-1, [](double) { return cplx(-1.0); }},
        {0, [self](double x) { return cplx(self(x)); }},
        {1, [](double) { return cplx(-1.0); }},
    };
    return BandSymbol(std::move(bands), label_.empty() ? "schrodinger" : label_);
  }

 private:
  std::vector<RealFn> pieces_;
  std::vector<Breakpoint> breaks_;
  std::string label_;
};

}  // namespace kms
