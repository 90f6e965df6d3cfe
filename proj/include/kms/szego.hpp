#pragma once

// Fourier coefficients of log a(x, .) and the strong-limit constants
// G(a), e(a;x), E(a;x) and the row-indexing correction F(a).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kms/error.hpp"
#include "kms/numeric.hpp"
#include "kms/symbol.hpp"

namespace kms {

/// Coefficients c_{-K..K} of a 2pi-periodic function.
struct FourierSeries {
  int K = 0;
  std::vector<cplx> coeffs;  // coeffs[k + K]

  cplx operator[](int k) const { return (k < -K || k > K) ? cplx(0.0) : coeffs[static_cast<std::size_t>(k + K)]; }
};

namespace detail {

/// Table of e^{-2 pi i m / n}.
inline std::vector<cplx> twiddles(std::size_t n) {
  std::vector<cplx> w(n);
  for (std::size_t m = 0; m < n; ++m) w[m] = std::polar(1.0, -kTwoPi * static_cast<double>(m) / static_cast<double>(n));
  return w;
}

/// Discrete Fourier coefficients (1/n) sum_j v_j e^{-ik t_j}, |k| <= K.
inline FourierSeries dft_coefficients(const std::vector<cplx>& v, int K, const std::vector<cplx>& tw) {
  const auto n = static_cast<long>(v.size());
  FourierSeries out{K, std::vector<cplx>(static_cast<std::size_t>(2 * K + 1))};
  for (int k = -K; k <= K; ++k) {
    const long kk = ((k % n) + n) % n;
    cplx s = 0.0;
    for (long j = 0; j < n; ++j) s += v[static_cast<std::size_t>(j)] * tw[static_cast<std::size_t>((kk * j) % n)];
    out.coeffs[static_cast<std::size_t>(k + K)] = s / static_cast<double>(n);
  }
  return out;
}

/// Continuous branch of log a(x, t_j) along the periodic grid, starting from
/// the principal value at t = 0. Throws on zeros or nonzero winding.
inline std::vector<cplx> unwrapped_log(const BandSymbol& s, double x, std::size_t n_t) {
  std::vector<cplx> a(n_t);
  double amax = 0.0;
  for (std::size_t j = 0; j < n_t; ++j) {
    a[j] = s(x, kTwoPi * static_cast<double>(j) / static_cast<double>(n_t));
    amax = std::max(amax, std::abs(a[j]));
  }
  const double zero_tol = 1e-14 * amax;
  for (std::size_t j = 0; j < n_t; ++j) {
    if (!(std::abs(a[j]) > zero_tol))
      throw SingularSymbolError("symbol vanishes at x = " + numeric::format_double(x) +
                                ", t = " + numeric::format_double(kTwoPi * static_cast<double>(j) / static_cast<double>(n_t)));
  }
  std::vector<cplx> out(n_t);
  double theta = std::arg(a[0]);
  out[0] = cplx(std::log(std::abs(a[0])), theta);
  for (std::size_t j = 1; j < n_t; ++j) {
    theta += std::arg(a[j] / a[j - 1]);
    out[j] = cplx(std::log(std::abs(a[j])), theta);
  }
  const double closing = theta + std::arg(a[0] / a[n_t - 1]) - std::arg(a[0]);
  const int winding = static_cast<int>(std::lround(closing / kTwoPi));
  if (winding != 0) throw WindingError(x, winding);
  return out;
}

inline void check_grid(int K, std::size_t n_t) {
  if (K < 1) throw DomainError("truncation K must be positive");
  if (!numeric::is_power_of_two(n_t) || n_t < 4 * static_cast<std::size_t>(K))
    throw DomainError("N_t must be a power of two with N_t >= 4K (N_t = " + std::to_string(n_t) +
                      ", K = " + std::to_string(K) + ")");
}

/// Estimated size of sum_{k>K} k c_k c_{-k} from a geometric fit of the
/// products |c_k c_{-k}| over the upper half of the retained range, plus a
/// round-off floor.
inline double series_tail(const FourierSeries& c) {
  const int K = c.K;
  auto m = [&](int k) { return std::abs(c[k]) * std::abs(c[-k]); };
  double scale = 0.0, cmax = 0.0;
  for (int k = 1; k <= K; ++k) scale += static_cast<double>(k) * m(k);
  for (int k = -K; k <= K; ++k) cmax = std::max(cmax, std::abs(c[k]));
  const double eps = std::numeric_limits<double>::epsilon();
  const double floor = 64.0 * eps * (1.0 + scale);
  if (K < 4) return floor + static_cast<double>(K) * m(K);
  const int q = std::max(1, K / 4);
  double lo = 0.0, hi = 0.0;
  for (int k = K - 2 * q + 1; k <= K - q; ++k) lo = std::max(lo, m(k));
  for (int k = K - q + 1; k <= K; ++k) hi = std::max(hi, m(k));
  const double noise = std::pow(1e-14 * std::max(cmax, 1.0), 2);
  if (hi <= noise || lo == 0.0) return floor;
  const double rho = std::pow(hi / lo, 1.0 / static_cast<double>(q));
  if (rho >= 1.0) return floor + static_cast<double>(K) * static_cast<double>(K) * hi;
  const double kd = static_cast<double>(K);
  return floor + hi * (kd * rho / (1.0 - rho) + rho / ((1.0 - rho) * (1.0 - rho)));
}

}  // namespace detail

/// Fourier coefficients of log a(x, .), k = -K..K, by the uniform-grid
/// transform of the unwrapped logarithm. N_t must be a power of two >= 4K.
inline FourierSeries log_fourier_coefficients(const BandSymbol& s, double x, int K, std::size_t n_t) {
  detail::check_grid(K, n_t);
  require_unit_interval(x, "log_fourier_coefficients");
  return detail::dft_coefficients(detail::unwrapped_log(s, x, n_t), K, detail::twiddles(n_t));
}

/// Fourier coefficients of partial_x log a = (partial_x a)/a at x.
inline FourierSeries dx_log_fourier_coefficients(const BandSymbol& s, double x, int K, std::size_t n_t,
                                                 double h = 1e-5) {
  detail::check_grid(K, n_t);
  std::vector<cplx> v(n_t);
  for (std::size_t j = 0; j < n_t; ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n_t);
    v[j] = s.dx(x, t, h) / s(x, t);
  }
  return detail::dft_coefficients(v, K, detail::twiddles(n_t));
}

/// sum_{k=1}^{K} k c_k c_{-k}.
inline cplx szego_series(const FourierSeries& c) {
  cplx e = 0.0;
  for (int k = 1; k <= c.K; ++k) e += static_cast<double>(k) * c[k] * c[-k];
  return e;
}

struct SzegoConstants {
  cplx G;
  cplx e0, e1;
  cplx E0, E1;
  cplx F;
  int K = 0;
  std::size_t n_x = 0;
  std::size_t n_t = 0;
  double tail_estimate = 0.0;
  bool truncation_warning = false;
};

/// Geometric mean, slice log-means, Szegő series at x = 0, 1 and F(a).
/// Tensor quadrature: periodic trapezoid in t, composite Simpson in x (n_x odd).
/// Without an analytic derivative table, partial_x a uses differences of step 1/(4 n_x).
inline SzegoConstants szego_constants(const BandSymbol& s, int K, std::size_t n_x, std::size_t n_t,
                                      double tolerance = 1e-8) {
  detail::check_grid(K, n_t);
  const auto w = numeric::simpson_weights(n_x);
  const auto xs = numeric::unit_nodes(n_x);
  const auto tw = detail::twiddles(n_t);
  const double h = 1.0 / (4.0 * static_cast<double>(n_x));

  struct Node {
    cplx mean_log, E, F;
    double tail;
  };
  std::vector<Node> nodes(n_x);
  numeric::parallel_for(n_x, [&](std::size_t i) {
    const double x = xs[i];
    const auto c = detail::dft_coefficients(detail::unwrapped_log(s, x, n_t), K, tw);
    std::vector<cplx> v(n_t);
    for (std::size_t j = 0; j < n_t; ++j) {
      const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n_t);
      v[j] = s.dx(x, t, h) / s(x, t);
    }
    const auto d = detail::dft_coefficients(v, K, tw);
    cplx f = 0.0;
    for (int k = -K; k <= K; ++k) f += static_cast<double>(k) * c[k] * d[-k];
    nodes[i] = Node{c[0], szego_series(c), f, detail::series_tail(c)};
  });

  SzegoConstants out;
  cplx log_g = 0.0, F = 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < n_x; ++i) {
    log_g += w[i] * nodes[i].mean_log;
    F += w[i] * nodes[i].F;
    tail = std::max(tail, nodes[i].tail);
  }
  out.G = std::exp(log_g);
  out.e0 = nodes.front().mean_log;
  out.e1 = nodes.back().mean_log;
  out.E0 = nodes.front().E;
  out.E1 = nodes.back().E;
  out.F = F;
  out.K = K;
  out.n_x = n_x;
  out.n_t = n_t;
  out.tail_estimate = tail;
  out.truncation_warning = tail > tolerance;
  return out;
}

}  // namespace kms
