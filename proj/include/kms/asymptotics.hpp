#pragma once

// Determinant asymptotics: stable log-determinants, strong-limit
// predictions, the trace correction for analytic test functions and the
// shifted / discontinuous Schroedinger determinant formulas.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kms/error.hpp"
#include "kms/linalg.hpp"
#include "kms/matrix.hpp"
#include "kms/numeric.hpp"
#include "kms/spectra.hpp"
#include "kms/symbol.hpp"
#include "kms/szego.hpp"
#include "kms/test_function.hpp"

namespace kms {

using linalg::LogDet;

/// log|det M| and arg det M. Tridiagonal matrices use the three-term
/// recurrence, banded ones a banded LU, the rest a dense LU.
inline LogDet log_det(const MatrixRealization& M) {
  if (!M.square()) throw ShapeError("log_det needs a square matrix");
  const std::size_t n = M.rows();
  if (n == 0) return {};
  if (detail::is_tridiagonal(M)) {
    std::vector<cplx> d(n), up(n > 0 ? n - 1 : 0), lo(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) d[i] = M(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      up[i] = M(i, i + 1);
      lo[i] = M(i + 1, i);
    }
    return linalg::tridiagonal_logdet(d, up, lo);
  }
  if (M.is_banded()) return linalg::banded_logdet(M);
  return linalg::dense_logdet(M.dense_data(), n);
}

/// det M / G^exponent, combined in log space. A singular M gives 0.
inline cplx det_ratio(const MatrixRealization& M, cplx G, long exponent) {
  if (G == cplx(0.0)) throw DomainError("det_ratio needs G != 0");
  const auto ld = log_det(M);
  if (std::isinf(ld.log_abs) && ld.log_abs < 0) return 0.0;
  const auto e = static_cast<double>(exponent);
  return std::exp(cplx(ld.log_abs - e * std::log(std::abs(G)), ld.phase - e * std::arg(G)));
}

/// exp(1/2 [e(a;0) - e(a;1) + E(a;0) + E(a;1)]): limit of det T_n(a) / G^{n+1}.
inline cplx ms_limit(const SzegoConstants& C) { return std::exp(0.5 * (C.e0 - C.e1 + C.E0 + C.E1)); }

/// exp(1/2 [e(a;0) + e(a;1) + E(a;0) + E(a;1) + F(a)]): limit for row indexing.
inline cplx es_limit(const SzegoConstants& C) { return std::exp(0.5 * (C.e0 + C.e1 + C.E0 + C.E1 + C.F)); }

// ---------------------------------------------------------------------------
// Schroedinger determinants

namespace detail {

inline double kac_root(double f) { return f + std::sqrt(f * f - 4.0); }

inline double potential_at_zero(const PiecewisePotential& f) { return f.piece(0)(0.0); }
inline double potential_at_one(const PiecewisePotential& f) { return f.piece(f.piece_count() - 1)(1.0); }

inline bool is_jump(const PiecewisePotential& f, std::size_t j) {
  const double l = f.left_limit(j), r = f.right_limit(j);
  return std::abs(l - r) > 1e-12 * std::max({1.0, std::abs(l), std::abs(r)});
}

}  // namespace detail

/// G(f) = exp int_0^1 log((f + sqrt(f^2 - 4)) / 2) dx, adaptive Gauss-Kronrod per piece.
inline double schrodinger_geometric_mean(const PiecewisePotential& f) {
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (std::size_t i = 0; i < f.piece_count(); ++i) {
    auto [lo, hi] = f.piece_interval(i);
    const auto& g = f.piece(i);
    auto integrand = [&](double x) {
      const double v = g(x);
      if (!(v > 2.0)) throw DomainError("potential must exceed 2; f(" + numeric::format_double(x) + ") = " +
                                        numeric::format_double(v));
      return std::log(0.5 * detail::kac_root(v));
    };
    total += gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 20, 1e-15);
  }
  return std::exp(total);
}

struct KacLimit {
  double value = 0.0;
  double G = 0.0;
};

/// Limit of det T_n(f; eps) / G(f)^n for continuous f > 2.
inline KacLimit kac_limit(const PiecewisePotential& f, double eps) {
  for (std::size_t j = 0; j < f.breakpoints().size(); ++j)
    if (detail::is_jump(f, j))
      throw DomainError("kac_limit needs a continuous potential; jump at " +
                        numeric::format_double(f.breakpoints()[j].at));
  f.require_above(2.0);
  const double f0 = detail::potential_at_zero(f), f1 = detail::potential_at_one(f);
  const double num = std::pow(detail::kac_root(f0), 1.0 - eps) * std::pow(detail::kac_root(f1), eps);
  const double den = 2.0 * std::pow((f0 * f0 - 4.0) * (f1 * f1 - 4.0), 0.25);
  return {num / den, schrodinger_geometric_mean(f)};
}

/// x - floor(x), with values within 1e-9 (relative) of an integer treated as integers.
inline double frac_part(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return 0.0;
  return x - std::floor(x);
}

/// 1 + x - ceil(x): the fractional part, but 1 at integers.
inline double frac_part_prime(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return 1.0;
  return 1.0 + x - std::ceil(x);
}

/// Best rational approximation p/q of x with q <= max_den, when within tol.
inline std::optional<std::pair<long, long>> detect_rational(double x, long max_den = 1000000, double tol = 1e-12) {
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <= tol) return std::pair{h1, k1};
    const double rem = r - a;
    if (rem == 0.0) break;
    r = 1.0 / rem;
  }
  return std::nullopt;
}

struct KacJump {
  double at = 0.0;
  double beta = 1.0;
  double gamma = 1.0;
  Continuity side = Continuity::Left;
};

struct KacPrediction {
  double alpha = 0.0;
  double G = 0.0;
  std::vector<KacJump> jumps;
  double lim_sup = 0.0;
  double lim_inf = 0.0;

  /// alpha prod_j beta_j gamma_j^{frac_j(n c_j)}.
  double operator()(std::size_t n) const {
    double v = alpha;
    for (const auto& j : jumps) {
      const double x = static_cast<double>(n) * j.at;
      const double fr = j.side == Continuity::Left ? frac_part(x) : frac_part_prime(x);
      v *= j.beta * std::pow(j.gamma, fr);
    }
    return v;
  }
};

/// Jump formula for det T_n(f; 1) / G(f)^n with piecewise-smooth f > 2.
/// Continuous breakpoints contribute beta = gamma = 1. For rational jump
/// locations the bounds come from one full period of the predictor; each
/// irrational location contributes beta * [min(1,gamma), max(1,gamma)].
inline KacPrediction kac_jump_prediction(const PiecewisePotential& f) {
  f.require_above(2.0);
  KacPrediction out;
  const double f0 = detail::potential_at_zero(f), f1 = detail::potential_at_one(f);
  out.alpha = 0.5 * detail::kac_root(f1) / std::pow((f0 * f0 - 4.0) * (f1 * f1 - 4.0), 0.25);
  out.G = schrodinger_geometric_mean(f);
  for (std::size_t j = 0; j < f.breakpoints().size(); ++j) {
    KacJump jump;
    jump.at = f.breakpoints()[j].at;
    jump.side = f.breakpoints()[j].side;
    if (detail::is_jump(f, j)) {
      const double fm = f.left_limit(j), fp = f.right_limit(j);
      const double sm = std::sqrt(fm * fm - 4.0), sp = std::sqrt(fp * fp - 4.0);
      jump.beta = (fm - fp + sp + sm) / (2.0 * std::pow((fp * fp - 4.0) * (fm * fm - 4.0), 0.25));
      jump.gamma = (fp + sp) / (fm + sm);
    }
    out.jumps.push_back(jump);
  }

  long period = 1;
  double hi_irr = 1.0, lo_irr = 1.0;
  KacPrediction periodic = out;
  periodic.jumps.clear();
  for (const auto& j : out.jumps) {
    if (j.beta == 1.0 && j.gamma == 1.0) continue;
    if (auto pq = detect_rational(j.at); pq && std::lcm(period, pq->second) <= 10000000) {
      period = std::lcm(period, pq->second);
      periodic.jumps.push_back(j);
    } else {
      hi_irr *= j.beta * std::max(1.0, j.gamma);
      lo_irr *= j.beta * std::min(1.0, j.gamma);
    }
  }
  double hi = -HUGE_VAL, lo = HUGE_VAL;
  for (long n = 1; n <= period; ++n) {
    const double v = periodic(static_cast<std::size_t>(n));
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  out.lim_sup = hi * hi_irr;
  out.lim_inf = lo * lo_irr;
  return out;
}

// ---------------------------------------------------------------------------
// Trace correction

/// Default prefactor of the double-integral term.
inline constexpr double kWidomPrefactor = 1.0 / (8.0 * kPi * kPi);

struct WidomCorrection {
  cplx value;
  cplx boundary;       // (1/4pi) int [phi(a(0,t)) - phi(a(1,t))] dt
  cplx series;         // c_W sum_k (I_k(0) + I_k(1))
  double last_term = 0.0;
  bool truncation_warning = false;
};

/// Predicted Tr phi(T_n(a)) - (n+1) * lsd_integral for analytic phi.
/// The double integrals use the tensor trapezoid rule on N_t >= 8K points,
/// evaluated through diagonal sums D(d) = sum_j Phi(t_j, t_{j-d}).
inline WidomCorrection widom_correction(const BandSymbol& s, const TestFunction& phi, int K, std::size_t n_t,
                                        double c_w = kWidomPrefactor, double tolerance = 1e-8) {
  if (!phi.analytic()) throw DomainError("widom_correction needs an analytic test function, got " + phi.id());
  if (K < 1) throw DomainError("truncation K must be positive");
  if (n_t < 8 * static_cast<std::size_t>(K)) throw DomainError("widom_correction needs N_t >= 8K");
  const auto N = n_t;
  const double dt = kTwoPi / static_cast<double>(N);

  WidomCorrection out;
  out.boundary = 0.5 * (numeric::periodic_mean([&](double t) { return phi(s(0.0, t)); }, N) -
                        numeric::periodic_mean([&](double t) { return phi(s(1.0, t)); }, N));

  std::vector<cplx> terms(static_cast<std::size_t>(K), cplx(0.0));
  for (double x : {0.0, 1.0}) {
    std::vector<cplx> a(N), ad(N);
    for (std::size_t j = 0; j < N; ++j) {
      a[j] = s(x, dt * static_cast<double>(j));
      ad[j] = s.dt(x, dt * static_cast<double>(j));
    }
    std::vector<cplx> D(N, cplx(0.0));
    numeric::parallel_for(N, [&](std::size_t d) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        const std::size_t l = (j + N - d) % N;
        acc += phi.divided_difference(a[j], a[l]) * (ad[j] - ad[l]);
      }
      D[d] = acc;
    });
    for (int k = 1; k <= K; ++k) {
      cplx acc = 0.0;
      for (std::size_t d = 0; d < N; ++d)
        acc += D[d] * std::sin(static_cast<double>(k) * dt * static_cast<double>(d));
      terms[static_cast<std::size_t>(k - 1)] += dt * dt * acc;
    }
  }
  cplx series = 0.0;
  for (auto t : terms) series += t;
  out.series = c_w * series;
  out.value = out.boundary + out.series;
  out.last_term = std::abs(c_w * terms.back());
  out.truncation_warning = out.last_term > tolerance * (1.0 + std::abs(out.series));
  return out;
}

// ---------------------------------------------------------------------------
// Prediction rows

struct PredictionRow {
  std::size_t n = 0;
  cplx observed;
  cplx predicted;
  double abs_err = 0.0;
};

inline PredictionRow make_row(std::size_t n, cplx observed, cplx predicted) {
  return {n, observed, predicted, std::abs(observed - predicted)};
}

/// CSV "n,observed,predicted,abs_err"; observed and predicted are real parts,
/// abs_err is the complex modulus of the difference.
inline void write_prediction_csv(std::ostream& os, const std::vector<PredictionRow>& rows) {
  os << "n,observed,predicted,abs_err\n";
  for (const auto& r : rows)
    os << r.n << ',' << numeric::format_double(r.observed.real()) << ','
       << numeric::format_double(r.predicted.real()) << ',' << numeric::format_double(r.abs_err) << '\n';
}

}  // namespace kms
