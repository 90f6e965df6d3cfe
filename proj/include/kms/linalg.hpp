#pragma once

// Dense kernels: Hermitian tridiagonalization with implicit QL, balanced
// Hessenberg reduction with single-shift complex QR, and LU-based
// log-determinants (dense, banded, tridiagonal).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kms/error.hpp"
#include "kms/matrix.hpp"
#include "kms/numeric.hpp"

namespace kms::linalg {

inline double cabs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

struct EigenResult {
  std::vector<cplx> values;
  double residual = 0.0;
};

// ---------------------------------------------------------------------------
// Householder reflector: H^H (alpha; x) = (beta; 0) with H = I - tau v v^H, v_0 = 1.

struct Reflector {
  cplx tau = 0.0;
  double beta = 0.0;
};

inline Reflector make_reflector(cplx& alpha, cplx* x, std::size_t m, std::size_t stride) {
  double xnorm = 0.0;
  for (std::size_t i = 0; i < m; ++i) xnorm = std::hypot(xnorm, std::abs(x[i * stride]));
  if (xnorm == 0.0 && alpha.imag() == 0.0) return {0.0, alpha.real()};
  const double beta = -std::copysign(std::hypot(std::abs(alpha), xnorm), alpha.real());
  const cplx tau((beta - alpha.real()) / beta, -alpha.imag() / beta);
  const cplx scale = 1.0 / (alpha - beta);
  for (std::size_t i = 0; i < m; ++i) x[i * stride] *= scale;
  alpha = beta;
  return {tau, beta};
}

// ---------------------------------------------------------------------------
// Hermitian path

/// Reduces a dense Hermitian matrix (row-major, full storage) to real
/// symmetric tridiagonal form d, e (e[i] couples i and i+1).
inline void hermitian_tridiagonalize(std::vector<cplx> a, std::size_t n, std::vector<double>& d,
                                     std::vector<double>& e) {
  auto A = [&](std::size_t i, std::size_t j) -> cplx& { return a[i * n + j]; };
  std::vector<cplx> v(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    cplx alpha = A(k + 1, k);
    const auto refl = make_reflector(alpha, &A(k + 2, k), m - 1, n);
    A(k + 1, k) = alpha;
    A(k, k + 1) = std::conj(alpha);
    if (refl.tau == cplx(0.0)) continue;
    v[0] = 1.0;
    for (std::size_t i = 1; i < m; ++i) v[i] = A(k + 1 + i, k);
    // w = tau B v
    for (std::size_t i = 0; i < m; ++i) {
      cplx s = 0.0;
      const cplx* row = &A(k + 1 + i, k + 1);
      for (std::size_t j = 0; j < m; ++j) s += row[j] * v[j];
      w[i] = refl.tau * s;
    }
    cplx xv = 0.0;
    for (std::size_t i = 0; i < m; ++i) xv += std::conj(w[i]) * v[i];
    const cplx half = -0.5 * refl.tau * xv;
    for (std::size_t i = 0; i < m; ++i) w[i] += half * v[i];
    for (std::size_t i = 0; i < m; ++i) {
      cplx* row = &A(k + 1 + i, k + 1);
      const cplx vi = v[i], wi = w[i];
      for (std::size_t j = 0; j < m; ++j) row[j] -= vi * std::conj(w[j]) + wi * std::conj(v[j]);
    }
    for (std::size_t i = 1; i < m; ++i) {
      A(k + 1 + i, k) = 0.0;
      A(k, k + 1 + i) = 0.0;
    }
  }
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = A(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = std::abs(A(i + 1, i));
}

/// Implicit-shift QL on a symmetric tridiagonal matrix; d receives the
/// eigenvalues. Returns the largest neglected off-diagonal.
inline double tridiagonal_ql(std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  if (n == 0) return 0.0;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  double neglected = 0.0;
  constexpr int kMaxIter = 60;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) {
          neglected = std::max(neglected, std::abs(e[m]));
          break;
        }
      }
      if (m != l) {
        if (iter++ == kMaxIter) throw SolverError("tridiagonal QL did not converge", l);
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  return neglected;
}

inline double tridiagonal_norm(const std::vector<double>& d, const std::vector<double>& e) {
  double nrm = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double row = std::abs(d[i]);
    if (i > 0) row += std::abs(e[i - 1]);
    if (i + 1 < d.size()) row += std::abs(e[i]);
    nrm = std::max(nrm, row);
  }
  return nrm;
}

/// Eigenvalues of a real symmetric tridiagonal matrix, ascending.
inline EigenResult symmetric_tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> e) {
  const double nrm = tridiagonal_norm(d, e);
  const double neglected = tridiagonal_ql(d, e);
  std::sort(d.begin(), d.end());
  EigenResult r;
  r.values.assign(d.begin(), d.end());
  r.residual = nrm > 0.0 ? neglected / nrm : 0.0;
  return r;
}

/// Eigenvalues of a dense Hermitian matrix (row-major), ascending.
inline EigenResult hermitian_eigenvalues(const std::vector<cplx>& a, std::size_t n) {
  std::vector<double> d, e;
  hermitian_tridiagonalize(a, n, d, e);
  return symmetric_tridiagonal_eigenvalues(std::move(d), std::move(e));
}

// ---------------------------------------------------------------------------
// General path

/// Diagonal similarity by powers of 2 that roughly equalizes row and column norms.
inline void balance(std::vector<cplx>& a, std::size_t n) {
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += cabs1(a[j * n + i]);
        r += cabs1(a[i * n + j]);
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] *= g;
        for (std::size_t j = 0; j < n; ++j) a[j * n + i] *= f;
      }
    }
  }
}

/// Unitary reduction to upper Hessenberg form (entries below the subdiagonal zeroed).
inline void hessenberg_reduce(std::vector<cplx>& a, std::size_t n) {
  auto A = [&](std::size_t i, std::size_t j) -> cplx& { return a[i * n + j]; };
  std::vector<cplx> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    cplx alpha = A(k + 1, k);
    const auto refl = make_reflector(alpha, &A(k + 2, k), m - 1, n);
    A(k + 1, k) = alpha;
    if (refl.tau == cplx(0.0)) continue;
    v[0] = 1.0;
    for (std::size_t i = 1; i < m; ++i) {
      v[i] = A(k + 1 + i, k);
      A(k + 1 + i, k) = 0.0;
    }
    // right: A(:, k+1:) <- A(:, k+1:) H
    for (std::size_t r = 0; r < n; ++r) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += A(r, k + 1 + j) * v[j];
      s *= refl.tau;
      for (std::size_t j = 0; j < m; ++j) A(r, k + 1 + j) -= s * std::conj(v[j]);
    }
    // left: A(k+1:, k+1:) <- H^H A(k+1:, k+1:)
    const cplx tc = std::conj(refl.tau);
    for (std::size_t c = k + 1; c < n; ++c) {
      cplx s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += std::conj(v[i]) * A(k + 1 + i, c);
      s *= tc;
      for (std::size_t i = 0; i < m; ++i) A(k + 1 + i, c) -= v[i] * s;
    }
  }
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR with
/// Wilkinson shifts and exceptional shifts every 10 stagnant sweeps.
inline EigenResult hessenberg_eigenvalues(std::vector<cplx> h, std::size_t n) {
  auto H = [&](std::size_t i, std::size_t j) -> cplx& { return h[i * n + j]; };
  EigenResult out;
  out.values.assign(n, cplx(0.0));
  if (n == 0) return out;
  double hnorm = 0.0;
  for (auto z : h) hnorm = std::max(hnorm, std::abs(z));
  const double ulp = std::numeric_limits<double>::epsilon();
  const double smlnum = std::numeric_limits<double>::min() * (static_cast<double>(n) / ulp);
  double neglected = 0.0;
  constexpr int kMaxIter = 30 * 10;

  long i = static_cast<long>(n) - 1;
  while (i >= 0) {
    int its = 0;
    long l = 0;
    for (;;) {
      // find a negligible subdiagonal in rows l+1..i
      long k = i;
      for (; k > 0; --k) {
        const auto ku = static_cast<std::size_t>(k);
        const cplx sub = H(ku, ku - 1);
        if (cabs1(sub) <= smlnum) break;
        double tst = cabs1(H(ku - 1, ku - 1)) + cabs1(H(ku, ku));
        if (tst == 0.0) {
          if (ku >= 2) tst += std::abs(H(ku - 1, ku - 2).real());
          if (ku + 1 < n) tst += std::abs(H(ku + 1, ku).real());
        }
        if (std::abs(sub.real()) <= ulp * tst) {
          const double ab = std::max(cabs1(sub), cabs1(H(ku - 1, ku)));
          const double ba = std::min(cabs1(sub), cabs1(H(ku - 1, ku)));
          const double aa = std::max(cabs1(H(ku, ku)), cabs1(H(ku - 1, ku - 1) - H(ku, ku)));
          const double bb = std::min(cabs1(H(ku, ku)), cabs1(H(ku - 1, ku - 1) - H(ku, ku)));
          const double s = aa + ab;
          if (ba * (ab / s) <= std::max(smlnum, ulp * (bb * (aa / s)))) break;
        }
      }
      l = k;
      if (l > 0) {
        const auto lu = static_cast<std::size_t>(l);
        neglected = std::max(neglected, std::abs(H(lu, lu - 1)));
        H(lu, lu - 1) = 0.0;
      }
      if (l >= i) break;
      if (its >= kMaxIter) throw SolverError("Hessenberg QR did not converge", static_cast<std::size_t>(i));
      ++its;

      const auto lu = static_cast<std::size_t>(l), iu = static_cast<std::size_t>(i);
      cplx shift;
      if (its % 20 == 10) {
        shift = 0.75 * std::abs(H(lu + 1, lu).real()) + H(lu, lu);
      } else if (its % 20 == 0) {
        shift = 0.75 * std::abs(H(iu, iu - 1).real()) + H(iu, iu);
      } else {
        const cplx a = H(iu - 1, iu - 1), b = H(iu - 1, iu), c = H(iu, iu - 1), d = H(iu, iu);
        const cplx half = 0.5 * (a - d);
        const cplx disc = std::sqrt(half * half + b * c);
        const cplx m = 0.5 * (a + d);
        const cplx s1 = m + disc, s2 = m - disc;
        shift = std::abs(s1 - d) <= std::abs(s2 - d) ? s1 : s2;
      }

      // implicit single-shift QR sweep on the active block [l, i]
      cplx x = H(lu, lu) - shift;
      cplx y = H(lu + 1, lu);
      for (std::size_t kk = lu; kk < iu; ++kk) {
        if (kk > lu) {
          x = H(kk, kk - 1);
          y = H(kk + 1, kk - 1);
        }
        const double ax = std::abs(x), r = std::hypot(ax, std::abs(y));
        double c = 1.0;
        cplx s = 0.0;
        if (r != 0.0) {
          if (ax == 0.0) {
            c = 0.0;
            s = std::conj(y) / std::abs(y);
          } else {
            c = ax / r;
            s = (x / ax) * std::conj(y) / r;
          }
        }
        if (kk > lu) {
          H(kk, kk - 1) = c * x + s * y;
          H(kk + 1, kk - 1) = 0.0;
        }
        for (std::size_t j = (kk > lu ? kk : lu); j <= iu; ++j) {
          const cplx a = H(kk, j), b = H(kk + 1, j);
          H(kk, j) = c * a + s * b;
          H(kk + 1, j) = -std::conj(s) * a + c * b;
        }
        const std::size_t rmax = std::min(kk + 2, iu);
        for (std::size_t r2 = lu; r2 <= rmax; ++r2) {
          const cplx a = H(r2, kk), b = H(r2, kk + 1);
          H(r2, kk) = a * c + b * std::conj(s);
          H(r2, kk + 1) = -a * s + b * c;
        }
      }
    }
    out.values[static_cast<std::size_t>(i)] = H(static_cast<std::size_t>(i), static_cast<std::size_t>(i));
    --i;
  }
  out.residual = hnorm > 0.0 ? neglected / hnorm : 0.0;
  return out;
}

/// Eigenvalues of a general dense matrix (row-major).
inline EigenResult general_eigenvalues(std::vector<cplx> a, std::size_t n) {
  balance(a, n);
  hessenberg_reduce(a, n);
  return hessenberg_eigenvalues(std::move(a), n);
}

// ---------------------------------------------------------------------------
// Log-determinants

/// log|det| and arg(det) in (-pi, pi]; log_abs = -inf for a singular matrix.
struct LogDet {
  double log_abs = 0.0;
  double phase = 0.0;
};

inline double wrap_phase(double p) {
  p = std::remainder(p, kTwoPi);
  if (p <= -kPi) p += kTwoPi;
  return p;
}

inline LogDet singular_logdet() { return {-std::numeric_limits<double>::infinity(), 0.0}; }

/// Three-term recurrence D_k = d_k D_{k-1} - u_{k-1} l_{k-1} D_{k-2}, carried as a
/// rescaled pair so no intermediate overflows.
inline LogDet tridiagonal_logdet(const std::vector<cplx>& d, const std::vector<cplx>& upper,
                                 const std::vector<cplx>& lower) {
  const std::size_t n = d.size();
  if (n == 0) return {};
  cplx prev = 1.0, cur = d[0];
  double log_scale = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const cplx next = d[k] * cur - upper[k - 1] * lower[k - 1] * prev;
    prev = cur;
    cur = next;
    const double m = std::max(std::abs(prev), std::abs(cur));
    if (m == 0.0) return singular_logdet();
    if (m > 1e100 || m < 1e-100) {
      const int ex = std::ilogb(m);
      prev = std::scalbn(prev.real(), -ex) + cplx(0.0, std::scalbn(prev.imag(), -ex));
      cur = std::scalbn(cur.real(), -ex) + cplx(0.0, std::scalbn(cur.imag(), -ex));
      log_scale += static_cast<double>(ex) * std::log(2.0);
    }
  }
  if (cur == cplx(0.0)) return singular_logdet();
  return {std::log(std::abs(cur)) + log_scale, wrap_phase(std::arg(cur))};
}

/// Partial-pivoting LU on a dense row-major copy.
inline LogDet dense_logdet(std::vector<cplx> a, std::size_t n) {
  double log_abs = 0.0, phase = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a[i * n + k]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) return singular_logdet();
    if (piv != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      phase += kPi;
    }
    const cplx pivot = a[k * n + k];
    log_abs += std::log(std::abs(pivot));
    phase += std::arg(pivot);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = a[i * n + k] / pivot;
      if (f == cplx(0.0)) continue;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return {log_abs, wrap_phase(phase)};
}

/// Partial-pivoting LU in band storage: kl sub- and ku superdiagonals, with
/// room for kl extra superdiagonals of fill.
inline LogDet banded_logdet(const MatrixRealization& M) {
  const std::size_t n = M.rows();
  const int kl = std::max(0, -M.lower()), ku = std::max(0, M.upper());
  const std::size_t w = static_cast<std::size_t>(2 * kl + ku + 1);
  std::vector<cplx> band(n * w, cplx(0.0));
  auto at = [&](std::size_t i, std::size_t j) -> cplx& {
    return band[i * w + static_cast<std::size_t>(static_cast<long>(j) - static_cast<long>(i) + kl)];
  };
  for (std::size_t i = 0; i < n; ++i) {
    auto [a, b] = M.row_span(i);
    for (std::size_t j = a; j < b; ++j) at(i, j) = M(i, j);
  }
  double log_abs = 0.0, phase = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t last_row = std::min(n - 1, k + static_cast<std::size_t>(kl));
    const std::size_t last_col = std::min(n - 1, k + static_cast<std::size_t>(kl + ku));
    std::size_t piv = k;
    double best = std::abs(at(k, k));
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      const double v = std::abs(at(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) return singular_logdet();
    if (piv != k) {
      for (std::size_t j = k; j <= last_col; ++j) std::swap(at(k, j), at(piv, j));
      phase += kPi;
    }
    const cplx pivot = at(k, k);
    log_abs += std::log(std::abs(pivot));
    phase += std::arg(pivot);
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      const cplx f = at(i, k) / pivot;
      if (f == cplx(0.0)) continue;
      for (std::size_t j = k + 1; j <= last_col; ++j) at(i, j) -= f * at(k, j);
    }
  }
  return {log_abs, wrap_phase(phase)};
}

}  // namespace kms::linalg
