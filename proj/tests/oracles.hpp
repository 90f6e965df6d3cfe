// Brute-force references shared by the unit suites and the acceptance run.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "kms/numeric.hpp"

namespace oracle {

using kms::cplx;
using Dense = std::vector<cplx>;  // row-major n x n

inline cplx cofactor_det(const Dense& a, std::size_t n) {
  if (n == 1) return a[0];
  cplx total = 0.0;
  Dense minor((n - 1) * (n - 1));
  for (std::size_t c = 0; c < n; ++c) {
    if (a[c] == cplx(0.0)) continue;
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0, jj = 0; j < n; ++j)
        if (j != c) minor[(i - 1) * (n - 1) + jj++] = a[i * n + j];
    const cplx term = a[c] * cofactor_det(minor, n - 1);
    total += (c % 2 == 0) ? term : -term;
  }
  return total;
}

/// Monic characteristic polynomial det(zI - A), coefficients c[0..n] with c[n] = 1,
/// from the cofactor determinant sampled at n+1 roots of unity.
inline std::vector<cplx> char_poly(const Dense& a, std::size_t n) {
  const std::size_t m = n + 1;
  double scale = 1.0;
  for (auto v : a) scale = std::max(scale, std::abs(v));
  std::vector<cplx> vals(m);
  for (std::size_t k = 0; k < m; ++k) {
    const cplx z = scale * std::polar(1.0, kms::kTwoPi * static_cast<double>(k) / static_cast<double>(m));
    Dense b = a;
    for (auto& v : b) v = -v;
    for (std::size_t i = 0; i < n; ++i) b[i * n + i] += z;
    vals[k] = cofactor_det(b, n);
  }
  std::vector<cplx> c(m);
  for (std::size_t j = 0; j < m; ++j) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      s += vals[k] * std::polar(1.0, -kms::kTwoPi * static_cast<double>(j * k) / static_cast<double>(m));
    c[j] = s / static_cast<double>(m) / std::pow(scale, static_cast<double>(j));
  }
  return c;
}

/// Durand-Kerner roots of a monic polynomial, polished by Newton steps.
inline std::vector<cplx> poly_roots(const std::vector<cplx>& c) {
  const std::size_t n = c.size() - 1;
  auto eval = [&](cplx z) {
    cplx r = c[n];
    for (std::size_t k = n; k-- > 0;) r = r * z + c[k];
    return r;
  };
  auto deriv = [&](cplx z) {
    cplx r = 0.0;
    for (std::size_t k = n; k >= 1; --k) r = r * z + static_cast<double>(k) * c[k];
    return r;
  };
  double bound = 0.0;
  for (std::size_t k = 0; k < n; ++k) bound = std::max(bound, std::abs(c[k]));
  bound += 1.0;
  std::vector<cplx> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = bound * std::pow(cplx(0.4, 0.9), static_cast<double>(k));
  for (int it = 0; it < 2000; ++it) {
    double move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx den = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) den *= z[i] - z[j];
      const cplx step = eval(z[i]) / den;
      z[i] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move < 1e-15 * bound) break;
  }
  for (auto& r : z)
    for (int it = 0; it < 3; ++it) {
      const cplx d = deriv(r);
      if (d == cplx(0.0)) break;
      r -= eval(r) / d;
    }
  return z;
}

/// Largest distance in an optimal-by-greedy pairing of two equally sized sets.
inline double match_distance(std::vector<cplx> a, std::vector<cplx> b) {
  double worst = 0.0;
  for (auto x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx u, cplx v) { return std::abs(u - x) < std::abs(v - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

inline Dense random_dense(std::mt19937_64& rng, std::size_t n, bool hermitian) {
  std::normal_distribution<double> g;
  Dense a(n * n);
  for (auto& v : a) v = cplx(g(rng), g(rng));
  if (hermitian)
    for (std::size_t i = 0; i < n; ++i) {
      a[i * n + i] = a[i * n + i].real();
      for (std::size_t j = i + 1; j < n; ++j) a[j * n + i] = std::conj(a[i * n + j]);
    }
  return a;
}

}  // namespace oracle
