#pragma once

// Eigenvalues, singular values and the spectral functionals compared with
// the first limit theorem.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "kms/error.hpp"
#include "kms/linalg.hpp"
#include "kms/matrix.hpp"
#include "kms/numeric.hpp"
#include "kms/region.hpp"
#include "kms/symbol.hpp"
#include "kms/test_function.hpp"

namespace kms {

struct SolverCaps {
  std::size_t hermitian = 4096;
  std::size_t general = 512;
  std::size_t moment_dense = 1024;
  std::size_t moment_banded = std::size_t{1} << 17;
};

enum class SpectrumKind { Eigenvalues, SingularValues };

struct SpectralSummary {
  SpectrumKind kind = SpectrumKind::Eigenvalues;
  std::vector<cplx> values;
  std::size_t n = 0;
  double residual = 0.0;
  bool hermitian = false;
};

inline bool spectral_order(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

namespace detail {

/// True when every nonzero lies on the three central diagonals.
inline bool is_tridiagonal(const MatrixRealization& M) {
  if (M.is_banded() && M.lower() >= -1 && M.upper() <= 1) return true;
  const auto [p, q] = M.nonzero_band();
  return p >= -1 && q <= 1;
}

inline SpectralSummary hermitian_spectrum(const MatrixRealization& M) {
  const std::size_t n = M.rows();
  linalg::EigenResult r;
  if (is_tridiagonal(M)) {
    std::vector<double> d(n), e(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = M(i, i).real();
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = std::abs(M(i + 1, i));
    r = linalg::symmetric_tridiagonal_eigenvalues(std::move(d), std::move(e));
  } else {
    r = linalg::hermitian_eigenvalues(M.dense_data(), n);
  }
  SpectralSummary s;
  s.values = std::move(r.values);
  s.residual = r.residual;
  s.n = n;
  s.hermitian = true;
  std::sort(s.values.begin(), s.values.end(), spectral_order);
  return s;
}

}  // namespace detail

/// All eigenvalues, sorted by real part then imaginary part. Hermitian input
/// takes the tridiagonal QL path (real output); anything else is balanced,
/// reduced to Hessenberg form and iterated with shifted QR.
inline SpectralSummary eigenvalues(const MatrixRealization& M, const SolverCaps& caps = {}) {
  if (!M.square()) throw ShapeError("eigenvalues need a square matrix");
  const std::size_t n = M.rows();
  if (M.is_hermitian()) {
    if (n > caps.hermitian)
      throw SizeError("Hermitian eigensolver cap " + std::to_string(caps.hermitian) + " exceeded by order " +
                      std::to_string(n));
    return detail::hermitian_spectrum(M);
  }
  if (n > caps.general)
    throw SizeError("general eigensolver cap " + std::to_string(caps.general) + " exceeded by order " +
                    std::to_string(n));
  auto r = linalg::general_eigenvalues(M.dense_data(), n);
  SpectralSummary s;
  s.values = std::move(r.values);
  s.residual = r.residual;
  s.n = n;
  std::sort(s.values.begin(), s.values.end(), spectral_order);
  return s;
}

/// Square roots of the eigenvalues of M M^* (or M^* M, whichever is smaller), descending.
inline SpectralSummary singular_values(const MatrixRealization& M, const SolverCaps& caps = {}) {
  const bool wide = M.rows() <= M.cols();
  auto P = wide ? multiply(M, M.adjoint()) : multiply(M.adjoint(), M);
  const std::size_t k = P.rows();
  if (k > caps.hermitian)
    throw SizeError("Hermitian eigensolver cap " + std::to_string(caps.hermitian) + " exceeded by order " +
                    std::to_string(k));
  for (std::size_t i = 0; i < k; ++i) {
    auto [a, b] = P.row_span(i);
    for (std::size_t j = a; j < b && j < i; ++j) P.set(j, i, std::conj(P(i, j)));
    P.set(i, i, P(i, i).real());
  }
  auto e = detail::hermitian_spectrum(P);
  SpectralSummary s;
  s.kind = SpectrumKind::SingularValues;
  s.n = k;
  s.residual = e.residual;
  s.hermitian = true;
  for (auto v : e.values) s.values.emplace_back(std::sqrt(std::max(v.real(), 0.0)), 0.0);
  std::sort(s.values.begin(), s.values.end(), [](cplx a, cplx b) { return a.real() > b.real(); });
  return s;
}

/// (1/count) sum phi(value).
inline cplx empirical_mean(const SpectralSummary& S, const TestFunction& phi) {
  if (S.values.empty()) throw DomainError("empirical mean of an empty spectrum");
  cplx s = 0.0;
  for (auto v : S.values) s += phi(v);
  return s / static_cast<double>(S.values.size());
}

namespace detail {

template <typename G>
cplx symbol_average(const BandSymbol& s, G&& g, std::size_t n_x, std::size_t n_t) {
  if (n_x < 16 || n_t < 16) throw DomainError("quadrature sizes must be at least 16");
  if (n_x % 2 == 0) ++n_x;
  const auto w = numeric::simpson_weights(n_x);
  const auto xs = numeric::unit_nodes(n_x);
  cplx total = 0.0;
  for (std::size_t i = 0; i < n_x; ++i)
    total += w[i] * numeric::periodic_mean([&](double t) { return g(s(xs[i], t)); }, n_t);
  return total;
}

}  // namespace detail

/// (1/2pi) int_0^1 int_0^{2pi} phi(a(x,t)) dt dx; trapezoid in t, Simpson in x
/// (an even N_x is raised by one).
inline cplx lsd_integral(const BandSymbol& s, const TestFunction& phi, std::size_t n_x, std::size_t n_t) {
  return detail::symbol_average(s, [&](cplx z) { return phi(z); }, n_x, n_t);
}

/// Same average of phi(|a(x,t)|): the limit for singular values.
inline cplx lsd_integral_modulus(const BandSymbol& s, const TestFunction& phi, std::size_t n_x, std::size_t n_t) {
  return detail::symbol_average(s, [&](cplx z) { return phi(cplx(std::abs(z), 0.0)); }, n_x, n_t);
}

/// Tr[M^p (M^*)^q] / dimension by explicit products.
inline cplx moment_trace(const MatrixRealization& M, int p, int q, const SolverCaps& caps = {}) {
  if (!M.square()) throw ShapeError("moment_trace needs a square matrix");
  if (p < 0 || q < 0 || p + q < 1) throw DomainError("moment_trace needs p, q >= 0 and p + q >= 1");
  if (p + q > 8) throw SizeError("moment_trace limited to p + q <= 8");
  const std::size_t cap = M.is_banded() ? caps.moment_banded : caps.moment_dense;
  if (M.rows() > cap) throw SizeError("moment_trace size cap " + std::to_string(cap) + " exceeded");
  const auto Ms = M.adjoint();
  MatrixRealization acc;
  bool started = false;
  auto mul = [&](const MatrixRealization& f) {
    acc = started ? multiply(acc, f) : f;
    started = true;
  };
  for (int i = 0; i < p; ++i) mul(M);
  for (int i = 0; i < q; ++i) mul(Ms);
  return acc.trace() / static_cast<double>(M.rows());
}

/// Fraction of eigenvalues within eps of the marked cells of R (Chebyshev
/// dilation by ceil(eps / cell size) cells).
inline double cluster_fraction(const SpectralSummary& S, const RegionMask& R, double eps) {
  if (S.values.empty()) throw DomainError("cluster fraction of an empty spectrum");
  if (!(eps >= R.cell_size() * (1.0 - 1e-12)))
    throw DomainError("cluster radius " + numeric::format_double(eps) + " is below the cell size " +
                      numeric::format_double(R.cell_size()));
  const long radius = static_cast<long>(std::ceil(eps / R.cell_size() - 1e-9));
  std::size_t inside = 0;
  for (auto v : S.values)
    if (R.near(v, radius)) ++inside;
  return static_cast<double>(inside) / static_cast<double>(S.values.size());
}

/// CSV with header "index,re,im" (eigenvalues) or "index,sigma" (singular values).
inline void write_spectrum_csv(std::ostream& os, const SpectralSummary& S) {
  if (S.kind == SpectrumKind::Eigenvalues) {
    os << "index,re,im\n";
    for (std::size_t i = 0; i < S.values.size(); ++i)
      os << i << ',' << numeric::format_double(S.values[i].real()) << ','
         << numeric::format_double(S.values[i].imag()) << '\n';
  } else {
    os << "index,sigma\n";
    for (std::size_t i = 0; i < S.values.size(); ++i)
      os << i << ',' << numeric::format_double(S.values[i].real()) << '\n';
  }
}

}  // namespace kms
