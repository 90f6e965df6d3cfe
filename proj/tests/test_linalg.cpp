#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "kms/asymptotics.hpp"
#include "kms/linalg.hpp"
#include "kms/matgen.hpp"
#include "oracles.hpp"

using namespace kms;

namespace {

MatrixRealization from_dense(const oracle::Dense& a, std::size_t n) {
  auto m = MatrixRealization::dense(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.set(i, j, a[i * n + j]);
  return m;
}

double log_det_error(const linalg::LogDet& ld, cplx det) {
  const cplx got = std::exp(cplx(ld.log_abs, ld.phase));
  return std::abs(got - det) / std::max(1.0, std::abs(det));
}

}  // namespace

TEST_CASE("general eigensolver matches characteristic polynomial roots") {
  std::mt19937_64 rng(11);
  for (int c = 0; c < 120; ++c) {
    const std::size_t n = 1 + static_cast<std::size_t>(c % 6);
    const auto a = oracle::random_dense(rng, n, false);
    const auto want = oracle::poly_roots(oracle::char_poly(a, n));
    const auto got = linalg::general_eigenvalues(a, n);
    INFO("case " << c << " n " << n);
    CHECK(oracle::match_distance(got.values, want) < 1e-8);
  }
}

TEST_CASE("Hermitian eigensolver matches characteristic polynomial roots") {
  std::mt19937_64 rng(12);
  for (int c = 0; c < 120; ++c) {
    const std::size_t n = 1 + static_cast<std::size_t>(c % 6);
    const auto a = oracle::random_dense(rng, n, true);
    const auto want = oracle::poly_roots(oracle::char_poly(a, n));
    const auto got = linalg::hermitian_eigenvalues(a, n);
    INFO("case " << c << " n " << n);
    CHECK(oracle::match_distance(got.values, want) < 1e-8);
    for (std::size_t i = 1; i < got.values.size(); ++i) CHECK(got.values[i - 1].real() <= got.values[i].real());
  }
}

TEST_CASE("eigensolvers on structured inputs") {
  SECTION("defective Jordan block") {
    oracle::Dense j{2.0, 1.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 2.0};
    for (auto v : linalg::general_eigenvalues(j, 3).values) CHECK(std::abs(v - 2.0) < 1e-4);
  }
  SECTION("rotation") {
    oracle::Dense r{0.0, -1.0, 1.0, 0.0};
    auto v = linalg::general_eigenvalues(r, 2).values;
    CHECK(oracle::match_distance(v, {cplx(0, 1), cplx(0, -1)}) < 1e-14);
  }
  SECTION("badly scaled") {
    oracle::Dense b{1.0, 1e8, 0.0, 1e-8, 2.0, 1e6, 0.0, 1e-6, 3.0};
    // diagonally similar to the symmetric tridiagonal [1 1 0; 1 2 1; 0 1 3]
    oracle::Dense sym{1.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 3.0};
    auto want = oracle::poly_roots(oracle::char_poly(sym, 3));
    CHECK(oracle::match_distance(linalg::general_eigenvalues(b, 3).values, want) < 1e-8);
  }
  SECTION("zero matrix") {
    for (auto v : linalg::general_eigenvalues(oracle::Dense(16, 0.0), 4).values) CHECK(v == cplx(0.0));
    for (auto v : linalg::hermitian_eigenvalues(oracle::Dense(16, 0.0), 4).values) CHECK(v == cplx(0.0));
  }
  SECTION("large random Hermitian trace and Frobenius") {
    std::mt19937_64 rng(5);
    const std::size_t n = 150;
    auto a = oracle::random_dense(rng, n, true);
    auto v = linalg::hermitian_eigenvalues(a, n).values;
    double tr = 0.0, fro = 0.0, s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += a[i * n + i].real();
    for (auto x : a) fro += std::norm(x);
    for (auto x : v) {
      s += x.real();
      s2 += x.real() * x.real();
    }
    CHECK(std::abs(s - tr) < 1e-9 * fro);
    CHECK(std::abs(s2 - fro) < 1e-10 * fro);
  }
}

TEST_CASE("log_det against cofactor expansion") {
  std::mt19937_64 rng(21);
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 1 + static_cast<std::size_t>(c % 8);
    const auto a = oracle::random_dense(rng, n, c % 3 == 0);
    const cplx det = oracle::cofactor_det(a, n);
    INFO("case " << c << " n " << n);
    CHECK(log_det_error(linalg::dense_logdet(a, n), det) < 1e-10);
    CHECK(log_det_error(log_det(from_dense(a, n)), det) < 1e-10);

    // tridiagonal and banded paths
    auto t = MatrixRealization::banded(n, n, -1, 1);
    auto b = MatrixRealization::banded(n, n, -2, 1);
    oracle::Dense td(n * n, 0.0), bd(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const long d = static_cast<long>(j) - static_cast<long>(i);
        if (d >= -1 && d <= 1) {
          t.set(i, j, a[i * n + j]);
          td[i * n + j] = a[i * n + j];
        }
        if (d >= -2 && d <= 1) {
          b.set(i, j, a[i * n + j]);
          bd[i * n + j] = a[i * n + j];
        }
      }
    CHECK(log_det_error(log_det(t), oracle::cofactor_det(td, n)) < 1e-10);
    CHECK(log_det_error(linalg::banded_logdet(b), oracle::cofactor_det(bd, n)) < 1e-10);
  }
}

TEST_CASE("tridiagonal recurrence and LU agree") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng() % 199);
    std::vector<cplx> d(n), up(n - 1), lo(n - 1);
    auto m = MatrixRealization::banded(n, n, -1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = cplx(3.0 + g(rng), g(rng));
      m.set(i, i, d[i]);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      up[i] = cplx(g(rng), g(rng));
      lo[i] = cplx(g(rng), g(rng));
      m.set(i, i + 1, up[i]);
      m.set(i + 1, i, lo[i]);
    }
    const auto r = linalg::tridiagonal_logdet(d, up, lo);
    const auto l = linalg::banded_logdet(m);
    const auto u = linalg::dense_logdet(m.dense_data(), n);
    INFO("case " << c << " n " << n);
    CHECK(std::abs(r.log_abs - l.log_abs) <= 1e-9 * std::max(1.0, std::abs(r.log_abs)));
    CHECK(std::abs(r.log_abs - u.log_abs) <= 1e-9 * std::max(1.0, std::abs(r.log_abs)));
    CHECK(std::abs(linalg::wrap_phase(r.phase - u.phase)) < 1e-7);
  }
}

TEST_CASE("log_det examples") {
  auto I = MatrixRealization::banded(5, 5, 0, 0);
  for (std::size_t i = 0; i < 5; ++i) I.set(i, i, 1.0);
  auto ld = log_det(I);
  CHECK(ld.log_abs == 0.0);
  CHECK(ld.phase == 0.0);

  auto two = MatrixRealization::dense(2, 2);
  two.set(0, 0, 2.0);
  two.set(0, 1, -1.0);
  two.set(1, 0, -1.0);
  two.set(1, 1, 2.0);
  CHECK(std::abs(log_det(two).log_abs - std::log(3.0)) < 1e-15);
  CHECK(log_det(two).phase == 0.0);

  auto t = build_schrodinger(PiecewisePotential([](double) { return 3.0; }), 5, 1.0);
  CHECK(std::abs(log_det(t).log_abs - std::log(144.0)) < 1e-13);
  CHECK(std::abs(log_det(t).log_abs - 4.969813) < 1e-6);
  CHECK(log_det(t).phase == 0.0);
}

TEST_CASE("log_det of singular and huge matrices") {
  auto z = MatrixRealization::dense(3, 3);
  z.set(0, 0, 1.0);
  z.set(1, 1, 1.0);
  CHECK(std::isinf(log_det(z).log_abs));
  CHECK(log_det(z).log_abs < 0.0);
  CHECK(det_ratio(z, 1.0, 3) == cplx(0.0));

  auto s = MatrixRealization::banded(4, 4, -1, 1);
  s.set(0, 0, 1.0);
  s.set(0, 1, 1.0);
  s.set(1, 0, 1.0);
  s.set(1, 1, 1.0);
  CHECK(std::isinf(log_det(s).log_abs));

  auto big = build_schrodinger(PiecewisePotential([](double) { return 1e6; }), 3000, 1.0);
  CHECK(std::abs(log_det(big).log_abs - 3000.0 * std::log(1e6)) < 1e-6);
  auto tiny = build_schrodinger(PiecewisePotential([](double) { return 2.0; }), 3000, 1.0);
  CHECK(std::abs(log_det(tiny).log_abs - std::log(3001.0)) < 1e-9);
}

TEST_CASE("phase of complex determinants") {
  auto m = MatrixRealization::banded(3, 3, 0, 0);
  m.set(0, 0, cplx(0.0, 1.0));
  m.set(1, 1, cplx(0.0, 1.0));
  m.set(2, 2, cplx(0.0, 1.0));
  CHECK(std::abs(log_det(m).phase + kPi / 2) < 1e-14);
  auto d = m.to_dense();
  d.set(2, 2, cplx(1.0, 0.0));
  d.set(0, 1, 0.5);
  CHECK(std::abs(log_det(d).phase - kPi) < 1e-14);
  CHECK(linalg::wrap_phase(-kPi) == kPi);
  CHECK(std::abs(linalg::wrap_phase(7.0) - (7.0 - kTwoPi)) < 1e-15);
}
