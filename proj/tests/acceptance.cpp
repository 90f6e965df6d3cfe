// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kms/kms.hpp"
#include "oracles.hpp"

using namespace kms;

namespace {

struct Report {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

PiecewisePotential ff(double c) {
  return PiecewisePotential({[](double x) { return 3.0 + x * x + std::sqrt(x) * std::sin(13.0 * x); },
                             [](double x) { return 4.5 - std::cos(20.0 * x) / x; }},
                            {{c, Continuity::Right}}, "ff");
}

bool decreasing(const std::vector<double>& e, double slack = 1.0, double floor = 0.0) {
  for (std::size_t i = 1; i < e.size(); ++i)
    if (!(e[i] <= slack * e[i - 1] + floor)) return false;
  return true;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

Report ac1() {
  Report r;
  const auto t0 = Clock::now();
  const double lam = (3.0 + std::sqrt(5.0)) / 2.0;
  const cplx v = det_ratio(build_schrodinger(PiecewisePotential([](double) { return 3.0; }), 200, 1.0), lam, 200);
  const double err = std::abs(v - lam / std::sqrt(5.0));
  const double secs = seconds_since(t0);
  r.detail << "f = 3, n = 200: ratio " << fmt6(v.real()) << " vs " << fmt6(lam / std::sqrt(5.0)) << ", |err| "
           << fmt(err) << ", " << fmt(secs) << " s";
  r.require(err < 1e-6, "error below 1e-6");
  r.require(secs < 1.0, "runtime below 1 s");
  return r;
}

Report ac2() {
  Report r;
  const auto t0 = Clock::now();
  PiecewisePotential f([](double x) { return 3.5 + x * x; });
  const std::vector<std::size_t> ns{500, 1000, 2000, 4000};
  std::vector<double> observed_at_max;
  for (double eps : {0.0, 0.5, 1.0}) {
    const auto k = kac_limit(f, eps);
    std::vector<double> errs;
    double last = 0.0;
    for (auto n : ns) {
      last = det_ratio(build_schrodinger(f, n, eps), k.G, static_cast<long>(n)).real();
      errs.push_back(std::abs(last - k.value));
    }
    observed_at_max.push_back(last);
    r.detail << "eps " << eps << ": errors " << list(errs) << "; ";
    r.require(errs.back() < 1e-3, "error at n = 4000 below 1e-3 for eps " + fmt(eps));
    r.require(decreasing(errs), "errors decrease for eps " + fmt(eps));
  }
  const double predicted = kac_limit(f, 0.0).value / kac_limit(f, 1.0).value;
  const double observed = observed_at_max[0] / observed_at_max[2];
  const double secs = seconds_since(t0);
  r.detail << "ratio eps0/eps1 observed " << fmt6(observed) << " vs " << fmt6(predicted) << "; " << fmt(secs) << " s";
  r.require(std::abs(observed - predicted) < 1e-3, "eps ratio within 1e-3");
  const double closed = (3.5 + std::sqrt(8.25)) / (4.5 + std::sqrt(16.25));
  r.require(std::abs(predicted - closed) < 1e-9, "predicted ratio matches closed form " + fmt6(closed));
  r.require(secs < 5.0, "runtime below 5 s");
  return r;
}

Report ac3() {
  Report r;
  {
    auto f = ff(0.5);
    auto p = kac_jump_prediction(f);
    std::vector<double> obs;
    double worst = 0.0;
    for (std::size_t n = 2000; n <= 2100; ++n) {
      obs.push_back(det_ratio(build_schrodinger(f, n, 1.0), p.G, static_cast<long>(n)).real());
      worst = std::max(worst, std::abs(obs.back() - p(n)));
    }
    double period = 0.0;
    for (std::size_t i = 0; i + 2 < obs.size(); ++i) period = std::max(period, std::abs(obs[i] - obs[i + 2]));
    r.detail << "c = 1/2: max |err| " << fmt(worst) << ", max |D(n) - D(n+2)| " << fmt(period) << ", levels "
             << fmt6(obs[0]) << "/" << fmt6(obs[1]) << "; ";
    r.require(worst < 5e-3, "c = 1/2 pointwise error below 5e-3");
    r.require(period < 5e-3, "c = 1/2 sequence 2-periodic");
  }
  {
    const double c = 0.9 - 1.5 / kPi;
    auto f = ff(c);
    auto p = kac_jump_prediction(f);
    const auto& j = p.jumps.at(0);
    const double lo = p.alpha * j.beta * std::min(1.0, j.gamma), hi = p.alpha * j.beta * std::max(1.0, j.gamma);
    const std::size_t top = 10000;
    std::vector<double> obs(top + 1, 0.0);
    numeric::parallel_for(top, [&](std::size_t i) {
      const std::size_t n = i + 1;
      obs[n] = det_ratio(build_schrodinger(f, n, 1.0), p.G, static_cast<long>(n)).real();
    });
    double worst = 0.0;
    for (std::size_t n = 2000; n <= 2100; ++n) worst = std::max(worst, std::abs(obs[n] - p(n)));
    std::vector<bool> bins(100, false);
    for (std::size_t n = 1; n <= top; ++n) {
      const double u = (obs[n] - lo) / (hi - lo);
      if (u >= 0.0 && u <= 1.0) bins[std::min<std::size_t>(99, static_cast<std::size_t>(u * 100.0))] = true;
    }
    const auto covered = std::count(bins.begin(), bins.end(), true);
    r.detail << "c = 0.9 - 1.5/pi: max |err| on [2000, 2100] " << fmt(worst) << ", bins covered " << covered
             << "/100 of [" << fmt6(lo) << ", " << fmt6(hi) << "]";
    r.require(worst < 5e-3, "irrational c pointwise error below 5e-3");
    r.require(covered >= 90, "at least 90 of 100 bins covered");
  }
  return r;
}

Report ac4() {
  Report r;
  auto s = PiecewisePotential([](double x) { return 3.5 + x * x; }).symbol();
  const std::vector<std::size_t> ns{128, 256, 512, 1024};
  std::vector<SpectralSummary> mid;
  for (auto n : ns) mid.push_back(eigenvalues(build_kms(s, n, Midpoint{})));
  const std::vector<std::pair<std::string, IndexingScheme>> others{
      {"min", MinIndex{}}, {"max", MaxIndex{}}, {"row", RowIndex{}}};
  std::vector<SpectralSummary> alt;
  for (const auto& [name, sc] : others) alt.push_back(eigenvalues(build_kms(s, 1024, sc)));
  for (int p = 1; p <= 4; ++p) {
    const auto phi = TestFunction::monomial(p);
    const double ref = lsd_integral(s, phi, 257, 64).real();
    std::vector<double> rel;
    for (const auto& S : mid) rel.push_back(std::abs(empirical_mean(S, phi).real() - ref) / std::abs(ref));
    double scheme_gap = 0.0;
    for (const auto& S : alt)
      scheme_gap = std::max(scheme_gap, std::abs(empirical_mean(S, phi).real() - ref) / std::abs(ref));
    r.detail << "z^" << p << ": rel err " << list(rel) << ", other schemes " << fmt(scheme_gap) << "; ";
    r.require(rel.back() < 2e-2, "relative error at n = 1024 for p = " + std::to_string(p));
    r.require(decreasing(rel, 1.2, 1e-12), "errors decrease for p = " + std::to_string(p));
    r.require(scheme_gap < 2e-2, "min/max/row limits agree for p = " + std::to_string(p));
  }
  return r;
}

Report ac5() {
  Report r;
  // a_0(x) = 1 + x + i x^2, a_1(x) = 0.5 - i x
  BandSymbol s({{0, [](double x) { return cplx(1.0 + x, x * x); }}, {1, [](double x) { return cplx(0.5, -x); }}});
  // int_0^1 |1 + x|^2 + x^4 + 0.25 + x^2 dx
  const double parseval = 7.0 / 3.0 + 0.2 + 0.25 + 1.0 / 3.0;
  const double quad = lsd_integral_modulus(s, TestFunction::monomial(2), 257, 64).real();
  const auto phi = TestFunction::monomial(2);
  const double square = empirical_mean(singular_values(build_rectangular(s, 1023, 1023)), phi).real();
  const double wide = empirical_mean(singular_values(build_rectangular(s, 1023, 2047)), phi).real();
  const double tall = empirical_mean(singular_values(build_rectangular(s, 2047, 1023)), phi).real();
  r.detail << "reference " << fmt6(parseval) << " (quadrature " << fmt6(quad) << "); square " << fmt6(square)
           << ", 2:1 wide " << fmt6(wide) << ", 2:1 tall " << fmt6(tall);
  r.require(std::abs(quad - parseval) < 1e-10, "quadrature matches Parseval");
  r.require(std::abs(square - parseval) < 2e-2, "square within 2e-2");
  r.require(std::abs(wide - parseval) < 2e-2, "2:1 wide within 2e-2");
  r.require(std::abs(tall - parseval) < 2e-2, "2:1 tall within 2e-2");
  return r;
}

Report ac6() {
  Report r;
  auto s = presets::es_family(1.2);
  auto c = szego_constants(s, 16, 65, 128);
  const cplx predicted = std::exp(c.e1 + 0.5 * c.F);
  std::vector<double> errs;
  double last = 0.0;
  for (std::size_t n : {250u, 500u, 1000u, 2000u}) {
    const auto lr = log_det(build_kms(s, n, RowIndex{}));
    const auto lt = log_det(build_kms(s, n, Midpoint{}));
    const cplx ratio = std::exp(cplx(lr.log_abs - lt.log_abs, lr.phase - lt.phase));
    errs.push_back(std::abs(ratio - 1.2));
    last = ratio.real();
  }
  std::map<int, CoefficientFn> flipped;
  for (const auto& [k, fn] : s.bands()) flipped.emplace(-k, fn);
  const BandSymbol reflected(flipped);
  const auto lr = log_det(build_kms(reflected, 2000, RowIndex{}));
  const auto lt = log_det(build_kms(reflected, 2000, Midpoint{}));
  r.detail << "det(op_n)/det(T_n) at n = 2000: " << fmt6(last) << ", exp(e1 + F/2) = " << fmt6(predicted.real())
           << ", errors " << list(errs) << ", exp(F) = " << fmt6(std::exp(c.F.real()))
           << "; reflected orientation gives " << fmt6(std::exp(lr.log_abs - lt.log_abs));
  r.require(std::abs(predicted - 1.2) < 1e-9, "predicted ratio 1.2");
  r.require(errs.back() < 2e-2, "error at n = 2000 below 2e-2");
  r.require(decreasing(errs), "monotone error trend");
  return r;
}

Report ac7() {
  Report r;
  const std::size_t n = 2048;
  {
    auto s = BandSymbol::constant_bands({{0, 3.0}, {1, -1.0}, {-1, -1.0}, {2, 0.1}});
    const auto phi = TestFunction::monomial(2);
    const auto M = build_kms(s, n, Midpoint{});
    const double dim = static_cast<double>(n + 1);
    const cplx direct = moment_trace(M, 2, 0) * dim - dim * lsd_integral(s, phi, 17, 256);
    const auto w8 = widom_correction(s, phi, 32, 512, 1.0 / (8.0 * kPi * kPi));
    const auto w4 = widom_correction(s, phi, 32, 512, 1.0 / (4.0 * kPi * kPi));
    const double e8 = std::abs(direct - w8.value), e4 = std::abs(direct - w4.value);
    r.detail << "z^2: direct " << fmt6(direct.real()) << ", c_W = 1/8pi^2 gives " << fmt6(w8.value.real())
             << ", 1/4pi^2 gives " << fmt6(w4.value.real()) << "; ";
    r.require(e8 < 5e-3, "1/8pi^2 correction within 5e-3");
    r.require(e4 > 5e-3, "1/4pi^2 rejected");
  }
  {
    BandSymbol s({{0, [](double x) { return cplx(3.0 + x * x + 0.5 * std::sin(2.0 * x)); }},
                  {1, [](double x) { return cplx(-1.0, x); }},
                  {-1, [](double x) { return cplx(-1.0, -x); }}});
    const auto phi = TestFunction::monomial(1);
    const auto M = build_kms(s, n, Midpoint{});
    const double dim = static_cast<double>(n + 1);
    const cplx direct = M.trace() - dim * lsd_integral(s, phi, 4097, 64);
    const auto w = widom_correction(s, phi, 16, 256);
    const cplx closed = 0.5 * (s.coefficient(0, 0.0) - s.coefficient(0, 1.0));
    r.detail << "z (x-dependent): direct " << fmt6(direct.real()) << ", correction " << fmt6(w.value.real())
             << ", (a0(0) - a0(1))/2 = " << fmt6(closed.real());
    r.require(std::abs(w.value - closed) < 5e-3, "correction equals (a0(0) - a0(1))/2");
    r.require(std::abs(direct - w.value) < 5e-3, "direct trace matches correction");
  }
  return r;
}

double distance_to_curve(cplx z, const std::vector<cplx>& curve) {
  double best = HUGE_VAL;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const cplx a = curve[i], b = curve[(i + 1) % curve.size()];
    const cplx d = b - a;
    const double len2 = std::norm(d);
    const double u = len2 > 0.0 ? std::clamp(((z - a) * std::conj(d)).real() / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, std::abs(z - (a + u * d)));
  }
  return best;
}

double ray_distance(cplx z) {
  double best = HUGE_VAL;
  for (int j = 0; j < 3; ++j) {
    const cplx dir = std::polar(1.0, kTwoPi * j / 3.0);
    const double along = std::max(0.0, (z * std::conj(dir)).real());
    best = std::min(best, std::abs(z - along * dir));
  }
  return best;
}

Report ac8() {
  Report r;
  {
    auto s = presets::cluster_demo();
    const auto S = eigenvalues(build_kms(s, 100, Midpoint{}));
    const double frac = cluster_fraction(S, extended_range(s, 129, 512, 256), 0.1);
    r.detail << "cluster symbol n = 100: fraction " << fmt6(frac) << "; ";
    r.require(frac >= 0.99, "cluster fraction at least 0.99");
  }
  {
    const auto S = eigenvalues(build_lame(50, 1.0));
    double rmax = 0.0, ray = 0.0;
    for (auto z : S.values) {
      rmax = std::max(rmax, std::abs(z));
      ray = std::max(ray, ray_distance(z));
    }
    r.detail << "Lame n = 50: max |z| " << fmt6(rmax) << ", max ray distance " << fmt(ray) << "; ";
    r.require(rmax <= 1.05, "Lame eigenvalues within |z| <= 1.05");
    r.require(ray < 1e-6, "Lame eigenvalues on the star");
  }
  {
    auto s = presets::star();
    const auto S = eigenvalues(build_kms(s, 50, Midpoint{}));
    std::vector<cplx> curve;
    for (int j = 0; j < 20000; ++j) curve.push_back(s(0.5, kTwoPi * j / 20000.0));
    double dmin = HUGE_VAL;
    for (auto z : S.values) dmin = std::min(dmin, distance_to_curve(z, curve));
    r.detail << "star n = 50: min distance to range " << fmt6(dmin);
    r.require(dmin > 0.05, "star eigenvalues bounded away from the range");
  }
  return r;
}

BandSymbol random_symbol(std::mt19937_64& rng, bool real) {
  std::normal_distribution<double> g;
  std::map<int, CoefficientFn> bands;
  const int lo = -static_cast<int>(rng() % 3), hi = static_cast<int>(rng() % 3);
  for (int k = lo; k <= hi; ++k) {
    cplx a(g(rng), real ? 0.0 : g(rng)), b(g(rng), real ? 0.0 : g(rng));
    if (real && k != 0) {
      bands[k] = [a, b](double x) { return a + b * std::sin(2.0 * x); };
      bands[-k] = [a, b](double x) { return std::conj(a + b * std::sin(2.0 * x)); };
    } else if (real) {
      bands[0] = [a, b](double x) { return cplx(a.real() + b.real() * x * x); };
    } else {
      bands[k] = [a, b](double x) { return a * std::cos(x) + b * x; };
    }
  }
  return BandSymbol(bands);
}

Report ac9() {
  Report r;
  std::mt19937_64 rng(90210);
  double ld = 0.0, eig = 0.0, mom = 0.0, scale = 0.0, gersh = -HUGE_VAL;
  int herm_fail = 0;
  const int cases = 240;
  for (int c = 0; c < cases; ++c) {
    const std::size_t n8 = 1 + static_cast<std::size_t>(c % 8);
    const auto a = oracle::random_dense(rng, n8, c % 2 == 0);
    auto m = MatrixRealization::dense(n8, n8);
    for (std::size_t i = 0; i < n8; ++i)
      for (std::size_t j = 0; j < n8; ++j) m.set(i, j, a[i * n8 + j]);
    const cplx det = oracle::cofactor_det(a, n8);
    const auto l = log_det(m);
    ld = std::max(ld, std::abs(std::exp(cplx(l.log_abs, l.phase)) - det) / std::max(1.0, std::abs(det)));

    const std::size_t n6 = 1 + static_cast<std::size_t>(c % 6);
    const auto b = oracle::random_dense(rng, n6, c % 3 == 0);
    auto mb = MatrixRealization::dense(n6, n6);
    for (std::size_t i = 0; i < n6; ++i)
      for (std::size_t j = 0; j < n6; ++j) mb.set(i, j, b[i * n6 + j]);
    eig = std::max(eig, oracle::match_distance(eigenvalues(mb).values, oracle::poly_roots(oracle::char_poly(b, n6))));

    auto hs = random_symbol(rng, true);
    const std::size_t nh = 2 + static_cast<std::size_t>(rng() % 127);
    const auto H = build_kms(hs, nh - 1, Midpoint{});
    if (!H.is_hermitian()) ++herm_fail;
    if (c % 4 == 0) {
      const auto S = eigenvalues(H);
      for (int p = 1; p <= 3; ++p) {
        const cplx e = empirical_mean(S, TestFunction::monomial(p)), t = moment_trace(H, p, 0);
        mom = std::max(mom, std::abs(e - t) / std::max(1.0, std::abs(t)));
      }
    }

    auto gs = random_symbol(rng, c % 2 == 0);
    const std::size_t ng = 4 + static_cast<std::size_t>(rng() % 60);
    const double bound = band_norm(gs, 4097);
    for (auto z : eigenvalues(build_kms(gs, ng, c % 3 == 0 ? IndexingScheme(MinIndex{}) : IndexingScheme(Midpoint{}))).values)
      gersh = std::max(gersh, std::abs(z) - bound * (1.0 + 1e-6));

    std::map<int, CoefficientFn> bands;
    std::normal_distribution<double> g;
    const double d0 = 4.0 + std::abs(g(rng)), d1 = g(rng);
    bands[0] = [d0, d1](double x) { return cplx(d0 + d1 * x); };
    for (int k : {-2, -1, 1}) {
      const cplx v(0.5 * g(rng), 0.5 * g(rng));
      bands[k] = [v](double x) { return v * (1.0 + x); };
    }
    BandSymbol ss(bands);
    const cplx factor = std::polar(0.2 + std::abs(g(rng)), g(rng));
    const cplx G(2.0 + std::abs(g(rng)), g(rng));
    const std::size_t ns = 5 + static_cast<std::size_t>(rng() % 300);
    const cplx x1 = det_ratio(build_kms(ss, ns, Midpoint{}), G, static_cast<long>(ns + 1));
    const cplx x2 = det_ratio(build_kms(ss.scaled(factor), ns, Midpoint{}), factor * G, static_cast<long>(ns + 1));
    scale = std::max(scale, std::abs(x1 - x2) / std::abs(x1));
  }
  r.detail << cases << " cases each: log_det " << fmt(ld) << ", eigen " << fmt(eig) << ", moments " << fmt(mom)
           << ", Hermiticity failures " << herm_fail << ", Gershgorin excess " << fmt(gersh) << ", scaling " << fmt(scale);
  r.require(ld < 1e-10, "log_det vs cofactor within 1e-10");
  r.require(eig < 1e-8, "eigenvalues vs characteristic roots within 1e-8");
  r.require(mom < 1e-9, "empirical_mean vs moment_trace within 1e-9");
  r.require(herm_fail == 0, "Hermiticity");
  r.require(gersh <= 1e-9, "Gershgorin");
  r.require(scale < 1e-12, "scaling invariance");
  return r;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Report (*)()>> criteria{
      {"AC1 kac constant potential", ac1}, {"AC2 kac smooth potential", ac2}, {"AC3 jump formula", ac3},
      {"AC4 first limit theorem", ac4},   {"AC5 singular value law", ac5},   {"AC6 row vs midpoint determinants", ac6},
      {"AC7 trace correction", ac7},      {"AC8 clustering", ac8},           {"AC9 oracle suites", ac9}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Report r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.ok = false;
      r.detail << "exception: " << e.what();
    }
    if (!r.ok) ++failed;
    std::printf("%s %s: %s\n", r.ok ? "PASS" : "FAIL", name, r.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
