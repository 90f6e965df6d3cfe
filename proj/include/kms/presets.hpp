#pragma once

// Named symbols used by the experiment configs.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "kms/numeric.hpp"
#include "kms/symbol.hpp"

namespace kms::presets {

/// e^{it} + e^{-2it}.
inline BandSymbol star() { return BandSymbol::constant_bands({{1, 1.0}, {-2, 1.0}}, "star"); }

/// (1 - x^2) e^{-it} + x^2 e^{2it}, the diagonal profile of build_lame.
inline BandSymbol lame() {
  std::map<int, CoefficientFn> b{{-1, [](double x) { return cplx(1.0 - x * x); }},
                                 {2, [](double x) { return cplx(x * x); }}};
  std::map<int, CoefficientFn> d{{-1, [](double x) { return cplx(-2.0 * x); }},
                                 {2, [](double x) { return cplx(2.0 * x); }}};
  return BandSymbol(std::move(b), "lame", std::move(d));
}

/// (1/2 + sqrt(x - 1/2)) e^{-2it} + e^{-it} + e^{it}, principal square root.
inline BandSymbol cluster_demo() {
  std::map<int, CoefficientFn> b{
      {-2, [](double x) { return 0.5 + std::sqrt(cplx(x - 0.5, 0.0)); }},
      {-1, [](double) { return cplx(1.0); }},
      {1, [](double) { return cplx(1.0); }},
  };
  return BandSymbol(std::move(b), "cluster-demo");
}

/// a = exp(2 log(c) e^{it} + x e^{-it}) expanded as a banded symbol with
/// |k| <= bands; coefficients a_k(x) = sum_l u^{k+l} x^l / ((k+l)! l!), u = 2 log c.
inline BandSymbol es_family(double c, int bands = 16, int terms = 40) {
  if (!(c > 0.0)) throw DomainError("es-family parameter must be positive");
  const double u = 2.0 * std::log(c);
  std::map<int, CoefficientFn> b, d;
  for (int k = -bands; k <= bands; ++k) {
    // polynomial in x: sum_l p_l x^l
    std::vector<double> p;
    for (int l = 0; l <= terms; ++l) {
      const int j = k + l;
      if (j < 0) {
        p.push_back(0.0);
        continue;
      }
      p.push_back(std::pow(u, j) / (std::tgamma(j + 1.0) * std::tgamma(l + 1.0)));
    }
    std::vector<double> dp;
    for (std::size_t l = 1; l < p.size(); ++l) dp.push_back(static_cast<double>(l) * p[l]);
    auto horner = [](const std::vector<double>& c) {
      return [c](double x) {
        double s = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
        return cplx(s);
      };
    };
    b[k] = horner(p);
    d[k] = horner(dp);
  }
  return BandSymbol(std::move(b), "es-family(" + numeric::format_double(c) + ")", std::move(d));
}

}  // namespace kms::presets
