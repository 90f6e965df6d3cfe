#pragma once

// Runs one configured study over its n_list and writes the prediction table
// (plus spectra, symbol curves and matrix dumps where requested).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kms/asymptotics.hpp"
#include "kms/config.hpp"
#include "kms/expr.hpp"
#include "kms/matgen.hpp"
#include "kms/presets.hpp"
#include "kms/region.hpp"
#include "kms/spectra.hpp"
#include "kms/szego.hpp"

namespace kms {

/// Failure inside an n-sweep; what() names the n.
class ExperimentError : public Error {
 public:
  ExperimentError(std::size_t n, const std::string& what) : Error("n = " + std::to_string(n) + ": " + what), n_(n) {}
  std::size_t n() const noexcept { return n_; }

 private:
  std::size_t n_;
};

struct RunOptions {
  std::optional<std::string> out_path;
  bool dump = false;
  std::optional<std::uint64_t> seed;
  std::ostream* fallback = nullptr;  // receives the table when no path is configured
};

struct RunResult {
  std::vector<PredictionRow> rows;
  std::optional<bool> passed;
  std::vector<std::string> files;
  std::string summary;
};

inline BandSymbol make_symbol(const ExperimentConfig& cfg) {
  const auto& s = cfg.symbol;
  if (s.preset == "schrodinger") return Expr::parse(s.f).to_potential("schrodinger").symbol();
  if (s.preset == "lame") return presets::lame();
  if (s.preset == "star") return presets::star();
  if (s.preset == "cluster-demo") return presets::cluster_demo();
  if (s.preset == "es-family") return presets::es_family(s.c);
  std::map<int, CoefficientFn> bands;
  for (const auto& b : s.bands) bands[b.k] = Expr::parse(b.expr).as_coefficient();
  return BandSymbol(std::move(bands), "bands");
}

inline PiecewisePotential make_potential(const ExperimentConfig& cfg) {
  if (cfg.symbol.preset != "schrodinger")
    throw ConfigError("experiment '" + cfg.experiment + "' needs the schrodinger preset");
  return Expr::parse(cfg.symbol.f).to_potential("schrodinger");
}

inline IndexingScheme make_scheme(const SchemeSpec& s) {
  if (s.name == "shifted") return ShiftedSchrodinger{s.epsilon};
  return parse_scheme_name(s.name);
}

namespace detail {

inline std::string output_stem(const std::string& path) {
  if (path.empty()) return "kms";
  std::filesystem::path p(path);
  return (p.parent_path() / p.stem()).string();
}

inline void write_file(const std::string& path, const std::string& content, std::vector<std::string>& files) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << content;
  files.push_back(path);
}

inline std::string curves_csv(const BandSymbol& s) {
  std::ostringstream os;
  os << "x,t,re,im\n";
  for (int i = 0; i <= 20; ++i) {
    const double x = i == 20 ? 1.0 : static_cast<double>(i) / 20.0;
    for (int j = 0; j < 256; ++j) {
      const double t = kTwoPi * static_cast<double>(j) / 256.0;
      const cplx z = s(x, t);
      os << numeric::format_double(x) << ',' << numeric::format_double(t) << ',' << numeric::format_double(z.real())
         << ',' << numeric::format_double(z.imag()) << '\n';
    }
  }
  return os.str();
}

inline std::string rows_json(const std::vector<PredictionRow>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"n", r.n},
                   {"observed", r.observed.real()},
                   {"observed_im", r.observed.imag()},
                   {"predicted", r.predicted.real()},
                   {"predicted_im", r.predicted.imag()},
                   {"abs_err", r.abs_err}});
  return arr.dump(2) + "\n";
}

}  // namespace detail

inline RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  validate(cfg);
  const std::string out_path = opt.out_path.value_or(cfg.output.path);
  const std::string stem = detail::output_stem(out_path);
  const std::uint64_t seed = opt.seed.value_or(cfg.seed);
  const auto& nm = cfg.numerics;
  const auto n_x = static_cast<std::size_t>(nm.n_x), n_t = static_cast<std::size_t>(nm.n_t);
  const auto phi = TestFunction::parse(cfg.phi);
  const std::string& ex = cfg.experiment;

  const std::size_t count = cfg.n_list.size();
  std::vector<PredictionRow> rows(count);
  std::vector<std::string> spectra(count), dumps(count), dumps_alt(count);
  const bool want_spectra = !out_path.empty() && (ex == "lsd" || ex == "cluster");

  auto perturb = [&](MatrixRealization M, std::size_t n) {
    if (cfg.perturbation.kind == "noise") {
      const double mag = std::pow(static_cast<double>(M.rows()), cfg.perturbation.exponent);
      return apply_perturbation(M, EntrywiseNoise{mag, seed + n, M.is_hermitian(), false});
    }
    if (cfg.perturbation.kind == "rank-one") {
      std::vector<cplx> e0(M.rows(), cplx(0.0));
      e0[0] = 1.0;
      return apply_perturbation(M, LowRankUpdate{{e0}, {e0}, {cfg.perturbation.weight}});
    }
    return M;
  };
  auto dump_text = [](const MatrixRealization& M) {
    std::ostringstream os;
    write_dump(os, M);
    return os.str();
  };

  // n-independent predictions
  std::optional<BandSymbol> symbol;
  if (ex != "kac" && ex != "kac-jump") symbol = make_symbol(cfg);
  cplx reference = 0.0;
  std::optional<SzegoConstants> szego;
  std::optional<KacLimit> kac;
  std::optional<KacPrediction> jump;
  std::optional<PiecewisePotential> potential;
  std::optional<RegionMask> region;
  double kac_eps = cfg.scheme.name == "shifted" ? cfg.scheme.epsilon : 1.0;

  if (ex == "lsd") {
    reference = lsd_integral(*symbol, phi, n_x, n_t);
  } else if (ex == "svd") {
    reference = lsd_integral_modulus(*symbol, phi, n_x, n_t);
  } else if (ex == "cluster") {
    region = nm.region == "extended" ? extended_range(*symbol, n_x, n_t, static_cast<std::size_t>(nm.resolution))
                                     : sampled_range(*symbol, n_x, n_t, static_cast<std::size_t>(nm.resolution));
    reference = 1.0;
  } else if (ex == "det-ratio") {
    szego = szego_constants(*symbol, nm.K, n_x, n_t);
    reference = cfg.scheme.name == "row" ? es_limit(*szego) : ms_limit(*szego);
  } else if (ex == "kac") {
    potential = make_potential(cfg);
    kac = kac_limit(*potential, kac_eps);
    reference = kac->value;
  } else if (ex == "kac-jump") {
    potential = make_potential(cfg);
    jump = kac_jump_prediction(*potential);
  } else if (ex == "widom") {
    reference = widom_correction(*symbol, phi, nm.K, n_t).value;
  } else if (ex == "es-vs-ms") {
    szego = szego_constants(*symbol, nm.K, n_x, n_t);
    reference = std::exp(szego->e1 + 0.5 * szego->F);
  }
  const cplx lsd_for_widom = ex == "widom" ? lsd_integral(*symbol, phi, n_x, n_t) : cplx(0.0);

  auto square_realization = [&](std::size_t n) {
    if (cfg.symbol.preset == "lame") return build_lame(n, cfg.symbol.rho);
    if (cfg.symbol.preset == "schrodinger" && cfg.scheme.name == "shifted")
      return build_schrodinger(make_potential(cfg), n, cfg.scheme.epsilon);
    return build_kms(*symbol, n, make_scheme(cfg.scheme));
  };

  numeric::parallel_for(count, [&](std::size_t idx) {
    const auto n = static_cast<std::size_t>(cfg.n_list[idx]);
    try {
      cplx observed = 0.0, predicted = reference;
      if (ex == "lsd" || ex == "cluster") {
        auto M = perturb(square_realization(n), n);
        if (opt.dump) dumps[idx] = dump_text(M);
        const auto S = eigenvalues(M);
        if (want_spectra) {
          std::ostringstream os;
          write_spectrum_csv(os, S);
          spectra[idx] = os.str();
        }
        observed = ex == "lsd" ? empirical_mean(S, phi) : cplx(cluster_fraction(S, *region, nm.cluster_radius));
      } else if (ex == "svd") {
        const auto cols = static_cast<std::size_t>(std::llround(nm.aspect * static_cast<double>(n)));
        auto M = perturb(build_rectangular(*symbol, n, cols), n);
        if (opt.dump) dumps[idx] = dump_text(M);
        observed = empirical_mean(singular_values(M), phi);
      } else if (ex == "det-ratio") {
        auto M = perturb(square_realization(n), n);
        if (opt.dump) dumps[idx] = dump_text(M);
        observed = det_ratio(M, szego->G, static_cast<long>(M.rows()));
      } else if (ex == "kac") {
        auto M = perturb(build_schrodinger(*potential, n, kac_eps), n);
        if (opt.dump) dumps[idx] = dump_text(M);
        observed = det_ratio(M, kac->G, static_cast<long>(n));
      } else if (ex == "kac-jump") {
        auto M = perturb(build_schrodinger(*potential, n, 1.0), n);
        if (opt.dump) dumps[idx] = dump_text(M);
        observed = det_ratio(M, jump->G, static_cast<long>(n));
        predicted = (*jump)(n);
      } else if (ex == "widom") {
        auto M = perturb(square_realization(n), n);
        if (opt.dump) dumps[idx] = dump_text(M);
        const auto dim = static_cast<double>(M.rows());
        cplx trace;
        if (phi.kind() == TestFunction::Kind::Monomial && phi.q() == 0 && phi.p() >= 1 && phi.p() <= 8)
          trace = moment_trace(M, phi.p(), 0) * dim;
        else
          trace = empirical_mean(eigenvalues(M), phi) * dim;
        observed = trace - dim * lsd_for_widom;
      } else if (ex == "es-vs-ms") {
        auto R = perturb(build_kms(*symbol, n, RowIndex{}), n);
        auto T = perturb(build_kms(*symbol, n, Midpoint{}), n);
        if (opt.dump) {
          dumps[idx] = dump_text(R);
          dumps_alt[idx] = dump_text(T);
        }
        const auto lr = log_det(R), lt = log_det(T);
        observed = std::exp(cplx(lr.log_abs - lt.log_abs, lr.phase - lt.phase));
      }
      rows[idx] = make_row(n, observed, predicted);
    } catch (const ExperimentError&) {
      throw;
    } catch (const std::exception& e) {
      throw ExperimentError(n, e.what());
    }
  });

  RunResult result;
  result.rows = rows;
  std::ostringstream table;
  if (cfg.output.format == "json")
    table << detail::rows_json(rows);
  else
    write_prediction_csv(table, rows);
  if (!out_path.empty())
    detail::write_file(out_path, table.str(), result.files);
  else if (opt.fallback)
    *opt.fallback << table.str();

  for (std::size_t i = 0; i < count; ++i) {
    const auto n = std::to_string(cfg.n_list[i]);
    if (want_spectra) detail::write_file(stem + ".spectrum.n" + n + ".csv", spectra[i], result.files);
    if (opt.dump) {
      if (ex == "es-vs-ms") {
        detail::write_file(stem + ".matrix.row.n" + n + ".txt", dumps[i], result.files);
        detail::write_file(stem + ".matrix.midpoint.n" + n + ".txt", dumps_alt[i], result.files);
      } else {
        detail::write_file(stem + ".matrix.n" + n + ".txt", dumps[i], result.files);
      }
    }
  }
  if (want_spectra) detail::write_file(stem + ".curves.csv", detail::curves_csv(*symbol), result.files);

  if (nm.tolerance) {
    double worst = 0.0;
    std::size_t worst_n = 0;
    const std::size_t first = nm.check == "all" ? 0 : count - 1;
    for (std::size_t i = first; i < count; ++i) {
      if (!(rows[i].abs_err <= worst) || i == first) {
        worst = rows[i].abs_err;
        worst_n = rows[i].n;
      }
    }
    const bool ok = worst <= *nm.tolerance;
    result.passed = ok;
    result.summary = std::string(ok ? "PASS " : "FAIL ") + ex + ": max abs_err " + numeric::format_double(worst) +
                     " at n = " + std::to_string(worst_n) + " (tolerance " + numeric::format_double(*nm.tolerance) +
                     ")";
  }
  return result;
}

}  // namespace kms
