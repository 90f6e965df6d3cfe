#pragma once

// Rasterised range and extended range of a symbol: the cells hit by
// a(x,t), and the complement of the unbounded component of the rest.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "kms/error.hpp"
#include "kms/numeric.hpp"
#include "kms/symbol.hpp"

namespace kms {

struct RegionMask {
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  std::size_t resolution = 0;
  std::vector<std::uint8_t> cells;  // cells[iy * resolution + ix], 1 = inside

  double cell_width() const { return (x_hi - x_lo) / static_cast<double>(resolution); }
  double cell_height() const { return (y_hi - y_lo) / static_cast<double>(resolution); }
  double cell_size() const { return std::max(cell_width(), cell_height()); }

  bool at(long ix, long iy) const {
    const auto r = static_cast<long>(resolution);
    if (ix < 0 || iy < 0 || ix >= r || iy >= r) return false;
    return cells[static_cast<std::size_t>(iy * r + ix)] != 0;
  }

  /// Cell indices of z; may fall outside the grid.
  std::pair<long, long> cell_of(cplx z) const {
    return {static_cast<long>(std::floor((z.real() - x_lo) / cell_width())),
            static_cast<long>(std::floor((z.imag() - y_lo) / cell_height()))};
  }

  cplx cell_center(long ix, long iy) const {
    return {x_lo + (static_cast<double>(ix) + 0.5) * cell_width(), y_lo + (static_cast<double>(iy) + 0.5) * cell_height()};
  }

  bool contains(cplx z) const {
    auto [ix, iy] = cell_of(z);
    return at(ix, iy);
  }

  /// True when some inside cell lies within `radius` cells (Chebyshev) of z's cell.
  bool near(cplx z, long radius) const {
    auto [ix, iy] = cell_of(z);
    const auto r = static_cast<long>(resolution);
    const long x0 = std::max(0L, ix - radius), x1 = std::min(r - 1, ix + radius);
    const long y0 = std::max(0L, iy - radius), y1 = std::min(r - 1, iy + radius);
    for (long y = y0; y <= y1; ++y)
      for (long x = x0; x <= x1; ++x)
        if (at(x, y)) return true;
    return false;
  }

  std::size_t count() const { return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), 1)); }
};

namespace detail {

struct RangeSamples {
  std::vector<cplx> values;
  bool degenerate = false;
};

inline double max_gap_t(const std::vector<cplx>& line) {
  double g = 0.0;
  for (std::size_t j = 0; j < line.size(); ++j) g = std::max(g, std::abs(line[(j + 1) % line.size()] - line[j]));
  return g;
}

inline std::vector<cplx> sample_line(const BandSymbol& s, double x, std::size_t n_t) {
  std::vector<cplx> v(n_t);
  for (std::size_t j = 0; j < n_t; ++j) v[j] = s(x, kTwoPi * static_cast<double>(j) / static_cast<double>(n_t));
  return v;
}

/// Samples a(x,t) until consecutive samples in t and in x are closer than `gap`.
inline std::vector<std::vector<cplx>> refine_samples(const BandSymbol& s, std::size_t n_x, std::size_t n_t,
                                                     double gap) {
  constexpr std::size_t kMaxT = std::size_t{1} << 15;
  constexpr std::size_t kMaxLines = std::size_t{1} << 14;
  std::vector<double> xs = numeric::unit_nodes(std::max<std::size_t>(n_x, 2));
  for (;;) {
    double g = 0.0;
    for (double x : xs) g = std::max(g, max_gap_t(sample_line(s, x, n_t)));
    if (g <= gap || n_t >= kMaxT) break;
    n_t *= 2;
  }
  std::vector<std::vector<cplx>> lines;
  for (double x : xs) lines.push_back(sample_line(s, x, n_t));
  bool changed = true;
  while (changed && xs.size() < kMaxLines) {
    changed = false;
    std::vector<double> nx{xs.front()};
    std::vector<std::vector<cplx>> nl{lines.front()};
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      double g = 0.0;
      for (std::size_t j = 0; j < n_t; ++j) g = std::max(g, std::abs(lines[i + 1][j] - lines[i][j]));
      if (g > gap && xs[i + 1] - xs[i] > 1e-12) {
        const double xm = 0.5 * (xs[i] + xs[i + 1]);
        nx.push_back(xm);
        nl.push_back(sample_line(s, xm, n_t));
        changed = true;
      }
      nx.push_back(xs[i + 1]);
      nl.push_back(lines[i + 1]);
    }
    xs = std::move(nx);
    lines = std::move(nl);
  }
  return lines;
}

inline RegionMask empty_mask_around(const std::vector<cplx>& pts, std::size_t res, double margin_cells) {
  double re0 = HUGE_VAL, re1 = -HUGE_VAL, im0 = HUGE_VAL, im1 = -HUGE_VAL;
  for (auto z : pts) {
    re0 = std::min(re0, z.real());
    re1 = std::max(re1, z.real());
    im0 = std::min(im0, z.imag());
    im1 = std::max(im1, z.imag());
  }
  double side = std::max(re1 - re0, im1 - im0);
  if (side <= 0.0) side = 1.0;
  side *= static_cast<double>(res) / (static_cast<double>(res) - 2.0 * margin_cells);
  const double cx = 0.5 * (re0 + re1), cy = 0.5 * (im0 + im1);
  RegionMask m;
  m.x_lo = cx - 0.5 * side;
  m.x_hi = cx + 0.5 * side;
  m.y_lo = cy - 0.5 * side;
  m.y_hi = cy + 0.5 * side;
  m.resolution = res;
  m.cells.assign(res * res, 0);
  return m;
}

inline void dilate(RegionMask& m) {
  const auto r = static_cast<long>(m.resolution);
  auto src = m.cells;
  for (long y = 0; y < r; ++y)
    for (long x = 0; x < r; ++x) {
      if (!src[static_cast<std::size_t>(y * r + x)]) continue;
      for (long dy = -1; dy <= 1; ++dy)
        for (long dx = -1; dx <= 1; ++dx) {
          const long xx = x + dx, yy = y + dy;
          if (xx >= 0 && yy >= 0 && xx < r && yy < r) m.cells[static_cast<std::size_t>(yy * r + xx)] = 1;
        }
    }
}

/// Marks everything not reachable from the border through empty cells.
inline void fill_bounded_components(RegionMask& m) {
  const auto r = static_cast<long>(m.resolution);
  std::vector<std::uint8_t> outside(m.cells.size(), 0);
  std::deque<std::pair<long, long>> queue;
  auto push = [&](long x, long y) {
    if (x < 0 || y < 0 || x >= r || y >= r) return;
    const auto idx = static_cast<std::size_t>(y * r + x);
    if (m.cells[idx] || outside[idx]) return;
    outside[idx] = 1;
    queue.emplace_back(x, y);
  };
  for (long i = 0; i < r; ++i) {
    push(i, 0);
    push(i, r - 1);
    push(0, i);
    push(r - 1, i);
  }
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    push(x + 1, y);
    push(x - 1, y);
    push(x, y + 1);
    push(x, y - 1);
  }
  for (std::size_t i = 0; i < m.cells.size(); ++i) m.cells[i] = outside[i] ? 0 : 1;
}

inline RegionMask rasterise(const BandSymbol& s, std::size_t n_x, std::size_t n_t, std::size_t resolution,
                            bool fill) {
  if (resolution < 64) throw DomainError("region resolution must be at least 64");
  if (n_t < 4) throw DomainError("need at least 4 samples in t");
  constexpr double kMargin = 3.0;
  std::vector<cplx> coarse;
  for (double x : numeric::unit_nodes(std::max<std::size_t>(n_x, 2)))
    for (auto z : sample_line(s, x, n_t)) coarse.push_back(z);
  auto probe = empty_mask_around(coarse, resolution, kMargin);
  double re0 = HUGE_VAL, re1 = -HUGE_VAL, im0 = HUGE_VAL, im1 = -HUGE_VAL;
  for (auto z : coarse) {
    re0 = std::min(re0, z.real());
    re1 = std::max(re1, z.real());
    im0 = std::min(im0, z.imag());
    im1 = std::max(im1, z.imag());
  }
  const bool degenerate = std::max(re1 - re0, im1 - im0) <= 1e-12 * std::max(1.0, std::abs(coarse.front()));
  if (degenerate) {
    auto [ix, iy] = probe.cell_of(coarse.front());
    probe.cells[static_cast<std::size_t>(iy) * resolution + static_cast<std::size_t>(ix)] = 1;
    return probe;
  }
  const auto lines = refine_samples(s, n_x, n_t, 0.5 * probe.cell_size());
  std::vector<cplx> all;
  for (const auto& l : lines) all.insert(all.end(), l.begin(), l.end());
  auto mask = empty_mask_around(all, resolution, kMargin);
  for (auto z : all) {
    auto [ix, iy] = mask.cell_of(z);
    ix = std::clamp(ix, 0L, static_cast<long>(resolution) - 1);
    iy = std::clamp(iy, 0L, static_cast<long>(resolution) - 1);
    mask.cells[static_cast<std::size_t>(iy) * resolution + static_cast<std::size_t>(ix)] = 1;
  }
  dilate(mask);
  if (fill) fill_bounded_components(mask);
  return mask;
}

}  // namespace detail

/// Cells touched by the sampled range of a, dilated by one cell. No hole filling.
inline RegionMask sampled_range(const BandSymbol& s, std::size_t n_x, std::size_t n_t, std::size_t resolution) {
  return detail::rasterise(s, n_x, n_t, resolution, false);
}

/// Range of a together with every bounded component of its complement.
/// The sample grid is refined until neighbouring samples are within half a cell.
inline RegionMask extended_range(const BandSymbol& s, std::size_t n_x, std::size_t n_t, std::size_t resolution) {
  return detail::rasterise(s, n_x, n_t, resolution, true);
}

}  // namespace kms
