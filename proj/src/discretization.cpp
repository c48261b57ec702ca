#include "frontier/discretization.hpp"

#include <algorithm>
#include <cmath>

#include "frontier/errors.hpp"

namespace frontier {

int Grid::cell_of(double x) const {
  const int i = static_cast<int>(std::floor((x - xmin) / dx + 0.5));
  return std::clamp(i, 0, n);
}

Grid build_grid(double h0, double window_margin, double dx) {
  if (!(h0 > 0)) throw DomainError("grid: h0 must be positive");
  if (!(dx > 0)) throw DomainError("grid: dx must be positive");
  if (!(window_margin > 0)) throw DomainError("grid: margin must be positive");
  if (dx >= h0) throw DomainError("grid: dx must be smaller than h0");
  const double half = (h0 + window_margin) / dx;
  // Snap ratios within round-off of an integer before rounding up.
  const double nearest = std::round(half);
  const int half_cells =
      std::abs(half - nearest) <= 1e-9 * half ? static_cast<int>(nearest)
                                              : static_cast<int>(std::ceil(half));
  Grid g;
  g.dx = dx;
  g.n = 2 * half_cells;
  g.xmin = -half_cells * dx;
  g.xmax = half_cells * dx;
  return g;
}

ActiveRange active_range(const Grid& grid, double g, double h) {
  ActiveRange r;
  if (!(h > g)) return r;
  r.first = static_cast<int>(std::floor((g - grid.xmin) / grid.dx - 0.5)) + 1;
  r.last = static_cast<int>(std::ceil((h - grid.xmin) / grid.dx + 0.5)) - 1;
  // Round-off guard on the overlap test.
  while (r.first <= r.last && grid.cell_hi(r.first) <= g) ++r.first;
  while (r.first <= r.last && grid.cell_lo(r.last) >= h) --r.last;
  r.first = std::max(r.first, 0);
  r.last = std::min(r.last, grid.n);
  return r;
}

CellSpan cell_span(const Grid& grid, int i, double g, double h) {
  return {std::max(grid.cell_lo(i), g), std::min(grid.cell_hi(i), h)};
}

NonlocalOperator::NonlocalOperator(Kernel kernel, const Grid& grid, double d)
    : kernel_(std::move(kernel)), grid_(grid), d_(d) {
  if (!(d > 0)) throw DomainError("nonlocal operator: d must be positive");
  stencil_ = discretize_kernel(kernel_, grid.dx, covering_radius_cells(kernel_, grid.dx),
                               Stencil::Kind::CellToCell);
}

double NonlocalOperator::pair_average(const CellSpan& ci, const CellSpan& cj) const {
  return kernel_.tail_mean(ci.lo - cj.hi, ci.hi - cj.hi) -
         kernel_.tail_mean(ci.lo - cj.lo, ci.hi - cj.lo);
}

void NonlocalOperator::convolve(std::span<const double> u, double g, double h,
                                std::span<double> out) const {
  const ActiveRange ar = active_range(grid_, g, h);
  if (ar.empty()) return;
  const int r = stencil_.radius_cells;

  auto clipped = [&](int i) {
    const CellSpan c = cell_span(grid_, i, g, h);
    return c.lo > grid_.cell_lo(i) || c.hi < grid_.cell_hi(i);
  };
  // At most the two end cells are partially covered.
  int ends[2] = {ar.first, ar.last};
  const int n_ends = ar.first == ar.last ? 1 : 2;
  bool end_clipped[2] = {clipped(ends[0]), n_ends == 2 && clipped(ends[1])};

  for (int i = ar.first; i <= ar.last; ++i) {
    const int jlo = std::max(ar.first, i - r), jhi = std::min(ar.last, i + r);
    double s = 0;
    const bool row_exact = (i == ends[0] && end_clipped[0]) || (i == ends[1] && end_clipped[1]);
    if (row_exact) {
      const CellSpan ci = cell_span(grid_, i, g, h);
      for (int j = jlo; j <= jhi; ++j) {
        if (u[j] == 0.0) continue;
        s += pair_average(ci, cell_span(grid_, j, g, h)) * u[j];
      }
    } else {
      const int base = r - i;
      for (int j = jlo; j <= jhi; ++j) s += stencil_.weights[base + j] * u[j];
      for (int e = 0; e < n_ends; ++e) {
        const int j = ends[e];
        if (!end_clipped[e] || j < jlo || j > jhi || u[j] == 0.0) continue;
        const CellSpan full{grid_.cell_lo(i), grid_.cell_hi(i)};
        s += (pair_average(full, cell_span(grid_, j, g, h)) - stencil_[j - i]) * u[j];
      }
    }
    out[i] = s;
  }
}

void NonlocalOperator::apply(std::span<const double> u, double g, double h,
                             std::span<double> out) const {
  convolve(u, g, h, out);
  const ActiveRange ar = active_range(grid_, g, h);
  for (int i = ar.first; i <= ar.last; ++i) out[i] = d_ * (out[i] - u[i]);
}

std::vector<double> NonlocalOperator::apply(const SimState& s) const {
  std::vector<double> out(s.u.size());
  apply(s.u, s.g, s.h, out);
  return out;
}

double NonlocalOperator::flux_right(std::span<const double> u, double g, double h) const {
  const ActiveRange ar = active_range(grid_, g, h);
  double total = 0;
  for (int j = ar.last; j >= ar.first; --j) {
    const CellSpan c = cell_span(grid_, j, g, h);
    if (h - c.hi >= kernel_.radius()) break;
    if (u[j] == 0.0) continue;
    total += u[j] * c.length() * kernel_.tail_mean(h - c.hi, h - c.lo);
  }
  return total;
}

double NonlocalOperator::flux_left(std::span<const double> u, double g, double h) const {
  const ActiveRange ar = active_range(grid_, g, h);
  double total = 0;
  for (int j = ar.first; j <= ar.last; ++j) {
    const CellSpan c = cell_span(grid_, j, g, h);
    if (c.lo - g >= kernel_.radius()) break;
    if (u[j] == 0.0) continue;
    total += u[j] * c.length() * kernel_.tail_mean(c.lo - g, c.hi - g);
  }
  return total;
}

std::vector<double> apply_nonlocal(const NonlocalOperator& op, const SimState& s) {
  return op.apply(s);
}

double total_mass(const Grid& grid, const SimState& s) {
  const ActiveRange ar = active_range(grid, s.g, s.h);
  double m = 0;
  for (int i = ar.first; i <= ar.last; ++i) m += cell_span(grid, i, s.g, s.h).length() * s.u[i];
  return m;
}

double sup_density(const SimState& s) {
  double m = 0;
  for (double v : s.u) m = std::max(m, v);
  return m;
}

}  // namespace frontier
