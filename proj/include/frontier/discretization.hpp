#pragma once

#include <span>
#include <vector>

#include "frontier/kernel.hpp"

namespace frontier {

/// Uniform node lattice x_i = xmin + i dx, i = 0..n, symmetric about 0 with
/// a node at the origin. Node i owns the cell [x_i - dx/2, x_i + dx/2].
struct Grid {
  double xmin = 0;
  double xmax = 0;
  double dx = 0;
  int n = 0;  // intervals; n + 1 nodes

  int nodes() const { return n + 1; }
  double node(int i) const { return xmin + i * dx; }
  double cell_lo(int i) const { return node(i) - 0.5 * dx; }
  double cell_hi(int i) const { return node(i) + 0.5 * dx; }
  /// Index of the node whose cell contains x (clamped to the lattice).
  int cell_of(double x) const;
};

/// Window [-(h0 + margin), h0 + margin], rounded outward to whole cells.
/// Rejects dx >= h0 so that the initial range holds at least 3 nodes.
Grid build_grid(double h0, double window_margin, double dx);

/// Index range of cells with positive overlap with (g, h).
struct ActiveRange {
  int first = 0;
  int last = -1;
  bool empty() const { return last < first; }
  int size() const { return last - first + 1; }
};

ActiveRange active_range(const Grid& grid, double g, double h);

/// Covered part [lo, hi] of cell i inside [g, h].
struct CellSpan {
  double lo = 0;
  double hi = 0;
  double length() const { return hi - lo; }
  double centroid() const { return 0.5 * (lo + hi); }
};

CellSpan cell_span(const Grid& grid, int i, double g, double h);

/// Density on the moving range (g, h).
///
/// u[i] is the average of the density over the covered part of cell i and
/// is exactly 0 for inactive cells. Values sit at the cell centroids, which
/// always lie strictly inside (g, h). activation[i] is the time at which a
/// front first reached cell i (0 for the initial range, NaN if never).
struct SimState {
  double t = 0;
  double g = 0;
  double h = 0;
  std::vector<double> u;
  std::vector<double> activation;
};

/// Discretized d (int_g^h J(x - y) u(y) dy - u(x)) on a fixed lattice.
///
/// Entries are exact cell averages of cell-pair kernel masses, so the
/// operator is symmetric with respect to the covered cell lengths and the
/// identity  sum_i l_i (A u)_i = mass - J_g - J_h  holds to round-off.
class NonlocalOperator {
public:
  NonlocalOperator(Kernel kernel, const Grid& grid, double d);

  const Kernel& kernel() const { return kernel_; }
  const Grid& grid() const { return grid_; }
  const Stencil& stencil() const { return stencil_; }
  double d() const { return d_; }

  /// out[i] = d (sum_j A_ij u_j - u_i) on active cells. Entries of `out`
  /// outside the active range are left untouched.
  void apply(std::span<const double> u, double g, double h, std::span<double> out) const;
  /// Full-length result, zero outside the active range.
  std::vector<double> apply(const SimState& s) const;

  /// sum_j A_ij u_j over active j: the convolution term alone (active cells only).
  void convolve(std::span<const double> u, double g, double h, std::span<double> out) const;

  /// Average over cell i of int over cell j of J(x - y) dy (spans already clipped).
  double pair_average(const CellSpan& ci, const CellSpan& cj) const;

  /// int_g^h K(h - x) u(x) dx: mass per unit time leaving through h.
  double flux_right(std::span<const double> u, double g, double h) const;
  /// int_g^h K(x - g) u(x) dx: mass per unit time leaving through g.
  double flux_left(std::span<const double> u, double g, double h) const;

private:
  Kernel kernel_;
  Grid grid_;
  double d_;
  Stencil stencil_;
};

/// Rates of the nonlocal operator for a state (spec name kept for callers).
std::vector<double> apply_nonlocal(const NonlocalOperator& op, const SimState& s);

/// sum_i l_i u_i over the active cells.
double total_mass(const Grid& grid, const SimState& s);
double sup_density(const SimState& s);

}  // namespace frontier
