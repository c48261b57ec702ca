#pragma once

#include <string>
#include <vector>

#include "frontier/discretization.hpp"

namespace frontier {

/// Initial density on [-h0, h0]: continuous, positive inside, zero at +-h0.
class InitialData {
public:
  enum class Family { CosineBump, Parabola, Tabulated };

  /// A cos(pi x / (2 h0)).
  static InitialData cosine_bump(double h0, double amplitude);
  /// A (1 - (x/h0)^2).
  static InitialData parabola(double h0, double amplitude);
  /// Linear interpolation of samples spanning exactly [-h0, h0].
  static InitialData tabulated(double h0, std::vector<double> x, std::vector<double> u);
  static InitialData load_csv(double h0, const std::string& path);

  /// Same shape on [-h0, h0] (tabulated samples are stretched).
  InitialData rescaled(double h0) const;

  Family family() const { return family_; }
  double h0() const { return h0_; }
  double amplitude() const { return amplitude_; }
  /// Value at x; 0 outside [-h0, h0].
  double operator()(double x) const;
  double sup() const;

  /// Cell averages over the lattice cells clipped to [-h0, h0].
  std::vector<double> cell_averages(const Grid& grid) const;

private:
  InitialData() = default;

  Family family_ = Family::CosineBump;
  double h0_ = 1;
  double amplitude_ = 1;
  std::vector<double> x_, u_;
};

/// Averages of f over the covered part of each lattice cell in [lo, hi].
template <class F>
std::vector<double> cell_averages_of(const Grid& grid, double lo, double hi, F&& f) {
  // 4-point Gauss-Legendre on each covered span.
  static constexpr double kNodes[4] = {-0.86113631159405258, -0.33998104358485626,
                                       0.33998104358485626, 0.86113631159405258};
  static constexpr double kWeights[4] = {0.34785484513745386, 0.65214515486254614,
                                         0.65214515486254614, 0.34785484513745386};
  std::vector<double> out(grid.nodes(), 0.0);
  const ActiveRange ar = active_range(grid, lo, hi);
  for (int i = ar.first; i <= ar.last; ++i) {
    const CellSpan c = cell_span(grid, i, lo, hi);
    const double mid = c.centroid(), half = 0.5 * c.length();
    double s = 0;
    for (int q = 0; q < 4; ++q) s += kWeights[q] * f(mid + half * kNodes[q]);
    out[i] = 0.5 * s;
  }
  return out;
}

}  // namespace frontier
