#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace frontier {

/// Symmetric dispersal kernel J with unit mass.
///
/// Every family carries its normalization so that the total mass is 1.
/// Unbounded families (Laplace, Gaussian) are truncated at a radius R and
/// renormalized; Laplace also admits R = +inf. Tabulated kernels are
/// symmetrized, interpolated linearly and renormalized.
///
/// Besides J itself the kernel exposes the tail mass K(z) = int_z^inf J and
/// its integral P(z) = int_z^inf K. The free-boundary fluxes and all cell
/// integrals of the discretization reduce to differences of K and P.
class Kernel {
public:
  enum class Family { TopHat, Triangle, Laplace, TruncatedGaussian, Tabulated };

  static Kernel top_hat(double halfwidth);
  static Kernel triangle(double halfwidth);
  static Kernel laplace(double rate,
                        double radius = std::numeric_limits<double>::infinity());
  static Kernel truncated_gaussian(double sigma, double radius);
  /// Samples on a grid symmetric about 0 (x_k = -x_{N-1-k}).
  static Kernel tabulated(std::vector<double> x, std::vector<double> values);

  Family family() const { return family_; }
  std::string name() const;

  /// J(x).
  double eval(double x) const;
  /// K(z) = int_z^inf J(s) ds.
  double tail_mass(double z) const;
  /// int_a^b J = K(a) - K(b). Rejects a > b.
  double interval_mass(double a, double b) const;
  /// int_a^b K(s) ds, accurate even when a and b are large negative.
  double tail_integral(double a, double b) const;
  /// Mean of K over [a, b]; stays accurate as b - a -> 0.
  double tail_mean(double a, double b) const;
  /// int_a^b int_c^e J(x - y) dy dx.
  double cell_pair_mass(double a, double b, double c, double e) const;

  /// Support radius (infinite for an untruncated Laplace kernel).
  double radius() const { return radius_; }
  double sup() const;
  bool compact() const { return std::isfinite(radius_); }

private:
  Kernel() = default;

  // P(z) for z >= 0.
  double tail_integral_positive(double z) const;
  double tail_mass_positive(double z) const;

  Family family_ = Family::TopHat;
  double p1_ = 0;    // halfwidth / rate / sigma
  double radius_ = 0;
  double norm_ = 1;  // renormalization factor

  // Tabulated data for x >= 0 after symmetrization, with cumulative moments
  // from the right end: m0_k = int_{x_k}^X J, m1_k = int_{x_k}^X s J.
  struct Table {
    std::vector<double> x, j, m0, m1;
  };
  std::shared_ptr<const Table> table_;
};

/// Quadrature stencil for a uniform node-centred lattice of spacing dx.
///
/// PointToCell: w_k = int over cell k of J (kernel seen from a node).
/// CellToCell:  W_k = (1/dx) int_{cell 0} int_{cell k} J(x - y) dy dx, the
///              exact cell-average operator used by the finite-volume scheme.
struct Stencil {
  enum class Kind { PointToCell, CellToCell };

  Kind kind = Kind::CellToCell;
  double dx = 0;
  int radius_cells = 0;
  std::vector<double> weights;  // index k + radius_cells, k in [-r, r]
  double truncation_defect = 0; // 1 - sum(weights)

  double operator[](int k) const {
    return (k < -radius_cells || k > radius_cells) ? 0.0 : weights[k + radius_cells];
  }
  double total() const;
};

/// Cell count needed to cover the kernel support at spacing dx.
int covering_radius_cells(const Kernel& kernel, double dx);

/// Rejects sum(weights) < 0.999 unless allow_truncation is set.
Stencil discretize_kernel(const Kernel& kernel, double dx, int radius_cells,
                          Stencil::Kind kind = Stencil::Kind::CellToCell,
                          bool allow_truncation = false);

/// Parses "tophat:L", "triangle:L", "laplace:rate[:radius]",
/// "gaussian:sigma:radius" or "tabulated:path.csv".
Kernel parse_kernel_spec(const std::string& spec);

/// Loads a two-column CSV (x, J(x)); a header line is allowed.
Kernel load_tabulated_kernel(const std::string& path);

}  // namespace frontier
