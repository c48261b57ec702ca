#pragma once

#include <vector>

#include <Eigen/Dense>

#include "frontier/kernel.hpp"

namespace frontier {

struct Interval {
  double lo = 0;
  double hi = 0;
  double length() const { return hi - lo; }
};

/// Matrix of phi -> d (int_I J(x - y) phi(y) dy - phi) + a0 phi on n equal
/// cells: M_ij = d W_{j-i} + (a0 - d) delta_ij, with W the exact
/// cell-average kernel masses. Symmetric with nonnegative off-diagonal.
Eigen::MatrixXd assemble_operator(double a0, double d, const Interval& interval,
                                  const Kernel& kernel, int n);

struct SpectralResult {
  double lambda_p = 0;
  std::vector<double> x;    // cell centres
  std::vector<double> phi;  // positive, max = 1
  Interval interval;
  int n = 0;
  int iterations = 0;
  double residual = 0;      // ||M phi - lambda phi||_inf with ||phi||_inf = 1
  double matrix_norm = 0;   // ||M||_inf
};

struct SpectralOptions {
  double tol = 1e-12;       // Rayleigh-quotient change between iterations
  int max_iterations = 200;
};

/// Principal eigenvalue and its positive eigenfunction.
///
/// Shifted inverse iteration: the shift is the Collatz-Wielandt upper bound
/// max_i (M phi)_i / phi_i of the current iterate plus a small gap, so
/// (shift I - M) stays a nonsingular M-matrix and iterates stay positive.
/// Converges when the Rayleigh quotient settles and the residual is below
/// 1e-10 ||M||_inf. Throws NoConvergence otherwise.
SpectralResult lambda_p(double a0, double d, const Interval& interval, const Kernel& kernel,
                        int n, const SpectralOptions& opts = {});

/// Length l with lambda_p((0, l)) = 0 for a0 = fprime0, by bracketed
/// bisection at a fixed cell count. Requires 0 < fprime0 < d (throws
/// NoCriticalLength otherwise); BracketFailure if no sign change is found.
double find_ell_star(double d, double fprime0, const Kernel& kernel, double tol = 1e-10,
                     int n = 400);

struct RefinementStudy {
  std::vector<int> n;
  std::vector<double> lambda;
  std::vector<double> change;  // |lambda(n_k) - lambda(n_{k-1})|, k >= 1
  double observed_order = 0;   // log2 of the last ratio of changes
};

/// lambda_p at n0, 2 n0, ..., 2^(levels-1) n0.
RefinementStudy refinement_study(double a0, double d, const Interval& interval,
                                 const Kernel& kernel, int n0, int levels);

}  // namespace frontier
