#pragma once

#include <vector>

#include "frontier/discretization.hpp"
#include "frontier/growth.hpp"
#include "frontier/initial_data.hpp"
#include "frontier/kernel.hpp"
#include "frontier/spectral.hpp"

namespace frontier {

/// u_t = d (int_I J(x - y) u dy - u) + f(t, x, u) on a fixed interval I,
/// discretized on the same node-centred lattice as the free-boundary solver.
struct FixedProblem {
  Kernel kernel;
  Growth growth;
  double d = 1;
  Interval interval;
  double dx = 0.02;
};

struct FixedSettings {
  double dt = 1e-3;
  double check_every = 1.0;  // convergence window in time units
  double tol = 1e-10;        // sup-norm change over one window
  bool stop_when_converged = true;
};

struct FixedRun {
  Interval interval;
  std::vector<double> x;               // cell centroids
  std::vector<double> u;               // final density at x
  std::vector<double> times;           // one entry per convergence window
  std::vector<std::vector<double>> snapshots;
  bool converged = false;
  double t_final = 0;
  double last_change = 0;              // sup-norm change over the last window
};

/// Lattice and operator for a fixed problem: cells clipped to the interval.
class FixedDomain {
public:
  explicit FixedDomain(FixedProblem problem);

  const Grid& grid() const { return op_.grid(); }
  const NonlocalOperator& op() const { return op_; }
  const FixedProblem& problem() const { return problem_; }
  ActiveRange cells() const { return active_range(grid(), problem_.interval.lo, problem_.interval.hi); }
  std::vector<double> centroids() const;

  /// Cell averages of a function over the interval.
  template <class F>
  std::vector<double> average(F&& f) const {
    return cell_averages_of(grid(), problem_.interval.lo, problem_.interval.hi, f);
  }

  /// Full-lattice density from values at the active cells.
  std::vector<double> embed(const std::vector<double>& active_values) const;

  /// ||d (A u - u) + f(u)||_inf over the active cells.
  double residual(const std::vector<double>& u, double t = 0) const;

private:
  FixedProblem problem_;
  NonlocalOperator op_;
};

/// Explicit stepping to t_end (or to convergence). `u0` is a full-lattice
/// vector, nonnegative and not identically zero.
FixedRun evolve_fixed(const FixedDomain& domain, const std::vector<double>& u0,
                      const FixedSettings& settings, double t_end);

struct SteadyState {
  FixedRun run;
  double residual = 0;
};

/// Marches from u = v0 / 2 (K0 / 2 for non-KPP laws) until the change over a
/// window drops below the tolerance; throws NotConverged after t_max.
SteadyState steady_state(const FixedDomain& domain, const FixedSettings& settings,
                         double t_max = 1e4);

}  // namespace frontier
