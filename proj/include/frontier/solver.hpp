#pragma once

#include <functional>
#include <string>
#include <vector>

#include "frontier/discretization.hpp"
#include "frontier/growth.hpp"
#include "frontier/initial_data.hpp"
#include "frontier/kernel.hpp"

namespace frontier {

enum class SolverMode { Explicit, PicardFaithful };
enum class Side { Left, Right };

struct PicardSettings {
  double window = 0.05;     // T_w
  double tol = 1e-10;       // sup-norm distance between successive front paths
  int max_iterations = 100;
};

struct SolverConfig {
  double d = 1;
  double mu = 1;
  double dt = 1e-3;
  double t_end = 10;
  SolverMode mode = SolverMode::Explicit;
  PicardSettings picard;
  int snapshot_every = 100;  // steps between diagnostic rows
  int profile_every = 0;     // steps between stored profiles; 0 = first and last only
};

struct DiagnosticRow {
  double t = 0, g = 0, h = 0;
  double sup_u = 0;
  double mass = 0;
  double flux_left = 0, flux_right = 0;  // J_g, J_h (front speeds are mu times these)
  double core_u = 0;                     // density in the cell containing x = 0
};

/// Density profile: (x, u) at cell centroids of the covered range.
struct Profile {
  double t = 0, g = 0, h = 0;
  std::vector<double> x, u;
};

/// Outcome of one Picard window: distances between successive front paths
/// and their ratios (empirical contraction factors).
struct PicardReport {
  double t_start = 0, t_end = 0;
  int iterations = 0;
  int inner_iterations = 0;
  std::vector<double> residuals;
  std::vector<double> contraction;
};

enum class Termination { Completed, WindowExit, Stopped };

struct Trajectory {
  std::vector<DiagnosticRow> rows;
  std::vector<Profile> profiles;
  std::vector<PicardReport> picard;
  SimState final_state;
  Termination termination = Termination::Completed;
  std::string message;
  double d = 0, mu = 0, h0 = 0;
  double M0 = 0;  // max(sup u0, K0)
};

/// Return true to stop the run early.
using Monitor = std::function<bool(const DiagnosticRow&, const SimState&)>;

/// Forward-Euler integrator for the free-boundary system on a fixed lattice.
///
/// Density and fronts advance together with fluxes from the old state. After
/// the fronts move, covered cell lengths change and each cell average is
/// rescaled so the cell mass is kept; newly reached cells start at 0.
class FreeBoundarySolver {
public:
  FreeBoundarySolver(Kernel kernel, Growth growth, const Grid& grid, SolverConfig cfg);

  const Grid& grid() const { return op_.grid(); }
  const NonlocalOperator& op() const { return op_; }
  const Growth& growth() const { return growth_; }
  const SolverConfig& config() const { return cfg_; }

  /// Throws DomainError unless dt (d + Lip_f on [0, M0]) <= 0.5.
  void check_stability(double M0) const;

  SimState initial_state(const InitialData& u0) const;

  double boundary_flux(const SimState& s, Side side) const;
  DiagnosticRow diagnostics(const SimState& s) const;
  Profile profile(const SimState& s) const;

  /// One explicit step in place. Throws StabilityViolation / WindowExit.
  void step_explicit(SimState& s) const;

  /// Density on a prescribed front path (g_k, h_k), k = 0..m, with g_0, h_0
  /// equal to the start state's fronts. The convolution term is frozen from
  /// the previous iterate and the per-cell ODEs are re-solved until the
  /// iterates agree. Returns the m + 1 density vectors.
  std::vector<std::vector<double>> density_for_fronts(const SimState& start,
                                                      const std::vector<double>& g,
                                                      const std::vector<double>& h,
                                                      int* inner_iterations = nullptr) const;

  /// One window of the fixed-point construction over `steps` time steps.
  /// Throws NoContraction when the front iteration fails to converge.
  SimState picard_window(const SimState& start, int steps, PicardReport* report = nullptr) const;

  Trajectory integrate(const InitialData& u0, const Monitor& monitor = {}) const;

private:
  void remap(SimState& s, double g_new, double h_new, double t_new, double dt) const;
  void check_window(double g, double h, double t) const;

  NonlocalOperator op_;
  Growth growth_;
  SolverConfig cfg_;
};

}  // namespace frontier
