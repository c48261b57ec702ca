#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frontier/growth.hpp"
#include "frontier/initial_data.hpp"
#include "frontier/kernel.hpp"
#include "frontier/solver.hpp"

namespace frontier {

enum class Verdict { Spreading, Vanishing, Undetermined };
const char* to_string(Verdict v);

/// Finite-time proxies for the asymptotic dichotomy.
struct ClassifyRules {
  double eps_vanish_rel = 1e-4;  // sup u < eps_vanish_rel * v0
  double v_eps = 1e-6;           // front speed threshold
  double l_big_factor_ell = 4;   // L_big = max(factor_ell * l*, factor_h0 * h0)
  double l_big_factor_h0 = 40;
  double delta_core = 0.05;      // |u(t, 0) - v0| <= delta_core * v0
  double ell_margin = 0.01;      // h - g > l* (1 + margin) is irreversible spreading
};

struct Evidence {
  double length = 0;         // final h - g
  double sup_u = 0;
  double core_u = 0;         // density at x = 0
  double speed_left = 0;     // mu J_g
  double speed_right = 0;    // mu J_h
  double decision_time = 0;
  std::string rule;          // which rule fired
};

struct Classification {
  Verdict verdict = Verdict::Undetermined;
  Evidence evidence;
};

/// Spreading when
///   (a) l* exists and some row has h - g > l* (1 + margin): a vanishing run
///       keeps h - g <= l* forever and h - g only grows;
///   (b) at the last row h - g > L_big and the core density is within the
///       band around v0;
///   (c) f'(0) >= d (no l*), the core is in the band and both fronts still
///       move faster than v_eps.
/// Vanishing when at the last row sup u < eps * v0 and both front speeds are
/// below v_eps. Undetermined otherwise. Requires a Fisher-KPP growth law.
Classification classify_run(const Trajectory& traj, const Growth& growth,
                            std::optional<double> ell_star, const ClassifyRules& rules);

/// One simulation setup; mu, h0 and t_end are varied by the drivers below.
struct Experiment {
  Kernel kernel = Kernel::top_hat(1);
  Growth growth = Growth::logistic(1, 1);
  InitialData u0 = InitialData::cosine_bump(1, 1);
  double dx = 0.02;
  double margin = 20;
  SolverConfig solver;
  ClassifyRules rules;
};

struct RunOutcome {
  double mu = 0;
  double t_end = 0;
  Classification classification;
  Termination termination = Termination::Completed;
  Trajectory trajectory;
};

/// Integrates and classifies; with `early_stop` the run ends as soon as
/// rule (a) fires.
RunOutcome run_experiment(const Experiment& e, std::optional<double> ell_star,
                          bool early_stop = true);

/// -lambda_1 (h1 - h0) / (8 h1 C1) with lambda_1 the principal eigenvalue on
/// (-h1, h1) for a0 = f'(0), phi_1 its sup-normalized eigenfunction and
/// C1 = (1 + 1e-6) max_{[-h0, h0]} u0 / phi_1. InvalidBracket if lambda_1 >= 0.
struct MuLower {
  double mu_lower = 0;
  double lambda1 = 0;
  double C1 = 0;
  double h1 = 0;
};
MuLower compute_mu_lower(double h0, double h1, double d, const Kernel& kernel,
                         const Growth& growth, const InitialData& u0, int n = 400);

struct Probe {
  double mu = 0;
  Verdict verdict = Verdict::Undetermined;
  double t_end = 0;
  double decision_time = 0;
  double final_length = 0;
};

struct Thresholds {
  std::optional<double> ell_star;
  std::optional<double> mu_lower;
  double h1 = 0;
  double mu_vanish = 0;   // largest mu seen Vanishing
  double mu_spread = 0;   // smallest mu seen Spreading
  double relative_width = 0;
  bool undetermined_at_bracket = false;
  bool monotone = true;   // verdicts ordered in mu across all probes
  std::vector<Probe> probes;
  std::string note;
};

struct MuStarOptions {
  double rel_tol = 0.05;   // stop when (mu_s - mu_v) <= rel_tol * mu_s
  double t_end = 200;
  double ell_tol = 1e-10;
  int max_doublings = 40;
  int max_bisections = 60;
};

/// Bracket [mu_vanish, mu_spread] of the sharp threshold. Throws NoThreshold
/// unless f'(0) < d and h0 < l*/2. An Undetermined probe is retried once
/// with 4 t_end; if it stays Undetermined the current bracket is returned
/// with undetermined_at_bracket set.
Thresholds find_mu_star(const Experiment& base, const MuStarOptions& opts = {});

/// Columns are always mu; rows vary h0 or d.
enum class SweepRows { H0, D };

struct SweepCell {
  double mu = 0;
  double row_value = 0;   // h0 or d
  Verdict verdict = Verdict::Undetermined;
  Evidence evidence;
  std::vector<DiagnosticRow> rows;  // the run's diagnostics
  std::string error;      // set when the run failed; verdict stays Undetermined
};

struct SweepTable {
  SweepRows rows = SweepRows::H0;
  std::vector<double> mu, row_values;
  std::vector<SweepCell> cells;  // row-major: cells[r * mu.size() + c]
  const SweepCell& at(size_t r, size_t c) const { return cells[r * mu.size() + c]; }
};

/// Runs every grid point independently (concurrently, up to `threads`) and
/// returns the cells in parameter order. Per-cell failures are recorded.
SweepTable sweep(const Experiment& base, SweepRows rows, const std::vector<double>& mu,
                 const std::vector<double>& row_values, unsigned threads = 0);

/// No Spreading cell has a Vanishing cell at larger mu in the same row.
bool sweep_rows_monotone(const SweepTable& t);

}  // namespace frontier
