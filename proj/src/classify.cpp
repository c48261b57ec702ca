#include "frontier/classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <map>
#include <sstream>
#include <thread>

#include "frontier/errors.hpp"
#include "frontier/spectral.hpp"

namespace frontier {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Spreading: return "Spreading";
    case Verdict::Vanishing: return "Vanishing";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "?";
}

Classification classify_run(const Trajectory& traj, const Growth& growth,
                            std::optional<double> ell_star, const ClassifyRules& rules) {
  if (!growth.kpp()) throw DomainError("classify: needs a Fisher-KPP growth law");
  if (traj.rows.empty()) throw DomainError("classify: empty trajectory");
  const DerivedConstants dc = growth.derived_constants();
  const DiagnosticRow& last = traj.rows.back();

  Classification c;
  Evidence& ev = c.evidence;
  ev.length = last.h - last.g;
  ev.sup_u = last.sup_u;
  ev.core_u = last.core_u;
  ev.speed_left = traj.mu * last.flux_left;
  ev.speed_right = traj.mu * last.flux_right;
  ev.decision_time = last.t;

  auto spreading = [&](std::string rule, double when) {
    c.verdict = Verdict::Spreading;
    ev.rule = std::move(rule);
    ev.decision_time = when;
    return c;
  };

  if (ell_star) {
    const double cut = *ell_star * (1 + rules.ell_margin);
    for (const DiagnosticRow& r : traj.rows)
      if (r.h - r.g > cut) return spreading("h-g exceeds l*(1+margin)", r.t);
  }
  double l_big = rules.l_big_factor_h0 * traj.h0;
  if (ell_star) l_big = std::max(l_big, rules.l_big_factor_ell * *ell_star);
  const bool core_in_band = std::abs(ev.core_u - dc.v0) <= rules.delta_core * dc.v0;
  if (ev.length > l_big && core_in_band) return spreading("h-g exceeds L_big, core near v0", last.t);
  if (!ell_star && dc.fprime0 >= traj.d && core_in_band && ev.speed_left > rules.v_eps &&
      ev.speed_right > rules.v_eps)
    return spreading("f'(0) >= d, core near v0, fronts advancing", last.t);
  if (traj.termination == Termination::WindowExit && ev.length > l_big)
    return spreading("window exit with h-g above L_big", last.t);

  if (ev.sup_u < rules.eps_vanish_rel * dc.v0 && ev.speed_left < rules.v_eps &&
      ev.speed_right < rules.v_eps) {
    c.verdict = Verdict::Vanishing;
    ev.rule = "sup u and front speeds below thresholds";
    return c;
  }
  c.verdict = Verdict::Undetermined;
  ev.rule = "no rule fired";
  return c;
}

RunOutcome run_experiment(const Experiment& e, std::optional<double> ell_star, bool early_stop) {
  const FreeBoundarySolver solver(e.kernel, e.growth, build_grid(e.u0.h0(), e.margin, e.dx),
                                  e.solver);
  Monitor monitor;
  if (early_stop && ell_star) {
    const double cut = *ell_star * (1 + e.rules.ell_margin);
    monitor = [cut](const DiagnosticRow& r, const SimState&) { return r.h - r.g > cut; };
  }
  RunOutcome out;
  out.mu = e.solver.mu;
  out.t_end = e.solver.t_end;
  out.trajectory = solver.integrate(e.u0, monitor);
  out.termination = out.trajectory.termination;
  out.classification = classify_run(out.trajectory, e.growth, ell_star, e.rules);
  return out;
}

MuLower compute_mu_lower(double h0, double h1, double d, const Kernel& kernel,
                         const Growth& growth, const InitialData& u0, int n) {
  if (!(h0 > 0) || !(h1 > h0)) throw DomainError("compute_mu_lower: need 0 < h0 < h1");
  const double a0 = growth.derived_constants().fprime0;
  const SpectralResult sr = lambda_p(a0, d, {-h1, h1}, kernel, n);
  if (sr.lambda_p >= 0) {
    std::ostringstream os;
    os << "compute_mu_lower: lambda_1 = " << sr.lambda_p << " >= 0 on (-" << h1 << ", " << h1
       << "); choose a smaller h1";
    throw InvalidBracket(os.str());
  }
  // phi_1 between cell centres by linear interpolation, constant past the ends.
  auto phi = [&](double x) {
    if (x <= sr.x.front()) return sr.phi.front();
    if (x >= sr.x.back()) return sr.phi.back();
    const auto it = std::upper_bound(sr.x.begin(), sr.x.end(), x);
    const size_t i = static_cast<size_t>(it - sr.x.begin()) - 1;
    const double w = (x - sr.x[i]) / (sr.x[i + 1] - sr.x[i]);
    return (1 - w) * sr.phi[i] + w * sr.phi[i + 1];
  };
  double ratio = 0;
  constexpr int kSamples = 4000;
  for (int k = 0; k <= kSamples; ++k) {
    const double x = -h0 + 2 * h0 * k / kSamples;
    ratio = std::max(ratio, u0(x) / phi(x));
  }
  MuLower m;
  m.lambda1 = sr.lambda_p;
  m.h1 = h1;
  m.C1 = (1 + 1e-6) * ratio;
  m.mu_lower = -m.lambda1 * (h1 - h0) / (8 * h1 * m.C1);
  return m;
}

Thresholds find_mu_star(const Experiment& base, const MuStarOptions& opts) {
  const DerivedConstants dc = base.growth.derived_constants();
  const double d = base.solver.d;
  if (dc.fprime0 >= d) {
    std::ostringstream os;
    os << "no threshold: f'(0) = " << dc.fprime0 << " >= d = " << d
       << ", spreading happens for every mu";
    throw NoThreshold(os.str());
  }
  Thresholds th;
  const double ell = find_ell_star(d, dc.fprime0, base.kernel, opts.ell_tol);
  th.ell_star = ell;
  const double h0 = base.u0.h0();
  if (h0 >= ell / 2) {
    std::ostringstream os;
    os << "no threshold: h0 = " << h0 << " >= l*/2 = " << ell / 2
       << ", spreading happens for every mu";
    throw NoThreshold(os.str());
  }
  th.h1 = 0.5 * (h0 + ell / 2);
  const MuLower ml = compute_mu_lower(h0, th.h1, d, base.kernel, base.growth, base.u0);
  th.mu_lower = ml.mu_lower;

  auto probe = [&](double mu) {
    Experiment e = base;
    e.solver.mu = mu;
    e.solver.t_end = opts.t_end;
    RunOutcome r = run_experiment(e, ell);
    if (r.classification.verdict == Verdict::Undetermined) {
      e.solver.t_end = 4 * opts.t_end;
      r = run_experiment(e, ell);
    }
    Probe p;
    p.mu = mu;
    p.verdict = r.classification.verdict;
    p.t_end = e.solver.t_end;
    p.decision_time = r.classification.evidence.decision_time;
    p.final_length = r.classification.evidence.length;
    th.probes.push_back(p);
    return p.verdict;
  };

  double lo = ml.mu_lower;
  const Verdict v_lo = probe(lo);
  if (v_lo != Verdict::Vanishing) {
    th.note = std::string("run at mu_lower classified ") + to_string(v_lo);
    th.undetermined_at_bracket = v_lo == Verdict::Undetermined;
    th.mu_vanish = 0;
    th.mu_spread = lo;
  } else {
    double hi = 2 * lo;
    bool found = false;
    for (int k = 0; k < opts.max_doublings; ++k) {
      const Verdict v = probe(hi);
      if (v == Verdict::Spreading) {
        found = true;
        break;
      }
      if (v == Verdict::Vanishing) lo = hi;
      hi *= 2;
    }
    if (!found) throw BracketFailure("find_mu_star: no spreading run found while doubling mu");
    for (int k = 0; k < opts.max_bisections && hi - lo > opts.rel_tol * hi; ++k) {
      const double mid = 0.5 * (lo + hi);
      const Verdict v = probe(mid);
      if (v == Verdict::Spreading) {
        hi = mid;
      } else if (v == Verdict::Vanishing) {
        lo = mid;
      } else {
        th.undetermined_at_bracket = true;
        th.note = "Undetermined verdict near the threshold even with 4x t_end";
        break;
      }
    }
    th.mu_vanish = lo;
    th.mu_spread = hi;
  }
  th.relative_width = th.mu_spread > 0 ? (th.mu_spread - th.mu_vanish) / th.mu_spread : 0;

  std::vector<Probe> sorted = th.probes;
  std::sort(sorted.begin(), sorted.end(), [](const Probe& a, const Probe& b) { return a.mu < b.mu; });
  bool seen_spread = false;
  for (const Probe& p : sorted) {
    if (p.verdict == Verdict::Spreading) seen_spread = true;
    if (p.verdict == Verdict::Vanishing && seen_spread) th.monotone = false;
  }
  return th;
}

SweepTable sweep(const Experiment& base, SweepRows rows, const std::vector<double>& mu,
                 const std::vector<double>& row_values, unsigned threads) {
  if (mu.empty() || row_values.empty()) throw DomainError("sweep: empty parameter grid");
  SweepTable t;
  t.rows = rows;
  t.mu = mu;
  t.row_values = row_values;
  t.cells.resize(mu.size() * row_values.size());

  const DerivedConstants dc = base.growth.derived_constants();
  // l* per distinct d, computed up front so workers share nothing mutable.
  std::map<double, std::optional<double>> ell_by_d;
  for (double rv : row_values) {
    const double d = rows == SweepRows::D ? rv : base.solver.d;
    if (ell_by_d.count(d)) continue;
    std::optional<double> ell;
    if (dc.fprime0 < d) {
      try {
        ell = find_ell_star(d, dc.fprime0, base.kernel);
      } catch (const std::exception&) {
      }
    }
    ell_by_d[d] = ell;
  }

  auto run_cell = [&](size_t idx) {
    SweepCell& cell = t.cells[idx];
    const size_t r = idx / mu.size(), c = idx % mu.size();
    cell.mu = mu[c];
    cell.row_value = row_values[r];
    try {
      Experiment e = base;
      e.solver.mu = mu[c];
      if (rows == SweepRows::H0)
        e.u0 = base.u0.rescaled(row_values[r]);
      else
        e.solver.d = row_values[r];
      const RunOutcome out = run_experiment(e, ell_by_d.at(e.solver.d));
      cell.verdict = out.classification.verdict;
      cell.evidence = out.classification.evidence;
      cell.rows = out.trajectory.rows;
    } catch (const std::exception& ex) {
      cell.verdict = Verdict::Undetermined;
      cell.error = ex.what();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(t.cells.size()));
  std::atomic<size_t> next{0};
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < threads; ++w)
    workers.push_back(std::async(std::launch::async, [&] {
      for (size_t i = next++; i < t.cells.size(); i = next++) run_cell(i);
    }));
  for (auto& f : workers) f.get();
  return t;
}

bool sweep_rows_monotone(const SweepTable& t) {
  for (size_t r = 0; r < t.row_values.size(); ++r) {
    bool seen_spread = false;
    for (size_t c = 0; c < t.mu.size(); ++c) {
      const Verdict v = t.at(r, c).verdict;
      if (v == Verdict::Spreading) seen_spread = true;
      if (v == Verdict::Vanishing && seen_spread) return false;
    }
  }
  return true;
}

}  // namespace frontier
