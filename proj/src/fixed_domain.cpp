#include "frontier/fixed_domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "euler.hpp"
#include "frontier/errors.hpp"

namespace frontier {
namespace {

Grid grid_for(const FixedProblem& p) {
  if (!(p.interval.hi > p.interval.lo))
    throw DomainError("fixed domain: interval must have positive length");
  if (!(p.dx > 0)) throw DomainError("fixed domain: dx must be positive");
  const double reach = std::max(std::abs(p.interval.lo), std::abs(p.interval.hi));
  return build_grid(std::max(reach, 2 * p.dx), 2 * p.dx, p.dx);
}

}  // namespace

FixedDomain::FixedDomain(FixedProblem problem)
    : problem_(std::move(problem)), op_(problem_.kernel, grid_for(problem_), problem_.d) {}

std::vector<double> FixedDomain::centroids() const {
  std::vector<double> x;
  const ActiveRange ar = cells();
  for (int i = ar.first; i <= ar.last; ++i)
    x.push_back(cell_span(grid(), i, problem_.interval.lo, problem_.interval.hi).centroid());
  return x;
}

std::vector<double> FixedDomain::embed(const std::vector<double>& active_values) const {
  const ActiveRange ar = cells();
  if (static_cast<int>(active_values.size()) != ar.size())
    throw DomainError("fixed domain: value count does not match the cell count");
  std::vector<double> u(grid().nodes(), 0.0);
  std::copy(active_values.begin(), active_values.end(), u.begin() + ar.first);
  return u;
}

double FixedDomain::residual(const std::vector<double>& u, double t) const {
  const double lo = problem_.interval.lo, hi = problem_.interval.hi;
  std::vector<double> r(u.size(), 0.0);
  op_.apply(u, lo, hi, r);
  const ActiveRange ar = cells();
  double worst = 0;
  for (int i = ar.first; i <= ar.last; ++i) {
    const double x = cell_span(grid(), i, lo, hi).centroid();
    worst = std::max(worst, std::abs(r[i] + problem_.growth.rate(t, x, u[i])));
  }
  return worst;
}

FixedRun evolve_fixed(const FixedDomain& domain, const std::vector<double>& u0,
                      const FixedSettings& settings, double t_end) {
  const Grid& grid = domain.grid();
  if (static_cast<int>(u0.size()) != grid.nodes())
    throw DomainError("evolve_fixed: u0 must have one value per lattice node");
  if (!(settings.dt > 0) || !(settings.check_every > 0))
    throw DomainError("evolve_fixed: dt and the convergence window must be positive");
  const double lo = domain.problem().interval.lo, hi = domain.problem().interval.hi;
  const ActiveRange ar = domain.cells();
  bool any = false;
  for (int i = ar.first; i <= ar.last; ++i) {
    if (u0[i] < 0) throw DomainError("evolve_fixed: u0 must be nonnegative");
    any = any || u0[i] > 0;
  }
  if (!any) throw DomainError("evolve_fixed: u0 must not vanish identically");

  double M0 = domain.problem().growth.K0();
  for (int i = ar.first; i <= ar.last; ++i) M0 = std::max(M0, u0[i]);
  const double q = settings.dt * (domain.problem().d + domain.problem().growth.lipschitz(M0));
  if (q > 0.5) {
    std::ostringstream os;
    os << "evolve_fixed: dt*(d + Lip_f) = " << q << " exceeds 0.5; reduce dt";
    throw DomainError(os.str());
  }

  FixedRun run;
  run.interval = domain.problem().interval;
  run.x = domain.centroids();
  std::vector<double> u = u0, conv(u.size()), mark = u0;
  for (int i = 0; i < grid.nodes(); ++i)
    if (i < ar.first || i > ar.last) u[i] = mark[i] = 0.0;

  const long steps = std::lround(t_end / settings.dt);
  const long per_window = std::max(1L, std::lround(settings.check_every / settings.dt));
  long k = 0;
  while (k < steps) {
    const double t = static_cast<double>(k) * settings.dt;
    domain.op().convolve(u, lo, hi, conv);
    detail::advance_density(domain.op(), domain.problem().growth, settings.dt, u, conv, lo, hi, t,
                            u);
    ++k;
    if (k % per_window == 0) {
      double change = 0;
      for (int i = ar.first; i <= ar.last; ++i) change = std::max(change, std::abs(u[i] - mark[i]));
      mark = u;
      run.last_change = change;
      run.times.push_back(static_cast<double>(k) * settings.dt);
      run.snapshots.emplace_back(u.begin() + ar.first, u.begin() + ar.last + 1);
      if (change < settings.tol) {
        run.converged = true;
        if (settings.stop_when_converged) break;
      }
    }
  }
  run.t_final = static_cast<double>(k) * settings.dt;
  run.u.assign(u.begin() + ar.first, u.begin() + ar.last + 1);
  return run;
}

SteadyState steady_state(const FixedDomain& domain, const FixedSettings& settings, double t_max) {
  const Growth& f = domain.problem().growth;
  const double level = f.kpp() ? 0.5 * f.derived_constants().v0 : 0.5 * f.K0();
  const std::vector<double> u0 = domain.average([level](double) { return level; });
  FixedSettings s = settings;
  s.stop_when_converged = true;
  SteadyState out;
  out.run = evolve_fixed(domain, u0, s, t_max);
  if (!out.run.converged) {
    std::ostringstream os;
    os << "steady_state: no convergence by t=" << t_max << " (last change "
       << out.run.last_change << ")";
    throw NotConverged(os.str());
  }
  out.residual = domain.residual(domain.embed(out.run.u));
  return out;
}

}  // namespace frontier
