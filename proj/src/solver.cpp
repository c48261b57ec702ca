#include "frontier/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "frontier/errors.hpp"
#include "euler.hpp"

namespace frontier {
namespace {

constexpr double kNegativeTolerance = -1e-12;

std::string at_time(double t) {
  std::ostringstream os;
  os.precision(10);
  os << " at t=" << t;
  return os.str();
}

// Moves the fronts from (g0, h0) to (g1, h1) over [t, t + dt]: covered
// lengths grow, cell masses are kept, cells reached for the first time start
// at 0 and get the interpolated crossing time as activation time.
void remap_density(const Grid& grid, std::span<double> u, double g0, double h0, double g1,
                   double h1, double t, double dt, std::vector<double>* activation) {
  const ActiveRange now = active_range(grid, g1, h1);
  for (int i = now.first; i <= now.last; ++i) {
    const double l_old = cell_span(grid, i, g0, h0).length();
    const double l_new = cell_span(grid, i, g1, h1).length();
    if (l_old > 0) {
      if (l_new != l_old) u[i] *= l_old / l_new;
      continue;
    }
    u[i] = 0.0;
    if (activation) {
      double when;
      if (grid.node(i) > h0)
        when = t + dt * (grid.cell_lo(i) - h0) / (h1 - h0);
      else
        when = t + dt * (g0 - grid.cell_hi(i)) / (g0 - g1);
      (*activation)[i] = std::clamp(when, t, t + dt);
    }
  }
}

}  // namespace

namespace detail {

void advance_density(const NonlocalOperator& op, const Growth& growth, double dt,
                     std::span<const double> u, std::span<const double> conv, double g, double h,
                     double t, std::span<double> out) {
  const Grid& grid = op.grid();
  const double d = op.d();
  const ActiveRange ar = active_range(grid, g, h);
  for (int i = ar.first; i <= ar.last; ++i) {
    const double x = cell_span(grid, i, g, h).centroid();
    const double v = u[i] + dt * (d * (conv[i] - u[i]) + growth.rate(t, x, u[i]));
    if (v < kNegativeTolerance) {
      std::ostringstream os;
      os << "negative density " << v << " in cell " << i << " (x=" << x << ")" << at_time(t + dt)
         << "; reduce dt";
      throw StabilityViolation(os.str(), t + dt);
    }
    out[i] = v;
  }
}

}  // namespace detail

FreeBoundarySolver::FreeBoundarySolver(Kernel kernel, Growth growth, const Grid& grid,
                                       SolverConfig cfg)
    : op_(std::move(kernel), grid, cfg.d), growth_(std::move(growth)), cfg_(cfg) {
  if (!(cfg_.mu > 0)) throw DomainError("solver: mu must be positive");
  if (!(cfg_.dt > 0)) throw DomainError("solver: dt must be positive");
  if (!(cfg_.t_end >= 0)) throw DomainError("solver: t_end must be nonnegative");
  if (cfg_.snapshot_every < 1) throw DomainError("solver: snapshot_every must be >= 1");
  if (cfg_.profile_every < 0) throw DomainError("solver: profile_every must be >= 0");
  if (cfg_.mode == SolverMode::PicardFaithful) {
    if (!(cfg_.picard.window > 0)) throw DomainError("solver: Picard window must be positive");
    if (!(cfg_.picard.tol > 0)) throw DomainError("solver: Picard tolerance must be positive");
    if (cfg_.picard.max_iterations < 1)
      throw DomainError("solver: Picard max_iterations must be >= 1");
  }
}

void FreeBoundarySolver::check_stability(double M0) const {
  const double lip = growth_.lipschitz(M0);
  const double q = cfg_.dt * (cfg_.d + lip);
  if (q > 0.5) {
    std::ostringstream os;
    os << "dt*(d + Lip_f) = " << q << " exceeds 0.5 (Lip_f=" << lip << " on [0," << M0
       << "]); reduce dt";
    throw DomainError(os.str());
  }
}

void FreeBoundarySolver::check_window(double g, double h, double t) const {
  const Grid& grid = op_.grid();
  const double reach = op_.kernel().radius();
  if (h + reach >= grid.xmax || g - reach <= grid.xmin) {
    std::ostringstream os;
    os << "front within one kernel radius of the window edge (g=" << g << ", h=" << h
       << ", window [" << grid.xmin << "," << grid.xmax << "])" << at_time(t)
       << "; enlarge grid.margin";
    throw WindowExit(os.str(), t);
  }
}

SimState FreeBoundarySolver::initial_state(const InitialData& u0) const {
  const Grid& grid = op_.grid();
  const double h0 = u0.h0();
  if (h0 + op_.kernel().radius() >= grid.xmax)
    throw DomainError("solver: window too small for h0 plus the kernel radius");
  SimState s;
  s.t = 0;
  s.g = -h0;
  s.h = h0;
  s.u = u0.cell_averages(grid);
  s.activation.assign(grid.nodes(), std::numeric_limits<double>::quiet_NaN());
  const ActiveRange ar = active_range(grid, s.g, s.h);
  for (int i = ar.first; i <= ar.last; ++i) s.activation[i] = 0.0;
  return s;
}

double FreeBoundarySolver::boundary_flux(const SimState& s, Side side) const {
  return side == Side::Left ? op_.flux_left(s.u, s.g, s.h) : op_.flux_right(s.u, s.g, s.h);
}

DiagnosticRow FreeBoundarySolver::diagnostics(const SimState& s) const {
  const Grid& grid = op_.grid();
  DiagnosticRow r;
  r.t = s.t;
  r.g = s.g;
  r.h = s.h;
  const ActiveRange ar = active_range(grid, s.g, s.h);
  for (int i = ar.first; i <= ar.last; ++i) r.sup_u = std::max(r.sup_u, s.u[i]);
  r.mass = total_mass(grid, s);
  r.flux_left = boundary_flux(s, Side::Left);
  r.flux_right = boundary_flux(s, Side::Right);
  r.core_u = s.u[grid.cell_of(0.0)];
  return r;
}

Profile FreeBoundarySolver::profile(const SimState& s) const {
  const Grid& grid = op_.grid();
  Profile p;
  p.t = s.t;
  p.g = s.g;
  p.h = s.h;
  const ActiveRange ar = active_range(grid, s.g, s.h);
  for (int i = ar.first; i <= ar.last; ++i) {
    p.x.push_back(cell_span(grid, i, s.g, s.h).centroid());
    p.u.push_back(s.u[i]);
  }
  return p;
}

void FreeBoundarySolver::step_explicit(SimState& s) const {
  const Grid& grid = op_.grid();
  const double dt = cfg_.dt;
  const double jl = op_.flux_left(s.u, s.g, s.h);
  const double jr = op_.flux_right(s.u, s.g, s.h);
  const double g1 = s.g - dt * cfg_.mu * jl;
  const double h1 = s.h + dt * cfg_.mu * jr;
  check_window(g1, h1, s.t + dt);

  std::unique_ptr<double[]> conv(new double[grid.nodes()]);
  std::span<double> cs(conv.get(), grid.nodes());
  op_.convolve(s.u, s.g, s.h, cs);
  detail::advance_density(op_, growth_, dt, s.u, cs, s.g, s.h, s.t, s.u);
  remap_density(grid, s.u, s.g, s.h, g1, h1, s.t, dt, &s.activation);
  s.g = g1;
  s.h = h1;
  s.t += dt;
}

std::vector<std::vector<double>> FreeBoundarySolver::density_for_fronts(
    const SimState& start, const std::vector<double>& g, const std::vector<double>& h,
    int* inner_iterations) const {
  if (g.size() != h.size() || g.size() < 2)
    throw DomainError("density_for_fronts: front path needs at least two points");
  const Grid& grid = op_.grid();
  const double dt = cfg_.dt;
  const size_t m = g.size() - 1;

  // Start from the frozen initial density; each sweep fixes at least one more
  // time level exactly, so m + 1 sweeps always suffice.
  std::vector<std::vector<double>> phi(m + 1, start.u), v(m + 1, start.u);
  std::vector<double> conv(grid.nodes());
  double scale = 1.0;
  for (double x : start.u) scale = std::max(scale, std::abs(x));

  int sweeps = 0;
  for (;;) {
    ++sweeps;
    v[0] = start.u;
    for (size_t k = 0; k < m; ++k) {
      const double t = start.t + static_cast<double>(k) * dt;
      op_.convolve(phi[k], g[k], h[k], conv);
      std::vector<double>& next = v[k + 1];
      std::fill(next.begin(), next.end(), 0.0);
      detail::advance_density(op_, growth_, dt, v[k], conv, g[k], h[k], t, next);
      remap_density(grid, next, g[k], h[k], g[k + 1], h[k + 1], t, dt, nullptr);
    }
    double diff = 0;
    for (size_t k = 0; k <= m; ++k)
      for (size_t i = 0; i < v[k].size(); ++i) diff = std::max(diff, std::abs(v[k][i] - phi[k][i]));
    std::swap(phi, v);
    if (diff <= 1e-15 * scale) break;
    if (sweeps > static_cast<int>(m) + 2)
      throw NoConvergence("density_for_fronts: inner iteration did not settle" +
                          at_time(start.t));
  }
  if (inner_iterations) *inner_iterations = sweeps;
  return phi;
}

SimState FreeBoundarySolver::picard_window(const SimState& start, int steps,
                                           PicardReport* report) const {
  if (steps < 1) throw DomainError("picard_window: steps must be >= 1");
  const double dt = cfg_.dt, mu = cfg_.mu;
  const size_t m = static_cast<size_t>(steps);
  std::vector<double> g(m + 1, start.g), h(m + 1, start.h);
  std::vector<double> g_next(m + 1), h_next(m + 1);

  PicardReport rep;
  rep.t_start = start.t;
  rep.t_end = start.t + steps * dt;
  bool converged = false;
  std::vector<std::vector<double>> v;
  for (int it = 1; it <= cfg_.picard.max_iterations; ++it) {
    int inner = 0;
    v = density_for_fronts(start, g, h, &inner);
    rep.inner_iterations += inner;

    // The front map: integrate the flux laws along the current density.
    g_next[0] = start.g;
    h_next[0] = start.h;
    for (size_t k = 0; k < m; ++k) {
      g_next[k + 1] = g_next[k] - dt * mu * op_.flux_left(v[k], g[k], h[k]);
      h_next[k + 1] = h_next[k] + dt * mu * op_.flux_right(v[k], g[k], h[k]);
    }
    double dist = 0;
    for (size_t k = 0; k <= m; ++k)
      dist = std::max({dist, std::abs(g_next[k] - g[k]), std::abs(h_next[k] - h[k])});
    if (!rep.residuals.empty() && rep.residuals.back() > 0)
      rep.contraction.push_back(dist / rep.residuals.back());
    rep.residuals.push_back(dist);
    rep.iterations = it;
    std::swap(g, g_next);
    std::swap(h, h_next);
    check_window(g[m], h[m], rep.t_end);
    if (dist <= cfg_.picard.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "Picard window [" << rep.t_start << "," << rep.t_end << "] did not contract to "
       << cfg_.picard.tol << " in " << rep.iterations << " iterations (last distance "
       << rep.residuals.back() << "); shorten the window";
    throw NoContraction(os.str());
  }

  SimState out = start;
  int inner = 0;
  // Final density on the converged path, with activation times recorded.
  v = density_for_fronts(start, g, h, &inner);
  rep.inner_iterations += inner;
  for (size_t k = 0; k < m; ++k) {
    std::vector<double> scratch = v[k + 1];
    remap_density(op_.grid(), scratch, g[k], h[k], g[k + 1], h[k + 1],
                  start.t + static_cast<double>(k) * dt, dt, &out.activation);
  }
  out.u = std::move(v[m]);
  out.g = g[m];
  out.h = h[m];
  out.t = rep.t_end;
  if (report) *report = std::move(rep);
  return out;
}

Trajectory FreeBoundarySolver::integrate(const InitialData& u0, const Monitor& monitor) const {
  Trajectory traj;
  traj.d = cfg_.d;
  traj.mu = cfg_.mu;
  traj.h0 = u0.h0();
  traj.M0 = std::max(u0.sup(), growth_.K0());
  check_stability(traj.M0);

  SimState s = initial_state(u0);
  traj.rows.push_back(diagnostics(s));
  traj.profiles.push_back(profile(s));
  const long steps = std::lround(cfg_.t_end / cfg_.dt);

  auto record = [&]() {
    traj.rows.push_back(diagnostics(s));
    return monitor && monitor(traj.rows.back(), s);
  };

  long k = 0;
  try {
    if (cfg_.mode == SolverMode::Explicit) {
      while (k < steps) {
        step_explicit(s);
        ++k;
        s.t = static_cast<double>(k) * cfg_.dt;
        if (cfg_.profile_every > 0 && k % cfg_.profile_every == 0 && k < steps)
          traj.profiles.push_back(profile(s));
        if ((k % cfg_.snapshot_every == 0 || k == steps) && record()) {
          traj.termination = Termination::Stopped;
          break;
        }
      }
    } else {
      const long m = std::max(1L, std::lround(cfg_.picard.window / cfg_.dt));
      while (k < steps) {
        const long w = std::min(m, steps - k);
        PicardReport rep;
        s = picard_window(s, static_cast<int>(w), &rep);
        traj.picard.push_back(std::move(rep));
        k += w;
        s.t = static_cast<double>(k) * cfg_.dt;
        if (cfg_.profile_every > 0 && k % cfg_.profile_every == 0 && k < steps)
          traj.profiles.push_back(profile(s));
        if (record()) {
          traj.termination = Termination::Stopped;
          break;
        }
      }
    }
  } catch (const WindowExit& e) {
    traj.termination = Termination::WindowExit;
    traj.message = e.what();
    if (traj.rows.back().t != s.t) traj.rows.push_back(diagnostics(s));
  }
  traj.profiles.push_back(profile(s));
  traj.final_state = std::move(s);
  return traj;
}

}  // namespace frontier
