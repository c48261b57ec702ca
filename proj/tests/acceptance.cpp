// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frontier/classify.hpp"
#include "frontier/fixed_domain.hpp"
#include "frontier/spectral.hpp"

using namespace frontier;

namespace {

// Pinned tolerances.
constexpr double kC1Short = 0.005;       // |lambda_p(l = 0.01)| bound, attained exactly by TopHat
constexpr double kRoundoff = 1e-12;
constexpr double kC1RuntimeS = 10;
constexpr double kC2Tol = 1e-9;
constexpr double kC3Refine = 1e-3;
constexpr double kC4Band = 0.05;
constexpr double kC4RuntimeS = 60;
constexpr double kC5SupRel = 1e-4;
constexpr double kC5LengthPad = 0.05;
constexpr double kC6Width = 0.05;
constexpr double kC6RuntimeS = 15 * 60;
constexpr double kC6TEnd = 1000;         // per-probe horizon (retried at 4x if undetermined)
constexpr double kC7Pad = 0.05;
constexpr double kC7EllTol = 1e-6;
constexpr double kC8Tol = 1e-8;
constexpr double kC9UTol = 1e-8;
constexpr double kC9LengthTol = 1e-6;
constexpr double kC10Drift = 1e-3;       // relative to the initial value
constexpr double kC10Ratio = 0.625;      // drift(dt/2) <= ratio * drift(dt) + floor
constexpr double kC10Floor = 1e-12;      // relative round-off floor
constexpr double kC11Factor = 5;         // |dh|, |du|_inf <= 5 dt
constexpr double kC12Rel = 0.02;

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

class Clock {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void guarded(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("threw: ") + e.what());
  }
}

// Setup shared by criteria 5-7.
Experiment threshold_setup() {
  Experiment e;
  e.growth = Growth::logistic(0.5, 1);
  e.u0 = InitialData::cosine_bump(0.3, 0.5);
  e.margin = 10;
  e.solver.t_end = 200;
  return e;
}

// Records a-priori bound violations at every diagnostic row.
struct BoundsCheck {
  double M0 = 0, h0 = 0, mu = 0;
  double worst_low = 0;        // most negative density seen
  double worst_high = -INFINITY;  // max u - M0
  double worst_length = -INFINITY;  // max (h - g) - 2 h0 exp(mu M0 t)
  int rows = 0;

  Monitor monitor() {
    return [this](const DiagnosticRow& r, const SimState& s) {
      for (double v : s.u) {
        worst_low = std::min(worst_low, v);
        worst_high = std::max(worst_high, v - M0);
      }
      worst_length = std::max(worst_length, (r.h - r.g) - 2 * h0 * std::exp(mu * M0 * r.t));
      ++rows;
      return false;
    };
  }
  bool ok() const {
    return worst_low >= -kC9UTol && worst_high <= kC9UTol && worst_length <= kC9LengthTol && rows > 0;
  }
};

struct Snapshots {
  std::vector<DiagnosticRow> rows;
  std::vector<std::vector<double>> u;
  Monitor monitor() {
    return [this](const DiagnosticRow& r, const SimState& s) {
      rows.push_back(r);
      u.push_back(s.u);
      return false;
    };
  }
};

double conserved(const DiagnosticRow& r, double d, double mu) { return r.mass + d / mu * (r.h - r.g); }

}  // namespace

int main() {
  std::vector<BoundsCheck> bounds;  // filled by runs in 4, 5 and 8, judged in 9
  const Kernel tophat = Kernel::top_hat(1);

  guarded(1, [&] {
    const Clock clock;
    const double small = lambda_p(1, 1, {0, 0.01}, tophat, 400).lambda_p;
    const double large = lambda_p(1, 1, {0, 200}, tophat, 4000).lambda_p;
    const double secs = clock.seconds();
    report(1, std::abs(small) <= kC1Short + kRoundoff && large > 0.98 && large <= 1.0 && secs < kC1RuntimeS,
           fmt("lambda_p(l=0.01)=%.15g (|.| <= %g), lambda_p(l=200)=%.12g in (0.98, 1], %.2f s", small,
               kC1Short, large, secs));
  });

  guarded(2, [&] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0, 1);
    double worst = 0;
    for (int c = 0; c < 20; ++c) {
      const double a0 = 0.1 + 2 * U(rng), ell = 0.2 + 6 * U(rng), d = 0.5 + U(rng);
      Kernel k = Kernel::top_hat(0.5 + U(rng));
      switch (c % 4) {
        case 1: k = Kernel::triangle(0.5 + U(rng)); break;
        case 2: k = Kernel::laplace(1 + U(rng), 3); break;
        case 3: k = Kernel::truncated_gaussian(0.3 + 0.3 * U(rng), 1.5); break;
      }
      const double ours = lambda_p(a0, d, {0, ell}, k, 40).lambda_p;
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_operator(a0, d, {0, ell}, k, 40),
                                                               Eigen::EigenvaluesOnly);
      worst = std::max(worst, std::abs(ours - es.eigenvalues().maxCoeff()));
    }
    report(2, worst <= kC2Tol, fmt("20 random cases, max |iterative - dense| = %.3g (<= %g)", worst, kC2Tol));
  });

  guarded(3, [&] {
    bool increasing = true;
    double prev = -INFINITY, worst_change = 0;
    std::string values;
    for (double ell : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      const double l1 = lambda_p(0.5, 1, {0, ell}, tophat, 400).lambda_p;
      const double l2 = lambda_p(0.5, 1, {0, ell}, tophat, 800).lambda_p;
      increasing = increasing && l1 > prev;
      prev = l1;
      worst_change = std::max(worst_change, std::abs(l2 - l1));
      values += fmt("%s%.6f", values.empty() ? "" : ", ", l1);
    }
    report(3, increasing && worst_change < kC3Refine,
           fmt("a0=0.5: [%s] strictly increasing; max |lambda(2n) - lambda(n)| = %.3g (< %g)", values.c_str(),
               worst_change, kC3Refine));
  });

  guarded(4, [&] {
    Experiment e;
    e.growth = Growth::logistic(1.2, 1);
    e.u0 = InitialData::cosine_bump(0.2, 0.01);
    e.solver.mu = 0.05;
    e.solver.t_end = 200;
    const Clock clock;
    const RunOutcome r = run_experiment(e, std::nullopt);
    const double secs = clock.seconds();
    const Evidence& ev = r.classification.evidence;
    const double v0 = 1.2;
    report(4,
           r.classification.verdict == Verdict::Spreading && std::abs(ev.core_u - v0) <= kC4Band * v0 &&
               secs < kC4RuntimeS,
           fmt("verdict %s (%s), u(200, 0)=%.6f vs v0=1.2 (within %g%%), h-g=%.4f, %.1f s",
               to_string(r.classification.verdict), ev.rule.c_str(), ev.core_u, 100 * kC4Band, ev.length, secs));

    BoundsCheck b{r.trajectory.M0, 0.2, 0.05};
    const FreeBoundarySolver s(e.kernel, e.growth, build_grid(0.2, e.margin, e.dx), e.solver);
    s.integrate(e.u0, b.monitor());
    bounds.push_back(b);
  });

  std::optional<double> ell_tight;
  std::vector<std::pair<double, double>> vanishing_lengths;  // (mu, final h - g)
  guarded(5, [&] {
    const Experiment base = threshold_setup();
    ell_tight = find_ell_star(1, 0.5, base.kernel, kC7EllTol);
    const double h1 = 0.5 * (0.3 + *ell_tight / 2);
    const MuLower ml = compute_mu_lower(0.3, h1, 1, base.kernel, base.growth, base.u0);
    Experiment e = base;
    e.solver.mu = ml.mu_lower;
    const RunOutcome r = run_experiment(e, *ell_tight);
    const Evidence& ev = r.classification.evidence;
    vanishing_lengths.emplace_back(ml.mu_lower, ev.length);
    report(5,
           r.classification.verdict == Verdict::Vanishing && ev.sup_u < kC5SupRel * 0.5 &&
               ev.length <= 2 * h1 + kC5LengthPad,
           fmt("mu_lower=%.8g: verdict %s, sup u=%.3g (< %g v0), h-g=%.6f (<= 2 h1 + %g = %.6f)", ml.mu_lower,
               to_string(r.classification.verdict), ev.sup_u, kC5SupRel, ev.length, kC5LengthPad,
               2 * h1 + kC5LengthPad));

    BoundsCheck b{r.trajectory.M0, 0.3, ml.mu_lower};
    const FreeBoundarySolver s(e.kernel, e.growth, build_grid(0.3, e.margin, e.dx), e.solver);
    s.integrate(e.u0, b.monitor());
    bounds.push_back(b);
  });

  guarded(6, [&] {
    MuStarOptions opts;
    opts.t_end = kC6TEnd;
    opts.rel_tol = kC6Width;
    const Clock clock;
    const Thresholds th = find_mu_star(threshold_setup(), opts);
    const double secs = clock.seconds();
    bool below = false, above = false;
    for (const Probe& p : th.probes) {
      if (p.mu == th.mu_vanish && p.verdict == Verdict::Vanishing) below = true;
      if (p.mu == th.mu_spread && p.verdict == Verdict::Spreading) above = true;
      if (p.verdict == Verdict::Vanishing) vanishing_lengths.emplace_back(p.mu, p.final_length);
    }
    report(6,
           th.relative_width <= kC6Width && below && above && th.monotone && !th.undetermined_at_bracket &&
               secs < kC6RuntimeS,
           fmt("bracket [%.6g, %.6g], relative width %.4f (<= %g), %zu probes monotone=%s, %.0f s",
               th.mu_vanish, th.mu_spread, th.relative_width, kC6Width, th.probes.size(),
               th.monotone ? "yes" : "no", secs));
  });

  guarded(7, [&] {
    if (!ell_tight) throw std::runtime_error("criterion 5 did not produce l*");
    double worst = -INFINITY;
    for (const auto& [mu, len] : vanishing_lengths) worst = std::max(worst, len - *ell_tight);
    report(7, !vanishing_lengths.empty() && worst <= kC7Pad,
           fmt("%zu vanishing runs, max (h-g) - l* = %.4f (<= %g), l*=%.8f", vanishing_lengths.size(), worst,
               kC7Pad, *ell_tight));
  });

  guarded(8, [&] {
    auto run = [&](double mu, Snapshots& snap, BoundsCheck& b) {
      SolverConfig sc;
      sc.mu = mu;
      sc.t_end = 10;
      sc.snapshot_every = 100;
      const FreeBoundarySolver s(tophat, Growth::logistic(1, 1), build_grid(0.5, 20, 0.02), sc);
      const InitialData u0 = InitialData::cosine_bump(0.5, 1);
      const Trajectory t = s.integrate(u0, snap.monitor());
      b = BoundsCheck{t.M0, 0.5, mu};
      s.integrate(u0, b.monitor());
      return t.termination == Termination::Completed;
    };
    Snapshots slow, fast;
    BoundsCheck bs, bf;
    const bool complete = run(0.5, slow, bs) && run(1.0, fast, bf);
    bounds.push_back(bs);
    bounds.push_back(bf);
    double worst_h = -INFINITY, worst_g = -INFINITY;
    const size_t n = std::min(slow.rows.size(), fast.rows.size());
    for (size_t i = 0; i < n; ++i) {
      worst_h = std::max(worst_h, slow.rows[i].h - fast.rows[i].h);
      worst_g = std::max(worst_g, fast.rows[i].g - slow.rows[i].g);
    }
    report(8, complete && n == slow.rows.size() && n == fast.rows.size() && worst_h <= kC8Tol && worst_g <= kC8Tol,
           fmt("%zu snapshots: max h^0.5 - h^1 = %.3g, max g^1 - g^0.5 = %.3g (<= %g)", n, worst_h, worst_g,
               kC8Tol));
  });

  guarded(9, [&] {
    bool ok = !bounds.empty();
    double low = 0, high = -INFINITY, len = -INFINITY;
    int rows = 0;
    for (const BoundsCheck& b : bounds) {
      ok = ok && b.ok();
      low = std::min(low, b.worst_low);
      high = std::max(high, b.worst_high);
      len = std::max(len, b.worst_length);
      rows += b.rows;
    }
    report(9, ok,
           fmt("%zu runs, %d snapshots: min u=%.3g, max (u - M0)=%.3g, max (h-g) - 2h0 e^{mu M0 t}=%.3g",
               bounds.size(), rows, low, high, len));
  });

  guarded(10, [&] {
    const double d = 1, mu = 1;
    auto drift = [&](double dt, double& c0) {
      SolverConfig sc;
      sc.d = d;
      sc.mu = mu;
      sc.dt = dt;
      sc.t_end = 5;
      sc.snapshot_every = static_cast<int>(std::lround(0.05 / dt));
      const FreeBoundarySolver s(tophat, Growth::none(), build_grid(1, 20, 0.02), sc);
      const Trajectory t = s.integrate(InitialData::cosine_bump(1, 1));
      c0 = conserved(t.rows.front(), d, mu);
      double worst = 0;
      for (const DiagnosticRow& r : t.rows) worst = std::max(worst, std::abs(conserved(r, d, mu) - c0));
      return worst;
    };
    double c0 = 0, c0b = 0;
    const double d1 = drift(1e-3, c0), d2 = drift(5e-4, c0b);
    report(10, d1 < kC10Drift * c0 && d2 <= kC10Ratio * d1 + kC10Floor * c0,
           fmt("initial %.12g; drift %.3g (dt=1e-3), %.3g (dt=5e-4); rel %.3g < %g; halving bound %.3g",
               c0, d1, d2, d1 / c0, kC10Drift, kC10Ratio * d1 + kC10Floor * c0));
  });

  guarded(11, [&] {
    SolverConfig sc;
    sc.t_end = 0.5;
    sc.snapshot_every = 50;  // window ends: 0.05, 0.10, ...
    sc.picard.window = 0.05;
    sc.picard.tol = 1e-10;
    const Grid grid = build_grid(1, 5, 0.02);
    const InitialData u0 = InitialData::cosine_bump(1, 1);
    Snapshots ex, pf;
    const FreeBoundarySolver explicit_solver(tophat, Growth::logistic(1, 1), grid, sc);
    explicit_solver.integrate(u0, ex.monitor());
    sc.mode = SolverMode::PicardFaithful;
    const FreeBoundarySolver picard_solver(tophat, Growth::logistic(1, 1), grid, sc);
    const Trajectory tp = picard_solver.integrate(u0, pf.monitor());

    double dh = 0, du = 0, worst_ratio = 0;
    size_t matched = 0;
    for (size_t i = 0; i < pf.rows.size(); ++i)
      for (size_t j = 0; j < ex.rows.size(); ++j) {
        if (std::abs(pf.rows[i].t - ex.rows[j].t) > 1e-9) continue;
        ++matched;
        dh = std::max({dh, std::abs(pf.rows[i].h - ex.rows[j].h), std::abs(pf.rows[i].g - ex.rows[j].g)});
        for (size_t k = 0; k < pf.u[i].size(); ++k) du = std::max(du, std::abs(pf.u[i][k] - ex.u[j][k]));
      }
    size_t ratios = 0;
    for (const PicardReport& r : tp.picard)
      for (double c : r.contraction) {
        worst_ratio = std::max(worst_ratio, c);
        ++ratios;
      }
    const double bound = kC11Factor * sc.dt;
    report(11, matched >= 10 && dh <= bound && du <= bound && ratios > 0 && worst_ratio < 1,
           fmt("%zu common times: max |front diff|=%.3g, max |u diff|=%.3g (<= %g); %zu contraction factors, "
               "max %.3g (< 1)",
               matched, dh, du, bound, ratios, worst_ratio));
  });

  guarded(12, [&] {
    FixedSettings fs;
    fs.dt = 0.1;
    fs.tol = 1e-10;
    std::vector<double> core;
    for (double n : {5.0, 10.0, 20.0}) {
      const FixedDomain domain(FixedProblem{tophat, Growth::logistic(1, 1), 1, {-n, n}, 0.05});
      const SteadyState ss = steady_state(domain, fs);
      double best = INFINITY, u0 = 0;
      for (size_t i = 0; i < ss.run.x.size(); ++i)
        if (std::abs(ss.run.x[i]) < best) best = std::abs(ss.run.x[i]), u0 = ss.run.u[i];
      core.push_back(u0);
    }
    report(12, core[0] < core[1] && core[1] < core[2] && std::abs(core[2] - 1) <= kC12Rel,
           fmt("u(0) = %.10f, %.10f, %.10f for n = 5, 10, 20 (increasing; |u - 1| <= %g at n = 20)", core[0],
               core[1], core[2], kC12Rel));
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures;
}
