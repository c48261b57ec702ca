#include "frontier/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "frontier/classify.hpp"
#include "frontier/config.hpp"
#include "frontier/errors.hpp"
#include "frontier/fixed_domain.hpp"
#include "frontier/io.hpp"
#include "frontier/spectral.hpp"

namespace frontier {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Leftover "--section.key value" / "--section.key=value" arguments.
Overrides collect_overrides(const std::vector<std::string>& extras) {
  Overrides out;
  for (size_t i = 0; i < extras.size(); ++i) {
    const std::string& a = extras[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) throw UsageError("unexpected argument '" + a + "'");
    std::string key = a.substr(2);
    const size_t eq = key.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(key.substr(0, eq), key.substr(eq + 1));
      continue;
    }
    if (i + 1 >= extras.size()) throw UsageError("override '" + a + "' needs a value");
    out.emplace_back(key, extras[++i]);
  }
  return out;
}

RunConfig load(const std::string& path, const Overrides& overrides) {
  std::string text = "{}", base;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    base = std::filesystem::path(path).parent_path().string();
  }
  if (!overrides.empty()) text = apply_overrides(text, overrides);
  return parse_config(text, base);
}

std::string output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("FRONTIER_KPP_OUT"); env && *env) return env;
  return cfg.output_dir;
}

std::optional<double> ell_star_if_any(const RunConfig& cfg, const Growth& growth) {
  if (!growth.kpp()) return std::nullopt;
  const double a0 = growth.derived_constants().fprime0;
  if (a0 >= cfg.d) return std::nullopt;
  return find_ell_star(cfg.d, a0, make_kernel(cfg), 1e-10);
}

json evidence_json(const Classification& c) {
  const Evidence& e = c.evidence;
  return {{"verdict", to_string(c.verdict)}, {"rule", e.rule},       {"length", e.length},
          {"sup_u", e.sup_u},                 {"core_u", e.core_u},   {"speed_left", e.speed_left},
          {"speed_right", e.speed_right},     {"decision_time", e.decision_time}};
}

LinePlot fronts_plot(const std::vector<DiagnosticRow>& rows, const std::string& title) {
  Series g{"g(t)", {}, {}}, h{"h(t)", {}, {}};
  for (const DiagnosticRow& r : rows) {
    g.x.push_back(r.t);
    g.y.push_back(r.g);
    h.x.push_back(r.t);
    h.y.push_back(r.h);
  }
  return {title, "t", "front position", {g, h}};
}

int cmd_simulate(const RunConfig& cfg, bool no_classify, std::ostream& out) {
  const Experiment e = make_experiment(cfg);
  const FreeBoundarySolver solver(e.kernel, e.growth, build_grid(e.u0.h0(), e.margin, e.dx), e.solver);
  const Trajectory traj = solver.integrate(e.u0);
  const Provenance p{cfg.schema_version, config_hash(cfg)};
  OutputWriter w(output_dir(cfg));

  w.write("trajectory.csv", trajectory_csv(traj, p));
  for (size_t k = 0; k < traj.profiles.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "profile_%04zu.csv", k);
    w.write(name, profile_csv(traj.profiles[k], p));
  }
  w.write("fronts.svg", svg_line_plot(fronts_plot(traj.rows, "free boundaries"), p));
  if (!traj.profiles.empty()) {
    const Profile& last = traj.profiles.back();
    Series s{"u(t_end, x)", {last.g}, {0.0}};
    s.x.insert(s.x.end(), last.x.begin(), last.x.end());
    s.y.insert(s.y.end(), last.u.begin(), last.u.end());
    s.x.push_back(last.h);
    s.y.push_back(0.0);
    w.write("profile.svg", svg_line_plot({"final profile", "x", "u", {s}}, p));
  }

  json diag = {{"termination", traj.termination == Termination::Completed    ? "completed"
                               : traj.termination == Termination::WindowExit ? "window_exit"
                                                                              : "stopped"},
               {"message", traj.message},
               {"rows", traj.rows.size()},
               {"M0", traj.M0}};
  if (!traj.picard.empty()) {
    json windows = json::array();
    for (const PicardReport& r : traj.picard)
      windows.push_back({{"t_start", r.t_start}, {"t_end", r.t_end}, {"iterations", r.iterations},
                         {"inner_iterations", r.inner_iterations}, {"residuals", r.residuals},
                         {"contraction", r.contraction}});
    diag["picard"] = windows;
  }
  std::string verdict;
  if (!no_classify && e.growth.kpp()) {
    const Classification c = classify_run(traj, e.growth, ell_star_if_any(cfg, e.growth), e.rules);
    diag["classification"] = evidence_json(c);
    verdict = to_string(c.verdict);
  }
  w.write("metadata.json", metadata_json(cfg, diag));

  const DiagnosticRow& last = traj.rows.back();
  out << "t=" << format_double(last.t) << " g=" << format_double(last.g) << " h=" << format_double(last.h)
      << " sup_u=" << format_double(last.sup_u);
  if (!verdict.empty()) out << " verdict=" << verdict;
  out << "\nwrote " << w.written().size() << " files to " << w.dir() << "\n";
  return 0;
}

int cmd_mu_star(const RunConfig& cfg, const MuStarOptions& opts, std::ostream& out) {
  const Experiment e = make_experiment(cfg);
  const Thresholds th = find_mu_star(e, opts);
  const Provenance p{cfg.schema_version, config_hash(cfg)};
  OutputWriter w(output_dir(cfg));
  w.write("probes.csv", probes_csv(th, p));
  json diag = {{"ell_star", *th.ell_star},
               {"mu_lower", *th.mu_lower},
               {"h1", th.h1},
               {"mu_vanish", th.mu_vanish},
               {"mu_spread", th.mu_spread},
               {"relative_width", th.relative_width},
               {"monotone", th.monotone},
               {"undetermined_at_bracket", th.undetermined_at_bracket},
               {"note", th.note},
               {"t_end", opts.t_end},
               {"rel_tol", opts.rel_tol}};
  w.write("metadata.json", metadata_json(cfg, diag));
  out << "ell_star=" << format_double(*th.ell_star) << "\nmu_lower=" << format_double(*th.mu_lower)
      << "\nmu_star in [" << format_double(th.mu_vanish) << ", " << format_double(th.mu_spread)
      << "] relative_width=" << format_double(th.relative_width)
      << " monotone=" << (th.monotone ? "yes" : "no") << "\n";
  if (!th.note.empty()) out << "note: " << th.note << "\n";
  return th.undetermined_at_bracket ? 2 : 0;
}

int cmd_steady(const RunConfig& cfg, double half, const FixedSettings& settings, double t_max,
               std::ostream& out) {
  const FixedDomain domain(FixedProblem{make_kernel(cfg), make_growth(cfg), cfg.d, {-half, half}, cfg.dx});
  const SteadyState ss = steady_state(domain, settings, t_max);
  const Provenance p{cfg.schema_version, config_hash(cfg)};
  OutputWriter w(output_dir(cfg));
  w.write("steady.csv", fixed_profile_csv(ss.run, p));
  w.write("steady.svg", svg_line_plot({"steady state", "x", "u", {{"u", ss.run.x, ss.run.u}}}, p));
  double core = 0, best = INFINITY;
  for (size_t i = 0; i < ss.run.x.size(); ++i)
    if (std::abs(ss.run.x[i]) < best) best = std::abs(ss.run.x[i]), core = ss.run.u[i];
  json diag = {{"half_length", half}, {"t_final", ss.run.t_final}, {"residual", ss.residual},
               {"last_change", ss.run.last_change}, {"core_u", core}};
  w.write("metadata.json", metadata_json(cfg, diag));
  out << "u(0)=" << format_double(core) << " residual=" << format_double(ss.residual)
      << " t=" << format_double(ss.run.t_final) << "\n";
  return 0;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("--") + what + ": '" + item + "' is not a number");
    }
  }
  if (v.empty()) throw UsageError(std::string("--") + what + " is empty");
  return v;
}

int cmd_sweep(const RunConfig& cfg, const std::string& rows_kind, const std::string& mu_list,
              const std::string& value_list, unsigned threads, std::ostream& out) {
  SweepRows rows;
  if (rows_kind == "h0")
    rows = SweepRows::H0;
  else if (rows_kind == "d")
    rows = SweepRows::D;
  else
    throw UsageError("--rows must be h0 or d");
  const std::vector<double> mu = parse_list(mu_list, "mu"), values = parse_list(value_list, "values");
  const SweepTable t = sweep(make_experiment(cfg), rows, mu, values, threads);
  const Provenance p{cfg.schema_version, config_hash(cfg)};
  // Cells are written here, after the workers finish, in parameter order.
  OutputWriter w(output_dir(cfg));
  w.write("phase.csv", phase_csv(t, p));
  w.write("phase.svg", svg_heatmap(t, p));
  for (size_t r = 0; r < values.size(); ++r)
    for (size_t c = 0; c < mu.size(); ++c) {
      Trajectory traj;
      traj.rows = t.at(r, c).rows;
      w.write(cell_file_name(t, r, c), trajectory_csv(traj, p));
    }
  int failures = 0;
  for (const SweepCell& c : t.cells) failures += !c.error.empty();
  w.write("metadata.json", metadata_json(cfg, {{"rows", rows_kind},
                                               {"mu", mu},
                                               {"values", values},
                                               {"monotone", sweep_rows_monotone(t)},
                                               {"failed_cells", failures}}));
  const char* glyph[] = {"S", "V", "?"};
  for (size_t r = values.size(); r-- > 0;) {
    out << rows_kind << '=' << format_double(values[r]) << "\t";
    for (size_t c = 0; c < mu.size(); ++c) out << glyph[static_cast<int>(t.at(r, c).verdict)];
    out << "\n";
  }
  out << "monotone=" << (sweep_rows_monotone(t) ? "yes" : "no") << " failed_cells=" << failures << "\n";
  return 0;
}

int cmd_selftest(std::ostream& out) {
  int failed = 0;
  auto check = [&](const char* name, const std::function<bool()>& f) {
    bool ok = false;
    std::string why;
    try {
      ok = f();
    } catch (const std::exception& e) {
      why = e.what();
    }
    out << (ok ? "PASS " : "FAIL ") << name << (why.empty() ? "" : " (" + why + ")") << "\n";
    failed += !ok;
  };
  const Kernel tophat = Kernel::top_hat(1);

  check("kernel mass is one", [&] { return std::abs(tophat.tail_mass(-tophat.radius()) - 1) < 1e-12; });
  check("lambda_p on a short interval is near a0 - d", [&] {
    // The exact value is 0.005 (the bound is attained); allow round-off.
    return std::abs(lambda_p(1, 1, {0, 0.01}, tophat, 400).lambda_p) <= 0.005 + 1e-12;
  });
  check("lambda_p on a long interval approaches a0", [&] {
    const double l = lambda_p(1, 1, {0, 200}, tophat, 400).lambda_p;
    return l > 0.98 && l <= 1.0;
  });
  check("top-hat lambda_p matches closed form", [&] {
    return std::abs(lambda_p(0.5, 1, {0, 1}, tophat, 200).lambda_p - 0.0) < 1e-9;
  });
  check("critical length for a0 = 0.5, d = 1 is 1", [&] {
    return std::abs(find_ell_star(1, 0.5, tophat, 1e-9) - 1) < 1e-6;
  });
  check("no critical length when f'(0) >= d", [&] {
    try {
      find_ell_star(1, 1.2, tophat);
    } catch (const NoCriticalLength&) {
      return true;
    }
    return false;
  });
  check("config round-trips", [&] {
    const std::string s = serialize_config(parse_config("{}"));
    return serialize_config(parse_config(s)) == s;
  });
  check("negative mu is rejected", [&] {
    try {
      parse_config(R"({"mu": -1})");
    } catch (const ConfigError& e) {
      return e.violations().size() == 1 && e.violations()[0].path == "mu";
    }
    return false;
  });
  check("unknown key is rejected", [&] {
    try {
      parse_config(R"({"nu": 1})");
    } catch (const SchemaError& e) {
      return e.violations()[0].path == "nu";
    }
    return false;
  });
  check("fronts advance and mass balance holds without growth", [&] {
    SolverConfig sc;
    sc.t_end = 0.2;
    sc.snapshot_every = 10;
    const FreeBoundarySolver s(tophat, Growth::none(), build_grid(1, 3, 0.05), sc);
    const Trajectory tr = s.integrate(InitialData::cosine_bump(1, 1));
    const double c0 = tr.rows.front().mass + (tr.rows.front().h - tr.rows.front().g);
    for (size_t i = 1; i < tr.rows.size(); ++i) {
      if (!(tr.rows[i].h > tr.rows[i - 1].h) || !(tr.rows[i].g < tr.rows[i - 1].g)) return false;
      const double c = tr.rows[i].mass + (tr.rows[i].h - tr.rows[i].g);
      if (std::abs(c - c0) > 1e-12 * c0) return false;
    }
    return true;
  });
  check("trajectory CSV header", [&] {
    const std::string csv = trajectory_csv(Trajectory{}, Provenance{1, "0"});
    return csv.substr(csv.find('\n') + 1) == "t,g,h,sup_u,mass,flux_left,flux_right\n";
  });
  out << (failed ? "selftest failed: " + std::to_string(failed) + " check(s)\n" : "selftest passed\n");
  return failed ? 2 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlocal Fisher-KPP free-boundary simulator", "frontier_kpp"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config, "JSON config file (defaults apply when omitted)");
    sub->allow_extras();
    sub->footer("Any config key can be overridden with --section.key value, e.g. --solver.dt 5e-4.");
  };

  bool no_classify = false;
  auto* simulate = app.add_subcommand("simulate", "Integrate one run and write trajectory, profiles and plots");
  add_config(simulate);
  simulate->add_flag("--no-classify", no_classify, "Skip the spreading/vanishing verdict");

  double a0 = 0, d = 1, ell = 0, lo = NAN, hi = NAN, tol = 1e-10;
  int n = 400;
  std::string kernel_spec = "tophat:1", spectrum_out;
  auto* lambda = app.add_subcommand("lambda", "Principal eigenvalue of the nonlocal operator plus a0");
  lambda->add_option("--a0", a0, "Constant potential")->required();
  lambda->add_option("--d", d, "Dispersal rate")->check(CLI::PositiveNumber);
  lambda->add_option("--ell", ell, "Interval length; the interval is (-ell/2, ell/2)");
  lambda->add_option("--lo", lo, "Left end (with --hi, instead of --ell)");
  lambda->add_option("--hi", hi, "Right end");
  lambda->add_option("--kernel", kernel_spec, "tophat:L | triangle:L | laplace:rate[:R] | gaussian:s:R | tabulated:path");
  lambda->add_option("--n", n, "Cells")->check(CLI::Range(2, 100000));
  lambda->add_option("--out", spectrum_out, "Also write the eigenfunction CSV to this directory");

  double fprime0 = 0;
  auto* ell_star = app.add_subcommand("ell-star", "Critical length where lambda_p = 0");
  ell_star->add_option("--fprime0,--a0", fprime0, "f'(0)")->required();
  ell_star->add_option("--d", d, "Dispersal rate")->check(CLI::PositiveNumber);
  ell_star->add_option("--kernel", kernel_spec, "Kernel spec as for lambda");
  ell_star->add_option("--tol", tol, "Tolerance on |lambda_p|")->check(CLI::PositiveNumber);
  ell_star->add_option("--n", n, "Cells")->check(CLI::Range(2, 100000));

  MuStarOptions mopts;
  auto* mu_star = app.add_subcommand("mu-star", "Bracket the spreading threshold in mu");
  add_config(mu_star);
  mu_star->add_option("--rel-tol", mopts.rel_tol, "Stop at this relative bracket width")->check(CLI::PositiveNumber);
  mu_star->add_option("--t-end", mopts.t_end, "Horizon per probe (retried at 4x when undetermined)")
      ->check(CLI::PositiveNumber);

  double half = 10, t_max = 1e4;
  FixedSettings fs;
  auto* steady = app.add_subcommand("steady", "Steady state on the fixed interval (-L, L)");
  add_config(steady);
  steady->add_option("--half-length", half, "L")->check(CLI::PositiveNumber);
  steady->add_option("--dt", fs.dt, "Time step")->check(CLI::PositiveNumber);
  steady->add_option("--tol", fs.tol, "Sup-norm change per check window")->check(CLI::PositiveNumber);
  steady->add_option("--t-max", t_max, "Give up after this time")->check(CLI::PositiveNumber);

  std::string rows_kind = "h0", mu_list, value_list;
  unsigned threads = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Phase table over mu (columns) and h0 or d (rows)");
  add_config(sweep_cmd);
  sweep_cmd->add_option("--rows", rows_kind, "h0 or d");
  sweep_cmd->add_option("--mu", mu_list, "Comma-separated mu values")->required();
  sweep_cmd->add_option("--values", value_list, "Comma-separated row values")->required();
  sweep_cmd->add_option("--threads", threads, "Worker threads (0 = hardware)");

  auto* selftest = app.add_subcommand("selftest", "Run the quick built-in checks");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      std::ostringstream o, r;
      const int code = app.exit(e, o, r);
      out << o.str();
      err << r.str();
      return code == 0 ? 0 : 1;
    }

    if (simulate->parsed())
      return cmd_simulate(load(config, collect_overrides(simulate->remaining())), no_classify, out);
    if (mu_star->parsed()) return cmd_mu_star(load(config, collect_overrides(mu_star->remaining())), mopts, out);
    if (steady->parsed()) return cmd_steady(load(config, collect_overrides(steady->remaining())), half, fs, t_max, out);
    if (sweep_cmd->parsed())
      return cmd_sweep(load(config, collect_overrides(sweep_cmd->remaining())), rows_kind, mu_list, value_list,
                       threads, out);
    if (selftest->parsed()) return cmd_selftest(out);
    if (lambda->parsed()) {
      Interval iv;
      if (!std::isnan(lo) || !std::isnan(hi)) {
        if (std::isnan(lo) || std::isnan(hi)) throw UsageError("--lo and --hi go together");
        iv = {lo, hi};
      } else {
        if (!(ell > 0)) throw UsageError("give --ell > 0 or --lo/--hi");
        iv = {-ell / 2, ell / 2};
      }
      if (!(iv.hi > iv.lo)) throw DomainError("lambda: need lo < hi");
      const SpectralResult r = lambda_p(a0, d, iv, parse_kernel_spec(kernel_spec), n);
      out << format_double(r.lambda_p) << "\n";
      if (!spectrum_out.empty()) {
        OutputWriter w(spectrum_out);
        w.write("spectrum.csv", spectrum_csv(r, Provenance{kSchemaVersion, "none"}));
      }
      return 0;
    }
    if (ell_star->parsed()) {
      out << format_double(find_ell_star(d, fprime0, parse_kernel_spec(kernel_spec), tol, n)) << "\n";
      return 0;
    }
    err << app.help();
    return 1;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace frontier
