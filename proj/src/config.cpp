#include "frontier/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace frontier {

using nlohmann::json;

namespace {

std::string join(const std::vector<Violation>& v) {
  std::ostringstream os;
  os << "invalid config (" << v.size() << (v.size() == 1 ? " problem" : " problems") << ")";
  for (const Violation& x : v) os << "\n  " << (x.path.empty() ? "<root>" : x.path) << ": " << x.message;
  return os.str();
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(base_dir) / p).string();
}

class Reader {
public:
  std::vector<Violation> violations;

  void schema(const std::string& path, const std::string& msg) {
    violations.push_back({path, msg, true});
  }
  void domain(const std::string& path, const std::string& msg) {
    violations.push_back({path, msg, false});
  }

  static std::string join_path(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
  }

  // Reports keys of `obj` outside `allowed`. Returns false if obj is not an object.
  bool object(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      schema(path, "expected an object");
      return false;
    }
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) schema(join_path(path, it.key()), "unknown key");
    return true;
  }

  void number(const json& obj, const std::string& prefix, const char* key, double& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number()) return schema(join_path(prefix, key), "expected a number");
    out = v.get<double>();
  }

  void optional_number(const json& obj, const std::string& prefix, const char* key,
                       std::optional<double>& out) {
    if (!obj.contains(key)) return;
    double v = 0;
    number(obj, prefix, key, v);
    if (obj.at(key).is_number()) out = v;
  }

  void integer(const json& obj, const std::string& prefix, const char* key, int& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) return schema(join_path(prefix, key), "expected an integer");
    out = v.get<int>();
  }

  void string(const json& obj, const std::string& prefix, const char* key, std::string& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_string()) return schema(join_path(prefix, key), "expected a string");
    out = v.get<std::string>();
  }

  void boolean(const json& obj, const std::string& prefix, const char* key, bool& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_boolean()) return schema(join_path(prefix, key), "expected true or false");
    out = v.get<bool>();
  }

  void positive(const std::string& path, double v) {
    if (!(v > 0) || !std::isfinite(v)) domain(path, "must be positive and finite");
  }
};

void read(Reader& r, const json& root, RunConfig& c) {
  if (!r.object(root, "", {"schema_version", "kernel", "growth", "d", "mu", "h0", "initial",
                           "grid", "solver", "classify", "output"}))
    return;
  r.integer(root, "", "schema_version", c.schema_version);
  r.number(root, "", "d", c.d);
  r.number(root, "", "mu", c.mu);
  r.number(root, "", "h0", c.h0);

  if (root.contains("kernel") &&
      r.object(root["kernel"], "kernel",
               {"family", "halfwidth", "rate", "sigma", "radius", "path"})) {
    const json& k = root["kernel"];
    r.string(k, "kernel", "family", c.kernel.family);
    r.number(k, "kernel", "halfwidth", c.kernel.halfwidth);
    r.number(k, "kernel", "rate", c.kernel.rate);
    r.number(k, "kernel", "sigma", c.kernel.sigma);
    r.optional_number(k, "kernel", "radius", c.kernel.radius);
    r.string(k, "kernel", "path", c.kernel.path);
  }
  if (root.contains("growth") &&
      r.object(root["growth"], "growth", {"family", "a", "b", "expression", "K0", "lipschitz", "kpp"})) {
    const json& g = root["growth"];
    r.string(g, "growth", "family", c.growth.family);
    r.number(g, "growth", "a", c.growth.a);
    r.number(g, "growth", "b", c.growth.b);
    r.string(g, "growth", "expression", c.growth.expression);
    r.number(g, "growth", "K0", c.growth.K0);
    r.number(g, "growth", "lipschitz", c.growth.lipschitz);
    r.boolean(g, "growth", "kpp", c.growth.kpp);
  }
  if (root.contains("initial") &&
      r.object(root["initial"], "initial", {"family", "amplitude", "path"})) {
    const json& i = root["initial"];
    r.string(i, "initial", "family", c.initial.family);
    r.number(i, "initial", "amplitude", c.initial.amplitude);
    r.string(i, "initial", "path", c.initial.path);
  }
  if (root.contains("grid") && r.object(root["grid"], "grid", {"dx", "margin"})) {
    r.number(root["grid"], "grid", "dx", c.dx);
    r.number(root["grid"], "grid", "margin", c.margin);
  }
  if (root.contains("solver") &&
      r.object(root["solver"], "solver",
               {"dt", "t_end", "mode", "window", "tol", "max_iterations", "snapshot_every",
                "profile_every"})) {
    const json& s = root["solver"];
    r.number(s, "solver", "dt", c.solver.dt);
    r.number(s, "solver", "t_end", c.solver.t_end);
    std::string mode = c.solver.mode == SolverMode::Explicit ? "explicit" : "picard";
    r.string(s, "solver", "mode", mode);
    if (mode == "explicit")
      c.solver.mode = SolverMode::Explicit;
    else if (mode == "picard")
      c.solver.mode = SolverMode::PicardFaithful;
    else
      r.domain("solver.mode", "must be \"explicit\" or \"picard\"");
    r.number(s, "solver", "window", c.solver.picard.window);
    r.number(s, "solver", "tol", c.solver.picard.tol);
    r.integer(s, "solver", "max_iterations", c.solver.picard.max_iterations);
    r.integer(s, "solver", "snapshot_every", c.solver.snapshot_every);
    r.integer(s, "solver", "profile_every", c.solver.profile_every);
  }
  if (root.contains("classify") &&
      r.object(root["classify"], "classify",
               {"eps_vanish_rel", "v_eps", "l_big_factor_ell", "l_big_factor_h0", "delta_core",
                "ell_margin"})) {
    const json& k = root["classify"];
    r.number(k, "classify", "eps_vanish_rel", c.classify.eps_vanish_rel);
    r.number(k, "classify", "v_eps", c.classify.v_eps);
    r.number(k, "classify", "l_big_factor_ell", c.classify.l_big_factor_ell);
    r.number(k, "classify", "l_big_factor_h0", c.classify.l_big_factor_h0);
    r.number(k, "classify", "delta_core", c.classify.delta_core);
    r.number(k, "classify", "ell_margin", c.classify.ell_margin);
  }
  if (root.contains("output") && r.object(root["output"], "output", {"dir"}))
    r.string(root["output"], "output", "dir", c.output_dir);
}

void validate(Reader& r, RunConfig& c) {
  if (c.schema_version != kSchemaVersion)
    r.domain("schema_version", "unsupported version " + std::to_string(c.schema_version) +
                                   " (expected " + std::to_string(kSchemaVersion) + ")");
  r.positive("d", c.d);
  r.positive("mu", c.mu);
  r.positive("h0", c.h0);

  std::optional<Kernel> kernel;
  try {
    kernel = make_kernel(c);
  } catch (const DomainError& e) {
    r.domain("kernel", e.what());
  }
  std::optional<Growth> growth;
  try {
    growth = make_growth(c);
  } catch (const DomainError& e) {
    r.domain("growth", e.what());
  }
  std::optional<InitialData> u0;
  if (c.h0 > 0) {
    try {
      u0 = make_initial(c);
    } catch (const DomainError& e) {
      r.domain("initial", e.what());
    }
  }

  r.positive("grid.dx", c.dx);
  r.positive("grid.margin", c.margin);
  if (c.dx > 0 && c.h0 > 0 && c.dx >= c.h0)
    r.domain("grid.dx", "must be smaller than h0 (the initial range needs several cells)");
  if (kernel && c.margin > 0 && !(c.margin > kernel->radius()))
    r.domain("grid.margin", "must exceed the kernel radius so fronts can move");

  r.positive("solver.dt", c.solver.dt);
  if (!(c.solver.t_end >= 0) || !std::isfinite(c.solver.t_end))
    r.domain("solver.t_end", "must be nonnegative and finite");
  r.positive("solver.window", c.solver.picard.window);
  r.positive("solver.tol", c.solver.picard.tol);
  if (c.solver.picard.max_iterations < 1) r.domain("solver.max_iterations", "must be >= 1");
  if (c.solver.snapshot_every < 1) r.domain("solver.snapshot_every", "must be >= 1");
  if (c.solver.profile_every < 0) r.domain("solver.profile_every", "must be >= 0");
  if (growth && u0 && c.solver.dt > 0 && c.d > 0) {
    const double M0 = std::max(u0->sup(), growth->K0());
    const double q = c.solver.dt * (c.d + growth->lipschitz(M0));
    if (q > 0.5) {
      std::ostringstream os;
      os << "dt*(d + Lip_f) = " << q << " exceeds 0.5";
      r.domain("solver.dt", os.str());
    }
  }

  r.positive("classify.eps_vanish_rel", c.classify.eps_vanish_rel);
  r.positive("classify.v_eps", c.classify.v_eps);
  r.positive("classify.l_big_factor_ell", c.classify.l_big_factor_ell);
  r.positive("classify.l_big_factor_h0", c.classify.l_big_factor_h0);
  r.positive("classify.delta_core", c.classify.delta_core);
  if (!(c.classify.ell_margin >= 0)) r.domain("classify.ell_margin", "must be nonnegative");
  if (c.output_dir.empty()) r.domain("output.dir", "must not be empty");
}

json to_json(const RunConfig& c) {
  json k = {{"family", c.kernel.family}};
  if (c.kernel.family == "tophat" || c.kernel.family == "triangle") k["halfwidth"] = c.kernel.halfwidth;
  if (c.kernel.family == "laplace") k["rate"] = c.kernel.rate;
  if (c.kernel.family == "gaussian") k["sigma"] = c.kernel.sigma;
  if (c.kernel.radius) k["radius"] = *c.kernel.radius;
  if (c.kernel.family == "tabulated") k["path"] = c.kernel.path;

  json g = {{"family", c.growth.family}};
  if (c.growth.family == "logistic") {
    g["a"] = c.growth.a;
    g["b"] = c.growth.b;
  } else if (c.growth.family == "expression") {
    g["expression"] = c.growth.expression;
    g["K0"] = c.growth.K0;
    g["lipschitz"] = c.growth.lipschitz;
    g["kpp"] = c.growth.kpp;
  }

  json i = {{"family", c.initial.family}};
  if (c.initial.family == "tabulated")
    i["path"] = c.initial.path;
  else
    i["amplitude"] = c.initial.amplitude;

  return json{
      {"schema_version", c.schema_version},
      {"kernel", k},
      {"growth", g},
      {"d", c.d},
      {"mu", c.mu},
      {"h0", c.h0},
      {"initial", i},
      {"grid", {{"dx", c.dx}, {"margin", c.margin}}},
      {"solver",
       {{"dt", c.solver.dt},
        {"t_end", c.solver.t_end},
        {"mode", c.solver.mode == SolverMode::Explicit ? "explicit" : "picard"},
        {"window", c.solver.picard.window},
        {"tol", c.solver.picard.tol},
        {"max_iterations", c.solver.picard.max_iterations},
        {"snapshot_every", c.solver.snapshot_every},
        {"profile_every", c.solver.profile_every}}},
      {"classify",
       {{"eps_vanish_rel", c.classify.eps_vanish_rel},
        {"v_eps", c.classify.v_eps},
        {"l_big_factor_ell", c.classify.l_big_factor_ell},
        {"l_big_factor_h0", c.classify.l_big_factor_h0},
        {"delta_core", c.classify.delta_core},
        {"ell_margin", c.classify.ell_margin}}},
      {"output", {{"dir", c.output_dir}}},
  };
}

}  // namespace

ConfigError::ConfigError(std::vector<Violation> v) : DomainError(join(v)), violations_(std::move(v)) {}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError({{"", std::string("not valid JSON: ") + e.what(), true}});
  }
  Reader r;
  RunConfig c;
  read(r, root, c);
  c.kernel.path = resolve(c.kernel.path, base_dir);
  c.initial.path = resolve(c.initial.path, base_dir);
  c.solver.d = c.d;
  c.solver.mu = c.mu;
  validate(r, c);
  if (!r.violations.empty()) {
    for (const Violation& v : r.violations)
      if (v.schema) throw SchemaError(r.violations);
    throw ConfigError(r.violations);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string serialize_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string config_hash(const RunConfig& cfg) {
  json j = to_json(cfg);
  j.erase("output");  // where results go does not change them
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string apply_overrides(const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
  json root;
  try {
    root = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError({{"", std::string("not valid JSON: ") + e.what(), true}});
  }
  for (const auto& [key, value] : overrides) {
    json v;
    try {
      v = json::parse(value);
    } catch (const json::parse_error&) {
      v = value;
    }
    json* node = &root;
    std::string rest = key;
    for (size_t dot; (dot = rest.find('.')) != std::string::npos; rest = rest.substr(dot + 1)) {
      json& child = (*node)[rest.substr(0, dot)];
      if (child.is_null()) child = json::object();
      if (!child.is_object())
        throw SchemaError({{key, "override descends into a non-object", true}});
      node = &child;
    }
    (*node)[rest] = v;
  }
  return root.dump();
}

Kernel make_kernel(const RunConfig& c) {
  const KernelConfig& k = c.kernel;
  if (k.family == "tophat") return Kernel::top_hat(k.halfwidth);
  if (k.family == "triangle") return Kernel::triangle(k.halfwidth);
  if (k.family == "laplace")
    return k.radius ? Kernel::laplace(k.rate, *k.radius) : Kernel::laplace(k.rate);
  if (k.family == "gaussian") {
    if (!k.radius) throw DomainError("gaussian kernel needs a truncation radius");
    return Kernel::truncated_gaussian(k.sigma, *k.radius);
  }
  if (k.family == "tabulated") return load_tabulated_kernel(k.path);
  throw DomainError("unknown kernel family '" + k.family +
                    "' (tophat, triangle, laplace, gaussian, tabulated)");
}

Growth make_growth(const RunConfig& c) {
  const GrowthConfig& g = c.growth;
  if (g.family == "logistic") return Growth::logistic(g.a, g.b);
  if (g.family == "expression") return Growth::from_expression(g.expression, g.lipschitz, g.K0, g.kpp);
  if (g.family == "none") return Growth::none();
  throw DomainError("unknown growth family '" + g.family + "' (logistic, expression, none)");
}

InitialData make_initial(const RunConfig& c) {
  const InitialConfig& i = c.initial;
  if (i.family == "cosine") return InitialData::cosine_bump(c.h0, i.amplitude);
  if (i.family == "parabola") return InitialData::parabola(c.h0, i.amplitude);
  if (i.family == "tabulated") return InitialData::load_csv(c.h0, i.path);
  throw DomainError("unknown initial family '" + i.family + "' (cosine, parabola, tabulated)");
}

Experiment make_experiment(const RunConfig& c) {
  Experiment e{make_kernel(c), make_growth(c), make_initial(c), c.dx, c.margin, c.solver, c.classify};
  e.solver.d = c.d;
  e.solver.mu = c.mu;
  return e;
}

}  // namespace frontier
