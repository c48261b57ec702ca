#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frontier/classify.hpp"
#include "frontier/errors.hpp"
#include "frontier/growth.hpp"
#include "frontier/initial_data.hpp"
#include "frontier/kernel.hpp"
#include "frontier/solver.hpp"

namespace frontier {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

struct Violation {
  std::string path;     // e.g. "solver.dt"
  std::string message;
  bool schema = false;  // unknown key / wrong type, as opposed to a bad value
};

/// Every violation found in a config; DomainError when all are value errors.
class ConfigError : public DomainError {
public:
  explicit ConfigError(std::vector<Violation> v);
  const std::vector<Violation>& violations() const { return violations_; }

private:
  std::vector<Violation> violations_;
};

/// Unknown keys or wrong types (at least one violation is a schema one).
class SchemaError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

struct KernelConfig {
  std::string family = "tophat";  // tophat | triangle | laplace | gaussian | tabulated
  double halfwidth = 1;           // tophat, triangle
  double rate = 1;                // laplace
  double sigma = 1;               // gaussian
  std::optional<double> radius;   // laplace (optional), gaussian (required)
  std::string path;               // tabulated
};

struct GrowthConfig {
  std::string family = "logistic";  // logistic | expression | none
  double a = 1, b = 1;
  std::string expression;
  double K0 = 1;
  double lipschitz = 1;
  bool kpp = true;
};

struct InitialConfig {
  std::string family = "cosine";  // cosine | parabola | tabulated
  double amplitude = 1;
  std::string path;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  KernelConfig kernel;
  GrowthConfig growth;
  double d = 1;
  double mu = 1;
  double h0 = 1;
  InitialConfig initial;
  double dx = 0.02;
  double margin = 20;
  SolverConfig solver;
  ClassifyRules classify;
  std::string output_dir = "out";
};

/// Parses and validates JSON text. Missing keys take the defaults above.
/// Relative file paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);

/// Canonical JSON (sorted keys, every field present).
std::string serialize_config(const RunConfig& cfg);
/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Applies "section.key" = value overrides to JSON text before parsing. Values
/// that parse as JSON (numbers, booleans, quoted strings) keep their type.
std::string apply_overrides(const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& overrides);

Kernel make_kernel(const RunConfig& cfg);
Growth make_growth(const RunConfig& cfg);
InitialData make_initial(const RunConfig& cfg);
Experiment make_experiment(const RunConfig& cfg);

}  // namespace frontier
