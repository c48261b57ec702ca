#pragma once

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "frontier/classify.hpp"
#include "frontier/config.hpp"
#include "frontier/fixed_domain.hpp"
#include "frontier/solver.hpp"
#include "frontier/spectral.hpp"

namespace frontier {

/// A file could not be written or read; the message names the path.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal form that round-trips.
std::string format_double(double v);

/// Writes to `path.tmp` and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

/// Embedded in every artifact.
struct Provenance {
  int schema_version = kSchemaVersion;
  std::string config_hash;
  std::string line() const;  // "schema_version=1 config_hash=..."
};

// CSVs start with a "# schema_version=.. config_hash=.." line, then the header.
std::string trajectory_csv(const Trajectory& traj, const Provenance& p);
std::string profile_csv(const Profile& prof, const Provenance& p);  // x,u incl. (g,0), (h,0)
std::string spectrum_csv(const SpectralResult& r, const Provenance& p);
std::string fixed_profile_csv(const FixedRun& run, const Provenance& p);
std::string phase_csv(const SweepTable& t, const Provenance& p);
std::string probes_csv(const Thresholds& th, const Provenance& p);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct LinePlot {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
};

std::string svg_line_plot(const LinePlot& plot, const Provenance& p);
/// One <rect class="cell"> per grid point, coloured by verdict.
std::string svg_heatmap(const SweepTable& t, const Provenance& p);

/// Config echo, hash, versions and the given diagnostics; no timestamps.
std::string metadata_json(const RunConfig& cfg, const nlohmann::json& diagnostics);

/// All files of one command go through here; writes are serialized and the
/// names recorded so the manifest is stable.
class OutputWriter {
public:
  explicit OutputWriter(std::string dir);
  const std::string& dir() const { return dir_; }
  /// Returns the full path written.
  std::string write(const std::string& name, const std::string& content);
  std::vector<std::string> written() const;

private:
  std::string dir_;
  mutable std::mutex mutex_;
  std::vector<std::string> written_;
};

/// "cell_h0=0.3_mu=0.625.csv"-style names from parameter values.
std::string cell_file_name(const SweepTable& t, size_t r, size_t c);

}  // namespace frontier
