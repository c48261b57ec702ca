#include "frontier/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Core>

namespace frontier {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) return "0";  // also folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + target.parent_path().string() + "': " + ec.message());
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp + "' failed");
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string Provenance::line() const {
  return "schema_version=" + std::to_string(schema_version) + " config_hash=" + config_hash;
}

namespace {

std::string csv_head(const Provenance& p, const char* header) {
  return "# " + p.line() + "\n" + header + "\n";
}

void row(std::ostringstream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << format_double(v);
    first = false;
  }
  os << '\n';
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* row_name(SweepRows r) { return r == SweepRows::H0 ? "h0" : "d"; }

}  // namespace

std::string trajectory_csv(const Trajectory& traj, const Provenance& p) {
  std::ostringstream os;
  os << csv_head(p, "t,g,h,sup_u,mass,flux_left,flux_right");
  for (const DiagnosticRow& r : traj.rows)
    row(os, {r.t, r.g, r.h, r.sup_u, r.mass, r.flux_left, r.flux_right});
  return os.str();
}

std::string profile_csv(const Profile& prof, const Provenance& p) {
  std::ostringstream os;
  os << "# " << p.line() << " t=" << format_double(prof.t) << "\n" << "x,u\n";
  row(os, {prof.g, 0.0});
  for (size_t i = 0; i < prof.x.size(); ++i) row(os, {prof.x[i], prof.u[i]});
  row(os, {prof.h, 0.0});
  return os.str();
}

std::string spectrum_csv(const SpectralResult& r, const Provenance& p) {
  std::ostringstream os;
  os << "# " << p.line() << " lambda_p=" << format_double(r.lambda_p) << "\n" << "x,phi\n";
  for (size_t i = 0; i < r.x.size(); ++i) row(os, {r.x[i], r.phi[i]});
  return os.str();
}

std::string fixed_profile_csv(const FixedRun& run, const Provenance& p) {
  std::ostringstream os;
  os << csv_head(p, "x,u");
  for (size_t i = 0; i < run.x.size(); ++i) row(os, {run.x[i], run.u[i]});
  return os.str();
}

std::string phase_csv(const SweepTable& t, const Provenance& p) {
  std::ostringstream os;
  os << "# " << p.line() << "\n"
     << row_name(t.rows) << ",mu,verdict,length,sup_u,core_u,speed_left,speed_right,decision_time,rule,error\n";
  for (size_t r = 0; r < t.row_values.size(); ++r)
    for (size_t c = 0; c < t.mu.size(); ++c) {
      const SweepCell& cell = t.at(r, c);
      const Evidence& e = cell.evidence;
      os << format_double(cell.row_value) << ',' << format_double(cell.mu) << ','
         << to_string(cell.verdict) << ',' << format_double(e.length) << ','
         << format_double(e.sup_u) << ',' << format_double(e.core_u) << ','
         << format_double(e.speed_left) << ',' << format_double(e.speed_right) << ','
         << format_double(e.decision_time) << ',' << csv_text(e.rule) << ','
         << csv_text(cell.error) << '\n';
    }
  return os.str();
}

std::string probes_csv(const Thresholds& th, const Provenance& p) {
  std::ostringstream os;
  os << csv_head(p, "mu,verdict,t_end,decision_time,final_length");
  for (const Probe& pr : th.probes)
    os << format_double(pr.mu) << ',' << to_string(pr.verdict) << ',' << format_double(pr.t_end)
       << ',' << format_double(pr.decision_time) << ',' << format_double(pr.final_length) << '\n';
  return os.str();
}

std::string svg_line_plot(const LinePlot& plot, const Provenance& p) {
  constexpr double W = 640, H = 400, left = 70, right = 20, top = 40, bottom = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const Series& s : plot.series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pw = W - left - right, ph = H - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
     << "<!-- " << p.line() << " -->\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << xml_escape(plot.title) << "</text>\n"
     << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  auto tick = [&](double x, double y, const char* anchor, double v) {
    os << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" text-anchor=\"" << anchor
       << "\" font-size=\"11\">" << format_double(std::round(v * 1e6) / 1e6) << "</text>\n";
  };
  tick(left, H - bottom + 16, "start", x0);
  tick(W - right, H - bottom + 16, "end", x1);
  tick(left - 6, H - bottom, "end", y0);
  tick(left - 6, top + 10, "end", y1);
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"13\">"
     << xml_escape(plot.xlabel) << "</text>\n"
     << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
     << top + ph / 2 << ")\">" << xml_escape(plot.ylabel) << "</text>\n";
  for (size_t k = 0; k < plot.series.size(); ++k) {
    const Series& s = plot.series[k];
    const char* colour = colours[k % 5];
    os << "<polyline class=\"series\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << (i ? " " : "") << fixed(sx(s.x[i])) << ',' << fixed(sy(s.y[i]));
    }
    os << "\"/>\n"
       << "<text x=\"" << W - right - 8 << "\" y=\"" << top + 16 + 16 * k << "\" text-anchor=\"end\" font-size=\"12\" fill=\""
       << colour << "\">" << xml_escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_heatmap(const SweepTable& t, const Provenance& p) {
  constexpr double cw = 48, ch = 28, left = 80, top = 40;
  const double W = left + cw * t.mu.size() + 140, H = top + ch * t.row_values.size() + 50;
  auto colour = [](Verdict v) {
    switch (v) {
      case Verdict::Spreading: return "#d62728";
      case Verdict::Vanishing: return "#1f77b4";
      default: return "#bbbbbb";
    }
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
     << "<!-- " << p.line() << " -->\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">verdict by mu (columns) and "
     << row_name(t.rows) << " (rows)</text>\n";
  // Largest row value at the top.
  const size_t nr = t.row_values.size();
  for (size_t r = 0; r < nr; ++r) {
    const double y = top + ch * (nr - 1 - r);
    os << "<text x=\"" << left - 6 << "\" y=\"" << y + ch / 2 + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
       << format_double(t.row_values[r]) << "</text>\n";
    for (size_t c = 0; c < t.mu.size(); ++c) {
      const SweepCell& cell = t.at(r, c);
      os << "<rect class=\"cell\" x=\"" << left + cw * c << "\" y=\"" << y << "\" width=\"" << cw
         << "\" height=\"" << ch << "\" fill=\"" << colour(cell.verdict)
         << "\" stroke=\"white\" data-mu=\"" << format_double(cell.mu) << "\" data-"
         << row_name(t.rows) << "=\"" << format_double(cell.row_value) << "\"><title>"
         << to_string(cell.verdict) << "</title></rect>\n";
    }
  }
  const double yb = top + ch * nr;
  for (size_t c = 0; c < t.mu.size(); ++c)
    os << "<text x=\"" << left + cw * c + cw / 2 << "\" y=\"" << yb + 16
       << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(t.mu[c]) << "</text>\n";
  os << "<text x=\"" << left + cw * t.mu.size() / 2 << "\" y=\"" << yb + 36
     << "\" text-anchor=\"middle\" font-size=\"13\">mu</text>\n";
  const Verdict legend[] = {Verdict::Spreading, Verdict::Vanishing, Verdict::Undetermined};
  for (int k = 0; k < 3; ++k) {
    const double x = left + cw * t.mu.size() + 16, y = top + 22 * k;
    os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"14\" height=\"14\" fill=\"" << colour(legend[k])
       << "\"/>\n<text x=\"" << x + 20 << "\" y=\"" << y + 12 << "\" font-size=\"12\">"
       << to_string(legend[k]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string metadata_json(const RunConfig& cfg, const nlohmann::json& diagnostics) {
  nlohmann::json j;
  j["schema_version"] = cfg.schema_version;
  j["config_hash"] = config_hash(cfg);
  j["version"] = kVersion;
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                       "." + std::to_string(EIGEN_MINOR_VERSION);
  j["config"] = nlohmann::json::parse(serialize_config(cfg));
  j["diagnostics"] = diagnostics;
  return j.dump(2) + "\n";
}

OutputWriter::OutputWriter(std::string dir) : dir_(std::move(dir)) {}

std::string OutputWriter::write(const std::string& name, const std::string& content) {
  const std::lock_guard<std::mutex> lock(mutex_);
  const std::string path = (fs::path(dir_) / name).string();
  write_atomic(path, content);
  written_.push_back(path);
  return path;
}

std::vector<std::string> OutputWriter::written() const {
  const std::lock_guard<std::mutex> lock(mutex_);
  return written_;
}

std::string cell_file_name(const SweepTable& t, size_t r, size_t c) {
  return std::string("cell_") + row_name(t.rows) + "=" + format_double(t.row_values[r]) + "_mu=" +
         format_double(t.mu[c]) + ".csv";
}

}  // namespace frontier
