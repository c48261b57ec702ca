#include "frontier/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "frontier/errors.hpp"

namespace frontier {

InitialData InitialData::cosine_bump(double h0, double amplitude) {
  if (!(h0 > 0)) throw DomainError("initial data: h0 must be positive");
  if (!(amplitude > 0)) throw DomainError("initial data: amplitude must be positive");
  InitialData d;
  d.family_ = Family::CosineBump;
  d.h0_ = h0;
  d.amplitude_ = amplitude;
  return d;
}

InitialData InitialData::parabola(double h0, double amplitude) {
  InitialData d = cosine_bump(h0, amplitude);
  d.family_ = Family::Parabola;
  return d;
}

InitialData InitialData::tabulated(double h0, std::vector<double> x, std::vector<double> u) {
  if (!(h0 > 0)) throw DomainError("initial data: h0 must be positive");
  if (x.size() != u.size() || x.size() < 3)
    throw DomainError("initial data: need at least 3 (x, u) samples");
  for (size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i + 1] > x[i])) throw DomainError("initial data: x must be strictly increasing");
  const double tol = 1e-12 * std::max(1.0, h0);
  if (std::abs(x.front() + h0) > tol || std::abs(x.back() - h0) > tol)
    throw DomainError("initial data: samples must span exactly [-h0, h0]");
  if (std::abs(u.front()) > 1e-12 || std::abs(u.back()) > 1e-12)
    throw DomainError("initial data: u0 must vanish at -h0 and h0");
  for (size_t i = 1; i + 1 < u.size(); ++i)
    if (!(u[i] > 0) || !std::isfinite(u[i]))
      throw DomainError("initial data: u0 must be positive inside (-h0, h0)");
  InitialData d;
  d.family_ = Family::Tabulated;
  d.h0_ = h0;
  x.front() = -h0;
  x.back() = h0;
  u.front() = u.back() = 0.0;
  d.amplitude_ = *std::max_element(u.begin(), u.end());
  d.x_ = std::move(x);
  d.u_ = std::move(u);
  return d;
}

InitialData InitialData::load_csv(double h0, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open initial data '" + path + "'");
  std::vector<double> xs, us;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ','))
      throw DomainError(path + ":" + std::to_string(lineno) + ": expected two columns");
    try {
      xs.push_back(std::stod(a));
      us.push_back(std::stod(b));
    } catch (const std::exception&) {
      if (lineno == 1 && xs.empty()) continue;
      throw DomainError(path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  return tabulated(h0, std::move(xs), std::move(us));
}

InitialData InitialData::rescaled(double h0) const {
  switch (family_) {
    case Family::CosineBump: return cosine_bump(h0, amplitude_);
    case Family::Parabola: return parabola(h0, amplitude_);
    case Family::Tabulated: {
      std::vector<double> x = x_;
      for (double& v : x) v *= h0 / h0_;
      return tabulated(h0, std::move(x), u_);
    }
  }
  return *this;
}

double InitialData::operator()(double x) const {
  if (x <= -h0_ || x >= h0_) return 0.0;
  switch (family_) {
    case Family::CosineBump: return amplitude_ * std::cos(std::numbers::pi * x / (2 * h0_));
    case Family::Parabola: {
      const double r = x / h0_;
      return amplitude_ * (1 - r * r);
    }
    case Family::Tabulated: {
      auto it = std::upper_bound(x_.begin(), x_.end(), x);
      const size_t i = static_cast<size_t>(it - x_.begin()) - 1;
      const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
      return (1 - w) * u_[i] + w * u_[i + 1];
    }
  }
  return 0;
}

double InitialData::sup() const { return amplitude_; }

std::vector<double> InitialData::cell_averages(const Grid& grid) const {
  return cell_averages_of(grid, -h0_, h0_, [this](double x) { return (*this)(x); });
}

}  // namespace frontier
