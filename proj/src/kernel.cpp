#include "frontier/kernel.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>
#include <sstream>

#include "frontier/errors.hpp"

namespace frontier {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Upper tail of the standard normal.
double normal_upper(double t) { return 0.5 * std::erfc(t * kInvSqrt2); }

double normal_pdf(double t) {
  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
}

// Antiderivative of normal_upper: d/dt [t Q(t) - phi(t)] = Q(t).
double normal_upper_integral(double t) { return t * normal_upper(t) - normal_pdf(t); }

void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const std::string& ctx) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("kernel spec '" + ctx + "': cannot parse number '" + s + "'");
  }
}

}  // namespace

Kernel Kernel::top_hat(double halfwidth) {
  require(halfwidth > 0 && std::isfinite(halfwidth), "tophat halfwidth must be positive");
  Kernel k;
  k.family_ = Family::TopHat;
  k.p1_ = halfwidth;
  k.radius_ = halfwidth;
  return k;
}

Kernel Kernel::triangle(double halfwidth) {
  require(halfwidth > 0 && std::isfinite(halfwidth), "triangle halfwidth must be positive");
  Kernel k;
  k.family_ = Family::Triangle;
  k.p1_ = halfwidth;
  k.radius_ = halfwidth;
  return k;
}

Kernel Kernel::laplace(double rate, double radius) {
  require(rate > 0 && std::isfinite(rate), "laplace rate must be positive");
  require(radius > 0, "laplace radius must be positive");
  Kernel k;
  k.family_ = Family::Laplace;
  k.p1_ = rate;
  k.radius_ = radius;
  k.norm_ = std::isfinite(radius) ? 1.0 / -std::expm1(-rate * radius) : 1.0;
  return k;
}

Kernel Kernel::truncated_gaussian(double sigma, double radius) {
  require(sigma > 0 && std::isfinite(sigma), "gaussian sigma must be positive");
  require(radius > 0 && std::isfinite(radius), "gaussian radius must be positive and finite");
  Kernel k;
  k.family_ = Family::TruncatedGaussian;
  k.p1_ = sigma;
  k.radius_ = radius;
  k.norm_ = 1.0 / std::erf(radius / sigma * kInvSqrt2);
  return k;
}

Kernel Kernel::tabulated(std::vector<double> x, std::vector<double> values) {
  require(x.size() == values.size(), "tabulated kernel: x and J columns differ in length");
  require(x.size() >= 3, "tabulated kernel: need at least 3 samples");
  const size_t n = x.size();
  for (size_t i = 0; i + 1 < n; ++i)
    require(x[i + 1] > x[i], "tabulated kernel: x must be strictly increasing");
  const double span = x.back();
  require(span > 0, "tabulated kernel: grid must extend to positive x");
  for (size_t i = 0; i < n; ++i) {
    require(std::abs(x[i] + x[n - 1 - i]) <= 1e-9 * span,
            "tabulated kernel: grid is not symmetric about 0");
    require(std::isfinite(values[i]) && values[i] >= 0,
            "tabulated kernel: values must be finite and nonnegative");
  }

  // Symmetrize onto the x >= 0 half.
  auto table = std::make_shared<Table>();
  const size_t mid = n / 2;
  if (n % 2 == 1) {
    table->x.push_back(0.0);
    table->j.push_back(values[mid]);
  } else {
    // Linear interpolation of a symmetric function between -a and a is flat.
    table->x.push_back(0.0);
    table->j.push_back(0.5 * (values[mid - 1] + values[mid]));
  }
  for (size_t i = (n % 2 == 1) ? mid + 1 : mid; i < n; ++i) {
    table->x.push_back(0.5 * (x[i] - x[n - 1 - i]));
    table->j.push_back(0.5 * (values[i] + values[n - 1 - i]));
  }
  require(table->j.front() > 0, "tabulated kernel: J(0) must be positive");

  const size_t m = table->x.size();
  double half_mass = 0;
  for (size_t i = 0; i + 1 < m; ++i)
    half_mass += 0.5 * (table->x[i + 1] - table->x[i]) * (table->j[i] + table->j[i + 1]);
  require(half_mass > 0, "tabulated kernel: zero total mass");
  for (double& v : table->j) v *= 0.5 / half_mass;

  table->m0.assign(m, 0.0);
  table->m1.assign(m, 0.0);
  for (size_t i = m - 1; i-- > 0;) {
    const double a = table->x[i], b = table->x[i + 1];
    const double ja = table->j[i], jb = table->j[i + 1];
    const double jm = 0.5 * (ja + jb), xm = 0.5 * (a + b);
    table->m0[i] = table->m0[i + 1] + 0.5 * (b - a) * (ja + jb);
    table->m1[i] = table->m1[i + 1] + (b - a) / 6.0 * (a * ja + 4 * xm * jm + b * jb);
  }

  Kernel k;
  k.family_ = Family::Tabulated;
  k.radius_ = table->x.back();
  k.p1_ = k.radius_;
  k.table_ = std::move(table);
  return k;
}

std::string Kernel::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case Family::TopHat: os << "tophat:" << p1_; break;
    case Family::Triangle: os << "triangle:" << p1_; break;
    case Family::Laplace:
      os << "laplace:" << p1_;
      if (std::isfinite(radius_)) os << ":" << radius_;
      break;
    case Family::TruncatedGaussian: os << "gaussian:" << p1_ << ":" << radius_; break;
    case Family::Tabulated: os << "tabulated[" << table_->x.size() << "]"; break;
  }
  return os.str();
}

double Kernel::sup() const {
  switch (family_) {
    case Family::TopHat: return 0.5 / p1_;
    case Family::Triangle: return 1.0 / p1_;
    case Family::Laplace: return norm_ * 0.5 * p1_;
    case Family::TruncatedGaussian: return norm_ * normal_pdf(0) / p1_;
    case Family::Tabulated: return *std::max_element(table_->j.begin(), table_->j.end());
  }
  return 0;
}

double Kernel::eval(double x) const {
  const double z = std::abs(x);
  if (z > radius_) return 0.0;
  switch (family_) {
    case Family::TopHat: return 0.5 / p1_;
    case Family::Triangle: return (p1_ - z) / (p1_ * p1_);
    case Family::Laplace: return norm_ * 0.5 * p1_ * std::exp(-p1_ * z);
    case Family::TruncatedGaussian: return norm_ * normal_pdf(z / p1_) / p1_;
    case Family::Tabulated: {
      const auto& t = *table_;
      auto it = std::upper_bound(t.x.begin(), t.x.end(), z);
      if (it == t.x.end()) return t.j.back();
      const size_t i = static_cast<size_t>(it - t.x.begin()) - 1;
      const double w = (z - t.x[i]) / (t.x[i + 1] - t.x[i]);
      return (1 - w) * t.j[i] + w * t.j[i + 1];
    }
  }
  return 0;
}

double Kernel::tail_mass_positive(double z) const {
  if (z >= radius_) return 0.0;
  switch (family_) {
    case Family::TopHat: return 0.5 * (p1_ - z) / p1_;
    case Family::Triangle: {
      const double r = (p1_ - z) / p1_;
      return 0.5 * r * r;
    }
    case Family::Laplace: {
      const double far = std::isfinite(radius_) ? std::exp(-p1_ * radius_) : 0.0;
      return 0.5 * norm_ * (std::exp(-p1_ * z) - far);
    }
    case Family::TruncatedGaussian:
      return norm_ * (normal_upper(z / p1_) - normal_upper(radius_ / p1_));
    case Family::Tabulated: {
      const auto& t = *table_;
      auto it = std::upper_bound(t.x.begin(), t.x.end(), z);
      const size_t i = static_cast<size_t>(it - t.x.begin()) - 1;
      const double b = t.x[i + 1];
      const double jz = eval(z);
      return t.m0[i + 1] + 0.5 * (b - z) * (jz + t.j[i + 1]);
    }
  }
  return 0;
}

double Kernel::tail_integral_positive(double z) const {
  if (z >= radius_) return 0.0;
  switch (family_) {
    case Family::TopHat: {
      const double r = p1_ - z;
      return 0.25 * r * r / p1_;
    }
    case Family::Triangle: {
      const double r = p1_ - z;
      return r * r * r / (6.0 * p1_ * p1_);
    }
    case Family::Laplace: {
      if (!std::isfinite(radius_)) return 0.5 * std::exp(-p1_ * z) / p1_;
      const double far = std::exp(-p1_ * radius_);
      return 0.5 * norm_ * ((std::exp(-p1_ * z) - far) / p1_ - far * (radius_ - z));
    }
    case Family::TruncatedGaussian: {
      const double s = p1_;
      return norm_ * (s * (normal_upper_integral(radius_ / s) - normal_upper_integral(z / s)) -
                      normal_upper(radius_ / s) * (radius_ - z));
    }
    case Family::Tabulated: {
      // P(z) = int_z^X (s - z) J(s) ds.
      const auto& t = *table_;
      auto it = std::upper_bound(t.x.begin(), t.x.end(), z);
      const size_t i = static_cast<size_t>(it - t.x.begin()) - 1;
      const double b = t.x[i + 1];
      const double jz = eval(z), jb = t.j[i + 1];
      const double xm = 0.5 * (z + b), jm = 0.5 * (jz + jb);
      const double m0 = t.m0[i + 1] + 0.5 * (b - z) * (jz + jb);
      const double m1 = t.m1[i + 1] + (b - z) / 6.0 * (z * jz + 4 * xm * jm + b * jb);
      return m1 - z * m0;
    }
  }
  return 0;
}

double Kernel::tail_mass(double z) const {
  return z >= 0 ? tail_mass_positive(z) : 1.0 - tail_mass_positive(-z);
}

double Kernel::interval_mass(double a, double b) const {
  if (a > b) throw DomainError("interval_mass: lower bound exceeds upper bound");
  if (a == b) return 0.0;
  // Evaluate on the side where K is small to avoid cancellation against 1.
  double m;
  if (a >= 0)
    m = tail_mass_positive(a) - tail_mass_positive(b);
  else if (b <= 0)
    m = tail_mass_positive(-b) - tail_mass_positive(-a);
  else
    m = 1.0 - tail_mass_positive(-a) - tail_mass_positive(b);
  return std::clamp(m, 0.0, 1.0);
}

double Kernel::tail_integral(double a, double b) const {
  if (a > b) return -tail_integral(b, a);
  double total = 0;
  if (b > 0) {
    const double lo = std::max(a, 0.0);
    total += tail_integral_positive(lo) - tail_integral_positive(b);
  }
  if (a < 0) {
    // K(s) = 1 - K(-s) for s < 0.
    const double hi = std::min(b, 0.0);
    total += (hi - a) - (tail_integral_positive(-hi) - tail_integral_positive(-a));
  }
  return total;
}

double Kernel::tail_mean(double a, double b) const {
  const double w = b - a;
  const double scale = family_ == Family::Laplace ? 1.0 / p1_ : p1_;
  if (std::abs(w) <= 1e-6 * scale) return tail_mass(0.5 * (a + b));
  return tail_integral(a, b) / w;
}

double Kernel::cell_pair_mass(double a, double b, double c, double e) const {
  return tail_integral(a - e, b - e) - tail_integral(a - c, b - c);
}

double Stencil::total() const {
  double s = 0;
  for (double w : weights) s += w;
  return s;
}

int covering_radius_cells(const Kernel& kernel, double dx) {
  if (!kernel.compact())
    throw DomainError("kernel " + kernel.name() + " has unbounded support; give a truncation radius");
  return static_cast<int>(std::ceil(kernel.radius() / dx)) + 1;
}

Stencil discretize_kernel(const Kernel& kernel, double dx, int radius_cells,
                          Stencil::Kind kind, bool allow_truncation) {
  if (!(dx > 0)) throw DomainError("discretize_kernel: dx must be positive");
  if (radius_cells < 0) throw DomainError("discretize_kernel: negative radius");
  Stencil s;
  s.kind = kind;
  s.dx = dx;
  s.radius_cells = radius_cells;
  s.weights.resize(2 * radius_cells + 1);
  // Weights are computed for k >= 0 and mirrored so symmetry is exact.
  for (int k = 0; k <= radius_cells; ++k) {
    const double lo = (k - 0.5) * dx, hi = (k + 0.5) * dx;
    double w = kind == Stencil::Kind::PointToCell
                   ? kernel.interval_mass(lo, hi)
                   : kernel.cell_pair_mass(-0.5 * dx, 0.5 * dx, lo, hi) / dx;
    w = std::max(w, 0.0);
    s.weights[radius_cells + k] = w;
    s.weights[radius_cells - k] = w;
  }
  s.truncation_defect = 1.0 - s.total();
  if (!allow_truncation && s.total() < 0.999)
    throw DomainError("discretize_kernel: stencil keeps only " + std::to_string(s.total()) +
                      " of the kernel mass; enlarge radius_cells");
  return s;
}

Kernel load_tabulated_kernel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open kernel table '" + path + "'");
  std::vector<double> xs, js;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line, ',');
    if (cols.size() != 2)
      throw DomainError(path + ":" + std::to_string(lineno) + ": expected two columns");
    try {
      xs.push_back(std::stod(cols[0]));
      js.push_back(std::stod(cols[1]));
    } catch (const std::exception&) {
      if (xs.empty() && lineno == 1) continue;  // header
      throw DomainError(path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  return Kernel::tabulated(std::move(xs), std::move(js));
}

Kernel parse_kernel_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string family = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (family == "tabulated") return load_tabulated_kernel(rest);
  auto args = rest.empty() ? std::vector<std::string>{} : split(rest, ':');
  std::vector<double> v;
  for (const auto& a : args) v.push_back(to_double(a, spec));
  auto need = [&](size_t lo, size_t hi) {
    if (v.size() < lo || v.size() > hi)
      throw DomainError("kernel spec '" + spec + "': wrong number of parameters");
  };
  if (family == "tophat") { need(1, 1); return Kernel::top_hat(v[0]); }
  if (family == "triangle") { need(1, 1); return Kernel::triangle(v[0]); }
  if (family == "laplace") {
    need(1, 2);
    return v.size() == 2 ? Kernel::laplace(v[0], v[1]) : Kernel::laplace(v[0]);
  }
  if (family == "gaussian") { need(2, 2); return Kernel::truncated_gaussian(v[0], v[1]); }
  throw DomainError("unknown kernel family '" + family + "'");
}

}  // namespace frontier
