#include "frontier/growth.hpp"

#include <cmath>
#include <sstream>

#include "frontier/errors.hpp"

namespace frontier {

Growth Growth::logistic(double a, double b) {
  if (!(a > 0) || !std::isfinite(a)) throw DomainError("logistic growth: a must be positive");
  if (!(b > 0) || !std::isfinite(b)) throw DomainError("logistic growth: b must be positive");
  Growth g;
  g.family_ = Family::Logistic;
  g.a_ = a;
  g.b_ = b;
  g.K0_ = a / b;
  g.kpp_ = true;
  std::ostringstream os;
  os.precision(17);
  os << "logistic(a=" << a << ", b=" << b << ")";
  g.description_ = os.str();
  g.validate();
  return g;
}

Growth Growth::autonomous(Autonomous f, double lipschitz, double K0, bool kpp,
                          std::string description) {
  if (!f) throw DomainError("growth: empty callable");
  Growth g;
  g.family_ = Family::GeneralAutonomous;
  g.autonomous_ = std::move(f);
  g.lipschitz_ = lipschitz;
  g.K0_ = K0;
  g.kpp_ = kpp;
  g.description_ = std::move(description);
  g.validate();
  return g;
}

Growth Growth::space_time(General f, double lipschitz, double K0, std::string description) {
  if (!f) throw DomainError("growth: empty callable");
  Growth g;
  g.family_ = Family::SpaceTime;
  g.general_ = std::move(f);
  g.lipschitz_ = lipschitz;
  g.K0_ = K0;
  g.kpp_ = false;
  g.description_ = std::move(description);
  g.validate();
  return g;
}

Growth Growth::none() {
  Growth g;
  g.family_ = Family::Zero;
  g.description_ = "zero";
  return g;
}

Growth Growth::from_expression(const std::string& text, double lipschitz, double K0, bool kpp) {
  auto expr = Expression::parse(text);
  if (expr.depends_on_time_or_space()) {
    if (kpp)
      throw DomainError("growth expression '" + text +
                        "' depends on t or x; the Fisher-KPP analysis needs an autonomous f(u)");
    return space_time([expr](double t, double x, double u) { return expr.eval(t, x, u); },
                      lipschitz, K0, text);
  }
  return autonomous([expr](double u) { return expr.eval(0, 0, u); }, lipschitz, K0, kpp, text);
}

void Growth::validate() const {
  if (!(K0_ > 0) || !std::isfinite(K0_)) throw DomainError("growth: K0 must be positive");
  if (family_ != Family::Logistic && (!(lipschitz_ > 0) || !std::isfinite(lipschitz_)))
    throw DomainError("growth: a positive Lipschitz bound must be declared");

  const double ts[] = {0.0, 1.0, 10.0};
  const double xs[] = {-5.0, 0.0, 5.0};
  for (double t : ts)
    for (double x : xs) {
      if (rate(t, x, 0.0) != 0.0)
        throw DomainError("growth '" + description_ + "': f(t,x,0) must vanish");
      if (!(rate(t, x, K0_ * (1 + 1e-6)) < 0))
        throw DomainError("growth '" + description_ + "': f must be negative just above K0");
    }
  if (kpp_) {
    // f(u)/u strictly decreasing on a sample of (0, K0].
    constexpr int kSamples = 200;
    double prev = INFINITY;
    for (int k = 1; k <= kSamples; ++k) {
      const double u = K0_ * k / kSamples;
      const double q = rate(0, 0, u) / u;
      if (!(q < prev))
        throw DomainError("growth '" + description_ +
                          "': f(u)/u is not strictly decreasing on (0, K0]");
      prev = q;
    }
    if (!(derived_constants().fprime0 > 0))
      throw DomainError("growth '" + description_ + "': f'(0) must be positive");
  }
}

double Growth::eval(double t, double x, double u) const {
  if (u < 0) throw DomainError("growth: density must be nonnegative");
  return rate(t, x, u);
}

double Growth::lipschitz(double bound) const {
  if (family_ == Family::Logistic) return std::max(a_, std::abs(a_ - 2 * b_ * bound));
  if (family_ == Family::Zero) return 0.0;
  return lipschitz_;
}

DerivedConstants Growth::derived_constants() const {
  if (!kpp_) throw DomainError("growth '" + description_ + "' is not declared Fisher-KPP");
  if (family_ == Family::Logistic) return {a_, a_ / b_, a_ / b_};

  auto f = [this](double u) { return rate(0, 0, u); };
  DerivedConstants c;
  c.K0 = K0_;

  // f'(0): central differences when f accepts negative u, one-sided otherwise.
  constexpr double h = 1e-6;
  bool central = true;
  try {
    central = std::isfinite(f(-h)) && std::isfinite(f(-h / 2));
  } catch (const std::exception&) {
    central = false;
  }
  auto diff = [&](double s) {
    if (central) return (f(s) - f(-s)) / (2 * s);
    return (-3 * f(0) + 4 * f(s) - f(2 * s)) / (2 * s);
  };
  c.fprime0 = (4 * diff(h / 2) - diff(h)) / 3;

  // v0 by bisection on (0, K0].
  double hi = K0_;
  double fhi = f(hi);
  if (fhi == 0) {
    c.v0 = hi;
    return c;
  }
  if (fhi > 0) throw DomainError("growth '" + description_ + "': f(K0) > 0, no zero in (0, K0]");
  double lo = K0_;
  bool found = false;
  for (int k = 0; k < 60; ++k) {
    lo *= 0.5;
    if (f(lo) > 0) {
      found = true;
      break;
    }
  }
  if (!found)
    throw DomainError("growth '" + description_ + "': no sign change of f found in (0, K0]");
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0) {
      lo = hi = mid;
      break;
    }
    (fm > 0 ? lo : hi) = mid;
  }
  c.v0 = 0.5 * (lo + hi);
  return c;
}

}  // namespace frontier
