#pragma once

#include <functional>
#include <string>

#include "frontier/expression.hpp"

namespace frontier {

struct DerivedConstants {
  double fprime0 = 0;  // f'(0)
  double K0 = 0;       // f(u) < 0 for u > K0
  double v0 = 0;       // unique positive zero of f
};

/// Growth law f(t, x, u) with f(t, x, 0) = 0, locally Lipschitz in u and
/// negative above K0. The Fisher-KPP subclass (autonomous, f(u)/u strictly
/// decreasing, f'(0) > 0) additionally exposes f'(0) and v0.
///
/// Construction spot-checks the hypotheses on a sample of (t, x, u) and
/// throws DomainError when one fails.
class Growth {
public:
  enum class Family { Logistic, GeneralAutonomous, SpaceTime, Zero };

  using Autonomous = std::function<double(double)>;
  using General = std::function<double(double, double, double)>;

  /// f(u) = a u - b u^2, K0 = v0 = a/b.
  static Growth logistic(double a, double b);
  /// `lipschitz` bounds |f'| on [0, K0] (and on [0, M] for the runs the
  /// caller intends); `kpp` declares f(u)/u decreasing with f'(0) > 0.
  static Growth autonomous(Autonomous f, double lipschitz, double K0, bool kpp,
                           std::string description = "callable");
  static Growth space_time(General f, double lipschitz, double K0,
                           std::string description = "callable");
  /// f = 0 (pure dispersal). Outside the hypotheses on purpose: used for the
  /// mass-balance identity. K0 = 0 and Lipschitz constant 0.
  static Growth none();
  /// Autonomous when the expression only mentions u, SpaceTime otherwise.
  static Growth from_expression(const std::string& text, double lipschitz, double K0, bool kpp);

  Family family() const { return family_; }
  const std::string& description() const { return description_; }
  bool kpp() const { return kpp_; }
  double K0() const { return K0_; }
  double logistic_a() const { return a_; }
  double logistic_b() const { return b_; }

  /// f(t, x, u); rejects u < 0.
  double eval(double t, double x, double u) const;
  /// Unchecked evaluation for the solver's inner loops.
  double rate(double t, double x, double u) const {
    if (family_ == Family::Logistic) return u * (a_ - b_ * u);
    if (family_ == Family::Zero) return 0.0;
    return family_ == Family::GeneralAutonomous ? autonomous_(u) : general_(t, x, u);
  }

  /// Lipschitz constant of f in u on [0, bound].
  double lipschitz(double bound) const;

  /// Requires kpp(). Logistic values are exact; otherwise f'(0) comes from a
  /// Richardson-extrapolated finite difference and v0 from bisection.
  DerivedConstants derived_constants() const;

private:
  Growth() = default;
  void validate() const;

  Family family_ = Family::Logistic;
  double a_ = 0, b_ = 0;
  double lipschitz_ = 0;
  double K0_ = 0;
  bool kpp_ = false;
  Autonomous autonomous_;
  General general_;
  std::string description_;
};

}  // namespace frontier
