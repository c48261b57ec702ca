#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "frontier/errors.hpp"
#include "frontier/kernel.hpp"
#include "oracles.hpp"

using namespace frontier;

namespace {

std::vector<Kernel> all_families() {
  return {Kernel::top_hat(1.0), Kernel::triangle(0.7), Kernel::laplace(1.5, 5.0),
          Kernel::laplace(1.0), Kernel::truncated_gaussian(0.4, 1.5),
          Kernel::tabulated({-1, -0.5, 0, 0.5, 1}, {0, 0.6, 1, 0.4, 0})};
}

}  // namespace

TEST_CASE("kernel values at simple points") {
  CHECK(Kernel::top_hat(1).eval(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(Kernel::top_hat(1).eval(2) == 0.0);
  CHECK(Kernel::laplace(1).eval(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(Kernel::triangle(2).eval(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(Kernel::triangle(2).eval(2.5) == 0.0);
}

TEST_CASE("kernel is even and has unit mass") {
  for (const Kernel& k : all_families()) {
    CAPTURE(k.name());
    for (double x : {0.0, 0.1, 0.33, 0.9, 1.2, 3.0}) CHECK(k.eval(x) == k.eval(-x));
    CHECK(k.eval(0) > 0);
    CHECK(std::abs(k.interval_mass(-1e300, 1e300) - 1.0) <= 1e-12);
    CHECK(std::abs(k.tail_mass(0) - 0.5) <= 1e-14);
  }
}

TEST_CASE("tail mass is monotone and within [0, 1]") {
  for (const Kernel& k : all_families()) {
    CAPTURE(k.name());
    double prev = 1.0;
    for (double z = -6; z <= 6; z += 0.013) {
      const double v = k.tail_mass(z);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("top hat tail and interval masses") {
  const Kernel k = Kernel::top_hat(1);
  CHECK(k.tail_mass(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(k.interval_mass(-1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k.interval_mass(0, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(k.interval_mass(1, 0), DomainError);
}

TEST_CASE("truncated gaussian tail matches Simpson quadrature") {
  const Kernel k = Kernel::truncated_gaussian(1.0, 4.0);
  for (double z : {-3.0, -1.0, 0.2, 1.0, 2.5, 3.9})
    CHECK(std::abs(k.tail_mass(z) - oracle::gaussian_tail(1.0, 4.0, z)) <= 1e-10);
}

TEST_CASE("interval masses are additive") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3, 3);
  for (const Kernel& k : all_families()) {
    for (int rep = 0; rep < 50; ++rep) {
      double p[3] = {U(rng), U(rng), U(rng)};
      std::sort(p, p + 3);
      CHECK(std::abs(k.interval_mass(p[0], p[1]) + k.interval_mass(p[1], p[2]) -
                     k.interval_mass(p[0], p[2])) <= 1e-12);
    }
  }
}

TEST_CASE("tail integral agrees with quadrature of the tail mass") {
  for (const Kernel& k : all_families()) {
    CAPTURE(k.name());
    for (auto [a, b] : {std::pair{-2.0, -0.3}, {-0.4, 0.9}, {0.2, 0.25}, {1.0, 4.0}}) {
      std::vector<double> kinks = {-1, -0.7, -0.5, 0, 0.5, 0.7, 1};
      if (k.compact()) kinks.insert(kinks.end(), {-k.radius(), k.radius()});
      const double ref =
          oracle::piecewise_gauss([&](double z) { return k.tail_mass(z); }, a, b, kinks, 64);
      CHECK(std::abs(k.tail_integral(a, b) - ref) <= 1e-11);
    }
    CHECK(std::abs(k.tail_mean(0.3, 0.3 + 1e-9) - k.tail_mass(0.3 + 5e-10)) <= 1e-12);
  }
}

TEST_CASE("cell pair masses match the double-integral oracle") {
  const Kernel k = Kernel::triangle(1.0);
  for (auto [a, b, c, e] : {std::array{0.0, 0.3, 0.1, 0.5}, {-1.0, -0.2, 0.4, 0.9},
                            {0.0, 0.05, 0.05, 0.1}, {0.0, 2.0, -2.0, 0.0}}) {
    CHECK(std::abs(k.cell_pair_mass(a, b, c, e) -
                   oracle::pair_integral(k, a, b, c, e, {-1, 1})) <= 1e-13);
  }
}

TEST_CASE("point stencil for the top hat on node-centred cells") {
  const Stencil s =
      discretize_kernel(Kernel::top_hat(1), 0.5, 2, Stencil::Kind::PointToCell);
  const double expect[5] = {0.125, 0.25, 0.25, 0.25, 0.125};
  for (int k = -2; k <= 2; ++k) CHECK(s[k] == doctest::Approx(expect[k + 2]).epsilon(1e-15));
  CHECK(std::abs(s.total() - 1.0) <= 1e-15);
}

TEST_CASE("stencils are symmetric and sum to the covered mass") {
  for (const Kernel& k : all_families()) {
    if (!k.compact()) continue;
    for (auto kind : {Stencil::Kind::PointToCell, Stencil::Kind::CellToCell}) {
      const double dx = 0.05;
      const Stencil s = discretize_kernel(k, dx, covering_radius_cells(k, dx), kind);
      for (int j = 1; j <= s.radius_cells; ++j) CHECK(s[j] == s[-j]);
      CHECK(std::abs(s.total() - 1.0) <= 1e-12);
      CHECK(s.truncation_defect >= -1e-12);
    }
  }
  const Kernel lap = Kernel::laplace(1.0, 6.0);
  const Stencil s = discretize_kernel(lap, 0.05, covering_radius_cells(lap, 0.05),
                                      Stencil::Kind::PointToCell);
  CHECK(std::abs(s.total() - lap.interval_mass(-6, 6)) <= 1e-12);
}

TEST_CASE("aggressive truncation is rejected unless allowed") {
  const Kernel k = Kernel::top_hat(1);
  CHECK_THROWS_AS(discretize_kernel(k, 0.1, 3), DomainError);
  CHECK_NOTHROW(discretize_kernel(k, 0.1, 3, Stencil::Kind::CellToCell, true));
  CHECK_THROWS_AS(covering_radius_cells(Kernel::laplace(1.0), 0.1), DomainError);
}

TEST_CASE("kernel specs parse") {
  CHECK(parse_kernel_spec("tophat:1").family() == Kernel::Family::TopHat);
  CHECK(parse_kernel_spec("laplace:2:4").radius() == 4.0);
  CHECK(parse_kernel_spec("gaussian:0.5:2").family() == Kernel::Family::TruncatedGaussian);
  CHECK_THROWS_AS(parse_kernel_spec("tophat:-1"), DomainError);
  CHECK_THROWS_AS(parse_kernel_spec("cauchy:1"), DomainError);

  const std::string path = "kernel_test_table.csv";
  {
    std::ofstream f(path);
    f << "x,J\n-1,0\n0,1\n1,0\n";
  }
  const Kernel t = parse_kernel_spec("tabulated:" + path);
  CHECK(t.eval(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(t.interval_mass(-1, 1) - 1.0) <= 1e-14);
  std::remove(path.c_str());
}
