#include <cmath>
#include <random>

#include "doctest.h"
#include "frontier/discretization.hpp"
#include "frontier/errors.hpp"
#include "oracles.hpp"

using namespace frontier;

namespace {

SimState random_state(const Grid& grid, double g, double h, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.1, 2.0);
  SimState s;
  s.g = g;
  s.h = h;
  s.u.assign(grid.nodes(), 0.0);
  const ActiveRange ar = active_range(grid, g, h);
  for (int i = ar.first; i <= ar.last; ++i) s.u[i] = U(rng);
  return s;
}

// d (sum_j u_j (1/l_i) int_{C_i} int_{C_j} J - u_i), O(n^2) from kernel values only.
std::vector<double> dense_oracle(const Kernel& k, const Grid& grid, double d, const SimState& s,
                                 const std::vector<double>& breaks) {
  std::vector<double> out(grid.nodes(), 0.0);
  const ActiveRange ar = active_range(grid, s.g, s.h);
  for (int i = ar.first; i <= ar.last; ++i) {
    const CellSpan ci = cell_span(grid, i, s.g, s.h);
    double sum = 0;
    for (int j = ar.first; j <= ar.last; ++j) {
      const CellSpan cj = cell_span(grid, j, s.g, s.h);
      sum += s.u[j] * oracle::pair_integral(k, ci.lo, ci.hi, cj.lo, cj.hi, breaks);
    }
    out[i] = d * (sum / ci.length() - s.u[i]);
  }
  return out;
}

}  // namespace

TEST_CASE("grid construction") {
  const Grid g = build_grid(1, 9, 0.05);
  CHECK(g.xmin == -10.0);
  CHECK(g.xmax == 10.0);
  CHECK(g.n == 400);
  for (int i = 0; i <= g.n; ++i) CHECK(g.node(i) == g.xmin + i * g.dx);
  CHECK(g.node(200) == 0.0);
  CHECK_THROWS_AS(build_grid(1, 9, 2), DomainError);
  CHECK_THROWS_AS(build_grid(1, 0, 0.1), DomainError);
}

TEST_CASE("active ranges and clipped spans") {
  const Grid g = build_grid(1, 2, 0.1);
  const ActiveRange ar = active_range(g, -0.97, 0.41);
  CHECK(g.cell_hi(ar.first) > -0.97);
  CHECK(g.cell_lo(ar.first) <= -0.97);
  CHECK(g.cell_lo(ar.last) < 0.41);
  CHECK(g.cell_hi(ar.last) >= 0.41);
  const CellSpan c = cell_span(g, ar.last, -0.97, 0.41);
  CHECK(c.hi == 0.41);
  CHECK(c.centroid() < 0.41);
  CHECK(active_range(g, 0.3, 0.3).empty());
}

TEST_CASE("operator on zero and constant densities") {
  const Kernel k = Kernel::top_hat(1);
  const Grid grid = build_grid(4, 3, 0.05);
  const NonlocalOperator op(k, grid, 1.0);
  SimState s;
  s.g = -4;
  s.h = 4;
  s.u.assign(grid.nodes(), 0.0);
  for (double v : op.apply(s)) CHECK(v == 0.0);

  const ActiveRange ar = active_range(grid, s.g, s.h);
  for (int i = ar.first; i <= ar.last; ++i) s.u[i] = 0.7;
  const std::vector<double> r = op.apply(s);
  // Interior cell whose kernel reach lies inside (g, h).
  CHECK(std::abs(r[grid.cell_of(0.0)]) <= 1e-12);
  CHECK(std::abs(r[grid.cell_of(2.5)]) <= 1e-12);
  // Near the front mass is lost.
  CHECK(r[ar.last] < 0);
}

TEST_CASE("operator matches the dense quadrature oracle") {
  struct Case {
    Kernel k;
    std::vector<double> breaks;
  };
  const Case cases[] = {{Kernel::top_hat(0.5), {-0.5, 0.5}},
                        {Kernel::triangle(0.4), {-0.4, 0.4}},
                        {Kernel::truncated_gaussian(0.2, 0.6), {-0.6, 0.6}}};
  for (const Case& c : cases) {
    CAPTURE(c.k.name());
    const Grid grid = build_grid(1.5, 1.0, 0.05);
    const double g = -1.4731, h = 1.4217;  // about 60 cells, both ends clipped
    const NonlocalOperator op(c.k, grid, 1.3);
    const SimState s = random_state(grid, g, h, 11);
    const auto got = op.apply(s);
    const auto ref = dense_oracle(c.k, grid, 1.3, s, c.breaks);
    CHECK(active_range(grid, g, h).size() >= 58);
    double err = 0;
    for (size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got[i] - ref[i]));
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("operator is linear, sign preserving and symmetric") {
  const Kernel k = Kernel::triangle(0.6);
  const Grid grid = build_grid(2, 1, 0.04);
  const NonlocalOperator op(k, grid, 1.0);
  const double g = -1.83, h = 1.83;
  SimState a = random_state(grid, g, h, 1), b = random_state(grid, g, h, 2), c = a;
  for (size_t i = 0; i < c.u.size(); ++i) c.u[i] = 2.5 * a.u[i] - 0.75 * b.u[i];
  const auto ra = op.apply(a), rb = op.apply(b), rc = op.apply(c);
  for (size_t i = 0; i < rc.size(); ++i)
    CHECK(std::abs(rc[i] - (2.5 * ra[i] - 0.75 * rb[i])) <= 1e-12);

  // Zero cell inside a nonnegative density: the operator pushes it up.
  SimState z = a;
  const int i0 = grid.cell_of(0.3);
  z.u[i0] = 0;
  CHECK(op.apply(z)[i0] > 0);

  // Even density on a symmetric range.
  SimState e = a;
  const ActiveRange ar = active_range(grid, g, h);
  for (int i = ar.first; i <= ar.last; ++i) e.u[i] = std::cos(grid.node(i));
  const auto re = op.apply(e);
  for (int i = ar.first; i <= ar.last; ++i) CHECK(std::abs(re[i] - re[grid.n - i]) <= 1e-12);
}

TEST_CASE("cell-weighted operator sum equals mass minus both fluxes") {
  for (const Kernel& k : {Kernel::top_hat(1), Kernel::laplace(2, 3), Kernel::triangle(0.3)}) {
    const Grid grid = build_grid(2, 4, 0.05);
    const NonlocalOperator op(k, grid, 1.0);
    const SimState s = random_state(grid, -1.9123, 2.3456, 5);
    const auto r = op.apply(s);
    const ActiveRange ar = active_range(grid, s.g, s.h);
    double lhs = 0;
    for (int i = ar.first; i <= ar.last; ++i) lhs += cell_span(grid, i, s.g, s.h).length() * r[i];
    const double rhs = -(op.flux_left(s.u, s.g, s.h) + op.flux_right(s.u, s.g, s.h));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * total_mass(grid, s));
  }
}

TEST_CASE("boundary fluxes") {
  const Kernel k = Kernel::top_hat(1);
  const Grid grid = build_grid(1, 3, 2.0 / 80);
  const NonlocalOperator op(k, grid, 1.0);
  SimState s;
  s.g = -1;
  s.h = 1;
  s.u.assign(grid.nodes(), 0.0);
  CHECK(op.flux_left(s.u, s.g, s.h) == 0.0);
  CHECK(op.flux_right(s.u, s.g, s.h) == 0.0);

  const ActiveRange ar = active_range(grid, s.g, s.h);
  for (int i = ar.first; i <= ar.last; ++i) s.u[i] = 1.0;
  const double ref = oracle::pair_integral(k, -1, 1, 1, 3, {-1, 1});
  CHECK(std::abs(ref - 0.25) <= 1e-14);
  CHECK(std::abs(op.flux_right(s.u, s.g, s.h) - ref) <= 1e-10);
  CHECK(std::abs(op.flux_left(s.u, s.g, s.h) - ref) <= 1e-10);

  for (int i = ar.first; i <= ar.last; ++i) s.u[i] = 1.0 + std::cos(grid.node(i));
  CHECK(std::abs(op.flux_left(s.u, s.g, s.h) - op.flux_right(s.u, s.g, s.h)) <= 1e-12);
}
