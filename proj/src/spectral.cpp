#include "frontier/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Sparse>

#include "frontier/errors.hpp"

namespace frontier {
namespace {

void check_inputs(double d, const Interval& interval, int n) {
  if (!(d > 0)) throw DomainError("spectral: d must be positive");
  if (!(interval.length() > 0) || !std::isfinite(interval.length()))
    throw DomainError("spectral: interval must be finite with positive length");
  if (n < 4) throw DomainError("spectral: need n >= 4 cells");
}

// W_k for k = 0..band on cells of width h.
std::vector<double> toeplitz_weights(const Kernel& kernel, double h, int n) {
  int band = n - 1;
  if (kernel.compact())
    band = std::min(band, static_cast<int>(std::ceil(kernel.radius() / h)) + 1);
  std::vector<double> w(band + 1);
  for (int k = 0; k <= band; ++k) w[k] = kernel.cell_pair_mass(0, h, k * h, (k + 1) * h) / h;
  return w;
}

// Matrix-vector product with the banded symmetric Toeplitz-plus-diagonal M.
struct BandedOperator {
  std::vector<double> w;  // already scaled by d
  double diag_shift = 0;  // a0 - d
  int n = 0;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    const int band = static_cast<int>(w.size()) - 1;
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      double s = (w[0] + diag_shift) * x[i];
      for (int k = 1; k <= band; ++k) {
        if (i - k >= 0) s += w[k] * x[i - k];
        if (i + k < n) s += w[k] * x[i + k];
      }
      y[i] = s;
    }
    return y;
  }

  double inf_norm() const {
    double best = 0;
    const int band = static_cast<int>(w.size()) - 1;
    for (int i = 0; i < n; ++i) {
      double s = std::abs(w[0] + diag_shift);
      for (int k = 1; k <= band; ++k) {
        if (i - k >= 0) s += std::abs(w[k]);
        if (i + k < n) s += std::abs(w[k]);
      }
      best = std::max(best, s);
    }
    return best;
  }

  // shift I - M, sparse.
  Eigen::SparseMatrix<double> shifted(double shift) const {
    const int band = static_cast<int>(w.size()) - 1;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<size_t>(n) * (2 * band + 1));
    for (int i = 0; i < n; ++i) {
      t.emplace_back(i, i, shift - (w[0] + diag_shift));
      for (int k = 1; k <= band; ++k) {
        if (i - k >= 0) t.emplace_back(i, i - k, -w[k]);
        if (i + k < n) t.emplace_back(i, i + k, -w[k]);
      }
    }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }
};

BandedOperator build(double a0, double d, const Interval& interval, const Kernel& kernel,
                     int n) {
  BandedOperator op;
  op.n = n;
  op.diag_shift = a0 - d;
  op.w = toeplitz_weights(kernel, interval.length() / n, n);
  for (double& v : op.w) v *= d;
  return op;
}

}  // namespace

Eigen::MatrixXd assemble_operator(double a0, double d, const Interval& interval,
                                  const Kernel& kernel, int n) {
  check_inputs(d, interval, n);
  const BandedOperator op = build(a0, d, interval, kernel, n);
  const int band = static_cast<int>(op.w.size()) - 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - band); j <= std::min(n - 1, i + band); ++j)
      m(i, j) = op.w[std::abs(i - j)];
  m.diagonal().array() += op.diag_shift;
  return m;
}

SpectralResult lambda_p(double a0, double d, const Interval& interval, const Kernel& kernel,
                        int n, const SpectralOptions& opts) {
  check_inputs(d, interval, n);
  const BandedOperator op = build(a0, d, interval, kernel, n);
  const double norm = op.inf_norm();
  const double res_target = 1e-10 * std::max(norm, 1e-300);
  const bool sparse = 2 * (static_cast<int>(op.w.size()) - 1) + 1 < n / 2;
  Eigen::MatrixXd dense;
  if (!sparse) dense = assemble_operator(a0, d, interval, kernel, n);

  Eigen::VectorXd phi = Eigen::VectorXd::Ones(n);
  double rq_prev = NAN, rq = 0, residual = INFINITY;
  int it = 0;
  for (; it <= opts.max_iterations; ++it) {
    const Eigen::VectorXd y = op.apply(phi);
    rq = phi.dot(y) / phi.dot(phi);
    residual = (y - rq * phi).lpNorm<Eigen::Infinity>() / phi.lpNorm<Eigen::Infinity>();
    const bool settled = std::isfinite(rq_prev) &&
                         std::abs(rq - rq_prev) <= opts.tol * std::max(1.0, std::abs(rq));
    if ((settled || residual == 0.0) && residual <= res_target) break;
    if (it == opts.max_iterations) break;
    rq_prev = rq;

    if (phi.minCoeff() <= 0)
      throw NoConvergence("lambda_p: iterate lost positivity (matrix too ill-conditioned)");
    const double cw = (y.array() / phi.array()).maxCoeff();
    const double shift = cw + std::max(1e-3 * (cw - rq), 1e-9 * std::max(norm, 1e-300));

    Eigen::VectorXd z;
    if (sparse) {
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(op.shifted(shift));
      if (solver.info() != Eigen::Success)
        throw NoConvergence("lambda_p: factorization of the shifted matrix failed");
      z = solver.solve(phi);
    } else {
      Eigen::MatrixXd s = -dense;
      s.diagonal().array() += shift;
      z = s.ldlt().solve(phi);
    }
    if (!z.allFinite()) throw NoConvergence("lambda_p: shifted solve produced non-finite values");
    phi = z / z.maxCoeff();
  }
  if (residual > res_target) {
    std::ostringstream os;
    os << "lambda_p: no convergence after " << opts.max_iterations
       << " iterations (residual " << residual << ")";
    throw NoConvergence(os.str());
  }
  if (phi.minCoeff() <= 0) throw NoConvergence("lambda_p: eigenvector is not positive");

  SpectralResult r;
  r.lambda_p = rq;
  r.interval = interval;
  r.n = n;
  r.iterations = it;
  r.residual = residual / phi.lpNorm<Eigen::Infinity>();
  r.matrix_norm = norm;
  const double h = interval.length() / n;
  const double top = phi.maxCoeff();
  for (int i = 0; i < n; ++i) {
    r.x.push_back(interval.lo + (i + 0.5) * h);
    r.phi.push_back(phi[i] / top);
  }
  return r;
}

double find_ell_star(double d, double fprime0, const Kernel& kernel, double tol, int n) {
  if (!(fprime0 > 0)) throw DomainError("find_ell_star: f'(0) must be positive");
  if (fprime0 >= d) {
    std::ostringstream os;
    os << "no critical length: f'(0) = " << fprime0 << " >= d = " << d
       << ", so spreading always happens";
    throw NoCriticalLength(os.str());
  }
  auto lam = [&](double ell) { return lambda_p(fprime0, d, {0, ell}, kernel, n).lambda_p; };

  const double scale = kernel.compact() ? kernel.radius() : 1.0;
  double lo = scale, hi = scale;
  double flo = lam(lo), fhi = flo;
  for (int k = 0; flo >= 0; ++k) {
    if (k > 60) throw BracketFailure("find_ell_star: lambda_p stays nonnegative at small lengths");
    hi = lo;
    fhi = flo;
    lo *= 0.5;
    flo = lam(lo);
  }
  for (int k = 0; fhi <= 0; ++k) {
    if (k > 40)
      throw BracketFailure("find_ell_star: lambda_p stays nonpositive; discretization too coarse");
    lo = hi;
    flo = fhi;
    hi *= 2;
    fhi = lam(hi);
  }
  // Monotone in length, so bisection keeps a valid bracket.
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double fm = lam(mid);
    if (std::abs(fm) <= tol || hi - lo <= 1e-14 * hi) return mid;
    (fm < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RefinementStudy refinement_study(double a0, double d, const Interval& interval,
                                 const Kernel& kernel, int n0, int levels) {
  if (levels < 2) throw DomainError("refinement_study: need at least two levels");
  RefinementStudy s;
  for (int k = 0; k < levels; ++k) {
    const int n = n0 << k;
    s.n.push_back(n);
    s.lambda.push_back(lambda_p(a0, d, interval, kernel, n).lambda_p);
    if (k > 0) s.change.push_back(std::abs(s.lambda[k] - s.lambda[k - 1]));
  }
  if (s.change.size() >= 2 && s.change.back() > 0)
    s.observed_order = std::log2(s.change[s.change.size() - 2] / s.change.back());
  return s;
}

}  // namespace frontier
