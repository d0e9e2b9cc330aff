#include "kernellab/kernels1d.hpp"

#include <cmath>

#include "kernellab/errors.hpp"

namespace kernellab {

namespace {

void require_finite(double x, const char* who) {
  if (!std::isfinite(x)) throw domain_error(std::string(who) + ": non-finite input");
}

}  // namespace

UniHermiteKernel::UniHermiteKernel(WeightFamily w, long j,
                                   TruncationConfig trunc)
    : w_(std::move(w)), j_(j), trunc_(trunc) {
  if (j_ < 1) throw config_error("UniHermiteKernel: coordinate must be >= 1");
  // Column validity (the univariate conditions, not the tensor ones).
  switch (w_.rule()) {
    case WeightFamily::Rule::PG:
      if (!(w_.r_rule()(j_) > 0.5))
        throw config_error("UniHermiteKernel: PG needs r_j > 1/2");
      break;
    case WeightFamily::Rule::EG:
      if (!(w_.r_rule()(j_) > 0.0) || !(w_.b_rule()(j_) > 0.0))
        throw config_error("UniHermiteKernel: EG needs r_j, b_j > 0");
      break;
    default:
      break;
  }
}

UniHermiteKernel UniHermiteKernel::pg(double r, TruncationConfig trunc) {
  return UniHermiteKernel(WeightFamily::pg(SequenceRule::constant(r)), 1,
                          trunc);
}

UniHermiteKernel UniHermiteKernel::eg(double r, double b,
                                      TruncationConfig trunc) {
  return UniHermiteKernel(
      WeightFamily::eg(SequenceRule::constant(r), SequenceRule::constant(b)),
      1, trunc);
}

UniHermiteKernel UniHermiteKernel::mehler(double sigma,
                                          TruncationConfig trunc) {
  ShapeParams shape;
  shape.prefix = Eigen::VectorXd::Constant(1, sigma);
  shape.tail = SequenceRule::geometric(sigma, 0.5);
  return UniHermiteKernel(WeightFamily::mehler(std::move(shape)), 1, trunc);
}

KernelEvalResult hermite_column_eval(const WeightFamily& w, long j, double x,
                                     double y, double abs_tol,
                                     long max_terms) {
  require_finite(x, "hermite_column_eval");
  require_finite(y, "hermite_column_eval");
  const double cramer = std::exp((x * x + y * y) / 4.0);

  // Pick the truncation degree from the closed-form weight tails up front,
  // then run one tight summation loop.
  long N = -1;
  {
    long lo = 0;  // invariant: bound(lo) > goal or lo == 0 untested
    long hi = 1;
    auto bound_at = [&](long n) {
      return cramer * w.column_tail_upper(j, n + 1);
    };
    if (bound_at(0) <= abs_tol) {
      N = 0;
    } else {
      while (hi <= max_terms && bound_at(hi) > abs_tol) {
        lo = hi;
        hi *= 2;
      }
      if (hi > max_terms) {
        if (bound_at(max_terms) > abs_tol)
          throw truncation_error(
              "hermite_column_eval: abs_tol unreachable within max_terms",
              bound_at(max_terms));
        hi = max_terms;
      }
      while (lo + 1 < hi) {
        const long mid = lo + (hi - lo) / 2;
        if (bound_at(mid) > abs_tol)
          lo = mid;
        else
          hi = mid;
      }
      N = hi;
    }
  }

  double sum = w.alpha_inv(0, j);
  double hx0 = 1.0, hx1 = x, hy0 = 1.0, hy1 = y;
  for (long nu = 1; nu <= N; ++nu) {
    double hx, hy;
    if (nu == 1) {
      hx = hx1;
      hy = hy1;
    } else {
      const double rnu = std::sqrt((double)(nu - 1));
      const double dnu = std::sqrt((double)nu);
      hx = (x * hx1 - rnu * hx0) / dnu;
      hy = (y * hy1 - rnu * hy0) / dnu;
      hx0 = hx1;
      hx1 = hx;
      hy0 = hy1;
      hy1 = hy;
    }
    sum += w.alpha_inv(nu, j) * hx * hy;
  }
  const double bound = cramer * w.column_tail_upper(j, N + 1);
  return {sum, bound, N + 1};
}

KernelEvalResult hermite_kernel_eval(const UniHermiteKernel& k, double x,
                                     double y) {
  return hermite_column_eval(k.weights(), k.coordinate(), x, y,
                             k.trunc().abs_tol, k.trunc().max_terms);
}

KernelEvalResult centered_kernel_eval(const UniHermiteKernel& k, double x,
                                      double y) {
  KernelEvalResult r = hermite_kernel_eval(k, x, y);
  r.value -= k.alpha_inv(0);
  return r;
}

double gauss_kernel_eval(const UniGaussKernel& g, double x, double y) {
  require_finite(x, "gauss_kernel_eval");
  require_finite(y, "gauss_kernel_eval");
  const double d = x - y;
  return std::exp(-g.sigma * g.sigma * d * d);
}

double gauss_basis_eval(const UniGaussKernel& g, long nu, double x) {
  if (nu < 0) throw domain_error("gauss_basis_eval: nu must be >= 0");
  require_finite(x, "gauss_basis_eval");
  const double damp = std::exp(-g.sigma * g.sigma * x * x);
  if (nu == 0) return damp;
  if (x == 0.0) return 0.0;
  const double log_mag = -0.5 * std::lgamma((double)nu + 1.0) +
                         nu * (0.5 * std::log(2.0) + std::log(g.sigma) +
                               std::log(std::abs(x)));
  double sign = 1.0;
  if (x < 0.0 && nu % 2 == 1) sign = -1.0;
  return sign * std::exp(log_mag) * damp;
}

namespace {

// Upper bound for the Poisson-type tail exp(-t) sum_{nu>N} t^nu / nu!.
double poisson_tail(double t, long N) {
  if (t == 0.0) return 0.0;
  if ((double)(N + 2) <= t) return 1.0;  // bound useless this early
  const double log_lead =
      -t + (N + 1) * std::log(t) - std::lgamma((double)N + 2.0);
  const double geo = 1.0 / (1.0 - t / (double)(N + 2));
  return std::exp(log_lead) * geo;
}

}  // namespace

double gauss_series_check(const UniGaussKernel& g, double x, double y,
                          double tol) {
  require_finite(x, "gauss_series_check");
  require_finite(y, "gauss_series_check");
  if (!(tol > 0.0)) throw domain_error("gauss_series_check: tol must be > 0");
  const double tx = 2.0 * g.sigma * g.sigma * x * x;
  const double ty = 2.0 * g.sigma * g.sigma * y * y;

  long N = 0;
  while (std::sqrt(poisson_tail(tx, N) * poisson_tail(ty, N)) > tol) {
    if (++N > 100000)
      throw truncation_error("gauss_series_check: tail never certified",
                             std::sqrt(poisson_tail(tx, N) * poisson_tail(ty, N)));
  }

  double ex = gauss_basis_eval(g, 0, x);
  double ey = gauss_basis_eval(g, 0, y);
  double sum = ex * ey;
  const double fx = std::sqrt(2.0) * g.sigma * x;
  const double fy = std::sqrt(2.0) * g.sigma * y;
  for (long nu = 1; nu <= N; ++nu) {
    ex *= fx / std::sqrt((double)nu);
    ey *= fy / std::sqrt((double)nu);
    sum += ex * ey;
  }
  return std::abs(gauss_kernel_eval(g, x, y) - sum);
}

double rkhs_inner(const UniHermiteKernel& k, const FiniteExpansion& f,
                  const FiniteExpansion& g) {
  const long n = std::min(f.size(), g.size());
  double s = 0.0;
  for (long nu = 0; nu < n; ++nu) s += k.alpha(nu) * f[nu] * g[nu];
  return s;
}

FiniteExpansion kernel_section(const UniHermiteKernel& k, double x,
                               long max_degree) {
  const HermiteEval h = hermite_all(x, max_degree);
  FiniteExpansion c(max_degree + 1);
  for (long nu = 0; nu <= max_degree; ++nu)
    c[nu] = k.alpha_inv(nu) * h.values[nu];
  return c;
}

}  // namespace kernellab
