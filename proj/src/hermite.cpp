#include "kernellab/hermite.hpp"

#include <cmath>

#include "kernellab/errors.hpp"

namespace kernellab {

HermiteEval hermite_all(double x, long max_degree) {
  if (!std::isfinite(x)) throw domain_error("hermite_all: x must be finite");
  if (max_degree < 0) throw domain_error("hermite_all: max_degree must be >= 0");

  HermiteEval out;
  out.max_degree = max_degree;
  out.values.resize(max_degree + 1);
  out.values[0] = 1.0;
  if (max_degree == 0) return out;
  out.values[1] = x;
  for (long nu = 1; nu < max_degree; ++nu) {
    out.values[nu + 1] = (x * out.values[nu] -
                          std::sqrt((double)nu) * out.values[nu - 1]) /
                         std::sqrt((double)(nu + 1));
  }
  return out;
}

double hermite_closed_form(double x, long degree) {
  if (!std::isfinite(x)) throw domain_error("hermite_closed_form: x must be finite");
  if (degree < 0) throw domain_error("hermite_closed_form: degree must be >= 0");
  if (degree > 40)
    throw unsupported_error("hermite_closed_form: degree > 40 not supported");

  if (degree == 0) return 1.0;

  // Extended precision keeps the cancellation of the alternating sum well
  // below the 1e-10 agreement tolerance up to degree 40 on |x| <= 10.
  const long double xl = x;
  long double sum = 0.0L;
  if (degree <= 20) {
    long double fact_nu = 1.0L;
    for (long i = 2; i <= degree; ++i) fact_nu *= (long double)i;
    long double sqrt_fact = sqrtl(fact_nu);
    for (long k = 0; k <= degree / 2; ++k) {
      long double fact_k = 1.0L, fact_m = 1.0L;
      for (long i = 2; i <= k; ++i) fact_k *= (long double)i;
      for (long i = 2; i <= degree - 2 * k; ++i) fact_m *= (long double)i;
      long double term = powl(xl, (long double)(degree - 2 * k)) /
                         (powl(2.0L, (long double)k) * fact_k * fact_m);
      sum += (k % 2 == 0) ? term : -term;
    }
    return (double)(sqrt_fact * sum);
  }

  // Log-space magnitudes above degree 20.
  for (long k = 0; k <= degree / 2; ++k) {
    const long m = degree - 2 * k;
    long double lg = 0.5L * lgammal((long double)degree + 1.0L) -
                     (long double)k * logl(2.0L) -
                     lgammal((long double)k + 1.0L) -
                     lgammal((long double)m + 1.0L);
    long double mag = expl(lg);
    long double xpow = (m == 0) ? 1.0L : powl(fabsl(xl), (long double)m);
    long double sgn = (k % 2 == 0) ? 1.0L : -1.0L;
    if (x < 0 && m % 2 == 1) sgn = -sgn;
    sum += sgn * mag * xpow;
  }
  return (double)sum;
}

bool check_cramer(double x, long max_degree) {
  if (!std::isfinite(x)) throw domain_error("check_cramer: x must be finite");
  const double bound = std::exp(x * x / 4.0) * (1.0 + 1e-12);
  const HermiteEval h = hermite_all(x, max_degree);
  return (h.values.abs() <= bound).all();
}

bool check_growth_bound(double x, long max_degree) {
  if (!std::isfinite(x)) throw domain_error("check_growth_bound: x must be finite");
  const HermiteEval h = hermite_all(x, max_degree);
  const double log_step = std::log(2.0) + std::max(0.0, std::log(std::abs(x)));
  const double slack = std::log1p(1e-12);
  for (long nu = 0; nu <= max_degree; ++nu) {
    const double v = std::abs(h.values[nu]);
    if (v == 0.0) continue;
    if (std::log(v) > nu * log_step + slack) return false;
  }
  return true;
}

double scaled_sup_proxy(double x, long max_degree) {
  const HermiteEval h = hermite_all(x, max_degree);
  double best = 0.0;
  for (long nu = 1; nu <= max_degree; ++nu) {
    best = std::max(best, std::pow((double)nu, 0.25) * std::abs(h.values[nu]));
  }
  return best;
}

}  // namespace kernellab
