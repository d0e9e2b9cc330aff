#include "kernellab/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kernellab/errors.hpp"

namespace kernellab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Euler-Maclaurin (order 2) enclosure of sum_{j >= m} (j+s)^E for E < -1.
// The remainder bound |R| <= |E (E-1) (E-2)| (m+s)^(E-3) / 720 comes from
// |R_2| <= (2 zeta(4) / (2 pi)^4) * int_m^inf |f''''|.
Enclosure power_tail_from(long m, double E, double s) {
  const double t = static_cast<double>(m) + s;
  const double integral = std::pow(t, E + 1.0) / (-E - 1.0);
  const double half = 0.5 * std::pow(t, E);
  const double d1 = E * std::pow(t, E - 1.0);
  const double d3 = E * (E - 1.0) * (E - 2.0) * std::pow(t, E - 3.0);
  const double center = integral + half - d1 / 12.0 + d3 / 720.0;
  const double rad =
      std::abs(E * (E - 1.0) * (E - 2.0)) * std::pow(t, E - 3.0) / 720.0;
  return {center - rad, center + rad};
}

// Upper bound for int_m^inf t^E exp(-lam t^p) dt, valid for m >= 1.
double exppow_integral_bound(double m, double E, double lam, double p) {
  const double x = lam * std::pow(m, p);
  const double shape = (E + 1.0) / p;
  if (shape > 0.0) {
    return (1.0 / p) * std::pow(lam, -shape) *
           upper_incomplete_gamma_bound(shape, x);
  }
  // E <= -1: use t^E <= m^{E+1} t^{-1} on [m, inf) and
  // Gamma(0, x) <= exp(-x)/x.
  return std::pow(m, E + 1.0) * (1.0 / p) * std::exp(-x) / x;
}

}  // namespace

Enclosure tail_power_geometric(double A, double E, double s, double Q,
                               long J) {
  if (A == 0.0) return Enclosure::point(0.0);
  if (!(Q > 0.0 && Q <= 1.0))
    throw config_error("tail_power_geometric: Q must be in (0,1]");
  if (J < 0) J = 0;

  if (Q == 1.0) {
    if (E >= -1.0) {
      return A > 0 ? Enclosure(kInf, kInf) : Enclosure(-kInf, -kInf);
    }
    // Warm up with explicit terms so the Euler-Maclaurin remainder is small
    // even for small J or strongly negative E.
    long m = std::max<long>(
        J + 1, std::max<long>(40, 4 + (long)std::ceil(std::abs(E))));
    double partial = 0.0;
    for (long j = J + 1; j < m; ++j) partial += std::pow(j + s, E);
    Enclosure tail = power_tail_from(m, E, s);
    return A * (Enclosure::point(partial) + tail);
  }

  // Geometric factor: sum scalar terms until a geometric remainder closes.
  const double lnQ = std::log(Q);
  double acc = 0.0;
  long j = J + 1;
  const long max_iter = 400000;
  for (long it = 0; it < max_iter; ++it, ++j) {
    const double term = std::pow(j + s, E) * std::exp(lnQ * j);
    acc += term;
    double rho = Q;
    if (E > 0.0) rho *= std::pow((j + 1 + s) / (j + s), E);
    if (rho < 1.0) {
      const double rem = std::abs(term) * rho / (1.0 - rho);
      if (rem <= 1e-16 * (std::abs(acc) + 1e-300) || rem < 1e-300 ||
          it == max_iter - 1) {
        return A * Enclosure(acc - rem, acc + rem);
      }
    }
  }
  throw truncation_error("tail_power_geometric: no geometric closure", kInf);
}

double upper_incomplete_gamma_bound(double s, double x) {
  if (!(s > 0.0) || !(x > 0.0))
    throw config_error("upper_incomplete_gamma_bound: need s, x > 0");
  if (s <= 1.0) {
    // t^{s-1} <= x^{s-1} on [x, inf).
    return std::pow(x, s - 1.0) * std::exp(-x);
  }
  if (x >= 2.0 * (s - 1.0)) {
    // Integration by parts repeatedly; the parts are dominated by a
    // geometric with ratio (s-1)/x <= 1/2.
    return 2.0 * std::pow(x, s - 1.0) * std::exp(-x);
  }
  return std::tgamma(s);
}

Enclosure tail_power_exppow(double A, double E, double s, double lam, double p,
                            long J) {
  if (A < 0.0) throw config_error("tail_power_exppow: A must be >= 0");
  if (A == 0.0) return Enclosure::point(0.0);
  if (!(lam > 0.0) || !(p > 0.0))
    throw config_error("tail_power_exppow: need lam, p > 0");
  if (J < 0) J = 0;

  auto decreasing_from = [&](double t) {
    if (E <= 0.0) return true;
    return lam * p * std::pow(t, p) >= E;
  };

  double partial = 0.0;
  long j = J + 1;
  const long max_scalar = 200000;
  for (long it = 0; it < max_scalar; ++it, ++j) {
    const double term =
        std::pow(j + s, E) * std::exp(-lam * std::pow((double)j, p));
    partial += term;
    if (decreasing_from((double)j)) {
      const double m = (double)j;
      // (t+s)^E <= C t^E on [m, inf).
      const double C = (E > 0.0) ? std::pow((m + s) / m, E) : 1.0;
      const double rem = C * exppow_integral_bound(m, E, lam, p);
      if (rem <= 1e-15 * (partial + 1e-300) || it >= 64) {
        return A * Enclosure(partial, partial + rem);
      }
    }
  }
  throw truncation_error("tail_power_exppow: scalar budget exhausted", kInf);
}

double TailTerm::eval(long j) const {
  double v = A;
  if (Es != 0.0) v *= std::pow(j + shift, Es);
  if (Ep != 0.0) v *= std::pow((double)j, Ep);
  if (Q != 1.0) v *= std::exp(std::log(Q) * j);
  return v;
}

TailTerm TailTerm::scaled(double s) const {
  TailTerm t = *this;
  t.A *= s;
  return t;
}

TailTerm operator*(const TailTerm& a, const TailTerm& b) {
  TailTerm t;
  t.A = a.A * b.A;
  t.Q = a.Q * b.Q;
  t.Ep = a.Ep + b.Ep;
  // Zero-shift powers fold into the plain exponent; at most one genuinely
  // shifted factor may remain.
  double a_es = a.Es, b_es = b.Es;
  if (a_es != 0.0 && a.shift == 0.0) {
    t.Ep += a_es;
    a_es = 0.0;
  }
  if (b_es != 0.0 && b.shift == 0.0) {
    t.Ep += b_es;
    b_es = 0.0;
  }
  if (a_es != 0.0 && b_es != 0.0) {
    if (a.shift != b.shift)
      throw config_error("TailTerm: product of two distinct shifted factors");
    t.shift = a.shift;
    t.Es = a_es + b_es;
  } else if (a_es != 0.0) {
    t.shift = a.shift;
    t.Es = a_es;
  } else if (b_es != 0.0) {
    t.shift = b.shift;
    t.Es = b_es;
  }
  return t;
}

bool tail_term_converges(const TailTerm& t) {
  if (t.A == 0.0) return true;
  if (t.Q < 1.0) return true;
  return t.Es + t.Ep < -1.0;
}

Enclosure tail_term_sum(const TailTerm& t, long J) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (t.A == 0.0) return Enclosure::point(0.0);
  if (!tail_term_converges(t))
    return t.A > 0 ? Enclosure(inf, inf) : Enclosure(-inf, -inf);
  if (J < 0) J = 0;

  if (t.Q < 1.0) {
    // Scalar summation with geometric closure; bundle both powers into the
    // per-term evaluation and bound the ratio of consecutive terms.
    const double lnQ = std::log(t.Q);
    double acc = 0.0;
    long j = J + 1;
    for (long it = 0; it < 400000; ++it, ++j) {
      const double term = std::pow(j + t.shift, t.Es) *
                          std::pow((double)j, t.Ep) * std::exp(lnQ * j);
      acc += term;
      double rho = t.Q;
      if (t.Es > 0.0) rho *= std::pow((j + 1 + t.shift) / (j + t.shift), t.Es);
      if (t.Ep > 0.0) rho *= std::pow((j + 1.0) / j, t.Ep);
      if (rho < 1.0) {
        const double rem = std::abs(term) * rho / (1.0 - rho);
        if (rem <= 1e-16 * (std::abs(acc) + 1e-300) || rem < 1e-300 ||
            it == 399999) {
          return t.A * Enclosure(acc - rem, acc + rem);
        }
      }
    }
    throw truncation_error("tail_term_sum: geometric closure failed", inf);
  }

  if (t.Es == 0.0 || t.shift == 0.0) {
    return tail_power_geometric(t.A, t.Es + t.Ep, 0.0, 1.0, J);
  }
  if (t.Ep == 0.0) {
    return tail_power_geometric(t.A, t.Es, t.shift, 1.0, J);
  }

  // Mixed shifted and plain powers: push the explicit summation far enough
  // that bracketing the shifted factor into a plain power is tight, then
  // close with Euler-Maclaurin.
  const long m = J + 100000;
  double partial = 0.0;
  for (long j = J + 1; j <= m; ++j) partial += t.eval(j);
  const double lo_fac = std::pow(1.0 + t.shift / (m + 1), std::min(t.Es, 0.0));
  const double hi_fac = std::pow(1.0 + t.shift / (m + 1), std::max(t.Es, 0.0));
  Enclosure plain = tail_power_geometric(t.A, t.Es + t.Ep, 0.0, 1.0, m);
  Enclosure rest(std::min(lo_fac * plain.lo, hi_fac * plain.lo),
                 std::max(lo_fac * plain.hi, hi_fac * plain.hi));
  return Enclosure::point(partial) + rest;
}

Enclosure tail_terms_sum(const std::vector<TailTerm>& ts, long J) {
  Enclosure acc = Enclosure::point(0.0);
  for (const auto& t : ts) acc += tail_term_sum(t, J);
  return acc;
}

double pg_weight_tail(double r, long N) {
  if (r <= 1.0) return kInf;
  const double k0 = static_cast<double>(N) + 2.0;
  return std::pow(k0, -r) * (1.0 + k0 / (r - 1.0));
}

double eg_weight_tail(double r, double b, long N) {
  if (!(r > 0.0) || !(b > 0.0))
    throw config_error("eg_weight_tail: need r, b > 0");
  const double n1 = static_cast<double>(N) + 1.0;
  const double lead = std::exp2(-r * std::pow(n1, b));
  if (b >= 1.0) {
    const double q = std::exp2(-r);
    return lead / (1.0 - q);
  }
  const double lam = r * std::numbers::ln2;
  return lead + exppow_integral_bound(n1, 0.0, lam, b);
}

}  // namespace kernellab
