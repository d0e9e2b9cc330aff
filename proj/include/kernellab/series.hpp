#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace kernellab {

// Closed interval [lo, hi] used to carry certified values of infinite sums
// and products.  All arithmetic here is outward-directed at the level of
// exact reals; double rounding is absorbed by the slack the callers keep on
// every tolerance.
struct Enclosure {
  double lo = 0.0;
  double hi = 0.0;

  Enclosure() = default;
  Enclosure(double l, double h) : lo(l), hi(h) {}
  static Enclosure point(double v) { return {v, v}; }

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  double abs_max() const { return std::max(std::abs(lo), std::abs(hi)); }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }

  Enclosure& operator+=(const Enclosure& o) {
    lo += o.lo;
    hi += o.hi;
    return *this;
  }
  friend Enclosure operator+(Enclosure a, const Enclosure& b) { return a += b; }

  friend Enclosure operator*(double s, const Enclosure& e) {
    if (s >= 0) return {s * e.lo, s * e.hi};
    return {s * e.hi, s * e.lo};
  }

  // Widen symmetrically by a nonnegative slack.
  Enclosure padded(double slack) const { return {lo - slack, hi + slack}; }
};

// Three-valued answer for questions the rule algebra cannot always decide.
enum class Tri { True, False, Unknown };

// Certified enclosure of sum_{j > J} A (j+s)^E Q^j with 0 < Q <= 1.
//
// Q == 1 requires E < -1 (otherwise the series diverges and the function
// returns an infinite enclosure).  The pure-power case uses Euler-Maclaurin
// with an explicit remainder bound; the geometric case sums terms until a
// geometric remainder bound closes.
Enclosure tail_power_geometric(double A, double E, double s, double Q, long J);

// One term family of the closed series algebra:
//   f(j) = A * (j + shift)^Es * j^Ep * Q^j,   0 < Q <= 1, shift >= 0.
// Sums, weight columns and point tails all reduce to short linear
// combinations of these.
struct TailTerm {
  double A = 0.0;
  double Es = 0.0;     // exponent on (j + shift)
  double shift = 0.0;  // >= 0
  double Ep = 0.0;     // exponent on j
  double Q = 1.0;

  double eval(long j) const;
  TailTerm scaled(double s) const;
  // Product of two terms; requires at most one distinct positive shift
  // between the factors (the algebra keeps a single shifted factor).
  friend TailTerm operator*(const TailTerm& a, const TailTerm& b);
};

// Does sum_j f(j) converge (A != 0)?  Exact classification.
bool tail_term_converges(const TailTerm& t);

// Certified enclosure of sum_{j > J} f(j); infinite enclosure on divergence.
Enclosure tail_term_sum(const TailTerm& t, long J);

// Convenience: certified sum_{j > J} of a linear combination.
Enclosure tail_terms_sum(const std::vector<TailTerm>& ts, long J);

// Certified enclosure of sum_{j > J} A (j+s)^E exp(-lam j^p), lam > 0, p > 0.
// A >= 0 required.  Scalar summation plus an incomplete-gamma integral bound.
Enclosure tail_power_exppow(double A, double E, double s, double lam, double p,
                            long J);

// Upper bound for sum_{nu > N} (nu+1)^{-r}.  Returns +inf when r <= 1.
double pg_weight_tail(double r, long N);

// Upper bound for sum_{nu > N} 2^{-r nu^b}, r > 0, b > 0, N >= 0.
double eg_weight_tail(double r, double b, long N);

// Upper bound for the upper incomplete gamma Gamma(s, x), s > 0, x > 0.
double upper_incomplete_gamma_bound(double s, double x);

}  // namespace kernellab
