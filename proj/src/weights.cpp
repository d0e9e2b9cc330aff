#include "kernellab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kernellab/errors.hpp"

namespace kernellab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kJ0SearchCap = 1000000;  // (H3) certificate search cap
}  // namespace

// ---------------------------------------------------------------------------
// SequenceRule
// ---------------------------------------------------------------------------

SequenceRule SequenceRule::constant(double c) {
  SequenceRule r;
  r.kind = Kind::Constant;
  r.c = c;
  return r;
}

SequenceRule SequenceRule::power_law(double a, double p) {
  SequenceRule r;
  r.kind = Kind::PowerLaw;
  r.a = a;
  r.p = p;
  return r;
}

SequenceRule SequenceRule::log_linear(double a, double b, double shift) {
  if (shift < 0.0) throw config_error("SequenceRule: log_linear shift must be >= 0");
  SequenceRule r;
  r.kind = Kind::LogLinear;
  r.ll_a = a;
  r.ll_b = b;
  r.ll_s = shift;
  return r;
}

SequenceRule SequenceRule::geometric(double a, double q) {
  if (!(q > 0.0 && q < 1.0))
    throw config_error("SequenceRule: geometric ratio must be in (0,1)");
  SequenceRule r;
  r.kind = Kind::Geometric;
  r.g_a = a;
  r.g_q = q;
  return r;
}

SequenceRule SequenceRule::explicit_prefix(std::vector<double> values,
                                           SequenceRule continuation) {
  if (continuation.kind == Kind::Explicit)
    throw config_error("SequenceRule: nested explicit continuations");
  SequenceRule r;
  r.kind = Kind::Explicit;
  r.prefix = std::move(values);
  r.cont = std::make_shared<SequenceRule>(std::move(continuation));
  return r;
}

double SequenceRule::operator()(long j) const {
  if (j < 1) throw domain_error("SequenceRule: j must be >= 1");
  switch (kind) {
    case Kind::Constant:
      return c;
    case Kind::PowerLaw:
      return a * std::pow((double)j, p);
    case Kind::LogLinear:
      return ll_a + ll_b * std::log2((double)j + ll_s);
    case Kind::Geometric:
      return g_a * std::exp(std::log(g_q) * j);
    case Kind::Explicit:
      if (j <= (long)prefix.size()) return prefix[j - 1];
      return (*cont)(j);
  }
  return 0.0;
}

Tri SequenceRule::all_greater(double thr) const {
  switch (kind) {
    case Kind::Constant:
      return c > thr ? Tri::True : Tri::False;
    case Kind::PowerLaw: {
      if (a == 0.0 || p == 0.0)
        return (operator()(1) > thr) ? Tri::True : Tri::False;
      if (a > 0.0) {
        if (p > 0.0) return a > thr ? Tri::True : Tri::False;  // increasing
        return thr <= 0.0 ? Tri::True : Tri::False;  // decreasing, inf 0
      }
      if (p > 0.0) return Tri::False;                // decreasing to -inf
      return a > thr ? Tri::True : Tri::False;       // increasing, min at j=1
    }
    case Kind::LogLinear: {
      if (ll_b > 0.0) return operator()(1) > thr ? Tri::True : Tri::False;
      if (ll_b < 0.0) return Tri::False;
      return operator()(1) > thr ? Tri::True : Tri::False;
    }
    case Kind::Geometric: {
      if (g_a == 0.0) return 0.0 > thr ? Tri::True : Tri::False;
      if (g_a > 0.0) return thr <= 0.0 ? Tri::True : Tri::False;
      return operator()(1) > thr ? Tri::True : Tri::False;
    }
    case Kind::Explicit: {
      for (double v : prefix)
        if (!(v > thr)) return Tri::False;
      return cont->all_greater(thr);  // conservative for early indices
    }
  }
  return Tri::Unknown;
}

double SequenceRule::inf_from(long J) const {
  const long j1 = J + 1;
  switch (kind) {
    case Kind::Constant:
      return c;
    case Kind::PowerLaw:
      if (a == 0.0 || p == 0.0) return operator()(1);
      if (a > 0.0) return p > 0.0 ? operator()(j1) : 0.0;
      return p > 0.0 ? -kInf : operator()(j1);
    case Kind::LogLinear:
      if (ll_b > 0.0) return operator()(j1);
      if (ll_b < 0.0) return -kInf;
      return ll_a;
    case Kind::Geometric:
      if (g_a == 0.0) return 0.0;
      return g_a > 0.0 ? 0.0 : operator()(j1);
    case Kind::Explicit: {
      double best = kInf;
      for (long j = std::max(1L, j1); j <= (long)prefix.size(); ++j)
        best = std::min(best, prefix[j - 1]);
      best = std::min(best, cont->inf_from(std::max(J, (long)prefix.size())));
      return best;
    }
  }
  return -kInf;
}

double SequenceRule::sup_from(long J) const {
  const long j1 = J + 1;
  switch (kind) {
    case Kind::Constant:
      return c;
    case Kind::PowerLaw:
      if (a == 0.0 || p == 0.0) return operator()(1);
      if (a > 0.0) return p > 0.0 ? kInf : operator()(j1);
      return p > 0.0 ? operator()(j1) : 0.0;
    case Kind::LogLinear:
      if (ll_b > 0.0) return kInf;
      if (ll_b < 0.0) return operator()(j1);
      return ll_a;
    case Kind::Geometric:
      if (g_a == 0.0) return 0.0;
      return g_a > 0.0 ? operator()(j1) : 0.0;
    case Kind::Explicit: {
      double best = -kInf;
      for (long j = std::max(1L, j1); j <= (long)prefix.size(); ++j)
        best = std::max(best, prefix[j - 1]);
      best = std::max(best, cont->sup_from(std::max(J, (long)prefix.size())));
      return best;
    }
  }
  return kInf;
}

std::optional<TailTerm> SequenceRule::as_tail_term(long from) const {
  TailTerm t;
  switch (kind) {
    case Kind::Constant:
      t.A = c;
      return t;
    case Kind::PowerLaw:
      t.A = a;
      t.Ep = p;
      return t;
    case Kind::Geometric:
      t.A = g_a;
      t.Q = g_q;
      return t;
    case Kind::LogLinear:
      return std::nullopt;
    case Kind::Explicit:
      if (from >= (long)prefix.size()) return cont->as_tail_term(from);
      return std::nullopt;
  }
  return std::nullopt;
}

Tri SequenceRule::abs_summable() const {
  switch (kind) {
    case Kind::Constant:
      return c == 0.0 ? Tri::True : Tri::False;
    case Kind::PowerLaw:
      if (a == 0.0) return Tri::True;
      return p < -1.0 ? Tri::True : Tri::False;
    case Kind::LogLinear:
      return (ll_a == 0.0 && ll_b == 0.0) ? Tri::True : Tri::False;
    case Kind::Geometric:
      return Tri::True;
    case Kind::Explicit:
      return cont->abs_summable();
  }
  return Tri::Unknown;
}

Enclosure SequenceRule::abs_tail(long J) const {
  if (kind == Kind::Explicit) {
    Enclosure e = Enclosure::point(0.0);
    for (long j = J + 1; j <= (long)prefix.size(); ++j)
      e += Enclosure::point(std::abs(prefix[j - 1]));
    return e + cont->abs_tail(std::max(J, (long)prefix.size()));
  }
  auto t = as_tail_term(J);
  if (!t) throw unsupported_error("SequenceRule: no closed tail form");
  t->A = std::abs(t->A);
  return tail_term_sum(*t, J);
}

Enclosure SequenceRule::signed_tail(long J) const {
  if (kind == Kind::Explicit) {
    Enclosure e = Enclosure::point(0.0);
    for (long j = J + 1; j <= (long)prefix.size(); ++j)
      e += Enclosure::point(prefix[j - 1]);
    return e + cont->signed_tail(std::max(J, (long)prefix.size()));
  }
  auto t = as_tail_term(J);
  if (!t) throw unsupported_error("SequenceRule: no closed tail form");
  return tail_term_sum(*t, J);
}

Enclosure SequenceRule::square_tail(long J) const {
  if (kind == Kind::Explicit) {
    Enclosure e = Enclosure::point(0.0);
    for (long j = J + 1; j <= (long)prefix.size(); ++j)
      e += Enclosure::point(prefix[j - 1] * prefix[j - 1]);
    return e + cont->square_tail(std::max(J, (long)prefix.size()));
  }
  auto t = as_tail_term(J);
  if (!t) throw unsupported_error("SequenceRule: no closed tail form");
  return tail_term_sum((*t) * (*t), J);
}

Tri SequenceRule::two_pow_neg_summable() const {
  switch (kind) {
    case Kind::Constant:
      return Tri::False;
    case Kind::PowerLaw:
      return (a > 0.0 && p > 0.0) ? Tri::True : Tri::False;
    case Kind::LogLinear:
      return ll_b > 1.0 ? Tri::True : Tri::False;
    case Kind::Geometric:
      return Tri::False;  // terms tend to 1
    case Kind::Explicit:
      return cont->two_pow_neg_summable();
  }
  return Tri::Unknown;
}

Enclosure SequenceRule::two_pow_neg_tail(long J) const {
  switch (kind) {
    case Kind::Constant:
    case Kind::Geometric:
      return {kInf, kInf};
    case Kind::PowerLaw:
      if (!(a > 0.0 && p > 0.0)) return {kInf, kInf};
      return tail_power_exppow(1.0, 0.0, 0.0, a * std::numbers::ln2, p, J);
    case Kind::LogLinear: {
      if (!(ll_b > 1.0)) return {kInf, kInf};
      TailTerm t;
      t.A = std::exp2(-ll_a);
      t.Es = -ll_b;
      t.shift = ll_s;
      return tail_term_sum(t, J);
    }
    case Kind::Explicit: {
      Enclosure e = Enclosure::point(0.0);
      for (long j = J + 1; j <= (long)prefix.size(); ++j)
        e += Enclosure::point(std::exp2(-prefix[j - 1]));
      return e + cont->two_pow_neg_tail(std::max(J, (long)prefix.size()));
    }
  }
  return {kInf, kInf};
}

std::optional<double> SequenceRule::liminf_over_ln() const {
  switch (kind) {
    case Kind::Constant:
      return 0.0;
    case Kind::PowerLaw:
      if (a == 0.0 || p == 0.0) return 0.0;
      if (p > 0.0) return a > 0.0 ? kInf : -kInf;
      return 0.0;
    case Kind::LogLinear:
      return ll_b / std::numbers::ln2;
    case Kind::Geometric:
      return 0.0;
    case Kind::Explicit:
      return cont->liminf_over_ln();
  }
  return std::nullopt;
}

std::optional<long> SequenceRule::eventually_at_least(double thr,
                                                      long cap) const {
  switch (kind) {
    case Kind::Constant:
      return c >= thr ? std::optional<long>(1) : std::nullopt;
    case Kind::PowerLaw: {
      if (a == 0.0 || p == 0.0)
        return operator()(1) >= thr ? std::optional<long>(1) : std::nullopt;
      const bool increasing = (a > 0.0) == (p > 0.0);
      if (increasing) {
        for (long j = 1; j <= cap; j = std::max(j + 1, j + j / 8))
          if (operator()(j) >= thr) {
            // walk back to the smallest index
            long lo = j;
            while (lo > 1 && operator()(lo - 1) >= thr) --lo;
            return lo;
          }
        return std::nullopt;
      }
      // decreasing: limit is 0 (a>0,p<0) or -inf
      if (a > 0.0 && p < 0.0) return thr <= 0.0 ? std::optional<long>(1) : std::nullopt;
      return std::nullopt;
    }
    case Kind::LogLinear: {
      if (ll_b > 0.0) {
        const double arg = (thr - ll_a) / ll_b;
        double j0 = std::exp2(arg) - ll_s;
        long j = std::max(1L, (long)std::ceil(j0));
        while (j <= cap && operator()(j) < thr) ++j;
        if (j > cap) return std::nullopt;
        while (j > 1 && operator()(j - 1) >= thr) --j;
        return j;
      }
      return operator()(1) >= thr && ll_b == 0.0 ? std::optional<long>(1)
                                             : std::nullopt;
    }
    case Kind::Geometric: {
      if (g_a > 0.0) return thr <= 0.0 ? std::optional<long>(1) : std::nullopt;
      if (g_a == 0.0) return thr <= 0.0 ? std::optional<long>(1) : std::nullopt;
      // increasing toward 0 from below
      for (long j = 1; j <= cap; ++j)
        if (operator()(j) >= thr) return j;
      return std::nullopt;
    }
    case Kind::Explicit: {
      auto c0 = cont->eventually_at_least(thr, cap);
      if (!c0) return std::nullopt;
      long j0 = std::max(*c0, (long)prefix.size() + 1);
      while (j0 > 1 && operator()(j0 - 1) >= thr) --j0;
      return j0;
    }
  }
  return std::nullopt;
}

std::optional<long> SequenceRule::eventually_dominates_log(double coef,
                                                           long cap) const {
  if (coef <= 0.0) {
    return eventually_at_least(0.0, cap);
  }
  switch (kind) {
    case Kind::Constant:
    case Kind::Geometric:
      return std::nullopt;
    case Kind::PowerLaw: {
      if (!(a > 0.0 && p > 0.0)) return std::nullopt;
      for (long j = 1; j <= cap; ++j) {
        const bool value_ok = operator()(j) >= coef * std::log2((double)j);
        const bool slope_ok =
            a * p * std::pow((double)j, p) * std::numbers::ln2 >= coef;
        if (value_ok && slope_ok) return j;
      }
      return std::nullopt;
    }
    case Kind::LogLinear: {
      if (ll_b > coef) {
        long j0 = 1;
        if (ll_a < 0.0)
          j0 = std::max(1L, (long)std::ceil(std::exp2(-ll_a / (ll_b - coef))));
        if (j0 > cap) return std::nullopt;
        return j0;
      }
      if (ll_b == coef) return ll_a >= 0.0 ? std::optional<long>(1) : std::nullopt;
      return std::nullopt;
    }
    case Kind::Explicit: {
      auto c0 = cont->eventually_dominates_log(coef, cap);
      if (!c0) return std::nullopt;
      long j0 = std::max(*c0, (long)prefix.size() + 1);
      while (j0 > 1 && operator()(j0 - 1) >= coef * std::log2((double)(j0 - 1)))
        --j0;
      return j0;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ShapeParams
// ---------------------------------------------------------------------------

double ShapeParams::sigma(long j) const {
  if (j < 1) throw domain_error("ShapeParams: j must be >= 1");
  if (j <= prefix.size()) return prefix[j - 1];
  return tail(j);
}

std::optional<TailTerm> ShapeParams::sq_tail_term(long from) const {
  if (from < prefix_len()) return std::nullopt;
  auto t = tail.as_tail_term(from);
  if (!t) return std::nullopt;
  return (*t) * (*t);
}

Tri ShapeParams::sum_sq_summable() const {
  auto t = sq_tail_term(std::max<long>(prefix_len(), 8));
  if (!t) return Tri::Unknown;
  return tail_term_converges(*t) ? Tri::True : Tri::False;
}

Enclosure ShapeParams::sq_tail(long J) const {
  Enclosure e = Enclosure::point(0.0);
  long base = J;
  if (J < prefix_len()) {
    for (long j = J + 1; j <= prefix_len(); ++j)
      e += Enclosure::point(sigma(j) * sigma(j));
    base = prefix_len();
  }
  auto t = sq_tail_term(base);
  if (!t) throw unsupported_error("ShapeParams: tail kind has no closed sum");
  return e + tail_term_sum(*t, base);
}

// ---------------------------------------------------------------------------
// WeightFamily construction
// ---------------------------------------------------------------------------

WeightFamily WeightFamily::pg(SequenceRule r) {
  WeightFamily w;
  w.rule_ = Rule::PG;
  w.r_ = std::move(r);
  return w;
}

WeightFamily WeightFamily::pg(SequenceRule r, SequenceRule alpha0_dev) {
  WeightFamily w = pg(std::move(r));
  w.alpha0_dev_ = std::move(alpha0_dev);
  return w;
}

WeightFamily WeightFamily::eg(SequenceRule r, SequenceRule b) {
  WeightFamily w;
  w.rule_ = Rule::EG;
  w.r_ = std::move(r);
  w.b_ = std::move(b);
  return w;
}

WeightFamily WeightFamily::eg(SequenceRule r, SequenceRule b,
                              SequenceRule alpha0_dev) {
  WeightFamily w = eg(std::move(r), std::move(b));
  w.alpha0_dev_ = std::move(alpha0_dev);
  return w;
}

WeightFamily WeightFamily::mehler(ShapeParams shape) {
  for (long j = 1; j <= shape.prefix_len(); ++j)
    if (!(shape.sigma(j) > 0.0))
      throw config_error("WeightFamily: shape prefix must be positive");
  if (shape.tail.all_greater(0.0) == Tri::False)
    throw config_error("WeightFamily: shape tail must be positive");
  WeightFamily w;
  w.rule_ = Rule::MehlerFromSigma;
  w.shape_ = std::move(shape);
  return w;
}

WeightFamily WeightFamily::explicit_table(
    std::vector<std::vector<double>> columns, WeightFamily continuation) {
  for (const auto& col : columns)
    for (double v : col)
      if (!(v > 0.0))
        throw config_error("WeightFamily: explicit weights must be positive");
  WeightFamily w;
  w.rule_ = Rule::ExplicitTable;
  w.columns_ = std::move(columns);
  w.cont_ = std::make_shared<WeightFamily>(std::move(continuation));
  return w;
}

bool WeightFamily::alpha0_is_one() const {
  if (alpha0_forced_one_) return true;
  switch (rule_) {
    case Rule::PG:
    case Rule::EG:
      return !alpha0_dev_.has_value();
    case Rule::MehlerFromSigma:
      return false;
    case Rule::ExplicitTable:
      return false;  // conservatively treated as general
  }
  return false;
}

WeightFamily WeightFamily::primed() const {
  WeightFamily w = *this;
  w.alpha0_forced_one_ = true;
  w.alpha0_dev_.reset();
  w.validation_.reset();
  return w;
}

double WeightFamily::mehler_beta(long j) const {
  if (rule_ != Rule::MehlerFromSigma)
    throw unsupported_error("WeightFamily: mehler_beta on non-Mehler rule");
  return mehler_from_sigma(shape_.sigma(j)).beta;
}

double WeightFamily::log2_alpha(long nu, long j) const {
  if (nu < 0 || j < 1) throw domain_error("WeightFamily: need nu >= 0, j >= 1");
  if (rule_ == Rule::ExplicitTable) {
    if (nu == 0 && alpha0_forced_one_) return 0.0;
    if (j <= (long)columns_.size() && nu < (long)columns_[j - 1].size())
      return std::log2(columns_[j - 1][nu]);
    return cont_->log2_alpha(nu, j);
  }
  if (nu == 0) {
    if (alpha0_forced_one_) return 0.0;
    if (rule_ == Rule::MehlerFromSigma)
      return -std::log2(1.0 - mehler_beta(j));
    if (alpha0_dev_) return std::log2(1.0 + (*alpha0_dev_)(j));
    return 0.0;
  }
  switch (rule_) {
    case Rule::PG:
      return r_(j) * std::log2((double)nu + 1.0);
    case Rule::EG:
      return r_(j) * std::pow((double)nu, b_(j));
    case Rule::MehlerFromSigma: {
      const double beta = mehler_beta(j);
      return -std::log2(1.0 - beta) - (double)nu * std::log2(beta);
    }
    default:
      break;
  }
  throw config_error("WeightFamily: unreachable rule");
}

double WeightFamily::alpha(long nu, long j) const {
  return std::exp2(log2_alpha(nu, j));
}

double WeightFamily::alpha_inv(long nu, long j) const {
  return std::exp2(-log2_alpha(nu, j));
}

// ---------------------------------------------------------------------------
// Column tails
// ---------------------------------------------------------------------------

double WeightFamily::column_tail_upper(long j, long from_nu) const {
  if (from_nu < 1) throw domain_error("column_tail_upper: from_nu >= 1");
  switch (rule_) {
    case Rule::PG:
      return pg_weight_tail(r_(j), from_nu - 1);
    case Rule::EG:
      return eg_weight_tail(r_(j), b_(j), from_nu - 1);
    case Rule::MehlerFromSigma: {
      const double beta = mehler_beta(j);
      return std::pow(beta, (double)from_nu);
    }
    case Rule::ExplicitTable: {
      if (j > (long)columns_.size())
        return cont_->column_tail_upper(j, from_nu);
      const auto& col = columns_[j - 1];
      double s = 0.0;
      for (long nu = from_nu; nu < (long)col.size(); ++nu) s += 1.0 / col[nu];
      return s + cont_->column_tail_upper(
                     j, std::max(from_nu, (long)col.size()));
    }
  }
  return kInf;
}

double WeightFamily::column_sum_upper(long j) const {
  double s = 0.0;
  const long K = 64;
  for (long nu = 1; nu <= K; ++nu) s += alpha_inv(nu, j);
  return s + column_tail_upper(j, K + 1);
}

namespace {

// Interval product of a scalar bracket [flo,fhi] (0 <= flo <= fhi) with an
// enclosure.
Enclosure bracket_scale(double flo, double fhi, const Enclosure& e) {
  double candidates[4] = {flo * e.lo, flo * e.hi, fhi * e.lo, fhi * e.hi};
  return {*std::min_element(candidates, candidates + 4),
          *std::max_element(candidates, candidates + 4)};
}

// Shift-free magnitude majorant: |t(j)| <= A' j^{E'} Q^j for j >= 1.
TailTerm fold_shift_upper(const TailTerm& t) {
  TailTerm u;
  u.A = std::abs(t.A);
  u.Q = t.Q;
  u.Ep = t.Ep + t.Es;
  if (t.Es > 0.0) u.A *= std::pow(1.0 + t.shift, t.Es);
  return u;
}

}  // namespace

Enclosure WeightFamily::weighted_column_tail(long nu, const TailTerm& point,
                                             long J) const {
  if (nu < 1) throw domain_error("weighted_column_tail: nu >= 1");
  switch (rule_) {
    case Rule::PG:
    case Rule::EG: {
      const double g = (rule_ == Rule::PG)
                           ? std::log2((double)nu + 1.0)
                           : std::pow((double)nu, b_.inf_from(J));
      // EG with non-constant b: use the infimum exponent for an upper
      // bracket and the supremum for a lower one.
      const double g_hi = (rule_ == Rule::PG)
                              ? g
                              : std::pow((double)nu, b_.sup_from(J));
      if (r_.kind == SequenceRule::Kind::LogLinear) {
        TailTerm w_hi;  // alpha_inv upper: exponent uses g (smallest power)
        w_hi.A = std::exp2(-r_.ll_a * g);
        w_hi.Es = -r_.ll_b * g;
        w_hi.shift = r_.ll_s;
        TailTerm w_lo;
        w_lo.A = std::exp2(-r_.ll_a * g_hi);
        w_lo.Es = -r_.ll_b * g_hi;
        w_lo.shift = r_.ll_s;
        Enclosure hi = tail_term_sum(w_hi * point, J);
        Enclosure lo = tail_term_sum(w_lo * point, J);
        return {std::min(lo.lo, hi.lo), std::max(lo.hi, hi.hi)};
      }
      if (r_.kind == SequenceRule::Kind::PowerLaw && r_.a > 0.0 && r_.p > 0.0) {
        // Magnitude bound only.
        const double lam = r_.a * g * std::numbers::ln2;
        const TailTerm mag_term = fold_shift_upper(point);
        Enclosure mag = tail_power_exppow(mag_term.A, mag_term.Ep, 0.0, lam,
                                          r_.p, J);
        return point.A >= 0 ? Enclosure(0.0, mag.hi) : Enclosure(-mag.hi, 0.0);
      }
      throw unsupported_error("weighted_column_tail: r-rule not supported");
    }
    case Rule::MehlerFromSigma: {
      auto st = shape_.sq_tail_term(J);
      if (!st)
        throw unsupported_error("weighted_column_tail: sigma tail unsupported");
      if (J < shape_.prefix_len())
        throw domain_error("weighted_column_tail: J must cover the prefix");
      // beta_j = theta_j * 2 sigma_j^2 with theta_j in [1 - 4 sbar^2, 1].
      const double sbar2 = st->eval(J + 1) < 0 ? 0.0 : st->eval(J + 1);
      // sigma tail must be nonincreasing for this bracket; all supported
      // kinds are.
      const double theta_lo = std::max(0.0, 1.0 - 4.0 * sbar2);
      // alpha_inv = (1-beta) beta^nu: (1-beta) in [1-2 sbar2, 1].
      const double one_minus_beta_lo = std::max(0.0, 1.0 - 2.0 * sbar2);
      TailTerm beta_hi = st->scaled(2.0);  // 2 sigma^2
      // beta^nu upper term:
      TailTerm bpow;
      bpow.A = std::pow(beta_hi.A, (double)nu);
      bpow.Es = beta_hi.Es * nu;
      bpow.shift = beta_hi.shift;
      bpow.Ep = beta_hi.Ep * nu;
      bpow.Q = std::pow(beta_hi.Q, (double)nu);
      Enclosure base = tail_term_sum(bpow * point, J);
      const double flo = one_minus_beta_lo * std::pow(theta_lo, (double)nu);
      return bracket_scale(flo, 1.0, base);
    }
    case Rule::ExplicitTable: {
      Enclosure e = Enclosure::point(0.0);
      long base = J;
      if (J < (long)columns_.size()) {
        for (long j = J + 1; j <= (long)columns_.size(); ++j)
          e += Enclosure::point(alpha_inv(nu, j) * point.eval(j));
        base = (long)columns_.size();
      }
      return e + cont_->weighted_column_tail(nu, point, base);
    }
  }
  throw config_error("weighted_column_tail: unreachable");
}

double WeightFamily::block_tail_upper(long from_nu, const TailTerm& bound,
                                      long J) const {
  if (from_nu < 1) throw domain_error("block_tail_upper: from_nu >= 1");
  if (bound.A < 0.0) throw domain_error("block_tail_upper: bound must be >= 0");
  switch (rule_) {
    case Rule::PG: {
      // sum_{nu>=f} (nu+1)^{-r} <= (f+2) (f+1)^{-r} for r >= 2.
      if (r_.inf_from(J) < 2.0)
        throw unsupported_error("block_tail_upper: need r_j >= 2 beyond J");
      const double g = std::log2((double)from_nu + 1.0);
      if (r_.kind == SequenceRule::Kind::LogLinear) {
        TailTerm w;
        w.A = (from_nu + 2.0) * std::exp2(-r_.ll_a * g);
        w.Es = -r_.ll_b * g;
        w.shift = r_.ll_s;
        return tail_term_sum(w * bound, J).hi;
      }
      if (r_.kind == SequenceRule::Kind::PowerLaw && r_.a > 0 && r_.p > 0) {
        const double lam = r_.a * g * std::numbers::ln2;
        const TailTerm m = fold_shift_upper(bound);
        return tail_power_exppow((from_nu + 2.0) * m.A, m.Ep, 0.0, lam, r_.p,
                                 J)
            .hi;
      }
      throw unsupported_error("block_tail_upper: r-rule not supported");
    }
    case Rule::EG: {
      if (r_.inf_from(J) < 1.0)
        throw unsupported_error("block_tail_upper: need r_j >= 1 beyond J");
      const double bhat = b_.inf_from(J);
      if (!(bhat > 0.0))
        throw unsupported_error("block_tail_upper: need inf b > 0");
      const double f = (double)from_nu;
      const double g = std::pow(f, bhat);
      const double C = 1.0 + std::exp2(g) * eg_weight_tail(1.0, bhat, from_nu);
      if (r_.kind == SequenceRule::Kind::LogLinear) {
        TailTerm w;
        w.A = C * std::exp2(-r_.ll_a * g);
        w.Es = -r_.ll_b * g;
        w.shift = r_.ll_s;
        return tail_term_sum(w * bound, J).hi;
      }
      if (r_.kind == SequenceRule::Kind::PowerLaw && r_.a > 0 && r_.p > 0) {
        const double lam = r_.a * g * std::numbers::ln2;
        const TailTerm m = fold_shift_upper(bound);
        return tail_power_exppow(C * m.A, m.Ep, 0.0, lam, r_.p, J).hi;
      }
      throw unsupported_error("block_tail_upper: r-rule not supported");
    }
    case Rule::MehlerFromSigma: {
      // sum_{nu>=f} (1-b) b^nu = b^f <= (2 sigma^2)^f
      auto st = shape_.sq_tail_term(std::max(J, shape_.prefix_len()));
      if (!st) throw unsupported_error("block_tail_upper: sigma tail unsupported");
      long base = std::max(J, shape_.prefix_len());
      double explicit_part = 0.0;
      for (long j = J + 1; j <= base; ++j)
        explicit_part += column_tail_upper(j, from_nu) * bound.eval(j);
      TailTerm bpow;
      bpow.A = std::pow(2.0 * st->A, (double)from_nu);
      bpow.Es = st->Es * from_nu;
      bpow.shift = st->shift;
      bpow.Ep = st->Ep * from_nu;
      bpow.Q = std::pow(st->Q, (double)from_nu);
      return explicit_part + tail_term_sum(bpow * bound, base).hi;
    }
    case Rule::ExplicitTable: {
      double s = 0.0;
      long base = J;
      if (J < (long)columns_.size()) {
        for (long j = J + 1; j <= (long)columns_.size(); ++j)
          s += column_tail_upper(j, from_nu) * bound.eval(j);
        base = (long)columns_.size();
      }
      return s + cont_->block_tail_upper(from_nu, bound, base);
    }
  }
  throw config_error("block_tail_upper: unreachable");
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

Tri h2_of_dev(const std::optional<SequenceRule>& dev) {
  if (!dev) return Tri::True;
  Tri s = dev->abs_summable();
  if (s == Tri::False) return Tri::False;
  Tri pos = dev->all_greater(-1.0);  // alpha0 > 0
  if (pos == Tri::False) return Tri::False;
  if (s == Tri::Unknown || pos == Tri::Unknown) return Tri::Unknown;
  return Tri::True;
}

}  // namespace

ValidationResult validate_weights(const WeightFamily& w) {
  if (w.validation_) return *w.validation_;
  ValidationResult v;
  std::ostringstream cert;

  switch (w.rule()) {
    case WeightFamily::Rule::PG: {
      const auto& r = w.r_rule();
      v.h1 = r.all_greater(0.5);
      cert << "(H1) PG: all r_j > 1/2 "
           << (v.h1 == Tri::True ? "certified" : "FAILED")
           << "; column sums are p-series with exponent r_j + 1/2 > 1.\n";
      v.h2 = w.alpha0_is_one() ? Tri::True : h2_of_dev(
          w.alpha0_dev() ? std::optional<SequenceRule>(*w.alpha0_dev())
                         : std::nullopt);
      Tri g61 = r.two_pow_neg_summable();
      auto j0 = r.eventually_at_least(2.0, kJ0SearchCap);
      if (g61 == Tri::True && j0) {
        v.h3 = Tri::True;
        v.j0 = *j0;
        double tail = 3.0 * r.two_pow_neg_tail(*j0 - 1).hi;
        cert << "(H3) j0=" << *j0 << ": sum_{nu} (nu+1)^{-r_j} <= 3*2^{-r_j} "
                "for r_j >= 2; block bound " << tail << ".\n";
      } else if (g61 == Tri::False) {
        v.h3 = Tri::False;
        cert << "(H3) FAILED: sum_j 2^{-r_j} diverges (nu=1 row already "
                "diverges for every j0).\n";
      } else {
        v.h3 = Tri::Unknown;
      }
      break;
    }
    case WeightFamily::Rule::EG: {
      const auto& r = w.r_rule();
      const auto& b = w.b_rule();
      Tri rpos = r.all_greater(0.0);
      Tri bpos = b.all_greater(0.0);
      const double binf = b.inf_from(0);
      if (rpos == Tri::True && bpos == Tri::True && binf > 0.0) {
        v.h1 = Tri::True;
        cert << "(H1) EG: r_j > 0 and inf b_j = " << binf
             << " > 0; geometric-dominated column sums.\n";
      } else if (rpos == Tri::False || bpos == Tri::False) {
        v.h1 = Tri::False;
      } else {
        v.h1 = Tri::Unknown;
      }
      v.h2 = w.alpha0_is_one() ? Tri::True : h2_of_dev(
          w.alpha0_dev() ? std::optional<SequenceRule>(*w.alpha0_dev())
                         : std::nullopt);
      Tri g61 = r.two_pow_neg_summable();
      auto j0 = r.eventually_at_least(1.0, kJ0SearchCap);
      if (g61 == Tri::True && j0 && binf > 0.0) {
        v.h3 = Tri::True;
        v.j0 = *j0;
        const double C = 1.0 + 2.0 * eg_weight_tail(1.0, binf, 1);
        cert << "(H3) j0=" << *j0 << ": column sums <= C*2^{-r_j}, C = " << C
             << " via the integral comparison; sum_j 2^{-r_j} certified.\n";
      } else if (g61 == Tri::False) {
        v.h3 = Tri::False;
        cert << "(H3) FAILED: sum_j 2^{-r_j} diverges.\n";
      } else {
        v.h3 = Tri::Unknown;
      }
      break;
    }
    case WeightFamily::Rule::MehlerFromSigma: {
      Tri sq = w.shape().sum_sq_summable();
      v.h1 = Tri::True;  // geometric columns always satisfy (H1)
      v.h2 = sq;
      v.h3 = sq;
      if (sq == Tri::True) {
        v.j0 = 1;
        cert << "(H1)-(H3) via sum sigma_j^2 < infty: beta_j <= 2 sigma_j^2, "
                "alpha0_j - 1 = beta_j/(1-beta_j), column sums equal beta_j.\n";
      }
      break;
    }
    case WeightFamily::Rule::ExplicitTable: {
      ValidationResult inner = validate_weights(*w.continuation());
      v = inner;
      // Monotonicity within the explicit block can only downgrade (H1).
      for (const auto& col : w.columns()) {
        for (size_t nu = 2; nu < col.size(); ++nu) {
          if (col[nu] < col[nu - 1]) {
            v.h1 = Tri::False;
            cert << "(H1) FAILED: explicit column not nondecreasing in nu.\n";
          }
        }
      }
      cert << "Explicit block delegated to continuation for the tails.\n";
      break;
    }
  }

  v.certificates += cert.str();
  w.validation_ = v;
  return v;
}

// ---------------------------------------------------------------------------
// alpha0 products and embeddings
// ---------------------------------------------------------------------------

Enclosure WeightFamily::alpha0_log_tail(long J) const {
  if (alpha0_is_one()) return Enclosure::point(0.0);
  if (rule_ == Rule::ExplicitTable) {
    Enclosure e = Enclosure::point(0.0);
    long base = J;
    if (J < (long)columns_.size()) {
      for (long j = J + 1; j <= (long)columns_.size(); ++j)
        e += Enclosure::point(std::log(alpha0(j)));
      base = (long)columns_.size();
    }
    return e + cont_->alpha0_log_tail(base);
  }
  if (rule_ == Rule::MehlerFromSigma) {
    auto st = shape_.sq_tail_term(J);
    if (!st)
      throw unsupported_error("alpha0_log_tail: sigma tail unsupported");
    const double sbar2 = 2.0 * std::max(0.0, st->eval(J + 1));
    if (sbar2 >= 0.5)
      throw truncation_error("alpha0_log_tail: J too shallow for the bracket",
                             kInf);
    // ln alpha0 = -ln(1-beta) in [beta, beta + beta^2/(2(1-bbar))].
    Enclosure beta_lo = tail_term_sum(st->scaled(2.0), J) +
                        tail_term_sum(((*st) * (*st)).scaled(-8.0), J);
    Enclosure beta_hi = tail_term_sum(st->scaled(2.0), J);
    Enclosure beta_sq = tail_term_sum(((*st) * (*st)).scaled(4.0), J);
    return {std::max(0.0, beta_lo.lo),
            beta_hi.hi + beta_sq.hi / (2.0 * (1.0 - sbar2))};
  }
  const SequenceRule& dev = *alpha0_dev_;
  const double eps =
      std::max(std::abs(dev.inf_from(J)), std::abs(dev.sup_from(J)));
  if (eps >= 0.5)
    throw truncation_error("alpha0_log_tail: J too shallow for the bracket",
                           kInf);
  Enclosure lin = dev.signed_tail(J);
  const double sq = dev.square_tail(J).hi;
  const double slack = sq / (2.0 * (1.0 - eps));
  return {lin.lo - slack, lin.hi + slack};
}

long WeightFamily::alpha0_tail_start(long lo) const {
  long J = std::max<long>(lo, 8);
  if (rule_ == Rule::ExplicitTable) J = std::max<long>(J, columns_.size());
  if (rule_ == Rule::MehlerFromSigma)
    J = std::max<long>(J, shape_.prefix_len());
  if (alpha0_dev_ && alpha0_dev_->kind == SequenceRule::Kind::Explicit)
    J = std::max<long>(J, alpha0_dev_->prefix.size());
  for (int attempt = 0; attempt < 24; ++attempt, J *= 2) {
    try {
      (void)alpha0_log_tail(J);
      return J;
    } catch (const truncation_error&) {
      continue;
    }
  }
  throw truncation_error("alpha0_tail_start: no certifiable depth", kInf);
}

Enclosure WeightFamily::alpha0_product(double tol) const {
  if (alpha0_is_one()) return Enclosure::point(1.0);
  ValidationResult v = validate_weights(*this);
  if (v.h2 != Tri::True)
    throw unsupported_error("alpha0_product: (H2) not certified");

  long J = alpha0_tail_start(16);
  for (int attempt = 0; attempt < 24; ++attempt, J *= 2) {
    double partial = 0.0;
    for (long j = 1; j <= J; ++j) partial += std::log(alpha0(j));
    Enclosure log_tail = alpha0_log_tail(J);
    Enclosure logP(partial + log_tail.lo, partial + log_tail.hi);
    if (logP.width() <= tol) return {std::exp(logP.lo), std::exp(logP.hi)};
  }
  throw truncation_error("alpha0_product: tail did not certify", kInf);
}

std::pair<double, double> cmin_cmax(const WeightFamily& w, double tol) {
  if (w.alpha0_is_one()) return {1.0, 1.0};
  ValidationResult v = validate_weights(w);
  if (v.h2 != Tri::True)
    throw unsupported_error("cmin_cmax: (H2) not certified");

  if (w.rule() == WeightFamily::Rule::MehlerFromSigma) {
    // alpha0_j > 1 for every j.
    Enclosure prod = w.alpha0_product(tol);
    return {1.0, prod.mid()};
  }

  const SequenceRule* dev = w.alpha0_dev();
  if (!dev) return {1.0, 1.0};

  long J = 16;
  if (dev->kind == SequenceRule::Kind::Explicit)
    J = std::max<long>(J, dev->prefix.size());
  for (int attempt = 0; attempt < 24; ++attempt, J *= 2) {
    const double eps =
        std::max(std::abs(dev->inf_from(J)), std::abs(dev->sup_from(J)));
    if (eps >= 0.5) continue;
    const double tail_abs =
        dev->abs_tail(J).hi + dev->square_tail(J).hi / (2.0 * (1.0 - eps));
    if (tail_abs > tol) continue;
    double log_min = 0.0, log_max = 0.0;
    for (long j = 1; j <= J; ++j) {
      const double la = std::log(w.alpha0(j));
      if (la < 0.0) log_min += la;
      if (la > 0.0) log_max += la;
    }
    return {std::exp(log_min), std::exp(log_max)};
  }
  throw truncation_error("cmin_cmax: tail did not certify", kInf);
}

std::pair<double, double> embedding_norms(const WeightFamily& w) {
  ValidationResult v = validate_weights(w);
  if (!v.all_true())
    throw unsupported_error("embedding_norms: (H1)-(H3) not certified");
  auto [cmin, cmax] = cmin_cmax(w, 1e-12);
  return {1.0 / std::sqrt(cmin), std::sqrt(cmax)};
}

std::pair<double, double> univariate_embedding_norms(const WeightFamily& w,
                                                     long j) {
  const double a0 = w.alpha0(j);
  return {1.0 / std::sqrt(std::min(a0, 1.0)), std::sqrt(std::max(a0, 1.0))};
}

RhatResult rhat_condition(const SequenceRule& r) {
  RhatResult out;
  auto li = r.liminf_over_ln();
  if (!li) return out;
  out.rhat = *li;
  // Compare in rule space where the threshold is exact.
  const SequenceRule* eff = &r;
  if (r.kind == SequenceRule::Kind::Explicit) eff = r.cont.get();
  if (eff->kind == SequenceRule::Kind::LogLinear) {
    out.sufficient = eff->ll_b > 1.0 ? Tri::True : Tri::False;
    out.necessary = eff->ll_b >= 1.0 ? Tri::True : Tri::False;
    return out;
  }
  const double thr = 1.0 / std::numbers::ln2;
  out.sufficient = out.rhat > thr ? Tri::True : Tri::False;
  out.necessary = out.rhat >= thr ? Tri::True : Tri::False;
  return out;
}

}  // namespace kernellab
