#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kernellab/mehler.hpp"
#include "kernellab/series.hpp"

namespace kernellab {

// Closed-form scalar sequence f(j), j >= 1, with enough analytic structure
// that the infinite-series questions appearing in the weight conditions are
// decidable.  Explicit prefixes delegate to a continuation rule.
struct SequenceRule {
  enum class Kind { Constant, PowerLaw, LogLinear, Geometric, Explicit };

  Kind kind = Kind::Constant;
  double c = 0.0;                            // Constant: f(j) = c
  double a = 0.0, p = 0.0;                   // PowerLaw: f(j) = a j^p
  double ll_a = 0.0, ll_b = 0.0, ll_s = 0.0; // LogLinear: a + b log2(j+s)
  double g_a = 0.0, g_q = 0.0;               // Geometric: a q^j, 0 < q < 1
  std::vector<double> prefix;                // Explicit values for j <= size
  std::shared_ptr<const SequenceRule> cont;  // Explicit continuation

  static SequenceRule constant(double c);
  static SequenceRule power_law(double a, double p);
  static SequenceRule log_linear(double a, double b, double shift = 0.0);
  static SequenceRule geometric(double a, double q);
  static SequenceRule explicit_prefix(std::vector<double> values,
                                      SequenceRule continuation);

  double operator()(long j) const;

  // f(j) > thr for every j >= 1?  Exact for the monotone kinds.
  Tri all_greater(double thr) const;
  // inf / sup over j > J (limits included).
  double inf_from(long J) const;
  double sup_from(long J) const;

  // sum_j |f(j)| and its certified tail.
  Tri abs_summable() const;
  Enclosure abs_tail(long J) const;
  Enclosure signed_tail(long J) const;
  Enclosure square_tail(long J) const;  // sum_{j>J} f(j)^2

  // sum_j 2^{-f(j)} and its certified tail.
  Tri two_pow_neg_summable() const;
  Enclosure two_pow_neg_tail(long J) const;

  // liminf_j f(j)/ln j; nullopt when no closed form applies.
  std::optional<double> liminf_over_ln() const;

  // Smallest j0 <= cap with f(j) >= thr for all j >= j0 (certified).
  std::optional<long> eventually_at_least(double thr, long cap) const;
  // Smallest j0 <= cap with f(j) >= coef * log2(j) for all j >= j0.
  std::optional<long> eventually_dominates_log(double coef, long cap) const;

  // f as a single TailTerm valid for j > from (Constant/PowerLaw/Geometric
  // and Explicit continuations thereof).
  std::optional<TailTerm> as_tail_term(long from) const;
};

// Gaussian shape parameters: explicit prefix plus a parametric tail.
struct ShapeParams {
  Eigen::VectorXd prefix;  // sigma_1 .. sigma_d
  SequenceRule tail = SequenceRule::constant(0.0);

  double sigma(long j) const;
  long prefix_len() const { return prefix.size(); }
  Tri sum_sq_summable() const;
  Enclosure sq_tail(long J) const;  // certified sum_{j>J} sigma_j^2
  // sigma_j^2 as TailTerm for j > max(J, prefix_len); nullopt for
  // unsupported tail kinds.
  std::optional<TailTerm> sq_tail_term(long from) const;
};

struct ValidationResult {
  Tri h1 = Tri::Unknown;
  Tri h2 = Tri::Unknown;
  Tri h3 = Tri::Unknown;
  std::optional<long> j0;  // witness index for (H3) when found
  std::string certificates;

  bool all_true() const {
    return h1 == Tri::True && h2 == Tri::True && h3 == Tri::True;
  }
};

// Fourier-weight family alpha_{nu,j}.  Values are stored as rules, never as
// dense tables; nu and j are unbounded.
class WeightFamily {
 public:
  enum class Rule { PG, EG, MehlerFromSigma, ExplicitTable };

  static WeightFamily pg(SequenceRule r);
  static WeightFamily pg(SequenceRule r, SequenceRule alpha0_dev);
  static WeightFamily eg(SequenceRule r, SequenceRule b);
  static WeightFamily eg(SequenceRule r, SequenceRule b,
                         SequenceRule alpha0_dev);
  static WeightFamily mehler(ShapeParams shape);
  // columns[j-1][nu] for the explicit block; continuation covers the rest.
  static WeightFamily explicit_table(std::vector<std::vector<double>> columns,
                                     WeightFamily continuation);

  Rule rule() const { return rule_; }
  const SequenceRule& r_rule() const { return r_; }
  const SequenceRule& b_rule() const { return b_; }
  const ShapeParams& shape() const { return shape_; }
  const SequenceRule* alpha0_dev() const {
    return alpha0_dev_ ? &*alpha0_dev_ : nullptr;
  }
  bool alpha0_is_one() const;
  const std::vector<std::vector<double>>& columns() const { return columns_; }
  const WeightFamily* continuation() const { return cont_.get(); }

  // alpha_{nu,j}; +inf beyond representable magnitude (weights only appear
  // inverted, so the overflow is benign).
  double alpha(long nu, long j) const;
  double log2_alpha(long nu, long j) const;
  double alpha_inv(long nu, long j) const;
  double alpha0(long j) const { return alpha(0, j); }
  double mehler_beta(long j) const;

  // Certified upper bound for sum_{nu >= from_nu} alpha_inv(nu, j).
  double column_tail_upper(long j, long from_nu) const;
  // Near-exact upper bound for sum_{nu >= 1} alpha_inv(nu, j).
  double column_sum_upper(long j) const;

  // alpha_inv(nu, j) * point(j) summed over j > J, certified.  `point`
  // multiplies in an arbitrary TailTerm factor (1 for plain weight tails).
  Enclosure weighted_column_tail(long nu, const TailTerm& point, long J) const;
  // Upper bound for sum_{j>J} sum_{nu>=from_nu} alpha_inv(nu,j) * bound(j)
  // where bound is a nonnegative TailTerm.
  double block_tail_upper(long from_nu, const TailTerm& bound, long J) const;

  // Certified enclosure of prod_j alpha0(j); requires (H2) true.
  Enclosure alpha0_product(double tol = 1e-12) const;

  // Certified enclosure of sum_{j>J} ln alpha0(j); J must cover explicit
  // prefixes and be deep enough that |alpha0 - 1| < 1/2 beyond it.
  Enclosure alpha0_log_tail(long J) const;

  // Smallest J >= lo from which alpha0_log_tail certifies; throws after
  // the doubling budget runs out.
  long alpha0_tail_start(long lo) const;

  // K' family: alpha_{0,j} replaced by one.
  WeightFamily primed() const;

 private:
  friend ValidationResult validate_weights(const WeightFamily&);
  WeightFamily() = default;

  Rule rule_ = Rule::PG;
  SequenceRule r_;
  SequenceRule b_;
  ShapeParams shape_;
  std::optional<SequenceRule> alpha0_dev_;  // alpha0 = 1 + dev
  bool alpha0_forced_one_ = false;
  std::vector<std::vector<double>> columns_;
  std::shared_ptr<const WeightFamily> cont_;

  mutable std::optional<ValidationResult> validation_;
};

// Analytic certificates for (H1)-(H3), three-valued.
ValidationResult validate_weights(const WeightFamily& w);

// c_min = prod_j min(alpha0_j, 1), c_max = prod_j max(alpha0_j, 1), with a
// certified multiplicative tail error <= tol.  Requires (H2).
std::pair<double, double> cmin_cmax(const WeightFamily& w, double tol = 1e-12);

// Identity-map norms (c_min^{-1/2}, c_max^{1/2}) for H(K) <-> H(K').
// Requires (H1)-(H3).
std::pair<double, double> embedding_norms(const WeightFamily& w);

// Univariate variant for a fixed coordinate.
std::pair<double, double> univariate_embedding_norms(const WeightFamily& w,
                                                     long j);

// r_hat = liminf r_j / ln j against the threshold 1/ln 2.
struct RhatResult {
  Tri sufficient = Tri::Unknown;
  Tri necessary = Tri::Unknown;
  double rhat = 0.0;
};
RhatResult rhat_condition(const SequenceRule& r);

}  // namespace kernellab
