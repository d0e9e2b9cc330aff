#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "kernellab/kernels1d.hpp"
#include "kernellab/seqpoint.hpp"
#include "kernellab/weights.hpp"

namespace kernellab {

struct DomainVerdict {
  enum class V { In, Out, Unknown };
  V verdict = V::Unknown;
  std::string certificate;
  double residual_bound = std::numeric_limits<double>::quiet_NaN();

  bool in() const { return verdict == V::In; }
  bool out() const { return verdict == V::Out; }
};

// Infinite tensor product of Hermite kernels.  Construction certifies
// (H1)-(H3); the K' variant forces alpha_{0,j} = 1.  K* denotes the
// centered subset products k*_u and is evaluated through
// kstar_subset_product / the superposition only.
class TensorHermiteKernel {
 public:
  enum class Variant { K, KPrime, KStar };

  TensorHermiteKernel(WeightFamily w, TruncationConfig trunc = {},
                      Variant variant = Variant::K);

  const WeightFamily& weights() const { return w_; }
  const TruncationConfig& trunc() const { return trunc_; }
  Variant variant() const { return variant_; }

 private:
  WeightFamily w_;
  TruncationConfig trunc_;
  Variant variant_;
};

// Infinite tensor product of Gaussian kernels with shape parameters sigma_j.
class TensorGaussKernel {
 public:
  explicit TensorGaussKernel(ShapeParams shape);
  const ShapeParams& shape() const { return shape_; }
  bool certified() const { return certified_; }  // sum sigma_j^2 < infty

 private:
  ShapeParams shape_;
  bool certified_ = false;
};

// Membership of x in l^2(s^2) = { sum_j sigma_j^2 x_j^2 < infty }.
DomainVerdict gauss_domain_check(const TensorGaussKernel& k, const SeqPoint& x);

// Membership in the maximal Hermite domain { sum_j k_j*(x_j,x_j) < infty }.
// Exponential-growth weights use the l^2(a_1^{-1}) characterization;
// bounded tails use the Cramer + (H3) route; otherwise the divergent nu=1
// necessary series decides Out, and the gap stays Unknown.
DomainVerdict hermite_domain_check(const TensorHermiteKernel& k,
                                   const SeqPoint& x);

struct TensorEvalResult {
  double value = 0.0;
  double error_bound = 0.0;
};

// prod_j k_j(x_j, y_j) with a certified tail factor.
TensorEvalResult tensor_hermite_eval(const TensorHermiteKernel& k,
                                     const SeqPoint& x, const SeqPoint& y);

// prod_{j in subset} k_j*(x_j, y_j)  (the ANOVA term kernels k*_u).
TensorEvalResult kstar_subset_product(const TensorHermiteKernel& k,
                                      const SeqPoint& x, const SeqPoint& y,
                                      const std::vector<long>& subset);

// sum over u inside `active` with |u| <= max_order of c_u k*_u(x,y), plus a
// certified Cauchy-Schwarz remainder for everything omitted.
TensorEvalResult anova_superposition_eval(const TensorHermiteKernel& k,
                                          const SeqPoint& x, const SeqPoint& y,
                                          const std::vector<long>& active,
                                          int max_order);

struct MultiIndexEvalResult {
  double value = 0.0;
  double terms_used = 0.0;  // count of multi-indices inside the caps
};

// Diagnostic multi-index series: multi-indices with total degree <=
// degree_cap supported on at most active_cap coordinates (within an
// internally certified coordinate range).  No rigorous remainder.
MultiIndexEvalResult multiindex_series_eval(const TensorHermiteKernel& k,
                                            const SeqPoint& x,
                                            const SeqPoint& y, int degree_cap,
                                            int active_cap);

// Full cap table: entry (d, s) is the series value at caps (d, s).
Eigen::MatrixXd multiindex_series_table(const TensorHermiteKernel& k,
                                        const SeqPoint& x, const SeqPoint& y,
                                        int degree_cap, int active_cap);

struct TensorGaussEvalResult {
  double product_form = 0.0;  // L
  double series_form = 0.0;   // L-tilde
  bool definite = true;       // false when a domain verdict stayed Unknown
};

TensorGaussEvalResult tensor_gauss_eval(const TensorGaussKernel& k,
                                        const SeqPoint& x, const SeqPoint& y);

// Witness separating the degree-<=nu0 weighted-l^2 intersection from the
// full one (polynomial or sub-exponential growth).
struct WitnessResult {
  SeqPoint point;      // exhibition form: explicit prefix + power-law tail
  int nu0 = 1;
  double a = 0.0;      // x_j^{2 nu0} = 2^{r_j} j^{-a}
  double eps = 0.0;
  double delta = 0.0;  // 1 - a/(1+eps)
  long j0 = 1;
  long k = 1;          // divergence degree is k * nu0
  std::string certificate;
};

WitnessResult pg_strict_inclusion_witness(const WeightFamily& w, int nu0);

// Exact witness coordinate x_j = (2^{r_j} j^{-a})^{1/(2 nu0)}.
double witness_coord(const WeightFamily& w, const WitnessResult& wit, long j);

struct WitnessCheck {
  bool comparison_ok = false;  // alpha_{nu,j}^{-1} x_j^{2nu} <= j^{-a} termwise
  bool divergence_ok = false;  // terms >= 1 at degree k*nu0
  double comparison_sum = 0.0;
  long checked_up_to = 0;
};

WitnessCheck validate_witness(const WeightFamily& w, const WitnessResult& wit,
                              long j_max);

}  // namespace kernellab
