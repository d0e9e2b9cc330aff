#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "kernellab/expansion.hpp"
#include "kernellab/weights.hpp"

namespace kernellab {

// n-point Gauss-Hermite rule for the standard normal distribution mu_0
// (probabilists' normalization: weights sum to one, second moment one).
struct GHRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  int degree_exact = 0;  // 2n - 1
};

// Golub-Welsch via the symmetric tridiagonal eigenproblem with off-diagonal
// entries sqrt(k).  1 <= n <= 200.
GHRule gh_rule(int n);

// sum_i w_i f(x_i) g(x_i); exact for polynomial f*g of degree <= 2n-1.
template <class F, class G>
double l2_inner(F&& f, G&& g, const GHRule& rule) {
  double s = 0.0;
  for (long i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * f(rule.nodes[i]) * g(rule.nodes[i]);
  return s;
}

// count i.i.d. rows from mu_0^dim; bit-identical for a fixed seed within
// one build.
Eigen::MatrixXd mu_sample(int dim, int count, std::uint64_t seed);

// Numerical ANOVA decomposition of an evaluable over d coordinates, built
// from the recursive marginalization formula with tensor quadrature over
// complements.  d <= 6.
class AnovaDecomposition {
 public:
  using Fn = std::function<double(const Eigen::VectorXd&)>;

  int dim() const { return d_; }
  double mean() const { return mean_; }  // the empty component
  // variance of f_u; mask bit i set <=> coordinate i+1 in u.
  double variance(std::uint32_t mask) const;
  double total_variance() const;
  // f_u at an arbitrary point (only the coordinates in u matter).
  double component(std::uint32_t mask, const Eigen::VectorXd& x) const;
  double reconstruct(const Eigen::VectorXd& x) const;

 private:
  friend AnovaDecomposition anova_decompose(Fn f, int d, const GHRule& rule);
  Fn f_;
  int d_ = 0;
  GHRule rule_;
  double mean_ = 0.0;
  std::vector<double> variances_;  // indexed by mask
};

AnovaDecomposition anova_decompose(AnovaDecomposition::Fn f, int d,
                                   const GHRule& rule);

// sqrt(sum_n alpha_n c_n^2) with alpha_n the certified product weight of the
// multi-index n.  Requires (H2).
double hk_norm_of_expansion(const MultiExpansion& f, const WeightFamily& w);

}  // namespace kernellab
