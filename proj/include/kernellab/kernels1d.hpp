#pragma once

#include <Eigen/Core>

#include "kernellab/hermite.hpp"
#include "kernellab/weights.hpp"

namespace kernellab {

struct TruncationConfig {
  double abs_tol = 1e-10;
  long max_terms = 10000;
};

struct KernelEvalResult {
  double value = 0.0;
  double tail_bound = 0.0;
  long terms_used = 0;
};

// Univariate Hermite kernel k(x,y) = sum_nu alpha_nu^{-1} h_nu(x) h_nu(y):
// one coordinate column of a weight family plus a truncation budget.
class UniHermiteKernel {
 public:
  UniHermiteKernel(WeightFamily w, long j = 1, TruncationConfig trunc = {});

  static UniHermiteKernel pg(double r, TruncationConfig trunc = {});
  static UniHermiteKernel eg(double r, double b, TruncationConfig trunc = {});
  static UniHermiteKernel mehler(double sigma, TruncationConfig trunc = {});

  const WeightFamily& weights() const { return w_; }
  long coordinate() const { return j_; }
  const TruncationConfig& trunc() const { return trunc_; }

  double alpha(long nu) const { return w_.alpha(nu, j_); }
  double alpha_inv(long nu) const { return w_.alpha_inv(nu, j_); }
  double alpha0() const { return w_.alpha(0, j_); }
  // Certified upper bound for sum_{nu >= from_nu} alpha_nu^{-1}.
  double tail_sum_upper(long from_nu) const {
    return w_.column_tail_upper(j_, from_nu);
  }

 private:
  WeightFamily w_;
  long j_;
  TruncationConfig trunc_;
};

// Truncated evaluation with a rigorous remainder: Cramer's bound on the
// Hermite factors times the rule-specific weight tail.
KernelEvalResult hermite_kernel_eval(const UniHermiteKernel& k, double x,
                                     double y);

// Same evaluation for one coordinate column of a weight family, without
// constructing a kernel object.  The workhorse behind the tensor products.
KernelEvalResult hermite_column_eval(const WeightFamily& w, long j, double x,
                                     double y, double abs_tol, long max_terms);

// k*(x,y) = k(x,y) - alpha_0^{-1}.
KernelEvalResult centered_kernel_eval(const UniHermiteKernel& k, double x,
                                      double y);

struct UniGaussKernel {
  double sigma = 1.0;
};

double gauss_kernel_eval(const UniGaussKernel& g, double x, double y);

// e_{nu,sigma}(x) = (1/sqrt(nu!)) (sqrt(2) sigma)^nu x^nu exp(-sigma^2 x^2).
double gauss_basis_eval(const UniGaussKernel& g, long nu, double x);

// |l_sigma(x,y) - sum_{nu<=N} e_nu(x) e_nu(y)| with N chosen so the
// Cauchy-Schwarz tail against the diagonal Poisson tails is <= tol.
double gauss_series_check(const UniGaussKernel& g, double x, double y,
                          double tol);

// Coefficients c_0..c_N against h_nu.
using FiniteExpansion = Eigen::VectorXd;

// <f, g>_{H(k)} = sum alpha_nu c_nu d_nu.
double rkhs_inner(const UniHermiteKernel& k, const FiniteExpansion& f,
                  const FiniteExpansion& g);

// Truncated coefficient sequence of the section k(.,x).
FiniteExpansion kernel_section(const UniHermiteKernel& k, double x,
                               long max_degree);

}  // namespace kernellab
