#pragma once

#include <Eigen/Core>

namespace kernellab {

// Values h_0(x), ..., h_N(x) of the L^2(mu_0)-orthonormal Hermite
// polynomials (probabilists' convention, unit variance).
struct HermiteEval {
  long max_degree = 0;
  Eigen::ArrayXd values;
};

// Evaluate h_0 .. h_N at x via the normalized three-term recurrence
//   h_{nu+1}(x) = (x h_nu(x) - sqrt(nu) h_{nu-1}(x)) / sqrt(nu+1).
// Throws domain_error for non-finite x.
HermiteEval hermite_all(double x, long max_degree);

// Single value h_nu(x) from the alternating closed-form sum; oracle only.
// degree <= 40; evaluated in extended precision with log-space factorials
// above degree 20.  Throws unsupported_error beyond 40.
double hermite_closed_form(double x, long degree);

// max_nu <= N of |h_nu(x)| <= exp(x^2/4), with 1e-12 relative slack.
bool check_cramer(double x, long max_degree);

// Same for the bound |h_nu(x)| <= 2^nu max(1, |x|^nu), checked in log space.
bool check_growth_bound(double x, long max_degree);

// max over nu <= max_degree of nu^{1/4} |h_nu(x)|; finite-range diagnostic
// only, no limit statement is asserted.
double scaled_sup_proxy(double x, long max_degree);

}  // namespace kernellab
