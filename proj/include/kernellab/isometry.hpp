#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "kernellab/expansion.hpp"
#include "kernellab/kernels1d.hpp"
#include "kernellab/mehler.hpp"
#include "kernellab/seqpoint.hpp"
#include "kernellab/weights.hpp"

namespace kernellab {

// Independent oracle for the parameter triple: bisection on beta in (0,1)
// against beta / (2 (1-beta)^2) = sigma^2, then c^2 = (1+beta)/(1-beta).
MehlerParams mehler_from_sigma_bisect(double sigma);

// (q f)(x) = c^{1/2} exp(-tau x^2) f(c x).
double q_apply(const MehlerParams& p, const std::function<double(double)>& f,
               double x);

// Explicit inverse from the density-ratio formula; q(q^{-1} g) = g pointwise.
double q_inverse_apply(const MehlerParams& p,
                       const std::function<double(double)>& g, double x);

// | ||q f||^2_{L2(mu0)} - ||f||^2 | for a finite Hermite expansion f,
// computed by Gauss-Hermite after the substitution u = c x (which renders
// the integrand polynomial-times-Gaussian up to the numerically carried
// damping exponent).  quad_nodes >= degree + 1.
double check_q_isometry(const MehlerParams& p, const FiniteExpansion& f,
                        int quad_nodes);

// Residual and certified tail for the Gaussian-kernel representation
// l_sigma(x,y) = sum_nu alpha_nu^{-1} (q h_nu)(x) (q h_nu)(y).
struct MehlerRepResult {
  double residual = 0.0;
  double tail_bound = 0.0;
  long terms = 0;
};
MehlerRepResult mehler_rep_check(double sigma, double x, double y,
                                 double tail_tol);

// Coordinate-wise parameters plus the certified scaling constant
// c_* = prod_j c_j.
struct TensorMehlerParams {
  ShapeParams shape;
  double c_star = 1.0;
  double c_star_err = 0.0;
  long depth = 0;  // explicit summation depth behind the certificates

  MehlerParams coord(long j) const {
    return mehler_from_sigma(shape.sigma(j));
  }
};

TensorMehlerParams tensor_mehler(ShapeParams shape, double tol = 1e-12);

// sum_j (c_j^2 - 1)/4 x_j^2 with a certified tail; domain_error off
// l^2(s^2).
double Q_exponent(const TensorMehlerParams& tp, const SeqPoint& x);

// (Q f)(x) = c_*^{1/2} exp(-Q_exponent) f(c_1 x_1, ..., c_d x_d).
// Consults f at exactly one point.
double Q_apply(const TensorMehlerParams& tp,
               const std::function<double(const Eigen::VectorXd&)>& f, int d,
               const SeqPoint& x);

// | ||Qf||^2_{L2(mu)} - ||f||^2_{L2(mu)} | for a d-variate expansion; the
// inactive coordinates contribute the closed-form factor 1 per coordinate.
double check_Q_isometry_L2(const TensorMehlerParams& tp,
                           const MultiExpansion& f, int quad_nodes);

struct QRkhsCheck {
  double max_pointwise_residual = 0.0;  // Q h_n vs the per-factor product
  double coeff_norm_residual = 0.0;     // alpha_n via two bookkeeping routes
  double kernel_diag_residual = 0.0;    // K(x,x) vs c_*^{-1} exp(2 sum tau x^2/c^2)
  double kernel_diag_tolerance = 0.0;   // combined certified bounds
};

class TensorHermiteKernel;  // tensor.hpp

QRkhsCheck check_Q_rkhs_isometry(const TensorMehlerParams& tp,
                                 const WeightFamily& weights,
                                 const MultiExpansion& f,
                                 const std::vector<SeqPoint>& grid);

}  // namespace kernellab
