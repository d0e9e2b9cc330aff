#include "kernellab/isometry.hpp"

#include <cmath>

#include "kernellab/errors.hpp"
#include "kernellab/hermite.hpp"
#include "kernellab/quadrature.hpp"
#include "kernellab/tensor.hpp"

namespace kernellab {

MehlerParams mehler_from_sigma_bisect(double sigma) {
  if (!(sigma > 0.0))
    throw domain_error("mehler_from_sigma_bisect: sigma must be positive");
  const double s2 = sigma * sigma;
  auto g = [&](double beta) {
    return beta / (2.0 * (1.0 - beta) * (1.0 - beta)) - s2;
  };
  double lo = 0.0, hi = 1.0 - 1e-16;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  MehlerParams p;
  p.sigma = sigma;
  p.beta = 0.5 * (lo + hi);
  p.c2 = (1.0 + p.beta) / (1.0 - p.beta);
  p.c2m1 = 2.0 * p.beta / (1.0 - p.beta);
  p.c = std::sqrt(p.c2);
  p.tau = p.c2m1 / 4.0;
  return p;
}

double q_apply(const MehlerParams& p, const std::function<double(double)>& f,
               double x) {
  return std::sqrt(p.c) * std::exp(-p.tau * x * x) * f(p.c * x);
}

double q_inverse_apply(const MehlerParams& p,
                       const std::function<double(double)>& g, double x) {
  // f(x) = |phi(x)|^{1/2} g(t^{-1}(x)) with phi the density ratio of the
  // scaled Gaussian: phi(x) = c^{-1} exp((c^2-1) x^2 / (2 c^2)).
  const double phi_half =
      std::exp(0.5 * (p.c2m1 * x * x / (2.0 * p.c2) - std::log(p.c)));
  return phi_half * g(x / p.c);
}

double check_q_isometry(const MehlerParams& p, const FiniteExpansion& f,
                        int quad_nodes) {
  const long degree = f.size() - 1;
  if (degree < 0) throw domain_error("check_q_isometry: empty expansion");
  if (quad_nodes < degree + 1)
    throw domain_error("check_q_isometry: quadrature degree insufficient");
  const GHRule rule = gh_rule(quad_nodes);

  // After u = c x the weight becomes exp(gamma u^2) d mu_0(u) with
  // gamma = 1/2 - 1/(2 c^2) - 2 tau / c^2, which vanishes exactly when tau
  // solves the isometry equation; the numerically carried value feeds the
  // check.
  const double gamma =
      0.5 - 0.5 / p.c2 - 2.0 * p.tau / p.c2;
  double num = 0.0;
  for (long i = 0; i < rule.nodes.size(); ++i) {
    const double u = rule.nodes[i];
    const HermiteEval h = hermite_all(u, degree);
    double fu = 0.0;
    for (long nu = 0; nu <= degree; ++nu) fu += f[nu] * h.values[nu];
    num += rule.weights[i] * fu * fu * std::exp(gamma * u * u);
  }
  const double coef = f.squaredNorm();
  return std::abs(num - coef);
}

MehlerRepResult mehler_rep_check(double sigma, double x, double y,
                                 double tail_tol) {
  const MehlerParams p = mehler_from_sigma(sigma);
  // |alpha_nu^{-1} (q h_nu)(x) (q h_nu)(y)| <= (1-beta) beta^nu c
  // exp((x^2+y^2)/4) by Cramer at the scaled arguments.
  const double lead = p.c * std::exp((x * x + y * y) / 4.0);
  // tail over nu > N: (1-beta) sum beta^nu |h(cx) h(cy)| <= lead beta^{N+1}
  long N = 0;
  while (lead * std::pow(p.beta, (double)N + 1.0) > tail_tol) {
    if (++N > 1000000)
      throw truncation_error("mehler_rep_check: tail never certified",
                             lead * std::pow(p.beta, (double)N));
  }
  const HermiteEval hx = hermite_all(p.c * x, N);
  const HermiteEval hy = hermite_all(p.c * y, N);
  const double damp = std::sqrt(p.c) * std::sqrt(p.c) *
                      std::exp(-p.tau * (x * x + y * y));
  double sum = 0.0;
  double bpow = 1.0 - p.beta;  // (1-beta) beta^nu
  for (long nu = 0; nu <= N; ++nu) {
    sum += bpow * hx.values[nu] * hy.values[nu];
    bpow *= p.beta;
  }
  sum *= damp;
  const UniGaussKernel g{sigma};
  MehlerRepResult out;
  out.residual = std::abs(gauss_kernel_eval(g, x, y) - sum);
  out.tail_bound = lead * std::pow(p.beta, (double)N + 1.0);
  out.terms = N + 1;
  return out;
}

TensorMehlerParams tensor_mehler(ShapeParams shape, double tol) {
  TensorMehlerParams tp;
  tp.shape = std::move(shape);
  if (tp.shape.sum_sq_summable() != Tri::True)
    throw unsupported_error("tensor_mehler: sum sigma_j^2 not certified");

  long J = std::max<long>(tp.shape.prefix_len(), 16);
  for (int attempt = 0; attempt < 24; ++attempt, J *= 2) {
    auto st = tp.shape.sq_tail_term(J);
    if (!st) throw unsupported_error("tensor_mehler: sigma tail unsupported");
    // ln c_* = (1/4) sum ln(1 + 8 sigma^2); ln(1+u) in [u - u^2/2, u].
    Enclosure t2 = tail_term_sum(st->scaled(2.0), J);          // 2 sum s^2
    Enclosure t4 = tail_term_sum(((*st) * (*st)).scaled(8.0), J);
    Enclosure log_tail(t2.lo - t4.hi, t2.hi);
    if (log_tail.width() > tol) continue;
    double partial = 0.0;
    for (long j = 1; j <= J; ++j)
      partial += 0.25 * std::log1p(8.0 * tp.shape.sigma(j) * tp.shape.sigma(j));
    Enclosure lc(partial + log_tail.lo, partial + log_tail.hi);
    tp.c_star = std::exp(lc.mid());
    tp.c_star_err = std::exp(lc.hi) - std::exp(lc.lo);
    tp.depth = J;
    return tp;
  }
  throw truncation_error("tensor_mehler: c_* tail did not certify",
                         std::numeric_limits<double>::infinity());
}

double Q_exponent(const TensorMehlerParams& tp, const SeqPoint& x) {
  const long J = std::max(tp.depth, x.prefix_len());
  double prefix = 0.0;
  for (long j = 1; j <= J; ++j) {
    const MehlerParams p = mehler_from_sigma(tp.shape.sigma(j));
    const double xj = x.coord(j);
    prefix += 0.25 * p.c2m1 * xj * xj;
  }
  // (c^2-1)/4 in [2 s^2 (1 - 2 s^2), 2 s^2].
  auto st = tp.shape.sq_tail_term(J);
  if (!st) throw unsupported_error("Q_exponent: sigma tail unsupported");
  const TailTerm xa = x.tail_term_abs();
  const TailTerm prod = (*st) * (xa * xa);
  if (prod.A != 0.0 && !tail_term_converges(prod))
    throw domain_error("Q_exponent: point not in l^2(s^2)");
  Enclosure tail = tail_term_sum(prod.scaled(2.0), J);
  return prefix + tail.mid();
}

double Q_apply(const TensorMehlerParams& tp,
               const std::function<double(const Eigen::VectorXd&)>& f, int d,
               const SeqPoint& x) {
  if (d < 0) throw domain_error("Q_apply: d must be >= 0");
  const double expo = Q_exponent(tp, x);
  Eigen::VectorXd scaled(d);
  for (int j = 1; j <= d; ++j)
    scaled[j - 1] = mehler_from_sigma(tp.shape.sigma(j)).c * x.coord(j);
  return std::sqrt(tp.c_star) * std::exp(-expo) * f(scaled);
}

double check_Q_isometry_L2(const TensorMehlerParams& tp,
                           const MultiExpansion& f, int quad_nodes) {
  const long d = std::max<long>(f.dim(), 1);
  const long degree = f.max_coordinate_degree();
  if (quad_nodes < degree + 1)
    throw domain_error("check_Q_isometry_L2: quadrature degree insufficient");
  const GHRule rule = gh_rule(quad_nodes);
  const long n = rule.nodes.size();

  std::vector<double> gamma(d), c(d);
  for (long j = 0; j < d; ++j) {
    const MehlerParams p = mehler_from_sigma(tp.shape.sigma(j + 1));
    c[j] = p.c;
    gamma[j] = 0.5 - 0.5 / p.c2 - 2.0 * p.tau / p.c2;
  }

  // Inactive coordinates: c_j E[exp(-(c_j^2-1) X^2 / 2)] = c_j (c_j^2)^{-1/2}.
  double tail_factor = 1.0;
  for (long j = d + 1; j <= tp.depth; ++j) {
    const MehlerParams p = mehler_from_sigma(tp.shape.sigma(j));
    tail_factor *= p.c / std::sqrt(p.c2);
  }

  double num = 0.0;
  std::vector<long> idx(d, 0);
  Eigen::VectorXd u(d);
  while (true) {
    double w = 1.0, damp = 1.0;
    for (long j = 0; j < d; ++j) {
      u[j] = rule.nodes[idx[j]];
      w *= rule.weights[idx[j]];
      damp *= std::exp(gamma[j] * u[j] * u[j]);
    }
    const double fu = f.eval(u);
    num += w * fu * fu * damp;
    long j = 0;
    while (j < d && ++idx[j] == n) idx[j++] = 0;
    if (j == d) break;
  }
  num *= tail_factor;

  // Parseval on distinct multi-indices.
  double coef = 0.0;
  for (const auto& [nidx, cv] : f.terms) coef += cv * cv;
  return std::abs(num - coef);
}

QRkhsCheck check_Q_rkhs_isometry(const TensorMehlerParams& tp,
                                 const WeightFamily& weights,
                                 const MultiExpansion& f,
                                 const std::vector<SeqPoint>& grid) {
  if (weights.rule() != WeightFamily::Rule::MehlerFromSigma)
    throw config_error("check_Q_rkhs_isometry: weights must be Mehler-derived");
  for (long j = 1; j <= std::max<long>(4, tp.shape.prefix_len()); ++j) {
    if (std::abs(weights.shape().sigma(j) - tp.shape.sigma(j)) > 1e-15)
      throw config_error("check_Q_rkhs_isometry: shape mismatch");
  }

  QRkhsCheck out;

  // (a) pointwise intertwining on the grid.
  for (const auto& [nidx, cv] : f.terms) {
    const long d = std::max<long>(nidx.dim(), 1);
    auto hn = [&](const Eigen::VectorXd& u) {
      double prod = 1.0;
      for (long j = 0; j < nidx.dim(); ++j) {
        if (nidx.degrees[j] == 0) continue;
        prod *= hermite_all(u[j], nidx.degrees[j]).values[nidx.degrees[j]];
      }
      return prod;
    };
    for (const auto& x : grid) {
      const double lhs = Q_apply(tp, hn, (int)d, x);
      double rhs = std::sqrt(tp.c_star);
      for (long j = 1; j <= std::max<long>(d, x.prefix_len()); ++j) {
        const MehlerParams p = mehler_from_sigma(tp.shape.sigma(j));
        const double xj = x.coord(j);
        const long nu = j <= nidx.dim() ? nidx.degrees[j - 1] : 0;
        const double hval =
            nu == 0 ? 1.0 : hermite_all(p.c * xj, nu).values[nu];
        rhs *= std::exp(-p.tau * xj * xj) * hval;
      }
      out.max_pointwise_residual =
          std::max(out.max_pointwise_residual, std::abs(lhs - rhs));
    }
  }

  // (b) norm transport at coefficient level, alpha_n through two routes.
  {
    const double via_family = hk_norm_of_expansion(f, weights);
    double sum = 0.0;
    const Enclosure pinf = weights.alpha0_product();
    for (const auto& [nidx, cv] : f.terms) {
      double log2a = std::log2(pinf.mid());
      for (long j = 1; j <= nidx.dim(); ++j) {
        const long nu = nidx.degrees[j - 1];
        if (nu == 0) continue;
        const MehlerParams p = mehler_from_sigma(tp.shape.sigma(j));
        log2a += -(double)nu * std::log2(p.beta);
      }
      sum += std::exp2(log2a) * cv * cv;
    }
    const double via_mehler = std::sqrt(sum);
    out.coeff_norm_residual =
        std::abs(via_family - via_mehler) / std::max(1.0, via_mehler);
  }

  // (c) kernel-diagonal spot check: K(x,x) = c_*^{-1} exp(2 sum tau x^2/c^2).
  {
    TensorHermiteKernel K(weights, TruncationConfig{1e-11, 200000});
    for (const auto& x : grid) {
      const TensorEvalResult kxx = tensor_hermite_eval(K, x, x);
      double expo = 0.0;
      const long J = std::max(x.prefix_len(), tp.depth);
      for (long j = 1; j <= J; ++j) {
        const MehlerParams p = mehler_from_sigma(tp.shape.sigma(j));
        const double xj = x.coord(j);
        expo += 2.0 * p.tau * xj * xj / p.c2;
      }
      const double rhs = std::exp(expo) / tp.c_star;
      out.kernel_diag_residual =
          std::max(out.kernel_diag_residual, std::abs(kxx.value - rhs));
      out.kernel_diag_tolerance = std::max(
          out.kernel_diag_tolerance,
          kxx.error_bound + rhs * (tp.c_star_err / tp.c_star) + 1e-10);
    }
  }
  return out;
}

}  // namespace kernellab
