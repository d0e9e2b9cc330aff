#pragma once

#include <cmath>

#include "kernellab/errors.hpp"

namespace kernellab {

// Scaling / geometric-decay / damping triple attached to a Gaussian shape
// parameter:
//   c = (1 + 8 sigma^2)^{1/4},  beta = 1 - 2/(1+c^2),  tau = (c^2-1)/4,
// together with the Fourier weights alpha_nu = 1 / ((1-beta) beta^nu).
struct MehlerParams {
  double sigma = 0.0;
  double c = 0.0;
  double c2 = 0.0;      // c^2
  double c2m1 = 0.0;    // c^2 - 1, kept cancellation-free
  double beta = 0.0;
  double tau = 0.0;

  double log2_alpha(long nu) const {
    return -std::log2(1.0 - beta) - (double)nu * std::log2(beta);
  }
  double alpha(long nu) const { return std::exp2(log2_alpha(nu)); }
  double alpha_inv(long nu) const { return std::exp2(-log2_alpha(nu)); }
};

inline MehlerParams mehler_from_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw domain_error("mehler_from_sigma: sigma must be positive and finite");
  MehlerParams p;
  p.sigma = sigma;
  const double u = 8.0 * sigma * sigma;
  // c^2 - 1 = u / (sqrt(1+u) + 1) avoids cancellation for small sigma.
  p.c2m1 = u / (std::sqrt(1.0 + u) + 1.0);
  p.c2 = 1.0 + p.c2m1;
  p.c = std::sqrt(p.c2);
  p.beta = p.c2m1 / (p.c2m1 + 2.0);
  p.tau = p.c2m1 / 4.0;
  return p;
}

}  // namespace kernellab
