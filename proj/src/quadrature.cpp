#include "kernellab/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "kernellab/errors.hpp"
#include "kernellab/hermite.hpp"

namespace kernellab {

GHRule gh_rule(int n) {
  if (n < 1 || n > 200) throw domain_error("gh_rule: n must be in [1, 200]");
  GHRule rule;
  rule.degree_exact = 2 * n - 1;
  if (n == 1) {
    rule.nodes = Eigen::VectorXd::Zero(1);
    rule.weights = Eigen::VectorXd::Ones(1);
    return rule;
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt((double)k);
    T(k, k - 1) = b;
    T(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v = es.eigenvectors()(0, i);
    rule.weights[i] = v * v;
  }

  // Enforce the exact symmetry the eigensolver only delivers to rounding.
  for (int i = 0; i < n / 2; ++i) {
    const int k = n - 1 - i;
    const double m = 0.5 * (rule.nodes[k] - rule.nodes[i]);
    rule.nodes[i] = -m;
    rule.nodes[k] = m;
    const double w = 0.5 * (rule.weights[i] + rule.weights[k]);
    rule.weights[i] = w;
    rule.weights[k] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  rule.weights /= rule.weights.sum();
  return rule;
}

Eigen::MatrixXd mu_sample(int dim, int count, std::uint64_t seed) {
  if (dim < 0 || count < 0) throw domain_error("mu_sample: negative size");
  // Golden-ratio mixing keeps streams for nearby seeds apart.
  std::mt19937_64 eng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd out(count, dim);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < dim; ++j) out(i, j) = normal(eng);
  return out;
}

namespace {

// Tensor-quadrature marginal int f(x_u, y_comp) dmu0^comp at a point, with
// the complement taken inside {1..d}.
double marginal_at(const AnovaDecomposition::Fn& f, int d, const GHRule& rule,
                   std::uint32_t mask, const Eigen::VectorXd& x) {
  std::vector<int> comp;
  for (int i = 0; i < d; ++i)
    if (!(mask >> i & 1u)) comp.push_back(i);
  const long n = rule.nodes.size();
  Eigen::VectorXd point(d);
  for (int i = 0; i < d; ++i) point[i] = (mask >> i & 1u) ? x[i] : 0.0;
  if (comp.empty()) return f(point);

  double total = 0.0;
  std::vector<long> idx(comp.size(), 0);
  while (true) {
    double w = 1.0;
    for (size_t k = 0; k < comp.size(); ++k) {
      point[comp[k]] = rule.nodes[idx[k]];
      w *= rule.weights[idx[k]];
    }
    total += w * f(point);
    size_t k = 0;
    while (k < comp.size() && ++idx[k] == n) idx[k++] = 0;
    if (k == comp.size()) break;
  }
  return total;
}

int popcount(std::uint32_t v) {
  int c = 0;
  while (v) {
    c += v & 1u;
    v >>= 1;
  }
  return c;
}

}  // namespace

double AnovaDecomposition::component(std::uint32_t mask,
                                     const Eigen::VectorXd& x) const {
  // Moebius inversion of the marginalization lattice.
  double value = 0.0;
  std::uint32_t sub = mask;
  while (true) {
    const int sign = (popcount(mask) - popcount(sub)) % 2 == 0 ? 1 : -1;
    value += sign * marginal_at(f_, d_, rule_, sub, x);
    if (sub == 0) break;
    sub = (sub - 1) & mask;
  }
  return value;
}

double AnovaDecomposition::reconstruct(const Eigen::VectorXd& x) const {
  // Telescoping: the Moebius sums collapse to the full-mask marginal, which
  // is f itself; evaluate honestly by summing all components.
  double s = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << d_); ++mask)
    s += component(mask, x);
  return s;
}

double AnovaDecomposition::variance(std::uint32_t mask) const {
  return variances_.at(mask);
}

double AnovaDecomposition::total_variance() const {
  double s = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << d_); ++mask) s += variances_[mask];
  return s;
}

AnovaDecomposition anova_decompose(AnovaDecomposition::Fn f, int d,
                                   const GHRule& rule) {
  if (d < 1 || d > 6)
    throw unsupported_error("anova_decompose: d must be in [1, 6]");
  const long n = rule.nodes.size();
  double grid_cost = 1.0;
  for (int i = 0; i < d; ++i) grid_cost *= (double)n;
  if (grid_cost > 1e7)
    throw unsupported_error("anova_decompose: tensor grid too large");

  AnovaDecomposition dec;
  dec.f_ = std::move(f);
  dec.d_ = d;
  dec.rule_ = rule;
  dec.mean_ = marginal_at(dec.f_, d, rule, 0, Eigen::VectorXd::Zero(d));

  // Variances by tensor quadrature of f_u^2 over the coordinates of u.
  dec.variances_.assign(1u << d, 0.0);
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < d; ++i)
      if (mask >> i & 1u) act.push_back(i);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    std::vector<long> idx(act.size(), 0);
    double var = 0.0;
    while (true) {
      double w = 1.0;
      for (size_t k = 0; k < act.size(); ++k) {
        x[act[k]] = rule.nodes[idx[k]];
        w *= rule.weights[idx[k]];
      }
      const double v = dec.component(mask, x);
      var += w * v * v;
      size_t k = 0;
      while (k < act.size() && ++idx[k] == n) idx[k++] = 0;
      if (k == act.size()) break;
    }
    dec.variances_[mask] = var;
  }
  return dec;
}

double MultiExpansion::eval(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double s = 0.0;
  for (const auto& [n, c] : terms) {
    double prod = c;
    for (long j = 0; j < n.dim(); ++j) {
      if (n.degrees[j] == 0) continue;
      if (j >= x.size())
        throw domain_error("MultiExpansion::eval: point has too few coordinates");
      prod *= hermite_all(x[j], n.degrees[j]).values[n.degrees[j]];
    }
    s += prod;
  }
  return s;
}

double hk_norm_of_expansion(const MultiExpansion& f, const WeightFamily& w) {
  ValidationResult v = validate_weights(w);
  if (v.h2 != Tri::True)
    throw unsupported_error("hk_norm_of_expansion: (H2) not certified");
  const Enclosure prod = w.alpha0_product();
  const double log2_p_inf = std::log2(prod.mid());
  double s = 0.0;
  for (const auto& [n, c] : f.terms) {
    double log2_alpha_n = log2_p_inf;
    for (long j = 0; j < n.dim(); ++j) {
      if (n.degrees[j] == 0) continue;
      log2_alpha_n += w.log2_alpha(n.degrees[j], j + 1) - w.log2_alpha(0, j + 1);
    }
    s += std::exp2(log2_alpha_n) * c * c;
  }
  return std::sqrt(s);
}

}  // namespace kernellab
