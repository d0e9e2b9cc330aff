#pragma once

#include <Eigen/Core>
#include <vector>

namespace kernellab {

// Multi-index over coordinates 1..dim with an implicit zero tail.
struct MultiIndex {
  Eigen::VectorXi degrees;

  long dim() const { return degrees.size(); }
  long total_degree() const {
    long s = 0;
    for (long i = 0; i < degrees.size(); ++i) s += degrees[i];
    return s;
  }
  int support_size() const {
    int s = 0;
    for (long i = 0; i < degrees.size(); ++i) s += degrees[i] > 0 ? 1 : 0;
    return s;
  }
  long max_degree() const {
    long m = 0;
    for (long i = 0; i < degrees.size(); ++i) m = std::max<long>(m, degrees[i]);
    return m;
  }
};

// Finite expansion  f = sum_n c_n h_n  against the tensor Hermite basis.
struct MultiExpansion {
  std::vector<std::pair<MultiIndex, double>> terms;

  long dim() const {
    long d = 0;
    for (const auto& [n, c] : terms) d = std::max(d, n.dim());
    return d;
  }
  long max_coordinate_degree() const {
    long m = 0;
    for (const auto& [n, c] : terms) m = std::max(m, n.max_degree());
    return m;
  }
  double eval(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

}  // namespace kernellab
