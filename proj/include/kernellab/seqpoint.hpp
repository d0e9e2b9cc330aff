#pragma once

#include <Eigen/Core>
#include <optional>

#include "kernellab/errors.hpp"
#include "kernellab/series.hpp"

namespace kernellab {

// A point of R^N: explicit prefix plus a parametric tail.  Tail kinds keep
// the coordinate series certifiable in closed form.
struct SeqPoint {
  enum class Tail { Zero, Power, Geometric, Constant };

  Eigen::VectorXd prefix;
  Tail tail = Tail::Zero;
  double t_a = 0.0;  // Power: a j^{-p}; Geometric: a q^{j-d}; Constant: a
  double t_p = 0.0;  // Power exponent
  double t_q = 0.0;  // Geometric ratio, |q| < 1

  static SeqPoint zero_tail(Eigen::VectorXd prefix_values) {
    SeqPoint x;
    x.prefix = std::move(prefix_values);
    return x;
  }
  static SeqPoint power_tail(Eigen::VectorXd prefix_values, double a, double p) {
    SeqPoint x;
    x.prefix = std::move(prefix_values);
    x.tail = Tail::Power;
    x.t_a = a;
    x.t_p = p;
    return x;
  }
  static SeqPoint geometric_tail(Eigen::VectorXd prefix_values, double a,
                                 double q) {
    if (!(std::abs(q) < 1.0))
      throw config_error("SeqPoint: geometric tail needs |q| < 1");
    SeqPoint x;
    x.prefix = std::move(prefix_values);
    x.tail = Tail::Geometric;
    x.t_a = a;
    x.t_q = q;
    return x;
  }
  static SeqPoint constant_tail(Eigen::VectorXd prefix_values, double a) {
    SeqPoint x;
    x.prefix = std::move(prefix_values);
    x.tail = Tail::Constant;
    x.t_a = a;
    return x;
  }

  long prefix_len() const { return prefix.size(); }

  double coord(long j) const {
    if (j < 1) throw domain_error("SeqPoint: j must be >= 1");
    if (j <= prefix.size()) return prefix[j - 1];
    switch (tail) {
      case Tail::Zero:
        return 0.0;
      case Tail::Power:
        return t_a * std::pow((double)j, -t_p);
      case Tail::Geometric:
        return t_a * std::pow(t_q, (double)(j - prefix.size()));
      case Tail::Constant:
        return t_a;
    }
    return 0.0;
  }

  // Magnitude majorant: |x_j| <= term(j) for j > prefix_len, with equality
  // whenever the tail has a fixed sign.
  TailTerm tail_term_abs() const {
    TailTerm t;
    switch (tail) {
      case Tail::Zero:
        t.A = 0.0;
        break;
      case Tail::Power:
        t.A = std::abs(t_a);
        t.Ep = -t_p;
        break;
      case Tail::Geometric:
        // |a| |q|^{j-d} = (|a| |q|^{-d}) |q|^j
        t.A = std::abs(t_a) * std::pow(std::abs(t_q), -(double)prefix.size());
        t.Q = std::abs(t_q);
        break;
      case Tail::Constant:
        t.A = std::abs(t_a);
        break;
    }
    return t;
  }

  // Exact value form x_j = term(j); absent for alternating geometric tails.
  std::optional<TailTerm> tail_term_exact() const {
    if (tail == Tail::Geometric && t_q < 0.0) return std::nullopt;
    TailTerm t = tail_term_abs();
    if (t_a < 0.0) t.A = -t.A;
    return t;
  }

  // sup_{j > J} |x_j| for J >= prefix_len.
  double tail_sup_abs(long J) const {
    switch (tail) {
      case Tail::Zero:
        return 0.0;
      case Tail::Power:
        return t_p >= 0.0 ? std::abs(coord(J + 1))
                          : std::numeric_limits<double>::infinity();
      case Tail::Geometric:
        return std::abs(coord(J + 1));
      case Tail::Constant:
        return std::abs(t_a);
    }
    return 0.0;
  }

  bool tail_bounded() const {
    return tail != Tail::Power || t_p >= 0.0;
  }
};

}  // namespace kernellab
