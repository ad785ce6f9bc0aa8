#pragma once

#include <vector>

#include "floquet/model.hpp"

namespace floquet {

enum class BranchPolicy {
  // Continuous from the positive real axis, cut on the negative imaginary
  // axis: sqrt(x) > 0 for x > 0, sqrt(-x) = +i sqrt(x). Outer-region k'_n.
  kOutgoingRight,
  // std::sqrt: cut on the negative real axis, Re >= 0.
  kPrincipal,
};

Complex branch_sqrt(Complex z, BranchPolicy policy);

// J_n(x) for integer n and x >= 0, absolute error below 1e-12 for |n| <= 200,
// x <= 50. Throws DomainError for x < 0.
double bessel_j(int n, double x);

// J_0(x) .. J_max_order(x) from a single backward recurrence.
std::vector<double> bessel_j_table(int max_order, double x);

// Dense table indexed by order offset: at(m) == J_m(x) for |m| <= max_order.
class BesselTable {
 public:
  BesselTable(int max_order, double x);

  double at(int order) const;
  int max_order() const { return max_order_; }

 private:
  int max_order_;
  std::vector<double> positive_;
};

}  // namespace floquet
