#include "floquet/special.hpp"

#include <cmath>
#include <cstdlib>

#include "floquet/error.hpp"

namespace floquet {

Complex branch_sqrt(Complex z, BranchPolicy policy) {
  if (policy == BranchPolicy::kPrincipal) return std::sqrt(z);
  // Signed zeros must not flip the branch: treat Im == 0 as the upper side.
  if (z.imag() == 0.0) {
    if (z.real() >= 0.0) return {std::sqrt(z.real()), 0.0};
    return {0.0, std::sqrt(-z.real())};
  }
  Complex w = std::sqrt(z);
  if (z.real() < 0.0 && z.imag() < 0.0) w = -w;
  return w;
}

namespace {

std::vector<double> series_table(int max_order, double x) {
  std::vector<double> out(max_order + 1, 0.0);
  const double half = 0.5 * x;
  const double half_sq = half * half;
  double lead = 1.0;  // (x/2)^n / n!
  for (int n = 0; n <= max_order; ++n) {
    if (n > 0) lead *= half / n;
    if (lead == 0.0) break;
    double term = lead;
    double sum = term;
    for (int k = 1; k < 40; ++k) {
      term *= -half_sq / (static_cast<double>(k) * (k + n));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    out[n] = sum;
  }
  return out;
}

// Miller's algorithm: backward recurrence from an order well above both
// max_order and x, normalized with J0 + 2 sum J_{2k} = 1.
std::vector<double> miller_table(int max_order, double x) {
  const int top = std::max(max_order, static_cast<int>(x));
  int start = top + 20 + static_cast<int>(std::sqrt(40.0 * (top + 1)));
  start += start % 2;
  std::vector<double> out(max_order + 1, 0.0);
  const double two_over_x = 2.0 / x;
  double next = 0.0;
  double current = 1e-30;
  double norm = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = k * two_over_x * current - next;
    next = current;
    current = prev;
    if (std::abs(current) > 1e250) {
      current *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      for (double& v : out) v *= 1e-250;
    }
    // current now holds the unnormalized J_{k-1}.
    const int order = k - 1;
    if (order % 2 == 0 && order > 0) norm += 2.0 * current;
    if (order <= max_order) out[order] = current;
  }
  norm += current;
  for (double& v : out) v /= norm;
  return out;
}

}  // namespace

std::vector<double> bessel_j_table(int max_order, double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("bessel_j: argument must be >= 0");
  if (max_order < 0) throw DomainError("bessel_j_table: max_order must be >= 0");
  if (x == 0.0) {
    std::vector<double> out(max_order + 1, 0.0);
    out[0] = 1.0;
    return out;
  }
  if (x < 0.5) return series_table(max_order, x);
  return miller_table(max_order, x);
}

double bessel_j(int n, double x) {
  const int order = std::abs(n);
  const double value = bessel_j_table(order, x)[order];
  return (n < 0 && order % 2 == 1) ? -value : value;
}

BesselTable::BesselTable(int max_order, double x)
    : max_order_(max_order), positive_(bessel_j_table(max_order, x)) {}

double BesselTable::at(int order) const {
  const int m = std::abs(order);
  if (m > max_order_) throw DomainError("BesselTable: order outside table");
  const double value = positive_[m];
  return (order < 0 && m % 2 == 1) ? -value : value;
}

}  // namespace floquet
