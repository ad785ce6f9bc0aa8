#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "floquet/channels.hpp"
#include "floquet/model.hpp"

namespace floquet {

enum class Variant {
  // V0 + V1 cos(wt) on the barrier; well and outer region static.
  kBarrierDriven,
  // V1 cos(wt) on the floor (well and outer region); barrier static.
  kBottomDriven,
};

const char* to_string(Variant variant);
Variant parse_variant(const std::string& text);

// Root acceptance: smallest / largest singular value of the row-equilibrated
// matching matrix.
inline constexpr double kResidualTolerance = 1e-8;

// Representation of one barrier channel psi(x), a <= x <= b.
enum class BarrierBasis {
  kAnalytic,  // first * cosh(q (x-a)) + second * sinh(q (x-a)) / q
  kBalanced,  // first * exp(-q (x-a)) + second * exp(q (x-b)), Re q >= 0
};

// Channels with |q| (b-a) above this use the balanced basis.
inline constexpr double kBalancedBasisThreshold = 1.0;

BarrierBasis choose_basis(Complex q, double width);

struct BarrierChannel {
  BarrierBasis basis = BarrierBasis::kAnalytic;
  Complex q;
  Complex first;
  Complex second;

  Complex value(double x, double a, double b) const;
  Complex derivative(double x, double a, double b) const;
};

struct MatchingMatrix {
  Eigen::MatrixXcd entries;
  // determinant() == det(entries) * scale; compensates the balanced basis so
  // the product is analytic in eps away from the k' cuts.
  Complex scale{1.0, 0.0};
  Variant variant = Variant::kBarrierDriven;
  ChannelSet channels;
  std::vector<BarrierBasis> bases;  // per barrier channel slot
};

MatchingMatrix assemble(const WellParams& params, ComplexEnergy eps, Truncation truncation,
                        Variant variant = Variant::kBarrierDriven);

Complex determinant(const MatchingMatrix& m);

// Convenience: determinant(assemble(...)).
Complex matching_determinant(const WellParams& params, ComplexEnergy eps, Truncation truncation,
                             Variant variant = Variant::kBarrierDriven);

// Singular values (descending) of the row-equilibrated entries.
Eigen::VectorXd singular_values(const MatchingMatrix& m);

// sigma_min / sigma_max of the row-equilibrated entries.
double matching_residual(const WellParams& params, ComplexEnergy eps, Truncation truncation,
                         Variant variant = Variant::kBarrierDriven);

// Coefficients of a Floquet state. Channel arrays are indexed by slot.
//
// Barrier-driven: the well channel n carries amplitude[n] sin(k_n x)/k_n,
// the barrier holds bare channels l (dressed by J_{n-l}), and the outer
// channel n carries outgoing[n] exp(i k'_n (x-b)).
// Bottom-driven: well and outer channels are bare modes l dressed by
// J_{n-l}; barrier channels are the undressed sidebands n.
struct FloquetState {
  ComplexEnergy eps;
  Truncation truncation;
  Variant variant = Variant::kBarrierDriven;
  std::vector<Complex> amplitude;  // sin(kx)/k coefficients
  std::vector<BarrierChannel> barrier;
  std::vector<Complex> outgoing;  // exp(ik'(x-b)) coefficients

  // Coefficients in the wavefunction's plain form:
  //   A_n sin(k_n x), a_l e^{q_l x} + b_l e^{-q_l x}, t_n e^{i k'_n x}.
  // Normalized to sum |A_n|^2 = 1.
  std::vector<Complex> A;
  std::vector<Complex> a_coeff;
  std::vector<Complex> b_coeff;
  std::vector<Complex> t;

  double residual = 0.0;
  double second_residual = 0.0;  // second-smallest / largest singular value
};

// Null vector of the matching system at a root. Throws SolverError with kind
// "not_a_root" when the residual exceeds `tolerance`, "degenerate_root" when
// the second singular value is below it too.
FloquetState null_state(const WellParams& params, ComplexEnergy eps, Truncation truncation,
                        Variant variant = Variant::kBarrierDriven, double tolerance = kResidualTolerance);

}  // namespace floquet
