#include "floquet/matching.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "floquet/error.hpp"
#include "floquet/special.hpp"

namespace floquet {

namespace {

constexpr Complex kI{0.0, 1.0};

// sin(k x) / k, entire in k^2.
Complex sin_over_k(Complex k, double x) {
  const Complex kx = k * x;
  if (std::abs(kx) < 1e-4) {
    const Complex s = kx * kx;
    return x * (1.0 - s / 6.0 + s * s / 120.0);
  }
  return std::sin(kx) / k;
}

// sinh(q x) / q, entire in q^2.
Complex sinh_over_q(Complex q, double x) {
  const Complex qx = q * x;
  if (std::abs(qx) < 1e-4) {
    const Complex s = qx * qx;
    return x * (1.0 + s / 6.0 + s * s / 120.0);
  }
  return std::sinh(qx) / q;
}

// Value and derivative of one barrier basis function at both edges.
struct EdgeValues {
  Complex at_a, slope_a, at_b, slope_b;
};

std::array<EdgeValues, 2> barrier_edges(Complex q, double width, BarrierBasis basis) {
  if (basis == BarrierBasis::kAnalytic) {
    const Complex c = std::cosh(q * width);
    const Complex s = sinh_over_q(q, width);
    return {EdgeValues{1.0, 0.0, c, q * q * s}, EdgeValues{0.0, 1.0, s, c}};
  }
  const Complex e = std::exp(-q * width);
  return {EdgeValues{1.0, -q, e, -q * e}, EdgeValues{e, q * e, 1.0, q}};
}

// log of det(analytic pair) / det(balanced pair) = q d - log(2q).
Complex balanced_log_scale(Complex q, double width) { return q * width - std::log(2.0 * q); }

Eigen::MatrixXcd row_equilibrated(const Eigen::MatrixXcd& m) {
  Eigen::MatrixXcd out = m;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double peak = out.row(r).cwiseAbs().maxCoeff();
    if (peak > 0.0) out.row(r) /= peak;
  }
  return out;
}

void assemble_barrier_driven(const WellParams& params, MatchingMatrix& m, Complex& log_scale) {
  const ChannelSet& ch = m.channels;
  const Truncation tr = ch.truncation;
  const int count = tr.channels();
  const double a = params.a;
  const double width = params.barrier_width();
  const BesselTable bessel(2 * tr.n, ch.alpha);

  std::vector<std::array<EdgeValues, 2>> edges(count);
  for (int l = 0; l < count; ++l) {
    edges[l] = barrier_edges(ch.q[l], width, m.bases[l]);
    if (m.bases[l] == BarrierBasis::kBalanced) log_scale += balanced_log_scale(ch.q[l], width);
  }
  for (int n = 0; n < count; ++n) {
    const Complex cos_ka = std::cos(ch.k[n] * a);
    const Complex sin_ka = sin_over_k(ch.k[n], a);
    const Complex ikp = kI * ch.kprime[n];
    for (int l = 0; l < count; ++l) {
      const double dressing = bessel.at(tr.index(n) - tr.index(l));
      for (int beta = 0; beta < 2; ++beta) {
        const EdgeValues& e = edges[l][beta];
        const int col = beta * count + l;
        m.entries(n, col) = dressing * (cos_ka * e.at_a - sin_ka * e.slope_a);
        m.entries(count + n, col) = dressing * (ikp * e.at_b - e.slope_b);
      }
    }
  }
}

// Unknowns: well amplitudes (cols 0..M-1) and outgoing amplitudes (M..2M-1).
// Rows: barrier channel n propagated from x = a to x = b.
void assemble_bottom_driven(const WellParams& params, MatchingMatrix& m, Complex& log_scale) {
  const ChannelSet& ch = m.channels;
  const Truncation tr = ch.truncation;
  const int count = tr.channels();
  const double a = params.a;
  const double width = params.barrier_width();
  const BesselTable bessel(2 * tr.n, ch.alpha);

  std::vector<Complex> sin_ka(count), cos_ka(count), ikp(count);
  for (int l = 0; l < count; ++l) {
    sin_ka[l] = sin_over_k(ch.k[l], a);
    cos_ka[l] = std::cos(ch.k[l] * a);
    ikp[l] = kI * ch.kprime[l];
  }
  for (int n = 0; n < count; ++n) {
    const Complex q = ch.q[n];
    const bool balanced = m.bases[n] == BarrierBasis::kBalanced;
    const Complex c = std::cosh(q * width);
    const Complex s = sinh_over_q(q, width);
    const Complex e = std::exp(-q * width);
    if (balanced) log_scale += balanced_log_scale(q, width);
    for (int l = 0; l < count; ++l) {
      const double dressing = bessel.at(tr.index(n) - tr.index(l));
      if (!balanced) {
        m.entries(n, l) = dressing * (c * sin_ka[l] + s * cos_ka[l]);
        m.entries(n, count + l) = -dressing;
        m.entries(count + n, l) = dressing * (q * q * s * sin_ka[l] + c * cos_ka[l]);
        m.entries(count + n, count + l) = -dressing * ikp[l];
      } else {
        // rows q R1 - R2 and e^{-qd} (q R1 + R2)
        m.entries(n, l) = dressing * e * (q * sin_ka[l] - cos_ka[l]);
        m.entries(n, count + l) = dressing * (ikp[l] - q);
        m.entries(count + n, l) = dressing * (q * sin_ka[l] + cos_ka[l]);
        m.entries(count + n, count + l) = -dressing * e * (q + ikp[l]);
      }
    }
  }
}

}  // namespace

const char* to_string(Variant variant) {
  return variant == Variant::kBarrierDriven ? "barrier" : "bottom";
}

Variant parse_variant(const std::string& text) {
  if (text == "barrier") return Variant::kBarrierDriven;
  if (text == "bottom") return Variant::kBottomDriven;
  throw DomainError("variant must be 'barrier' or 'bottom', got '" + text + "'");
}

BarrierBasis choose_basis(Complex q, double width) {
  return std::abs(q) * width > kBalancedBasisThreshold ? BarrierBasis::kBalanced : BarrierBasis::kAnalytic;
}

Complex BarrierChannel::value(double x, double a, double b) const {
  if (basis == BarrierBasis::kAnalytic) return first * std::cosh(q * (x - a)) + second * sinh_over_q(q, x - a);
  return first * std::exp(-q * (x - a)) + second * std::exp(q * (x - b));
}

Complex BarrierChannel::derivative(double x, double a, double b) const {
  if (basis == BarrierBasis::kAnalytic)
    return first * q * q * sinh_over_q(q, x - a) + second * std::cosh(q * (x - a));
  return q * (second * std::exp(q * (x - b)) - first * std::exp(-q * (x - a)));
}

MatchingMatrix assemble(const WellParams& params, ComplexEnergy eps, Truncation truncation, Variant variant) {
  if (truncation.n < 0) throw DomainError("assemble: truncation must be >= 0");
  MatchingMatrix m;
  m.variant = variant;
  m.channels = build_channels(params, eps, truncation);
  const int count = truncation.channels();
  m.entries = Eigen::MatrixXcd::Zero(2 * count, 2 * count);
  m.bases.resize(count);
  for (int slot = 0; slot < count; ++slot) m.bases[slot] = choose_basis(m.channels.q[slot], params.barrier_width());

  Complex log_scale{0.0, 0.0};
  if (variant == Variant::kBarrierDriven)
    assemble_barrier_driven(params, m, log_scale);
  else
    assemble_bottom_driven(params, m, log_scale);
  m.scale = std::exp(log_scale);
  return m;
}

Complex determinant(const MatchingMatrix& m) {
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m.entries);
  return lu.determinant() * m.scale;
}

Complex matching_determinant(const WellParams& params, ComplexEnergy eps, Truncation truncation, Variant variant) {
  return determinant(assemble(params, eps, truncation, variant));
}

Eigen::VectorXd singular_values(const MatchingMatrix& m) {
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(row_equilibrated(m.entries));
  return svd.singularValues();
}

double matching_residual(const WellParams& params, ComplexEnergy eps, Truncation truncation, Variant variant) {
  const Eigen::VectorXd sv = singular_values(assemble(params, eps, truncation, variant));
  if (sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

FloquetState null_state(const WellParams& params, ComplexEnergy eps, Truncation truncation, Variant variant,
                        double tolerance) {
  const MatchingMatrix m = assemble(params, eps, truncation, variant);
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(row_equilibrated(m.entries), Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const Eigen::Index size = sv.size();

  FloquetState state;
  state.eps = eps;
  state.truncation = truncation;
  state.variant = variant;
  state.residual = sv(0) > 0.0 ? sv(size - 1) / sv(0) : 0.0;
  state.second_residual = size > 1 && sv(0) > 0.0 ? sv(size - 2) / sv(0) : 1.0;
  if (!(state.residual < tolerance)) {
    throw SolverError("not_a_root", "null_state: residual " + std::to_string(state.residual) +
                                        " exceeds tolerance at eps = (" + std::to_string(eps.real()) + ", " +
                                        std::to_string(eps.imag()) + ")");
  }
  if (state.second_residual < tolerance) {
    throw SolverError("degenerate_root", "null_state: null space has dimension > 1 (second singular value ratio " +
                                             std::to_string(state.second_residual) + ")");
  }
  const Eigen::VectorXcd v = svd.matrixV().col(size - 1);

  const ChannelSet& ch = m.channels;
  const int count = truncation.channels();
  const double a = params.a;
  const double b = params.b;
  const BesselTable bessel(2 * truncation.n, ch.alpha);
  auto dressing = [&](int n_slot, int l_slot) { return bessel.at(truncation.index(n_slot) - truncation.index(l_slot)); };

  state.amplitude.assign(count, 0.0);
  state.outgoing.assign(count, 0.0);
  state.barrier.resize(count);

  if (variant == Variant::kBarrierDriven) {
    for (int l = 0; l < count; ++l) state.barrier[l] = BarrierChannel{m.bases[l], ch.q[l], v(l), v(count + l)};
    for (int n = 0; n < count; ++n) {
      Complex value_a, slope_a, value_b;
      for (int l = 0; l < count; ++l) {
        const double j = dressing(n, l);
        value_a += j * state.barrier[l].value(a, a, b);
        slope_a += j * state.barrier[l].derivative(a, a, b);
        value_b += j * state.barrier[l].value(b, a, b);
      }
      const Complex sin_ka = sin_over_k(ch.k[n], a);
      const Complex cos_ka = std::cos(ch.k[n] * a);
      // Use whichever matching equation is better conditioned.
      state.amplitude[n] = std::abs(ch.k[n] * sin_ka) >= std::abs(cos_ka) ? value_a / sin_ka : slope_a / cos_ka;
      state.outgoing[n] = value_b;
    }
  } else {
    for (int l = 0; l < count; ++l) {
      state.amplitude[l] = v(l);
      state.outgoing[l] = v(count + l);
    }
    for (int n = 0; n < count; ++n) {
      Complex x_val, x_slope, b_val, b_slope;
      for (int l = 0; l < count; ++l) {
        const double j = dressing(n, l);
        x_val += j * sin_over_k(ch.k[l], a) * state.amplitude[l];
        x_slope += j * std::cos(ch.k[l] * a) * state.amplitude[l];
        b_val += j * state.outgoing[l];
        b_slope += j * kI * ch.kprime[l] * state.outgoing[l];
      }
      const Complex q = ch.q[n];
      BarrierChannel channel{m.bases[n], q, x_val, x_slope};
      if (channel.basis == BarrierBasis::kBalanced) {
        // decaying part from the x = a data, growing part from the x = b data
        channel.first = 0.5 * (x_val - x_slope / q);
        channel.second = 0.5 * (b_val + b_slope / q);
      }
      state.barrier[n] = channel;
    }
  }

  // Plain-form coefficients and normalization sum |A_n|^2 = 1.
  state.A.resize(count);
  for (int n = 0; n < count; ++n)
    state.A[n] = ch.k[n] != 0.0 ? state.amplitude[n] / ch.k[n] : state.amplitude[n];
  double norm = 0.0;
  int peak = 0;
  for (int n = 0; n < count; ++n) {
    norm += std::norm(state.A[n]);
    if (std::abs(state.A[n]) > std::abs(state.A[peak])) peak = n;
  }
  norm = std::sqrt(norm);
  // Fix the global phase: largest A_n real and positive.
  const Complex gauge = norm > 0.0 ? std::conj(state.A[peak]) / (std::abs(state.A[peak]) * norm) : Complex(1.0);
  for (int n = 0; n < count; ++n) {
    state.A[n] *= gauge;
    state.amplitude[n] *= gauge;
    state.outgoing[n] *= gauge;
    state.barrier[n].first *= gauge;
    state.barrier[n].second *= gauge;
  }

  state.a_coeff.resize(count);
  state.b_coeff.resize(count);
  state.t.resize(count);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int l = 0; l < count; ++l) {
    const BarrierChannel& c = state.barrier[l];
    if (c.q == 0.0) {
      state.a_coeff[l] = state.b_coeff[l] = Complex(nan, nan);
    } else if (c.basis == BarrierBasis::kAnalytic) {
      state.a_coeff[l] = 0.5 * (c.first + c.second / c.q) * std::exp(-c.q * a);
      state.b_coeff[l] = 0.5 * (c.first - c.second / c.q) * std::exp(c.q * a);
    } else {
      state.a_coeff[l] = c.second * std::exp(-c.q * b);
      state.b_coeff[l] = c.first * std::exp(c.q * a);
    }
    state.t[l] = state.outgoing[l] * std::exp(-kI * ch.kprime[l] * b);
  }
  return state;
}

}  // namespace floquet
