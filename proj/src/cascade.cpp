#include "qdent/cascade.hpp"

#include <cmath>
#include <string>

namespace qdent {

namespace {

void require_positive_times(Picoseconds tau1, Nanoseconds tau_ss) {
  if (!(tau1.value > 0.0) || !std::isfinite(tau1.value))
    throw InvalidInput("tau1 must be positive and finite");
  if (!(tau_ss.value > 0.0) || std::isnan(tau_ss.value))
    throw InvalidInput("tau_ss must be positive (or infinite)");
}

void require_fraction(double k) {
  if (!(k >= 0.0 && k <= 1.0)) throw InvalidInput("k must lie in [0,1], got " + std::to_string(k));
}

}  // namespace

void CascadeParams::validate() const {
  require_positive_times(tau1, tau_ss);
  require_fraction(k);
  if (!std::isfinite(fss.value)) throw InvalidInput("S must be finite");
  if (!std::isfinite(fss_floor.value) || fss_floor.value < 0.0) throw InvalidInput("S0 must be finite and >= 0");
  if (!std::isfinite(omega.value)) throw InvalidInput("omega must be finite");
  if (!(overhauser.B_max_T >= 0.0)) throw InvalidInput("B_max must be >= 0");
  if (!(overhauser.N_nuclei >= 1.0)) throw InvalidInput("N_nuclei must be >= 1");
}

double spin_preserved_fraction(Picoseconds tau1, Nanoseconds tau_ss) {
  require_positive_times(tau1, tau_ss);
  if (tau_ss.is_infinite()) return 1.0;
  return 1.0 / (1.0 + to_ns(tau1).value / tau_ss.value);
}

double precession_argument(MicroEV fss, Picoseconds tau) {
  return fss.value * to_ns(tau).value / constants::kHbar;
}

Complex cascade_coherence(MicroEV fss, Picoseconds tau1, double g, Degrees omega) {
  const double x = precession_argument(fss, Picoseconds{g * tau1.value});
  return std::polar(1.0, omega.radians()) / Complex(1.0, -x);
}

Complex cascade_coherence(const CascadeParams& params) {
  const double g = spin_preserved_fraction(params.tau1, params.tau_ss);
  return cascade_coherence(params.fss, params.tau1, g, params.omega);
}

Operator4 cascade_operator(double g, Complex coherence, double k, const Operator4& background) {
  Operator4 coherent = Operator4::Zero();
  coherent(0, 0) = 0.5;
  coherent(3, 3) = 0.5;
  coherent(3, 0) = 0.5 * coherence;
  coherent(0, 3) = 0.5 * std::conj(coherence);
  const Operator4 dot_light = g * coherent + (1.0 - g) * 0.25 * Operator4::Identity();
  return k * dot_light + (1.0 - k) * background;
}

DensityMatrix time_averaged_state(const CascadeParams& params) {
  params.validate();
  const double g = spin_preserved_fraction(params.tau1, params.tau_ss);
  return DensityMatrix::from_operator(
      cascade_operator(g, cascade_coherence(params), params.k, params.background.matrix()));
}

double model_fidelity(MicroEV fss, Picoseconds tau1, Nanoseconds tau_ss, double k) {
  require_fraction(k);
  const double g = spin_preserved_fraction(tau1, tau_ss);
  const double x = precession_argument(fss, Picoseconds{g * tau1.value});
  return 0.25 * (1.0 + k * g + 2.0 * k * g / (1.0 + x * x));
}

double model_fidelity(const CascadeParams& params) {
  return model_fidelity(params.fss, params.tau1, params.tau_ss, params.k);
}

double overhauser_sigma(double B_max_T, double N_nuclei) {
  if (!(B_max_T >= 0.0)) throw InvalidInput("B_max must be >= 0");
  if (!(N_nuclei >= 1.0)) throw InvalidInput("number of nuclei must be >= 1");
  return B_max_T / std::sqrt(N_nuclei);
}

MicroEV fss_from_overhauser(MicroEV s0, double B_z_T, double g_e_z, double g_h_z) {
  return {s0.value + constants::kBohrMagneton * (g_e_z + g_h_z) * B_z_T};
}

MicroEV fss_jitter(const OverhauserParams& o) {
  const double sigma_b = overhauser_sigma(o.B_max_T, o.N_nuclei);
  return {std::abs(constants::kBohrMagneton * (o.g_e_z + o.g_h_z)) * sigma_b};
}

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw InvalidInput("quadrature order must be >= 1");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int i = 1; i < order; ++i) {
    jacobi(i, i - 1) = std::sqrt(static_cast<double>(i));
    jacobi(i - 1, i) = jacobi(i, i - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
  }
  return rule;
}

double fluctuation_averaged_fidelity(const CascadeParams& params, MicroEV sigma_S, int quadrature_order) {
  params.validate();
  if (!(sigma_S.value >= 0.0)) throw InvalidInput("sigma_S must be >= 0");
  if (quadrature_order < 1) throw InvalidInput("quadrature order must be >= 1");
  if (sigma_S.value == 0.0) return model_fidelity(params);
  const QuadratureRule rule = gauss_hermite(quadrature_order);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const MicroEV s{params.fss.value + sigma_S.value * rule.nodes[i]};
    sum += rule.weights[i] * model_fidelity(s, params.tau1, params.tau_ss, params.k);
  }
  return sum;
}

double purcell_projected_fidelity(const CascadeParams& params, double purcell_factor) {
  if (!(purcell_factor >= 1.0)) throw InvalidInput("Purcell factor must be >= 1");
  if (std::isinf(purcell_factor)) {
    // τ1 → 0: g → 1 and the Lorentzian term → 1.
    return 0.25 * (1.0 + 3.0 * params.k);
  }
  return model_fidelity(params.fss, Picoseconds{params.tau1.value / purcell_factor}, params.tau_ss, params.k);
}

DensityMatrix unpolarized_background() { return DensityMatrix::maximally_mixed(); }

DensityMatrix vertical_pair_background() {
  Vector4 vv;
  vv << 0.0, 0.0, 0.0, 1.0;
  return DensityMatrix::pure(vv);
}

}  // namespace qdent
