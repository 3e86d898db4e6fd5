#pragma once

#include <vector>

#include "qdent/quantum_core.hpp"
#include "qdent/units.hpp"

namespace qdent {

/// Static Gaussian model of the nuclear (Overhauser) field acting on the FSS.
struct OverhauserParams {
  double B_max_T = 4.0;
  double N_nuclei = 4e5;
  double g_e_z = -0.15;
  double g_h_z = 1.1;
};

/// Physical parameters of the biexciton-exciton cascade.
struct CascadeParams {
  MicroEV fss{0.0};
  MicroEV fss_floor{0.25};
  Picoseconds tau1{241.0};
  Nanoseconds tau_ss = Nanoseconds::infinite();
  double k = 1.0;  // fraction of detected light emitted by the dot
  Degrees omega{0.0};
  DensityMatrix background;  // defaults to I/4
  OverhauserParams overhauser;

  void validate() const;
};

/// g = 1/(1 + τ1/τss); exactly 1 when τss is infinite.
double spin_preserved_fraction(Picoseconds tau1, Nanoseconds tau_ss);

/// Dimensionless precession argument S·τ/ħ for an effective decay time τ.
double precession_argument(MicroEV fss, Picoseconds tau);

/// Lifetime-averaged coherence e^{iω}/(1 − i·g·S·τ1/ħ) sitting on |VV><HH|.
Complex cascade_coherence(const CascadeParams& params);

/// k·[g·ρ_coh + (1−g)·I/4] + (1−k)·background, unvalidated. ρ_coh carries
/// `coherence` on |VV><HH| and its conjugate on |HH><VV|.
Operator4 cascade_operator(double g, Complex coherence, double k, const Operator4& background);

/// Coherence for an explicit spin-preserved fraction g.
Complex cascade_coherence(MicroEV fss, Picoseconds tau1, double g, Degrees omega);

/// k·[g·ρ_coh + (1−g)·I/4] + (1−k)·ρ_background.
DensityMatrix time_averaged_state(const CascadeParams& params);

/// Closed form ¼(1 + kg + 2kg/(1 + (gSτ1/ħ)²)).
double model_fidelity(MicroEV fss, Picoseconds tau1, Nanoseconds tau_ss, double k);
double model_fidelity(const CascadeParams& params);

/// σ_B = B_max/√N, in tesla.
double overhauser_sigma(double B_max_T, double N_nuclei);

/// S = S0 + μB·(g_e,z + g_h,z)·Bz.
MicroEV fss_from_overhauser(MicroEV s0, double B_z_T, double g_e_z, double g_h_z);

/// Standard deviation of the FSS induced by the Overhauser field.
MicroEV fss_jitter(const OverhauserParams& overhauser);

/// Probabilists' Gauss-Hermite rule: E[f(X)], X ~ N(0,1) ≈ Σ w_i f(x_i).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_hermite(int order);

/// E[model_fidelity(S)] for S ~ Normal(params.fss, sigma_S).
double fluctuation_averaged_fidelity(const CascadeParams& params, MicroEV sigma_S,
                                     int quadrature_order = 32);

/// model_fidelity with τ1 shortened to τ1/F_P.
double purcell_projected_fidelity(const CascadeParams& params, double purcell_factor);

/// Background presets.
DensityMatrix unpolarized_background();
DensityMatrix vertical_pair_background();  // |VV><VV|

}  // namespace qdent
