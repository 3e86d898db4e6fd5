#pragma once

#include <span>

#include "qdent/dataset.hpp"
#include "qdent/quantum_core.hpp"

namespace qdent {

struct ValueWithError {
  double value = 0.0;
  double error = 0.0;
};

struct EntanglementMetrics {
  ValueWithError fidelity;
  ValueWithError concurrence;
  ValueWithError largest_eigenvalue;
};

struct Visibilities {
  double linear = 0.0;
  double diagonal = 0.0;
  double circular = 0.0;
};

/// <ψ(ω)|ρ|ψ(ω)> with |ψ(ω)> = (|HH> + e^{iω}|VV>)/√2.
double fidelity_to_bell(const DensityMatrix& rho, Degrees omega = {0.0});

/// max over ω of fidelity_to_bell(ρ, ω) = (ρ_HH,HH + ρ_VV,VV)/2 + |ρ_VV,HH|.
double optimal_phase_fidelity(const DensityMatrix& rho);
/// Target phase that maximizes fidelity_to_bell.
Degrees optimal_bell_phase(const DensityMatrix& rho);

/// Wootters concurrence with the spin flip taken in the H/V product basis.
double concurrence(const DensityMatrix& rho);

double largest_eigenvalue(const DensityMatrix& rho);

/// Point values; uncertainties stay zero (see monte_carlo_uncertainty).
EntanglementMetrics compute_metrics(const DensityMatrix& rho);

/// C = (n_co − n_cross)/(n_co + n_cross) from the pairs (HH,HV), (DD,DA),
/// (RR,RL). Counts are normalized by acquisition time.
Visibilities visibilities_from_counts(std::span<const CoincidenceRecord> records);

/// Born-rule visibilities of a state under the ideal reduced settings.
Visibilities visibilities_from_state(const DensityMatrix& rho);

/// ¼(1 + C_lin + C_diag − C_circ).
double visibility_fidelity(const Visibilities& v);

/// k = (1 − g2_x)(1 − g2_xx) clamped to [0,1]; clamping is reported through
/// `diagnostics` when given.
double k_from_g2(double g2_x, double g2_xx, Diagnostics* diagnostics = nullptr);

}  // namespace qdent
