#pragma once

#include <map>
#include <string>
#include <vector>

#include "qdent/dataset.hpp"
#include "qdent/quantum_core.hpp"

namespace qdent {

struct DarkCountModel {
  double dark_rate_xx_hz = 0.0;
  double dark_rate_x_hz = 0.0;
  double coincidence_window_ns = 1.0;
  double singles_xx_hz = 0.0;
  double singles_x_hz = 0.0;

  void validate() const;
};

/// Dark model implied by a dataset's header (same dark rate on both arms).
DarkCountModel dark_model_for(const TomographyDataset& dataset);

/// Expected accidental coincidences from dark counts:
///   (s_xx·d_x + s_x·d_xx + d_xx·d_x) · window · t.
double accidental_floor(const DarkCountModel& model, double acquisition_time_s);

/// counts' = max(0, counts − floor) per record. Record-level singles rates
/// override the model's.
TomographyDataset subtract_dark(const TomographyDataset& dataset, const DarkCountModel& model);

/// k·ρ + (1−k)·bg.
DensityMatrix admix_background(const DensityMatrix& rho, double k, const DensityMatrix& bg);

/// Clamp threshold on negative eigenvalues of the corrected state.
inline constexpr double kCorrectionClampEpsilon = 0.02;

/// Inverse of admix_background: (ρ − (1−k)·bg)/k, with eigenvalues in
/// [−ε, 0) clamped to zero. Throws NumericalFailure below −ε.
DensityMatrix background_correct_state(const DensityMatrix& rho_measured, double k, const DensityMatrix& bg,
                                       double epsilon = kCorrectionClampEpsilon);

/// Single-photon Stokes vector (S1: H−V, S2: D−A, S3: R−L).
struct Stokes {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
};

Operator2 single_photon_state(const Stokes& s);
Stokes stokes_of(const Operator2& rho);

/// Projection-resolved g2(0): key "XX:H", "X:V", ... (arm, basis).
using G2Map = std::map<std::string, double>;

std::string g2_key(bool xx_arm, Polarization p);

struct InferredBackground {
  Stokes stokes_xx;
  Stokes stokes_x;
  Operator2 state_xx;
  Operator2 state_x;
  DensityMatrix product;  // state_xx ⊗ state_x
};

/// Per-arm background polarization from projection-resolved excess g2 values
/// (excess ∝ background rate in that projection). Needs H/V and D/A per arm;
/// R/L is optional (S3 = 0 when absent).
InferredBackground infer_bg_state(const G2Map& g2_per_basis, double tolerance = 0.05);

/// Forward model for infer_bg_state: g2_arm(p) = 2·g2_arm·<p|ρ_laser|p>.
G2Map synthesize_g2_per_basis(const Operator2& laser_xx, const Operator2& laser_x, double g2_xx, double g2_x);

/// Two-photon state of background-contaminated coincidences. A laser photon
/// in one arm pairs with a dot photon (unpolarized marginal) in the other, or
/// with a second laser photon; weights follow the inclusion-exclusion terms of
/// k = 1 − g2_x − g2_xx + g2_x·g2_xx.
DensityMatrix accidental_pair_background(const Operator2& laser_xx, const Operator2& laser_x, double g2_xx,
                                         double g2_x);

struct BackgroundModel {
  double g2_xx = 0.0;  // zero-delay autocorrelation, polarization-integrated
  double g2_x = 0.0;
  G2Map g2_per_basis;  // optional projection-resolved measurements

  double k_linear() const;
  /// k from the pair-averaged projection-resolved g2 values; falls back to
  /// k_linear() without them.
  double k_basiswise() const;
  /// Background state used by the correction: accidental-pair mixture built
  /// from the inferred per-arm polarization (vertical when unresolved).
  DensityMatrix bg_state() const;
};

}  // namespace qdent
