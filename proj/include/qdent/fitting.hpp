#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qdent/cascade.hpp"
#include "qdent/errors.hpp"
#include "qdent/units.hpp"

namespace qdent {

struct FssFidelityPoint {
  MicroEV fss;
  double fidelity = 0.0;
  double sigma = 0.0;  // standard error, > 0
};

enum class FidelityEstimator {
  DensityMatrix,  // Bell overlap with the target phase set to ω
  Visibility,     // ¼(1 + C_lin + C_diag − C_circ) from Born-rule visibilities
};

/// Fidelity of the lifetime-averaged state with an unpolarized background.
/// S enters through |S| (the splitting magnitude).
double model_curve(MicroEV fss, Picoseconds tau1, Nanoseconds tau_ss, double k, Degrees omega,
                   FidelityEstimator estimator);

/// Same as model_curve but parameterized by the spin-scattering rate 1/τss
/// (ns⁻¹). Rates <= 0 are allowed so that the fit is unconstrained around
/// τss → ∞.
double model_curve_rate(MicroEV fss, Picoseconds tau1, double rate_per_ns, double k, Degrees omega,
                        FidelityEstimator estimator);

struct FitOptions {
  bool fit_omega = false;
  std::uint64_t seed = 0;
  int mc_trials = 200;  // Monte-Carlo resamples for parameter errors (0 disables)
  int jobs = 1;
  int max_iterations = 200;
};

struct FitResult {
  double rate_per_ns = 0.0;  // 1/τss
  double rate_error = 0.0;
  Nanoseconds tau_ss = Nanoseconds::infinite();
  double tau_ss_error_ns = 0.0;     // linearized from rate_error
  bool tau_ss_unbounded = false;     // fitted rate <= 0
  std::pair<double, double> tau_ss_interval_ns{0.0, 0.0};  // 1σ, upper may be +inf
  bool omega_fitted = false;
  Degrees omega{0.0};
  double omega_error_deg = 0.0;
  double chi_squared = 0.0;
  int dof = 0;
  std::vector<double> residuals;  // (f_model − f)/σ per point
  /// Covariance of (1/τss [, ω]) from the Gauss-Newton approximation.
  Eigen::MatrixXd rate_covariance;
  /// Same, propagated to (τss [, ω]); empty when τss is unbounded.
  Eigen::MatrixXd covariance;
  int iterations = 0;
  int mc_failures = 0;
  Picoseconds tau1{0.0};
  double k = 1.0;

  FidelityEstimator estimator() const {
    return omega_fitted ? FidelityEstimator::Visibility : FidelityEstimator::DensityMatrix;
  }
};

/// Weighted least squares of fidelity-vs-FSS points to the spin-scattering
/// model with τ1 and k held fixed. Without ω the model is the closed form;
/// with ω it is the visibility estimator of the phase-rotated state.
FitResult fit_fss_curve(std::span<const FssFidelityPoint> points, Picoseconds tau1, double k,
                        const FitOptions& options = {});

struct SensitivityEntry {
  Picoseconds tau1;
  double k = 1.0;
  FitResult fit;
};

/// Refits at the corners of τ1 ± dτ1 and k ± dk (center first).
std::vector<SensitivityEntry> fit_sensitivity(std::span<const FssFidelityPoint> points, Picoseconds tau1,
                                              Picoseconds tau1_error, double k, double k_error,
                                              const FitOptions& options = {});

/// (S, f_model) samples of a fitted curve on [s_min, s_max].
std::vector<std::pair<double, double>> sample_fit_curve(const FitResult& fit, double s_min_ueV, double s_max_ueV,
                                                        int samples);

struct DeviationReport {
  std::vector<double> model;     // dephasing-free prediction per point
  std::vector<double> z_scores;  // (f_model − f)/σ
  double combined_z = 0.0;       // inverse-variance weighted mean deviation / its error
  double chi_squared = 0.0;
};

/// Dephasing-free prediction: Overhauser-averaged fidelity with τss → ∞ at
/// the effective splitting √(S² + S0²).
double dephasing_free_model(MicroEV fss, const CascadeParams& params, MicroEV s0, MicroEV sigma_S);

DeviationReport dephasing_free_deviation(std::span<const FssFidelityPoint> points, const CascadeParams& params,
                                         MicroEV s0, MicroEV sigma_S);

/// f_corr = (f − (1−k)/4)/k, σ_corr = σ/k (unpolarized background).
std::vector<FssFidelityPoint> background_corrected_points(std::span<const FssFidelityPoint> points, double k,
                                                          Diagnostics* diagnostics = nullptr);

}  // namespace qdent
