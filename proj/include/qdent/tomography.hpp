#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdent/dataset.hpp"
#include "qdent/quantum_core.hpp"

namespace qdent {

/// Waveplate angles (hwp, qwp) that map the labeled basis state onto H.
ArmSetting arm_setting_for(Polarization p, Retardances retardance = kIdealRetardances);

/// Projection state of one arm: (U_hwp·U_qwp)†|H>.
JonesVector arm_projection_state(const ArmSetting& arm);

/// Rank-1 two-photon projector for a setting, using its true retardances.
Operator4 projector_for_setting(const MeasurementSetting& setting);

MeasurementSetting make_setting(const std::string& label, Retardances retardance = kIdealRetardances);

enum class SettingKind { Full36, Reduced6, Minimal16 };

SettingKind parse_setting_kind(const std::string& name);
std::string to_string(SettingKind kind);

std::vector<MeasurementSetting> standard_settings(SettingKind kind,
                                                  Retardances retardance = kIdealRetardances);

/// Real design matrix A with A(ν, j) = Tr(P_ν B_j) over the Pauli-product
/// basis B_j = σ_a ⊗ σ_b.
Eigen::MatrixXd design_matrix(std::span<const Operator4> projectors);
double smallest_singular_value(std::span<const Operator4> projectors);

/// n_ν = N0·Tr(P_ν ρ).
std::vector<double> predict_counts(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                                   double pairs_per_setting);

struct SamplingOptions {
  double pairs_per_setting = 1e5;
  std::uint64_t seed = 0;
  double dark_rate_hz = 0.0;
  double coincidence_window_ns = 1.0;
  double acquisition_time_s = 1.0;
  std::optional<double> singles_xx_hz;
  std::optional<double> singles_x_hz;
};

/// Poisson-sampled coincidences (signal plus accidental floor); deterministic
/// for a fixed seed.
TomographyDataset sample_dataset(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                                 const SamplingOptions& options);

struct ReconstructionOptions {
  double tolerance = 1e-10;  // relative likelihood decrease per iteration
  int max_iterations = 5000;
  int multistart = 4;
  std::uint64_t seed = 0;
  /// Replace the retardances stored in the dataset when building projectors
  /// (e.g. kIdealRetardances to ignore waveplate imperfections).
  std::optional<Retardances> assumed_retardances;
  /// Fixed pair count per unit acquisition time; estimated from data if absent.
  std::optional<double> pair_rate_hz;
};

/// Projectors for every record, honoring assumed_retardances.
std::vector<Operator4> dataset_projectors(const TomographyDataset& dataset,
                                          const ReconstructionOptions& options = {});

/// Pair counts N_ν expected per setting. Uses the average count sum over
/// complete orthogonal basis quadruples (HH+HV+VH+VV, ...), per unit
/// acquisition time; falls back to the linear-inversion trace when the
/// dataset has no complete quadruple.
std::vector<double> estimate_pair_counts(const TomographyDataset& dataset,
                                         const ReconstructionOptions& options = {});

/// Labels from the 36-setting set absent from the dataset.
std::vector<std::string> missing_settings(const TomographyDataset& dataset);

/// Least-squares linear inversion, trace normalized. May be unphysical.
Operator4 linear_reconstruct(const TomographyDataset& dataset, const ReconstructionOptions& options = {});

struct MleResult {
  DensityMatrix rho;
  double objective = 0.0;          // L at the optimum
  double initial_objective = 0.0;  // L at the linear-inversion start
  int iterations = 0;
  int best_start = 0;
  bool converged = false;
  std::string diagnostic;
};

/// Thrown when no start converges; carries the best iterate found.
class ConvergenceError : public NumericalFailure {
 public:
  ConvergenceError(const std::string& what, MleResult best)
      : NumericalFailure(what), best_(std::move(best)) {}
  const MleResult& best() const { return best_; }

 private:
  MleResult best_;
};

/// Lower-triangular T with 16 real parameters (4 real diagonal entries, 6
/// complex off-diagonal entries); ρ = T†T / Tr(T†T).
using TParameters = Eigen::Matrix<double, 16, 1>;
Operator4 t_matrix_from_parameters(const TParameters& p);
TParameters parameters_from_state(const DensityMatrix& rho);
DensityMatrix state_from_parameters(const TParameters& p);

/// Negative log-likelihood (Gaussian approximation to Poisson statistics)
///   L = Σ (N_ν·p_ν − n_ν)² / (2·max(N_ν·p_ν, 0.5)),
/// with optional analytic gradient.
class LikelihoodObjective {
 public:
  LikelihoodObjective(std::vector<Operator4> projectors, std::vector<double> counts,
                      std::vector<double> pair_counts);
  double value(const TParameters& p, TParameters* gradient = nullptr) const;
  std::size_t size() const { return counts_.size(); }

 private:
  std::vector<Operator4> projectors_;
  std::vector<double> counts_;
  std::vector<double> pair_counts_;
};

MleResult mle_reconstruct(const TomographyDataset& dataset, const ReconstructionOptions& options = {});

using StateMetric = std::function<double(const DensityMatrix&)>;

struct MetricEstimate {
  double mean = 0.0;
  double std = 0.0;
  int trials = 0;
  int failures = 0;
};

struct MonteCarloOptions {
  int trials = 100;
  std::uint64_t seed = 0;
  int jobs = 1;
  ReconstructionOptions reconstruction;
};

/// Resample each count as Poisson(observed), reconstruct, and summarize each
/// metric. Failed trials are excluded; more than 10% failures throws.
std::vector<MetricEstimate> monte_carlo_uncertainty(const TomographyDataset& dataset,
                                                    std::span<const StateMetric> metrics,
                                                    const MonteCarloOptions& options);
MetricEstimate monte_carlo_uncertainty(const TomographyDataset& dataset, const StateMetric& metric,
                                       const MonteCarloOptions& options);

}  // namespace qdent
