#include "qdent/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "qdent/corrections.hpp"
#include "qdent/random.hpp"

namespace qdent {

namespace {

constexpr double kMinPredictedCounts = 0.5;
constexpr double kRankThreshold = 1e-6;

const std::array<Operator2, 4>& pauli_basis() {
  static const std::array<Operator2, 4> basis = [] {
    std::array<Operator2, 4> b;
    b[0] = Operator2::Identity();
    b[1] << 0, 1, 1, 0;
    b[2] << 0, Complex(0, -1), Complex(0, 1), 0;
    b[3] << 1, 0, 0, -1;
    return b;
  }();
  return basis;
}

const std::array<Operator4, 16>& pauli_products() {
  static const std::array<Operator4, 16> products = [] {
    std::array<Operator4, 16> p;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) p[4 * a + b] = kron(pauli_basis()[a], pauli_basis()[b]);
    return p;
  }();
  return products;
}

// Coefficients c with Σ c_j B_j reproducing the measured rates in the
// least-squares sense. Throws when the projector set is not complete.
Eigen::Matrix<double, 16, 1> invert_rates(std::span<const Operator4> projectors, const Eigen::VectorXd& rates) {
  const Eigen::MatrixXd a = design_matrix(projectors);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() < 16 || sv(sv.size() - 1) <= kRankThreshold)
    throw InvalidInput("measurement set is not tomographically complete (design matrix rank < 16)");
  return svd.solve(rates);
}

Operator4 operator_from_coefficients(const Eigen::Matrix<double, 16, 1>& c) {
  Operator4 x = Operator4::Zero();
  for (int j = 0; j < 16; ++j) x += c(j) * pauli_products()[j];
  return x;
}

Eigen::VectorXd record_rates(const TomographyDataset& dataset) {
  Eigen::VectorXd rates(dataset.records.size());
  for (std::size_t i = 0; i < dataset.records.size(); ++i)
    rates(i) = dataset.records[i].counts / dataset.records[i].acquisition_time_s;
  return rates;
}

void require_complete(const TomographyDataset& dataset, std::span<const Operator4> projectors) {
  if (projectors.size() < 16 || smallest_singular_value(projectors) <= kRankThreshold) {
    std::string missing;
    for (const auto& label : missing_settings(dataset)) missing += (missing.empty() ? "" : ",") + label;
    throw InvalidInput("dataset is not tomographically complete; missing settings: " +
                       (missing.empty() ? std::string("(none of the 36 standard labels)") : missing));
  }
}

// Positive-semidefinite Cholesky: m = L·L†, zero columns for null pivots.
Operator4 semidefinite_cholesky(const Operator4& m) {
  Operator4 l = Operator4::Zero();
  for (int j = 0; j < 4; ++j) {
    double d = m(j, j).real();
    for (int k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (d <= 1e-14) continue;
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < 4; ++i) {
      Complex s = m(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / l(j, j).real();
    }
  }
  return l;
}

// Index map for the 6 complex off-diagonal entries of T.
constexpr std::array<std::pair<int, int>, 6> kOffDiagonal{{{1, 0}, {2, 1}, {3, 2}, {2, 0}, {3, 1}, {3, 0}}};

struct BfgsOutcome {
  TParameters p;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string diagnostic;
};

BfgsOutcome minimize_bfgs(const LikelihoodObjective& objective, TParameters p, double tolerance,
                          int max_iterations, double count_scale) {
  using Mat16 = Eigen::Matrix<double, 16, 16>;
  BfgsOutcome out;
  TParameters grad;
  double value = objective.value(p, &grad);
  Mat16 inv_hessian = Mat16::Identity() / std::max(1.0, grad.norm());

  for (int it = 1; it <= max_iterations; ++it) {
    out.iterations = it;
    if (value <= 1e-16 * count_scale || grad.norm() <= 1e-14 * std::max(1.0, count_scale)) {
      out.converged = true;
      out.diagnostic = "gradient vanished";
      break;
    }
    TParameters direction = -inv_hessian * grad;
    if (direction.dot(grad) >= 0.0) {
      inv_hessian = Mat16::Identity() / std::max(1.0, grad.norm());
      direction = -inv_hessian * grad;
    }
    double step = 1.0;
    TParameters next_p;
    TParameters next_grad;
    double next_value = value;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      next_p = p + step * direction;
      next_value = objective.value(next_p, &next_grad);
      if (std::isfinite(next_value) && next_value <= value + 1e-4 * step * direction.dot(grad)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No representable decrease along a descent direction: at the optimum
      // to machine precision.
      out.converged = true;
      out.diagnostic = "line search stalled at numerical precision";
      break;
    }
    const double decrease = value - next_value;
    const TParameters s = next_p - p;
    const TParameters y = next_grad - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Mat16 i_rsy = Mat16::Identity() - rho * s * y.transpose();
      inv_hessian = i_rsy * inv_hessian * i_rsy.transpose() + rho * s * s.transpose();
    }
    p = next_p;
    grad = next_grad;
    value = next_value;

    // L is invariant under scaling of T; keep the parameter norm near 1.
    const double norm = p.norm();
    if (norm < 0.5 || norm > 2.0) {
      p /= norm;
      value = objective.value(p, &grad);
      inv_hessian = Mat16::Identity() / std::max(1.0, grad.norm());
    }

    if (decrease <= tolerance * std::max(value, 1e-300)) {
      out.converged = true;
      out.diagnostic = "relative likelihood decrease below tolerance";
      break;
    }
  }
  if (!out.converged) out.diagnostic = "maximum iterations reached";
  out.p = p;
  out.value = value;
  return out;
}

}  // namespace

ArmSetting arm_setting_for(Polarization p, Retardances retardance) {
  ArmSetting arm;
  arm.retardance = retardance;
  switch (p) {
    case Polarization::H: arm.hwp = {0.0}; arm.qwp = {0.0}; break;
    case Polarization::V: arm.hwp = {45.0}; arm.qwp = {0.0}; break;
    case Polarization::D: arm.hwp = {22.5}; arm.qwp = {45.0}; break;
    case Polarization::A: arm.hwp = {-22.5}; arm.qwp = {-45.0}; break;
    case Polarization::R: arm.hwp = {22.5}; arm.qwp = {0.0}; break;
    case Polarization::L: arm.hwp = {-22.5}; arm.qwp = {0.0}; break;
  }
  return arm;
}

JonesVector arm_projection_state(const ArmSetting& arm) {
  if (!(arm.retardance.hwp > 0.0) || !(arm.retardance.qwp > 0.0))
    throw InvalidInput("waveplate retardances must be positive");
  const Operator2 path = waveplate_operator(arm.hwp, arm.retardance.hwp) * waveplate_operator(arm.qwp, arm.retardance.qwp);
  return JonesVector(Eigen::Vector2cd(path.adjoint() * Eigen::Vector2cd(1.0, 0.0)));
}

Operator4 projector_for_setting(const MeasurementSetting& setting) {
  const Vector4 v = kron(arm_projection_state(setting.xx), arm_projection_state(setting.x));
  return v * v.adjoint();
}

MeasurementSetting make_setting(const std::string& label, Retardances retardance) {
  if (label.size() != 2) throw InvalidInput("setting label must have two characters, got '" + label + "'");
  return {label, arm_setting_for(parse_polarization(label[0]), retardance),
          arm_setting_for(parse_polarization(label[1]), retardance)};
}

SettingKind parse_setting_kind(const std::string& name) {
  if (name == "full36") return SettingKind::Full36;
  if (name == "reduced6") return SettingKind::Reduced6;
  if (name == "minimal16") return SettingKind::Minimal16;
  throw InvalidInput("unknown setting kind '" + name + "' (expected full36, reduced6 or minimal16)");
}

std::string to_string(SettingKind kind) {
  switch (kind) {
    case SettingKind::Full36: return "full36";
    case SettingKind::Reduced6: return "reduced6";
    case SettingKind::Minimal16: return "minimal16";
  }
  return "?";
}

std::vector<MeasurementSetting> standard_settings(SettingKind kind, Retardances retardance) {
  std::vector<std::string> labels;
  switch (kind) {
    case SettingKind::Full36:
      for (Polarization a : kAllPolarizations)
        for (Polarization b : kAllPolarizations) labels.push_back({to_char(a), to_char(b)});
      break;
    case SettingKind::Reduced6:
      labels = {"HH", "HV", "DD", "DA", "RR", "RL"};
      break;
    case SettingKind::Minimal16:
      labels = {"HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
                "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"};
      break;
  }
  std::vector<MeasurementSetting> settings;
  settings.reserve(labels.size());
  for (const auto& label : labels) settings.push_back(make_setting(label, retardance));
  return settings;
}

Eigen::MatrixXd design_matrix(std::span<const Operator4> projectors) {
  Eigen::MatrixXd a(projectors.size(), 16);
  for (std::size_t i = 0; i < projectors.size(); ++i)
    for (int j = 0; j < 16; ++j) a(i, j) = (projectors[i] * pauli_products()[j]).trace().real();
  return a;
}

double smallest_singular_value(std::span<const Operator4> projectors) {
  if (projectors.size() < 16) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design_matrix(projectors));
  return svd.singularValues()(15);
}

std::vector<double> predict_counts(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                                   double pairs_per_setting) {
  if (!(pairs_per_setting > 0.0)) throw InvalidInput("pairs per setting must be positive");
  std::vector<double> counts;
  counts.reserve(settings.size());
  for (const auto& s : settings)
    counts.push_back(pairs_per_setting * std::max(0.0, rho.expectation(projector_for_setting(s))));
  return counts;
}

TomographyDataset sample_dataset(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                                 const SamplingOptions& options) {
  if (!(options.pairs_per_setting >= 0.0)) throw InvalidInput("pairs per setting must be >= 0");
  if (!(options.acquisition_time_s > 0.0)) throw InvalidInput("acquisition time must be positive");
  TomographyDataset dataset;
  dataset.dark_rate_hz = options.dark_rate_hz;
  dataset.coincidence_window_ns = options.coincidence_window_ns;

  DarkCountModel dark;
  dark.dark_rate_xx_hz = dark.dark_rate_x_hz = options.dark_rate_hz;
  dark.coincidence_window_ns = options.coincidence_window_ns;
  dark.singles_xx_hz = options.singles_xx_hz.value_or(0.0);
  dark.singles_x_hz = options.singles_x_hz.value_or(0.0);
  const double floor = accidental_floor(dark, options.acquisition_time_s);

  Rng rng(mix_seed(options.seed, 0));
  for (const auto& s : settings) {
    const double expected = options.pairs_per_setting * std::max(0.0, rho.expectation(projector_for_setting(s)));
    CoincidenceRecord rec;
    rec.setting = s;
    rec.counts = sample_poisson(rng, expected + floor);
    rec.acquisition_time_s = options.acquisition_time_s;
    rec.singles_xx_hz = options.singles_xx_hz;
    rec.singles_x_hz = options.singles_x_hz;
    dataset.records.push_back(std::move(rec));
  }
  dataset.validate();
  return dataset;
}

std::vector<Operator4> dataset_projectors(const TomographyDataset& dataset, const ReconstructionOptions& options) {
  std::vector<Operator4> projectors;
  projectors.reserve(dataset.records.size());
  for (const auto& rec : dataset.records) {
    MeasurementSetting s = rec.setting;
    if (options.assumed_retardances) {
      s.xx.retardance = *options.assumed_retardances;
      s.x.retardance = *options.assumed_retardances;
    }
    projectors.push_back(projector_for_setting(s));
  }
  return projectors;
}

std::vector<std::string> missing_settings(const TomographyDataset& dataset) {
  std::vector<std::string> missing;
  for (const auto& s : standard_settings(SettingKind::Full36))
    if (!dataset.find(s.label)) missing.push_back(s.label);
  return missing;
}

std::vector<double> estimate_pair_counts(const TomographyDataset& dataset, const ReconstructionOptions& options) {
  double rate = 0.0;
  if (options.pair_rate_hz) {
    rate = *options.pair_rate_hz;
  } else {
    static constexpr std::array<std::array<char, 2>, 3> kBases{{{'H', 'V'}, {'D', 'A'}, {'R', 'L'}}};
    double sum = 0.0;
    int complete = 0;
    for (const auto& b1 : kBases) {
      for (const auto& b2 : kBases) {
        double quad = 0.0;
        bool ok = true;
        for (char p1 : b1) {
          for (char p2 : b2) {
            const CoincidenceRecord* rec = dataset.find(std::string{p1, p2});
            if (!rec) {
              ok = false;
              break;
            }
            quad += rec->counts / rec->acquisition_time_s;
          }
          if (!ok) break;
        }
        if (ok) {
          sum += quad;
          ++complete;
        }
      }
    }
    if (complete > 0) {
      rate = sum / complete;
    } else {
      const auto projectors = dataset_projectors(dataset, options);
      rate = 4.0 * invert_rates(projectors, record_rates(dataset))(0);
    }
  }
  if (!(rate > 0.0)) throw InvalidInput("dataset carries no coincidences; cannot normalize");
  std::vector<double> pairs;
  pairs.reserve(dataset.records.size());
  for (const auto& rec : dataset.records) pairs.push_back(rate * rec.acquisition_time_s);
  return pairs;
}

Operator4 linear_reconstruct(const TomographyDataset& dataset, const ReconstructionOptions& options) {
  dataset.validate();
  const auto projectors = dataset_projectors(dataset, options);
  require_complete(dataset, projectors);
  const Operator4 x = operator_from_coefficients(invert_rates(projectors, record_rates(dataset)));
  const double tr = x.trace().real();
  if (!(std::abs(tr) > 0.0)) throw InvalidInput("linear inversion produced a zero-trace operator (no counts?)");
  const Operator4 rho = x / tr;
  return 0.5 * (rho + rho.adjoint());
}

Operator4 t_matrix_from_parameters(const TParameters& p) {
  Operator4 t = Operator4::Zero();
  for (int i = 0; i < 4; ++i) t(i, i) = p(i);
  for (int j = 0; j < 6; ++j) {
    const auto [r, c] = kOffDiagonal[j];
    t(r, c) = Complex(p(4 + 2 * j), p(5 + 2 * j));
  }
  return t;
}

TParameters parameters_from_state(const DensityMatrix& rho) {
  // ρ = T†T with T lower triangular: with J the reversal permutation,
  // JρJ = L·L† (Cholesky) and T = J·L†·J.
  Operator4 j = Operator4::Zero();
  for (int i = 0; i < 4; ++i) j(i, 3 - i) = 1.0;
  const Operator4 l = semidefinite_cholesky(j * rho.matrix() * j);
  const Operator4 t = j * l.adjoint() * j;
  TParameters p;
  for (int i = 0; i < 4; ++i) p(i) = t(i, i).real();
  for (int k = 0; k < 6; ++k) {
    const auto [r, c] = kOffDiagonal[k];
    p(4 + 2 * k) = t(r, c).real();
    p(5 + 2 * k) = t(r, c).imag();
  }
  return p;
}

DensityMatrix state_from_parameters(const TParameters& p) {
  const Operator4 t = t_matrix_from_parameters(p);
  const Operator4 m = t.adjoint() * t;
  const double tr = m.trace().real();
  if (!(tr > 0.0)) throw NumericalFailure("T matrix collapsed to zero");
  return DensityMatrix::project_to_physical(m / tr);
}

LikelihoodObjective::LikelihoodObjective(std::vector<Operator4> projectors, std::vector<double> counts,
                                         std::vector<double> pair_counts)
    : projectors_(std::move(projectors)), counts_(std::move(counts)), pair_counts_(std::move(pair_counts)) {
  if (projectors_.size() != counts_.size() || counts_.size() != pair_counts_.size())
    throw InvalidInput("likelihood: mismatched input sizes");
}

double LikelihoodObjective::value(const TParameters& p, TParameters* gradient) const {
  const Operator4 t = t_matrix_from_parameters(p);
  const double norm = p.squaredNorm();  // Tr(T†T)
  if (!(norm > 0.0)) return std::numeric_limits<double>::infinity();

  double total = 0.0;
  Operator4 weighted = Operator4::Zero();  // Σ w_ν N_ν P_ν / t
  double scalar = 0.0;                     // Σ w_ν N_ν q_ν / t²
  for (std::size_t nu = 0; nu < projectors_.size(); ++nu) {
    const Operator4 tp = t * projectors_[nu];
    const double q = (tp * t.adjoint()).trace().real();  // Tr(P T†T)
    const double predicted = pair_counts_[nu] * q / norm;
    const double diff = predicted - counts_[nu];
    double dl_dpred;
    if (predicted >= kMinPredictedCounts) {
      total += diff * diff / (2.0 * predicted);
      dl_dpred = 0.5 * (1.0 - (counts_[nu] * counts_[nu]) / (predicted * predicted));
    } else {
      total += diff * diff / (2.0 * kMinPredictedCounts);
      dl_dpred = diff / kMinPredictedCounts;
    }
    if (gradient) {
      weighted += (dl_dpred * pair_counts_[nu] / norm) * projectors_[nu];
      scalar += dl_dpred * pair_counts_[nu] * q / (norm * norm);
    }
  }
  if (gradient) {
    // ∂Tr(A T†T)/∂Re T_ij = 2 Re(TA)_ij, ∂/∂Im T_ij = 2 Im(TA)_ij, ∂t/∂p = 2p.
    const Operator4 g = 2.0 * (t * weighted) - 2.0 * scalar * t;
    for (int i = 0; i < 4; ++i) (*gradient)(i) = g(i, i).real();
    for (int k = 0; k < 6; ++k) {
      const auto [r, c] = kOffDiagonal[k];
      (*gradient)(4 + 2 * k) = g(r, c).real();
      (*gradient)(5 + 2 * k) = g(r, c).imag();
    }
  }
  return total;
}

MleResult mle_reconstruct(const TomographyDataset& dataset, const ReconstructionOptions& options) {
  if (!(options.tolerance > 0.0)) throw InvalidInput("reconstruction tolerance must be positive");
  if (options.max_iterations < 1) throw InvalidInput("max_iterations must be >= 1");
  if (options.multistart < 1) throw InvalidInput("multistart must be >= 1");

  const Operator4 linear = linear_reconstruct(dataset, options);
  const auto projectors = dataset_projectors(dataset, options);
  std::vector<double> counts;
  counts.reserve(dataset.records.size());
  double total_counts = 0.0;
  for (const auto& rec : dataset.records) {
    counts.push_back(rec.counts);
    total_counts += rec.counts;
  }
  const LikelihoodObjective objective(projectors, counts, estimate_pair_counts(dataset, options));

  TParameters start0 = parameters_from_state(DensityMatrix::project_to_physical(linear));
  start0 /= start0.norm();
  const double initial = objective.value(start0);

  MleResult best;
  best.initial_objective = initial;
  best.objective = std::numeric_limits<double>::infinity();
  for (int s = 0; s < options.multistart; ++s) {
    TParameters start = start0;
    if (s > 0) {
      Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(s)));
      std::normal_distribution<double> normal(0.0, 0.1);
      for (int i = 0; i < 16; ++i) start(i) += normal(rng);
      if (!(start.norm() > 0.0)) continue;
      start /= start.norm();
    }
    const BfgsOutcome outcome =
        minimize_bfgs(objective, start, options.tolerance, options.max_iterations, std::max(1.0, total_counts));
    // Prefer converged runs; among equals take the lowest L.
    const bool better = (outcome.converged && !best.converged) ||
                        (outcome.converged == best.converged && outcome.value < best.objective);
    if (better) {
      best.rho = state_from_parameters(outcome.p);
      best.objective = outcome.value;
      best.iterations = outcome.iterations;
      best.best_start = s;
      best.converged = outcome.converged;
      best.diagnostic = outcome.diagnostic;
    }
  }
  if (!best.converged) {
    throw ConvergenceError("maximum-likelihood reconstruction did not converge within " +
                               std::to_string(options.max_iterations) + " iterations",
                           best);
  }
  return best;
}

std::vector<MetricEstimate> monte_carlo_uncertainty(const TomographyDataset& dataset,
                                                    std::span<const StateMetric> metrics,
                                                    const MonteCarloOptions& options) {
  if (options.trials < 2) throw InvalidInput("Monte-Carlo uncertainty needs at least 2 trials");
  dataset.validate();
  const std::size_t m = metrics.size();
  std::vector<std::vector<double>> values(options.trials);
  std::vector<char> failed(options.trials, 0);

  parallel_for(options.trials, options.jobs, [&](int trial) {
    Rng rng(mix_seed(options.seed, 1000003ULL + static_cast<std::uint64_t>(trial)));
    TomographyDataset resampled = dataset;
    for (auto& rec : resampled.records) rec.counts = sample_poisson(rng, rec.counts);
    try {
      const MleResult r = mle_reconstruct(resampled, options.reconstruction);
      values[trial].reserve(m);
      for (const auto& metric : metrics) values[trial].push_back(metric(r.rho));
    } catch (const NumericalFailure&) {
      failed[trial] = 1;
    } catch (const InvalidInput&) {
      failed[trial] = 1;
    }
  });

  const int failures = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
  if (failures * 10 > options.trials)
    throw NumericalFailure("Monte-Carlo uncertainty: " + std::to_string(failures) + " of " +
                           std::to_string(options.trials) + " reconstructions failed");
  const int ok = options.trials - failures;
  if (ok < 2) throw NumericalFailure("Monte-Carlo uncertainty: fewer than 2 successful trials");

  std::vector<MetricEstimate> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    for (int t = 0; t < options.trials; ++t)
      if (!failed[t]) sum += values[t][j];
    const double mean = sum / ok;
    double ss = 0.0;
    for (int t = 0; t < options.trials; ++t)
      if (!failed[t]) ss += (values[t][j] - mean) * (values[t][j] - mean);
    out[j] = {mean, std::sqrt(ss / (ok - 1)), options.trials, failures};
  }
  return out;
}

MetricEstimate monte_carlo_uncertainty(const TomographyDataset& dataset, const StateMetric& metric,
                                       const MonteCarloOptions& options) {
  const StateMetric metrics[] = {metric};
  return monte_carlo_uncertainty(dataset, std::span<const StateMetric>(metrics), options)[0];
}

void TomographyDataset::validate() const {
  if (!(dark_rate_hz >= 0.0)) throw InvalidInput("dark rate must be >= 0");
  if (!(coincidence_window_ns > 0.0)) throw InvalidInput("coincidence window must be positive");
  std::set<std::string> seen;
  for (const auto& rec : records) {
    if (!seen.insert(rec.setting.label).second)
      throw InvalidInput("duplicate setting label '" + rec.setting.label + "'");
    if (!(rec.counts >= 0.0) || !std::isfinite(rec.counts))
      throw InvalidInput("setting " + rec.setting.label + ": counts must be finite and >= 0");
    if (!(rec.acquisition_time_s > 0.0))
      throw InvalidInput("setting " + rec.setting.label + ": acquisition time must be positive");
    for (const ArmSetting* arm : {&rec.setting.xx, &rec.setting.x})
      if (!(arm->retardance.hwp > 0.0) || !(arm->retardance.qwp > 0.0))
        throw InvalidInput("setting " + rec.setting.label + ": retardances must be positive");
  }
}

const CoincidenceRecord* TomographyDataset::find(const std::string& label) const {
  for (const auto& rec : records)
    if (rec.setting.label == label) return &rec;
  return nullptr;
}

}  // namespace qdent
