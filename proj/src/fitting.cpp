#include "qdent/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "qdent/metrics.hpp"
#include "qdent/random.hpp"
#include "qdent/tomography.hpp"

namespace qdent {

namespace {

// Reduced-set projection vectors for the visibility estimator.
const std::array<Vector4, 6>& reduced_vectors() {
  static const std::array<Vector4, 6> vecs = [] {
    std::array<Vector4, 6> v;
    const auto settings = standard_settings(SettingKind::Reduced6);
    for (int i = 0; i < 6; ++i)
      v[i] = kron(arm_projection_state(settings[i].xx), arm_projection_state(settings[i].x));
    return v;
  }();
  return vecs;
}

double born(const Operator4& rho, const Vector4& v) { return v.dot(rho * v).real(); }

double curve_from_fraction(MicroEV fss, Picoseconds tau1, double g, double k, Degrees omega,
                           FidelityEstimator estimator) {
  const MicroEV magnitude{std::abs(fss.value)};
  const Operator4 rho = cascade_operator(g, cascade_coherence(magnitude, tau1, g, omega), k,
                                         0.25 * Operator4::Identity());
  if (estimator == FidelityEstimator::DensityMatrix) {
    Vector4 psi;
    psi << 1.0, 0.0, 0.0, std::polar(1.0, omega.radians());
    return born(rho, psi / std::sqrt(2.0));
  }
  const auto& v = reduced_vectors();
  std::array<double, 6> p{};
  for (int i = 0; i < 6; ++i) p[i] = born(rho, v[i]);
  const Visibilities vis{(p[0] - p[1]) / (p[0] + p[1]), (p[2] - p[3]) / (p[2] + p[3]),
                         (p[4] - p[5]) / (p[4] + p[5])};
  return 0.25 * (1.0 + vis.linear + vis.diagonal - vis.circular);
}

struct Problem {
  std::span<const FssFidelityPoint> points;
  Picoseconds tau1;
  double k;
  bool fit_omega;

  int size() const { return fit_omega ? 2 : 1; }

  double model(const FssFidelityPoint& pt, const Eigen::VectorXd& theta) const {
    const Degrees omega{fit_omega ? theta(1) : 0.0};
    return model_curve_rate(pt.fss, tau1, theta(0), k, omega,
                            fit_omega ? FidelityEstimator::Visibility : FidelityEstimator::DensityMatrix);
  }

  Eigen::VectorXd residuals(const Eigen::VectorXd& theta) const {
    Eigen::VectorXd r(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
      r(i) = (model(points[i], theta) - points[i].fidelity) / points[i].sigma;
    return r;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd j(points.size(), size());
    for (int c = 0; c < size(); ++c) {
      const double h = c == 0 ? 1e-6 * std::max(std::abs(theta(0)), 1e-3) : 1e-4;
      Eigen::VectorXd up = theta, down = theta;
      up(c) += h;
      down(c) -= h;
      j.col(c) = (residuals(up) - residuals(down)) / (2.0 * h);
    }
    return j;
  }

  // Keep g = 1/(1 + τ1·rate) finite and positive.
  double min_rate() const { return -0.5 / to_ns(tau1).value; }
};

struct LmOutcome {
  Eigen::VectorXd theta;
  double chi2 = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

LmOutcome levenberg_marquardt(const Problem& problem, Eigen::VectorXd theta, int max_iterations) {
  LmOutcome out;
  Eigen::VectorXd r = problem.residuals(theta);
  double chi2 = r.squaredNorm();
  double lambda = 1e-3;
  for (int it = 1; it <= max_iterations; ++it) {
    out.iterations = it;
    const Eigen::MatrixXd j = problem.jacobian(theta);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd jtr = j.transpose() * r;
    bool improved = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::MatrixXd a = jtj;
      for (int d = 0; d < a.rows(); ++d) a(d, d) += lambda * std::max(jtj(d, d), 1e-12);
      const Eigen::VectorXd step = a.ldlt().solve(-jtr);
      Eigen::VectorXd candidate = theta + step;
      candidate(0) = std::max(candidate(0), problem.min_rate());
      const Eigen::VectorXd rc = problem.residuals(candidate);
      const double chi2c = rc.squaredNorm();
      if (std::isfinite(chi2c) && chi2c < chi2) {
        const double rel = (chi2 - chi2c) / std::max(chi2, 1e-300);
        const double step_size = (candidate - theta).norm();
        theta = candidate;
        r = rc;
        chi2 = chi2c;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        if (rel < 1e-12 || step_size < 1e-12 * (1.0 + theta.norm())) out.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      out.converged = true;  // no further decrease available
      break;
    }
    if (out.converged) break;
  }
  out.theta = theta;
  out.chi2 = chi2;
  return out;
}

void validate_points(std::span<const FssFidelityPoint> points, Picoseconds tau1, double k, bool fit_omega) {
  if (points.size() < 3) throw InvalidInput("fit needs at least 3 points");
  if (!(tau1.value > 0.0)) throw InvalidInput("tau1 must be positive");
  if (!(k > 0.0 && k <= 1.0)) throw InvalidInput("k must lie in (0,1]");
  std::set<double> distinct;
  double s_min = std::numeric_limits<double>::infinity(), s_max = 0.0;
  for (const auto& p : points) {
    if (!(p.sigma > 0.0)) throw InvalidInput("every point needs sigma_f > 0");
    if (!std::isfinite(p.fidelity) || !std::isfinite(p.fss.value)) throw InvalidInput("non-finite point");
    const double s = std::abs(p.fss.value);
    distinct.insert(s);
    s_min = std::min(s_min, s);
    s_max = std::max(s_max, s);
  }
  if (distinct.size() < 2 || s_max - s_min < 1e-6) throw InvalidInput("degenerate spread of S values");
  if (s_min > 0.5 || s_max <= 2.0)
    throw InvalidInput("fit points must span S ≈ 0 and S > 2 ueV");
  if (static_cast<int>(points.size()) - (fit_omega ? 2 : 1) < 1) throw InvalidInput("no degrees of freedom left");
}

}  // namespace

double model_curve_rate(MicroEV fss, Picoseconds tau1, double rate_per_ns, double k, Degrees omega,
                        FidelityEstimator estimator) {
  const double g = 1.0 / (1.0 + to_ns(tau1).value * rate_per_ns);
  return curve_from_fraction(fss, tau1, g, k, omega, estimator);
}

double model_curve(MicroEV fss, Picoseconds tau1, Nanoseconds tau_ss, double k, Degrees omega,
                   FidelityEstimator estimator) {
  if (!(k >= 0.0 && k <= 1.0)) throw InvalidInput("k must lie in [0,1]");
  const double g = spin_preserved_fraction(tau1, tau_ss);
  return curve_from_fraction(fss, tau1, g, k, omega, estimator);
}

FitResult fit_fss_curve(std::span<const FssFidelityPoint> points, Picoseconds tau1, double k,
                        const FitOptions& options) {
  validate_points(points, tau1, k, options.fit_omega);
  const Problem problem{points, tau1, k, options.fit_omega};

  LmOutcome best;
  const std::array<double, 3> tau_starts{1.0, 10.0, 100.0};
  const std::vector<double> omega_starts =
      options.fit_omega ? std::vector<double>{-20.0, 0.0, 20.0} : std::vector<double>{0.0};
  for (double tau : tau_starts) {
    for (double omega : omega_starts) {
      Eigen::VectorXd theta(problem.size());
      theta(0) = 1.0 / tau;
      if (options.fit_omega) theta(1) = omega;
      LmOutcome run = levenberg_marquardt(problem, theta, options.max_iterations);
      if (run.chi2 < best.chi2) best = run;
    }
  }
  if (!std::isfinite(best.chi2)) throw NumericalFailure("fss fit: objective is not finite at any start");

  FitResult fit;
  fit.tau1 = tau1;
  fit.k = k;
  fit.omega_fitted = options.fit_omega;
  fit.rate_per_ns = best.theta(0);
  fit.omega = Degrees{options.fit_omega ? best.theta(1) : 0.0};
  fit.chi_squared = best.chi2;
  fit.dof = static_cast<int>(points.size()) - problem.size();
  fit.iterations = best.iterations;
  const Eigen::VectorXd r = problem.residuals(best.theta);
  fit.residuals.assign(r.data(), r.data() + r.size());

  const Eigen::MatrixXd j = problem.jacobian(best.theta);
  const Eigen::MatrixXd jtj = j.transpose() * j;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  fit.rate_covariance = lu.isInvertible() ? Eigen::MatrixXd(lu.inverse())
                                          : Eigen::MatrixXd::Constant(problem.size(), problem.size(),
                                                                      std::numeric_limits<double>::infinity());
  fit.rate_error = std::sqrt(fit.rate_covariance(0, 0));
  if (options.fit_omega) fit.omega_error_deg = std::sqrt(fit.rate_covariance(1, 1));

  if (options.mc_trials > 0) {
    // Parameter errors from refits of points resampled as Normal(f, σ).
    const int trials = options.mc_trials;
    std::vector<Eigen::VectorXd> samples(trials);
    std::vector<char> ok(trials, 0);
    parallel_for(trials, options.jobs, [&](int t) {
      Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(t)));
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<FssFidelityPoint> resampled(points.begin(), points.end());
      for (auto& p : resampled) p.fidelity += p.sigma * normal(rng);
      const Problem sub{resampled, tau1, k, options.fit_omega};
      const LmOutcome run = levenberg_marquardt(sub, best.theta, options.max_iterations);
      if (std::isfinite(run.chi2)) {
        samples[t] = run.theta;
        ok[t] = 1;
      }
    });
    const int n_ok = static_cast<int>(std::count(ok.begin(), ok.end(), 1));
    fit.mc_failures = trials - n_ok;
    if (n_ok < 2) throw NumericalFailure("fss fit: Monte-Carlo resampling failed");
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(problem.size());
    for (int t = 0; t < trials; ++t)
      if (ok[t]) mean += samples[t];
    mean /= n_ok;
    Eigen::VectorXd var = Eigen::VectorXd::Zero(problem.size());
    for (int t = 0; t < trials; ++t)
      if (ok[t]) var += (samples[t] - mean).cwiseAbs2();
    var /= (n_ok - 1);
    fit.rate_error = std::sqrt(var(0));
    if (options.fit_omega) fit.omega_error_deg = std::sqrt(var(1));
  }

  const double inf = std::numeric_limits<double>::infinity();
  if (fit.rate_per_ns > 0.0) {
    fit.tau_ss = Nanoseconds{1.0 / fit.rate_per_ns};
    fit.tau_ss_error_ns = fit.rate_error / (fit.rate_per_ns * fit.rate_per_ns);
    const double lo_rate = fit.rate_per_ns - fit.rate_error;
    fit.tau_ss_interval_ns = {1.0 / (fit.rate_per_ns + fit.rate_error), lo_rate > 0.0 ? 1.0 / lo_rate : inf};
    Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(problem.size(), problem.size());
    jac(0, 0) = -1.0 / (fit.rate_per_ns * fit.rate_per_ns);
    fit.covariance = jac * fit.rate_covariance * jac.transpose();
  } else {
    fit.tau_ss = Nanoseconds::infinite();
    fit.tau_ss_unbounded = true;
    fit.tau_ss_error_ns = inf;
    const double hi_rate = fit.rate_per_ns + fit.rate_error;
    fit.tau_ss_interval_ns = {hi_rate > 0.0 ? 1.0 / hi_rate : inf, inf};
  }
  return fit;
}

std::vector<SensitivityEntry> fit_sensitivity(std::span<const FssFidelityPoint> points, Picoseconds tau1,
                                              Picoseconds tau1_error, double k, double k_error,
                                              const FitOptions& options) {
  std::vector<SensitivityEntry> out;
  out.push_back({tau1, k, fit_fss_curve(points, tau1, k, options)});
  for (double dt : {-1.0, 1.0}) {
    for (double dk : {-1.0, 1.0}) {
      const Picoseconds t{tau1.value + dt * tau1_error.value};
      const double kk = std::clamp(k + dk * k_error, 1e-6, 1.0);
      out.push_back({t, kk, fit_fss_curve(points, t, kk, options)});
    }
  }
  return out;
}

std::vector<std::pair<double, double>> sample_fit_curve(const FitResult& fit, double s_min_ueV, double s_max_ueV,
                                                        int samples) {
  if (samples < 2) throw InvalidInput("curve sampling needs at least 2 samples");
  std::vector<std::pair<double, double>> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double s = s_min_ueV + (s_max_ueV - s_min_ueV) * i / (samples - 1);
    out.emplace_back(s, model_curve_rate(MicroEV{s}, fit.tau1, fit.rate_per_ns, fit.k, fit.omega, fit.estimator()));
  }
  return out;
}

double dephasing_free_model(MicroEV fss, const CascadeParams& params, MicroEV s0, MicroEV sigma_S) {
  CascadeParams p = params;
  p.tau_ss = Nanoseconds::infinite();
  p.fss = MicroEV{std::hypot(fss.value, s0.value)};
  return fluctuation_averaged_fidelity(p, sigma_S);
}

DeviationReport dephasing_free_deviation(std::span<const FssFidelityPoint> points, const CascadeParams& params,
                                         MicroEV s0, MicroEV sigma_S) {
  if (points.empty()) throw InvalidInput("no points to compare");
  DeviationReport report;
  double weighted = 0.0, weight_sum = 0.0;
  for (const auto& pt : points) {
    if (!(pt.sigma > 0.0)) throw InvalidInput("every point needs sigma_f > 0");
    const double model = dephasing_free_model(pt.fss, params, s0, sigma_S);
    const double z = (model - pt.fidelity) / pt.sigma;
    report.model.push_back(model);
    report.z_scores.push_back(z);
    report.chi_squared += z * z;
    const double w = 1.0 / (pt.sigma * pt.sigma);
    weighted += w * (model - pt.fidelity);
    weight_sum += w;
  }
  report.combined_z = (weighted / weight_sum) * std::sqrt(weight_sum);
  return report;
}

std::vector<FssFidelityPoint> background_corrected_points(std::span<const FssFidelityPoint> points, double k,
                                                          Diagnostics* diagnostics) {
  if (!(k > 0.0 && k <= 1.0)) throw InvalidInput("k must lie in (0,1]");
  std::vector<FssFidelityPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    FssFidelityPoint c = p;
    c.fidelity = (p.fidelity - (1.0 - k) / 4.0) / k;
    c.sigma = p.sigma / k;
    if (diagnostics && c.fidelity > 1.0 + 3.0 * c.sigma) {
      std::ostringstream os;
      os << "corrected fidelity " << c.fidelity << " at S=" << p.fss.value << " ueV exceeds 1 by more than 3 sigma";
      diagnostics->warn(os.str());
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace qdent
