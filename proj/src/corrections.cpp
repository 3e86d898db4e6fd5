#include "qdent/corrections.hpp"

#include <cmath>
#include <sstream>

#include "qdent/metrics.hpp"

namespace qdent {

namespace {

const Complex kI{0.0, 1.0};

Operator2 sigma_x() {
  Operator2 m;
  m << 0, 1, 1, 0;
  return m;
}
Operator2 sigma_y() {
  Operator2 m;
  m << 0, -kI, kI, 0;
  return m;
}
Operator2 sigma_z() {
  Operator2 m;
  m << 1, 0, 0, -1;
  return m;
}

Operator2 projector(Polarization p) {
  const Eigen::Vector2cd v = basis_state(p).vector();
  return v * v.adjoint();
}

struct ArmEstimate {
  Stokes stokes;
  double g2_total = 0.0;
  bool present = false;
};

ArmEstimate estimate_arm(const G2Map& g2, bool xx_arm, double tolerance) {
  const auto get = [&](Polarization p) -> std::optional<double> {
    const auto it = g2.find(g2_key(xx_arm, p));
    if (it == g2.end()) return std::nullopt;
    if (!(it->second >= 0.0)) throw InvalidInput("g2 value for " + it->first + " must be >= 0");
    return it->second;
  };
  const auto h = get(Polarization::H), v = get(Polarization::V);
  const auto d = get(Polarization::D), a = get(Polarization::A);
  const auto r = get(Polarization::R), l = get(Polarization::L);
  const std::string arm = xx_arm ? "XX" : "X";
  if (!h || !v || !d || !a) throw InvalidInput("infer_bg_state: arm " + arm + " needs H, V, D and A g2 values");

  ArmEstimate out;
  out.present = true;
  double intensity = (*h + *v) + (*d + *a);
  int pairs = 2;
  if (r && l) {
    intensity += *r + *l;
    ++pairs;
  }
  intensity /= pairs;
  out.g2_total = intensity / 2.0;
  if (!(intensity > 0.0)) return out;  // no background: unpolarized placeholder

  out.stokes.s1 = (*h - *v) / intensity;
  out.stokes.s2 = (*d - *a) / intensity;
  out.stokes.s3 = (r && l) ? (*r - *l) / intensity : 0.0;
  const double mag = std::sqrt(out.stokes.s1 * out.stokes.s1 + out.stokes.s2 * out.stokes.s2 +
                               out.stokes.s3 * out.stokes.s3);
  if (mag > 1.0 + tolerance) {
    std::ostringstream os;
    os << "infer_bg_state: inconsistent g2 pattern on arm " << arm << " (degree of polarization " << mag
       << " > 1)";
    throw NumericalFailure(os.str());
  }
  if (mag > 1.0) {
    out.stokes.s1 /= mag;
    out.stokes.s2 /= mag;
    out.stokes.s3 /= mag;
  }
  return out;
}

}  // namespace

void DarkCountModel::validate() const {
  if (!(dark_rate_xx_hz >= 0.0) || !(dark_rate_x_hz >= 0.0)) throw InvalidInput("dark rates must be >= 0");
  if (!(coincidence_window_ns >= 0.0)) throw InvalidInput("coincidence window must be >= 0");
  if (!(singles_xx_hz >= 0.0) || !(singles_x_hz >= 0.0)) throw InvalidInput("singles rates must be >= 0");
}

DarkCountModel dark_model_for(const TomographyDataset& dataset) {
  DarkCountModel m;
  m.dark_rate_xx_hz = m.dark_rate_x_hz = dataset.dark_rate_hz;
  m.coincidence_window_ns = dataset.coincidence_window_ns;
  return m;
}

double accidental_floor(const DarkCountModel& model, double acquisition_time_s) {
  model.validate();
  if (!(acquisition_time_s >= 0.0)) throw InvalidInput("acquisition time must be >= 0");
  const double rate = model.singles_xx_hz * model.dark_rate_x_hz + model.singles_x_hz * model.dark_rate_xx_hz +
                      model.dark_rate_xx_hz * model.dark_rate_x_hz;
  return rate * model.coincidence_window_ns * 1e-9 * acquisition_time_s;
}

TomographyDataset subtract_dark(const TomographyDataset& dataset, const DarkCountModel& model) {
  model.validate();
  TomographyDataset out = dataset;
  double max_floor = 0.0;
  for (auto& rec : out.records) {
    DarkCountModel m = model;
    if (rec.singles_xx_hz) m.singles_xx_hz = *rec.singles_xx_hz;
    if (rec.singles_x_hz) m.singles_x_hz = *rec.singles_x_hz;
    const double floor = accidental_floor(m, rec.acquisition_time_s);
    max_floor = std::max(max_floor, floor);
    rec.counts = std::max(0.0, rec.counts - floor);
  }
  std::ostringstream note;
  note.precision(6);
  note << "dark_subtracted max_floor=" << max_floor;
  out.history.push_back(note.str());
  return out;
}

DensityMatrix admix_background(const DensityMatrix& rho, double k, const DensityMatrix& bg) {
  if (!(k >= 0.0 && k <= 1.0)) throw InvalidInput("k must lie in [0,1]");
  return DensityMatrix::from_operator(k * rho.matrix() + (1.0 - k) * bg.matrix());
}

DensityMatrix background_correct_state(const DensityMatrix& rho_measured, double k, const DensityMatrix& bg,
                                       double epsilon) {
  if (!(k > 0.0 && k <= 1.0)) throw InvalidInput("background correction needs k in (0,1]");
  if (k == 1.0) return rho_measured;
  const Operator4 remainder = (rho_measured.matrix() - (1.0 - k) * bg.matrix()) / k;
  const HermitianEigen e = eig_hermitian(0.5 * (remainder + remainder.adjoint()));
  if (e.values(3) < -epsilon) {
    std::ostringstream os;
    os << "background correction leaves an unphysical state: most negative eigenvalue " << e.values(3)
       << " (clamp threshold " << -epsilon << ")";
    throw NumericalFailure(os.str());
  }
  return DensityMatrix::project_to_physical(remainder);
}

Operator2 single_photon_state(const Stokes& s) {
  return 0.5 * (Operator2::Identity() + s.s1 * sigma_z() + s.s2 * sigma_x() - s.s3 * sigma_y());
}

Stokes stokes_of(const Operator2& rho) {
  return {(rho * sigma_z()).trace().real(), (rho * sigma_x()).trace().real(),
          -(rho * sigma_y()).trace().real()};
}

std::string g2_key(bool xx_arm, Polarization p) {
  return std::string(xx_arm ? "XX:" : "X:") + to_char(p);
}

InferredBackground infer_bg_state(const G2Map& g2_per_basis, double tolerance) {
  const ArmEstimate xx = estimate_arm(g2_per_basis, true, tolerance);
  const ArmEstimate x = estimate_arm(g2_per_basis, false, tolerance);
  InferredBackground out;
  out.stokes_xx = xx.stokes;
  out.stokes_x = x.stokes;
  out.state_xx = single_photon_state(xx.stokes);
  out.state_x = single_photon_state(x.stokes);
  out.product = DensityMatrix::project_to_physical(kron(out.state_xx, out.state_x));
  return out;
}

G2Map synthesize_g2_per_basis(const Operator2& laser_xx, const Operator2& laser_x, double g2_xx, double g2_x) {
  if (!(g2_xx >= 0.0) || !(g2_x >= 0.0)) throw InvalidInput("g2 values must be >= 0");
  G2Map out;
  for (Polarization p : kAllPolarizations) {
    out[g2_key(true, p)] = 2.0 * g2_xx * (laser_xx * projector(p)).trace().real();
    out[g2_key(false, p)] = 2.0 * g2_x * (laser_x * projector(p)).trace().real();
  }
  return out;
}

DensityMatrix accidental_pair_background(const Operator2& laser_xx, const Operator2& laser_x, double g2_xx,
                                         double g2_x) {
  if (!(g2_xx >= 0.0 && g2_xx <= 1.0) || !(g2_x >= 0.0 && g2_x <= 1.0))
    throw InvalidInput("accidental-pair background needs g2 values in [0,1]");
  const Operator2 unpolarized = 0.5 * Operator2::Identity();
  const double w_xx = g2_xx * (1.0 - g2_x);  // laser XX photon with a dot X photon
  const double w_x = g2_x * (1.0 - g2_xx);   // dot XX photon with a laser X photon
  const double w_both = g2_x * g2_xx;
  const double total = w_xx + w_x + w_both;
  if (!(total > 0.0)) return DensityMatrix::maximally_mixed();
  const Operator4 m =
      (w_xx * kron(laser_xx, unpolarized) + w_x * kron(unpolarized, laser_x) + w_both * kron(laser_xx, laser_x)) /
      total;
  return DensityMatrix::project_to_physical(m);
}

double BackgroundModel::k_linear() const { return k_from_g2(g2_x, g2_xx); }

double BackgroundModel::k_basiswise() const {
  if (g2_per_basis.empty()) return k_linear();
  const ArmEstimate xx = estimate_arm(g2_per_basis, true, 0.05);
  const ArmEstimate x = estimate_arm(g2_per_basis, false, 0.05);
  return k_from_g2(x.g2_total, xx.g2_total);
}

DensityMatrix BackgroundModel::bg_state() const {
  Operator2 laser_xx = single_photon_state({-1.0, 0.0, 0.0});
  Operator2 laser_x = laser_xx;
  if (!g2_per_basis.empty()) {
    const InferredBackground inferred = infer_bg_state(g2_per_basis);
    laser_xx = inferred.state_xx;
    laser_x = inferred.state_x;
  }
  return accidental_pair_background(laser_xx, laser_x, g2_xx, g2_x);
}

}  // namespace qdent
