#include "qdent/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "qdent/tomography.hpp"

namespace qdent {

namespace {

double rate_for(std::span<const CoincidenceRecord> records, const std::string& label) {
  for (const auto& rec : records)
    if (rec.setting.label == label) return rec.counts / rec.acquisition_time_s;
  throw InvalidInput("visibilities need setting " + label);
}

double contrast(double co, double cross, const char* basis) {
  const double total = co + cross;
  if (!(total > 0.0)) throw InvalidInput(std::string("zero coincidences in the ") + basis + " basis");
  return (co - cross) / total;
}

}  // namespace

double fidelity_to_bell(const DensityMatrix& rho, Degrees omega) {
  Vector4 psi;
  psi << 1.0, 0.0, 0.0, std::polar(1.0, omega.radians());
  return rho.expectation(Vector4(psi / std::sqrt(2.0)));
}

double optimal_phase_fidelity(const DensityMatrix& rho) {
  return 0.5 * (rho(0, 0).real() + rho(3, 3).real()) + std::abs(rho(3, 0));
}

Degrees optimal_bell_phase(const DensityMatrix& rho) {
  return {std::arg(rho(3, 0)) * 180.0 / M_PI};
}

double concurrence(const DensityMatrix& rho) {
  Operator4 flip = Operator4::Zero();  // σy ⊗ σy
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;
  const Operator4 tilde = flip * rho.matrix().conjugate() * flip;
  // sqrt(ρ)·ρ̃·sqrt(ρ) is Hermitian PSD with the eigenvalues of ρ·ρ̃.
  const Operator4 root = matrix_sqrt_psd(rho.matrix());
  const Operator4 r = root * tilde * root;
  const HermitianEigen e = eig_hermitian(0.5 * (r + r.adjoint()));
  // Eigenvalues at the round-off floor would otherwise contribute ~1e-8
  // after the square root.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(e.values(0), 0.0);
  std::array<double, 4> l{};
  for (int i = 0; i < 4; ++i) l[i] = e.values(i) > floor ? std::sqrt(e.values(i)) : 0.0;
  return std::clamp(l[0] - l[1] - l[2] - l[3], 0.0, 1.0);
}

double largest_eigenvalue(const DensityMatrix& rho) { return eig_hermitian(rho.matrix()).values(0); }

EntanglementMetrics compute_metrics(const DensityMatrix& rho) {
  EntanglementMetrics m;
  m.fidelity.value = fidelity_to_bell(rho);
  m.concurrence.value = concurrence(rho);
  m.largest_eigenvalue.value = largest_eigenvalue(rho);
  return m;
}

Visibilities visibilities_from_counts(std::span<const CoincidenceRecord> records) {
  return {contrast(rate_for(records, "HH"), rate_for(records, "HV"), "linear"),
          contrast(rate_for(records, "DD"), rate_for(records, "DA"), "diagonal"),
          contrast(rate_for(records, "RR"), rate_for(records, "RL"), "circular")};
}

Visibilities visibilities_from_state(const DensityMatrix& rho) {
  static const std::vector<Operator4> projectors = [] {
    std::vector<Operator4> p;
    for (const auto& s : standard_settings(SettingKind::Reduced6)) p.push_back(projector_for_setting(s));
    return p;
  }();
  std::array<double, 6> prob{};
  for (int i = 0; i < 6; ++i) prob[i] = rho.expectation(projectors[i]);
  return {contrast(prob[0], prob[1], "linear"), contrast(prob[2], prob[3], "diagonal"),
          contrast(prob[4], prob[5], "circular")};
}

double visibility_fidelity(const Visibilities& v) {
  for (double c : {v.linear, v.diagonal, v.circular})
    if (!(std::abs(c) <= 1.0 + 1e-12)) throw InvalidInput("visibilities must lie in [-1,1]");
  return 0.25 * (1.0 + v.linear + v.diagonal - v.circular);
}

double k_from_g2(double g2_x, double g2_xx, Diagnostics* diagnostics) {
  if (!(g2_x >= 0.0) || !(g2_xx >= 0.0)) throw InvalidInput("g2 values must be >= 0");
  const double fx = 1.0 - g2_x;
  const double fxx = 1.0 - g2_xx;
  const double raw = fx * fxx;
  // Each factor is clamped as well; two factors > 1 in g2 would otherwise
  // multiply to a positive k.
  const double k = std::clamp(std::clamp(fx, 0.0, 1.0) * std::clamp(fxx, 0.0, 1.0), 0.0, 1.0);
  if (diagnostics && (g2_x > 1.0 || g2_xx > 1.0 || k != raw)) {
    std::ostringstream os;
    os << "k_from_g2: g2 values (" << g2_x << ", " << g2_xx << ") outside the low-background regime; k clamped to "
       << k;
    diagnostics->warn(os.str());
  }
  return k;
}

}  // namespace qdent
