#include <doctest.h>

#include <random>

#include "qdent/cascade.hpp"
#include "qdent/metrics.hpp"

using namespace qdent;

namespace {

// Direct simulation of the cascade: the exciton decays after t ~ Exp(τ1)
// unless a spin flip at t_s ~ Exp(τss) comes first. Unflipped pairs carry
// the phase S·t/ħ; flipped ones are unpolarized. Returns the mean Bell
// overlap including a fraction (1−k) of unpolarized background.
double simulated_fidelity(double s_ueV, double tau1_ps, double tau_ss_ns, double k, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> decay(1.0 / (tau1_ps * 1e-3));
  std::exponential_distribution<double> flip(std::isinf(tau_ss_ns) ? 1e-300 : 1.0 / tau_ss_ns);
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = decay(rng);
    const double ts = std::isinf(tau_ss_ns) ? INFINITY : flip(rng);
    sum += ts < t ? 0.25 : 0.5 * (1.0 + std::cos(s_ueV * t / constants::kHbar));
  }
  return k * sum / samples + (1.0 - k) * 0.25;
}

double inverse_normal_cdf(double u) {
  double lo = -12.0, hi = 12.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < u) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Stratified Monte Carlo: one uniform draw inside each of `samples` equal
// probability strata, mapped through the inverse normal CDF.
double mc_fluctuation_average(const CascadeParams& p, double sigma, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double z = inverse_normal_cdf((i + u(rng)) / samples);
    sum += model_fidelity(MicroEV{p.fss.value + sigma * z}, p.tau1, p.tau_ss, p.k);
  }
  return sum / samples;
}

}  // namespace

TEST_CASE("spin-preserved fraction") {
  CHECK(spin_preserved_fraction(Picoseconds{241}, Nanoseconds::infinite()) == 1.0);
  CHECK(spin_preserved_fraction(Picoseconds{5000}, Nanoseconds{5}) == doctest::Approx(0.5));
  CHECK(spin_preserved_fraction(Picoseconds{241}, Nanoseconds{11}) == doctest::Approx(1.0 / (1.0 + 0.241 / 11.0)));
  CHECK(spin_preserved_fraction(Picoseconds{241}, Nanoseconds{11}) == doctest::Approx(0.97856).epsilon(1e-5));
  CHECK_THROWS_AS(spin_preserved_fraction(Picoseconds{0}, Nanoseconds{1}), InvalidInput);
  CHECK_THROWS_AS(spin_preserved_fraction(Picoseconds{100}, Nanoseconds{-1}), InvalidInput);
}

TEST_CASE("model fidelity examples") {
  CHECK(model_fidelity(MicroEV{0}, Picoseconds{241}, Nanoseconds::infinite(), 1.0) == 1.0);
  CHECK(model_fidelity(MicroEV{0}, Picoseconds{290}, Nanoseconds{14}, 1.0) == doctest::Approx(0.9848).epsilon(1e-4));
  const double s_unit = constants::kHbar / 0.241;  // S·τ1/ħ = 1
  CHECK(s_unit == doctest::Approx(2.731).epsilon(1e-3));
  CHECK(model_fidelity(MicroEV{s_unit}, Picoseconds{241}, Nanoseconds::infinite(), 1.0) ==
        doctest::Approx(0.75).epsilon(1e-14));
  CHECK_THROWS_AS(model_fidelity(MicroEV{0}, Picoseconds{241}, Nanoseconds{1}, 1.5), InvalidInput);
}

TEST_CASE("model fidelity agrees with a direct emission-time simulation") {
  struct Case {
    double s, tau1, tau_ss, k;
  };
  const Case cases[] = {{0.0, 241, 11, 1.0}, {1.5, 241, 11, 0.978}, {3.0, 290, 14, 0.96}, {5.0, 241, INFINITY, 1.0}};
  std::uint64_t seed = 1;
  for (const auto& c : cases) {
    const double mc = simulated_fidelity(c.s, c.tau1, c.tau_ss, c.k, 1'000'000, seed++);
    const double closed = model_fidelity(MicroEV{c.s}, Picoseconds{c.tau1}, Nanoseconds{c.tau_ss}, c.k);
    // Binomial-scale error of the sampled mean is below 5e-4.
    CHECK(std::abs(mc - closed) < 2e-3);
  }
}

TEST_CASE("time-averaged state matches the closed form") {
  CascadeParams p;
  p.fss = MicroEV{3.0};
  p.tau1 = Picoseconds{241};
  p.tau_ss = Nanoseconds{11};
  p.k = 0.978;
  const DensityMatrix rho = time_averaged_state(p);
  CHECK(std::abs(fidelity_to_bell(rho) - model_fidelity(p)) < 1e-12);

  CascadeParams ideal;
  ideal.tau_ss = Nanoseconds::infinite();
  const Vector4 psi = bell_phi_plus();
  CHECK((time_averaged_state(ideal).matrix() - psi * psi.adjoint()).cwiseAbs().maxCoeff() < 1e-15);

  CascadeParams dark = ideal;
  dark.k = 0.0;
  CHECK((time_averaged_state(dark).matrix() - 0.25 * Operator4::Identity()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("property: closed form equals Bell overlap at the state phase over a grid") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> s(-8, 8), tau1(50, 2000), lt(-1, 3), k(0, 1), om(-90, 90);
  for (int trial = 0; trial < 400; ++trial) {
    CascadeParams p;
    p.fss = MicroEV{s(rng)};
    p.tau1 = Picoseconds{tau1(rng)};
    p.tau_ss = trial % 10 == 0 ? Nanoseconds::infinite() : Nanoseconds{std::pow(10.0, lt(rng))};
    p.k = k(rng);
    p.omega = Degrees{om(rng)};
    const DensityMatrix rho = time_averaged_state(p);
    CHECK(std::abs(fidelity_to_bell(rho, p.omega) - model_fidelity(p)) < 1e-12);
    const Complex c = cascade_coherence(p);
    CHECK(std::abs(c) <= 1.0 + 1e-15);
    // Physicality: validated construction already enforced this; recheck PSD.
    CHECK(eig_hermitian(rho.matrix()).values(3) > -1e-12);
  }
  CascadeParams zero;
  zero.tau_ss = Nanoseconds{3};
  const Complex c0 = cascade_coherence(zero);
  CHECK(c0.imag() == 0.0);
  CHECK(c0.real() > 0.0);
}

TEST_CASE("property: monotonicity of the closed form") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    const double s = 6 * u(rng), tau1 = 100 + 900 * u(rng), tss = 0.5 + 50 * u(rng), k = u(rng);
    const double f = model_fidelity(MicroEV{s}, Picoseconds{tau1}, Nanoseconds{tss}, k);
    CHECK(model_fidelity(MicroEV{s + 0.5}, Picoseconds{tau1}, Nanoseconds{tss}, k) <= f + 1e-15);
    CHECK(model_fidelity(MicroEV{-s}, Picoseconds{tau1}, Nanoseconds{tss}, k) == doctest::Approx(f).epsilon(1e-15));
    CHECK(model_fidelity(MicroEV{s}, Picoseconds{tau1 * 1.2}, Nanoseconds{tss}, k) <= f + 1e-15);
    CHECK(model_fidelity(MicroEV{s}, Picoseconds{tau1}, Nanoseconds{tss * 1.5}, k) >= f - 1e-15);
    CHECK(model_fidelity(MicroEV{s}, Picoseconds{tau1}, Nanoseconds{tss}, std::min(1.0, k + 0.1)) >= f - 1e-15);
    CHECK(f >= 0.25 - 1e-15);
    CHECK(f <= 1.0 + 1e-15);
  }
}

TEST_CASE("extreme parameters still give physical states") {
  CascadeParams p;
  p.tau1 = Picoseconds{1e6};
  p.tau_ss = Nanoseconds{1e-6};  // g → 0
  p.fss = MicroEV{50};
  p.k = 0.0;
  CHECK_NOTHROW(time_averaged_state(p));
  p.k = 1.0;
  CHECK(fidelity_to_bell(time_averaged_state(p)) == doctest::Approx(0.25).epsilon(1e-6));
  p.k = 1.2;
  CHECK_THROWS_AS(time_averaged_state(p), InvalidInput);
}

TEST_CASE("Overhauser field") {
  CHECK(overhauser_sigma(4.0, 4e5) == doctest::Approx(6.3246e-3).epsilon(1e-4));
  CHECK(overhauser_sigma(0.0, 4e5) == 0.0);
  CHECK(overhauser_sigma(2.5, 1.0) == 2.5);
  CHECK_THROWS_AS(overhauser_sigma(4.0, 0.0), InvalidInput);

  CHECK(fss_from_overhauser(MicroEV{0.25}, 0.0, -0.15, 1.1).value == 0.25);
  CHECK(fss_from_overhauser(MicroEV{0}, 6.32e-3, -0.15, 1.1).value == doctest::Approx(0.3476).epsilon(1e-3));
  const double up = fss_from_overhauser(MicroEV{0.25}, 0.01, -0.15, 1.1).value - 0.25;
  const double down = fss_from_overhauser(MicroEV{0.25}, -0.01, -0.15, 1.1).value - 0.25;
  CHECK(up == doctest::Approx(-down));
  CHECK(fss_jitter(OverhauserParams{}).value == doctest::Approx(0.3478).epsilon(1e-3));
}

TEST_CASE("Gauss-Hermite rule integrates Gaussian moments") {
  const auto rule = gauss_hermite(20);
  double sum_w = 0, m2 = 0, m4 = 0, m6 = 0, m3 = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i], w = rule.weights[i];
    sum_w += w;
    m2 += w * x * x;
    m3 += w * x * x * x;
    m4 += w * std::pow(x, 4);
    m6 += w * std::pow(x, 6);
  }
  CHECK(sum_w == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(m3) < 1e-12);
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m6 == doctest::Approx(15.0).epsilon(1e-12));
  CHECK_THROWS_AS(gauss_hermite(0), InvalidInput);
}

TEST_CASE("fluctuation averaging") {
  CascadeParams p;
  p.tau1 = Picoseconds{241};
  p.tau_ss = Nanoseconds{11};
  p.k = 0.978;
  CHECK(fluctuation_averaged_fidelity(p, MicroEV{0}) == model_fidelity(p));

  for (double s : {0.0, 1.0, 2.5}) {
    p.fss = MicroEV{s};
    for (double sigma : {0.348, 1.0}) {
      const double quad = fluctuation_averaged_fidelity(p, MicroEV{sigma}, 24);
      const double mc = mc_fluctuation_average(p, sigma, 1'000'000, 77);
      CHECK(std::abs(quad - mc) < 1e-4);
    }
  }

  p.fss = MicroEV{0};
  const double drop = model_fidelity(p) - fluctuation_averaged_fidelity(p, MicroEV{0.348});
  CHECK(drop > 0.0);
  CHECK(drop < 0.01);

  const double g = spin_preserved_fraction(p.tau1, p.tau_ss);
  const double wide = fluctuation_averaged_fidelity(p, MicroEV{1e4}, 200);
  CHECK(std::abs(wide - 0.25 * (1 + p.k * g)) < 2e-3);
  CHECK_THROWS_AS(fluctuation_averaged_fidelity(p, MicroEV{-1}), InvalidInput);
}

TEST_CASE("Purcell projection") {
  CascadeParams p;
  p.tau1 = Picoseconds{290};
  p.tau_ss = Nanoseconds{14};
  p.fss = MicroEV{1.2};
  p.k = 0.97;
  CHECK(purcell_projected_fidelity(p, 1.0) == model_fidelity(p));
  p.fss = MicroEV{0};
  p.k = 1.0;
  CHECK(purcell_projected_fidelity(p, 3.0) == doctest::Approx(0.99486).epsilon(1e-5));
  CHECK(purcell_projected_fidelity(p, INFINITY) == doctest::Approx(1.0));
  p.k = 0.9;
  CHECK(purcell_projected_fidelity(p, 1e9) == doctest::Approx(0.25 * (1 + 3 * 0.9)).epsilon(1e-6));
  CHECK_THROWS_AS(purcell_projected_fidelity(p, 0.5), InvalidInput);
}

TEST_CASE("background presets") {
  CHECK((unpolarized_background().matrix() - 0.25 * Operator4::Identity()).norm() < 1e-15);
  CHECK(vertical_pair_background()(3, 3).real() == 1.0);
}
