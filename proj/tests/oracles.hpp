#pragma once
// Reference implementations used only by the tests. They avoid the library's
// Eigen-based routines so that agreement is a meaningful check.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "qdent/quantum_core.hpp"

namespace oracle {

using C = std::complex<double>;
using Mat4 = std::array<std::array<C, 4>, 4>;
using Mat2 = std::array<std::array<C, 2>, 2>;

inline Mat4 from_eigen(const qdent::Operator4& m) {
  Mat4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = m(i, j);
  return out;
}

inline qdent::Operator4 to_eigen(const Mat4& m) {
  qdent::Operator4 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = m[i][j];
  return out;
}

inline Mat4 multiply(const Mat4& a, const Mat4& b) {
  Mat4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline C trace(const Mat4& a) { return a[0][0] + a[1][1] + a[2][2] + a[3][3]; }

// Faddeev-LeVerrier: det(λI − M) = λ⁴ + c[1]λ³ + c[2]λ² + c[3]λ + c[4].
inline std::array<C, 5> characteristic_polynomial(const Mat4& m) {
  std::array<C, 5> c{};
  c[0] = 1.0;
  Mat4 mk{};  // M_k, starting from M_0 = 0
  for (int k = 1; k <= 4; ++k) {
    Mat4 next = mk;
    for (int i = 0; i < 4; ++i) next[i][i] += c[k - 1];
    mk = multiply(m, next);
    c[k] = -trace(mk) / static_cast<double>(k);
  }
  return c;
}

inline double poly_real(const std::array<C, 5>& c, double x) {
  double v = 0.0;
  for (int i = 0; i <= 4; ++i) v = v * x + c[i].real();
  return v;
}

// Real roots of the characteristic polynomial of a Hermitian matrix by grid
// scan plus bisection. Assumes distinct eigenvalues (generic random input).
inline std::vector<double> hermitian_eigenvalues_bisection(const Mat4& m) {
  const auto c = characteristic_polynomial(m);
  double bound = 0.0;
  for (int i = 0; i < 4; ++i) {
    double row = 0.0;
    for (int j = 0; j < 4; ++j) row += std::abs(m[i][j]);
    bound = std::max(bound, row);
  }
  bound += 1.0;
  std::vector<double> roots;
  const int cells = 200000;
  double x0 = -bound, f0 = poly_real(c, x0);
  for (int s = 1; s <= cells; ++s) {
    const double x1 = -bound + 2.0 * bound * s / cells;
    const double f1 = poly_real(c, x1);
    if (f0 == 0.0) roots.push_back(x0);
    else if (f0 * f1 < 0.0) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = poly_real(c, mid);
        if (flo * fm <= 0.0) hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

// All four (complex) eigenvalues of a general 4x4 matrix, Durand-Kerner.
inline std::array<C, 4> eigenvalues_general(const Mat4& m) {
  const auto c = characteristic_polynomial(m);
  const auto p = [&](C x) {
    C v = 0.0;
    for (int i = 0; i <= 4; ++i) v = v * x + c[i];
    return v;
  };
  std::array<C, 4> z{C(0.4, 0.9), C(0.4, 0.9) * C(0.4, 0.9), std::pow(C(0.4, 0.9), 3), std::pow(C(0.4, 0.9), 4)};
  for (int it = 0; it < 2000; ++it) {
    for (int i = 0; i < 4; ++i) {
      C denom = 1.0;
      for (int j = 0; j < 4; ++j)
        if (j != i) denom *= z[i] - z[j];
      z[i] -= p(z[i]) / denom;
    }
  }
  return z;
}

// Wootters concurrence from the eigenvalues of ρ·ρ̃ with ρ̃ = (σy⊗σy)ρ*(σy⊗σy).
inline double concurrence(const Mat4& rho) {
  // σy⊗σy in HH,HV,VH,VV order is the anti-diagonal (−1, 1, 1, −1).
  const std::array<double, 4> sign{-1.0, 1.0, 1.0, -1.0};
  Mat4 tilde{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) tilde[i][j] = sign[i] * sign[j] * std::conj(rho[3 - i][3 - j]);
  const auto ev = eigenvalues_general(multiply(rho, tilde));
  std::array<double, 4> l{};
  for (int i = 0; i < 4; ++i) l[i] = std::sqrt(std::max(0.0, ev[i].real()));
  std::sort(l.begin(), l.end(), std::greater<>());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

// Textbook linear retarder: R(−θ)·diag(e^{−iπδ}, e^{iπδ})·R(θ).
inline Mat2 retarder(double theta_deg, double delta_waves) {
  const double t = theta_deg * M_PI / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  const C a = std::polar(1.0, -M_PI * delta_waves), b = std::polar(1.0, M_PI * delta_waves);
  Mat2 out{};
  out[0][0] = a * c * c + b * s * s;
  out[0][1] = (a - b) * c * s;
  out[1][0] = (a - b) * c * s;
  out[1][1] = a * s * s + b * c * c;
  return out;
}

// Polarization state that passes "QWP, then HWP, then H polarizer" with
// certainty: (U_hwp·U_qwp)†|H> = U_qwp†·U_hwp†|H>.
inline std::array<C, 2> analyzer_state(double hwp_deg, double qwp_deg, double hwp_delta, double qwp_delta) {
  const Mat2 h = retarder(hwp_deg, hwp_delta);
  const Mat2 q = retarder(qwp_deg, qwp_delta);
  const std::array<C, 2> u{std::conj(h[0][0]), std::conj(h[0][1])};  // U_hwp†|H>
  return {std::conj(q[0][0]) * u[0] + std::conj(q[1][0]) * u[1], std::conj(q[0][1]) * u[0] + std::conj(q[1][1]) * u[1]};
}

// <a ⊗ b| ρ |a ⊗ b> by explicit index sums.
inline double born_probability(const Mat4& rho, const std::array<C, 2>& a, const std::array<C, 2>& b) {
  std::array<C, 4> psi{a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
  C sum = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) sum += std::conj(psi[i]) * rho[i][j] * psi[j];
  return sum.real();
}

inline qdent::Operator4 random_hermitian(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  qdent::Operator4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = qdent::Complex(n(rng), n(rng));
  return 0.5 * (m + m.adjoint());
}

// Ginibre ensemble: G·G†/Tr with G of the given rank.
inline qdent::Operator4 random_density(std::mt19937_64& rng, int rank = 4) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Matrix<qdent::Complex, 4, Eigen::Dynamic> g(4, rank);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = qdent::Complex(n(rng), n(rng));
  qdent::Operator4 rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline qdent::Operator4 werner(double p) {
  qdent::Operator4 bell = qdent::Operator4::Zero();
  bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
  return p * bell + (1.0 - p) * 0.25 * qdent::Operator4::Identity();
}

}  // namespace oracle
