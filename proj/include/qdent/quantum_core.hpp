#pragma once

#include <array>
#include <complex>
#include <string_view>

#include <Eigen/Dense>

#include "qdent/errors.hpp"
#include "qdent/units.hpp"

namespace qdent {

using Complex = std::complex<double>;
using Operator2 = Eigen::Matrix2cd;
using Operator4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;

/// Numerical tolerances used by the validation checks. Defaults are the
/// library constants; callers may pass their own.
struct Tolerances {
  double jones_norm = 1e-12;
  double unitary = 1e-12;
  double hermitian = 1e-10;
  double trace = 1e-10;
  double psd = 1e-9;
};

inline constexpr Tolerances kDefaultTolerances{};

enum class Polarization { H, V, D, A, R, L };

inline constexpr std::array<Polarization, 6> kAllPolarizations{
    Polarization::H, Polarization::V, Polarization::D,
    Polarization::A, Polarization::R, Polarization::L};

char to_char(Polarization p);
Polarization parse_polarization(char c);

/// Normalized two-component polarization state.
class JonesVector {
 public:
  JonesVector(Complex h, Complex v);
  explicit JonesVector(const Eigen::Vector2cd& v) : JonesVector(v(0), v(1)) {}

  const Eigen::Vector2cd& vector() const { return v_; }
  Complex operator[](int i) const { return v_(i); }

  /// <this|other>
  Complex inner(const JonesVector& other) const { return v_.dot(other.v_); }
  /// |<this|other>| == 1 up to tolerance, i.e. equal up to global phase.
  bool same_state(const JonesVector& other, double tol = 1e-12) const;

 private:
  Eigen::Vector2cd v_;
};

/// H=(1,0), V=(0,1), D=(1,1)/√2, A=(1,−1)/√2, R=(1,−i)/√2, L=(1,i)/√2.
JonesVector basis_state(Polarization p);
JonesVector basis_state(char label);

/// Jones matrix of a linear retarder with fast axis at `theta` and
/// retardance `delta_waves` (phase 2π·delta):
///   U = cos(πδ)·I − i·sin(πδ)·(cos2θ·σz + sin2θ·σx).
Operator2 waveplate_operator(Degrees theta, double delta_waves);

bool is_unitary(const Operator2& m, double tol = kDefaultTolerances.unitary);
bool is_unitary(const Operator4& m, double tol = kDefaultTolerances.unitary);
bool is_hermitian(const Operator4& m, double tol = kDefaultTolerances.hermitian);

/// Eigen-decomposition of a Hermitian 4x4 operator, eigenvalues descending.
struct HermitianEigen {
  Eigen::Vector4d values;
  Operator4 vectors;  // column i pairs with values(i)
};

/// Eigenvectors are phase-fixed (first non-negligible component real and
/// positive); eigenvalues equal within 1e-10 are ordered lexicographically
/// on the (real, imag) components of their eigenvectors.
HermitianEigen eig_hermitian(const Operator4& m, double tol = kDefaultTolerances.hermitian);

/// Principal square root of a positive semidefinite operator. Eigenvalues in
/// [−psd_tol, 0) are clamped to zero; anything more negative is rejected.
Operator4 matrix_sqrt_psd(const Operator4& m, double psd_tol = kDefaultTolerances.psd);

Operator4 kron(const Operator2& a, const Operator2& b);
Vector4 kron(const JonesVector& a, const JonesVector& b);

/// 4x4 Hermitian, unit-trace, positive semidefinite operator on the two-photon
/// polarization space, basis order HH, HV, VH, VV (first factor: XX photon).
class DensityMatrix {
 public:
  /// Maximally mixed state I/4.
  DensityMatrix();

  /// Validates hermiticity, trace and positivity against `tol`.
  static DensityMatrix from_operator(const Operator4& m, const Tolerances& tol = kDefaultTolerances);
  static DensityMatrix pure(const Vector4& psi);
  static DensityMatrix maximally_mixed() { return DensityMatrix(); }
  /// Hermitian part, negative eigenvalues clamped to zero, trace renormalized.
  static DensityMatrix project_to_physical(const Operator4& m);

  const Operator4& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }

  /// <psi|rho|psi>
  double expectation(const Vector4& psi) const;
  double expectation(const Operator4& op) const;

 private:
  explicit DensityMatrix(const Operator4& m) : m_(m) {}
  Operator4 m_;
};

/// |ψ+> = (|HH> + |VV>)/√2
Vector4 bell_phi_plus();

DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double weight_a);

double trace_distance(const Operator4& a, const Operator4& b);

}  // namespace qdent
