#include "qdent/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qdent {

namespace {

const Complex kI{0.0, 1.0};

Operator2 pauli_x() {
  Operator2 m;
  m << 0, 1, 1, 0;
  return m;
}

Operator2 pauli_z() {
  Operator2 m;
  m << 1, 0, 0, -1;
  return m;
}

// Fix global phase so the first component above `eps` is real positive.
void fix_phase(Eigen::Ref<Eigen::Vector4cd> v) {
  for (int i = 0; i < 4; ++i) {
    if (std::abs(v(i)) > 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      return;
    }
  }
}

bool lexicographic_less(const Eigen::Vector4cd& a, const Eigen::Vector4cd& b) {
  for (int i = 0; i < 4; ++i) {
    if (std::abs(a(i).real() - b(i).real()) > 1e-12) return a(i).real() < b(i).real();
    if (std::abs(a(i).imag() - b(i).imag()) > 1e-12) return a(i).imag() < b(i).imag();
  }
  return false;
}

}  // namespace

char to_char(Polarization p) {
  switch (p) {
    case Polarization::H: return 'H';
    case Polarization::V: return 'V';
    case Polarization::D: return 'D';
    case Polarization::A: return 'A';
    case Polarization::R: return 'R';
    case Polarization::L: return 'L';
  }
  return '?';
}

Polarization parse_polarization(char c) {
  switch (c) {
    case 'H': return Polarization::H;
    case 'V': return Polarization::V;
    case 'D': return Polarization::D;
    case 'A': return Polarization::A;
    case 'R': return Polarization::R;
    case 'L': return Polarization::L;
    default: break;
  }
  throw InvalidInput(std::string("unknown polarization label '") + c + "'");
}

JonesVector::JonesVector(Complex h, Complex v) {
  v_ << h, v;
  const double n = v_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("Jones vector must have finite nonzero norm");
  v_ /= n;
}

bool JonesVector::same_state(const JonesVector& other, double tol) const {
  return std::abs(std::abs(inner(other)) - 1.0) <= tol;
}

JonesVector basis_state(Polarization p) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (p) {
    case Polarization::H: return {1.0, 0.0};
    case Polarization::V: return {0.0, 1.0};
    case Polarization::D: return {s, s};
    case Polarization::A: return {s, -s};
    case Polarization::R: return {s, -s * kI};
    case Polarization::L: return {s, s * kI};
  }
  throw InvalidInput("unknown polarization");
}

JonesVector basis_state(char label) { return basis_state(parse_polarization(label)); }

Operator2 waveplate_operator(Degrees theta, double delta_waves) {
  if (!(delta_waves >= 0.0) || !std::isfinite(delta_waves))
    throw InvalidInput("waveplate retardance must be finite and >= 0");
  if (!std::isfinite(theta.value)) throw InvalidInput("waveplate angle must be finite");
  const double two_theta = 2.0 * theta.radians();
  const double phase = M_PI * delta_waves;
  const Operator2 axis = std::cos(two_theta) * pauli_z() + std::sin(two_theta) * pauli_x();
  return std::cos(phase) * Operator2::Identity() - kI * std::sin(phase) * axis;
}

bool is_unitary(const Operator2& m, double tol) {
  return ((m.adjoint() * m) - Operator2::Identity()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Operator4& m, double tol) {
  return ((m.adjoint() * m) - Operator4::Identity()).cwiseAbs().maxCoeff() <= tol;
}

bool is_hermitian(const Operator4& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

HermitianEigen eig_hermitian(const Operator4& m, double tol) {
  if (!m.allFinite()) throw InvalidInput("eig_hermitian: non-finite entries");
  if (!is_hermitian(m, tol)) throw InvalidInput("eig_hermitian: operator is not Hermitian within tolerance");
  const Operator4 h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator4> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalFailure("eig_hermitian: eigensolver failed");

  std::array<int, 4> order{};
  std::iota(order.begin(), order.end(), 0);
  Operator4 vecs = solver.eigenvectors();
  for (int i = 0; i < 4; ++i) fix_phase(vecs.col(i));
  const Eigen::Vector4d& vals = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(vals(a) - vals(b)) > 1e-10) return vals(a) > vals(b);
    return lexicographic_less(vecs.col(a), vecs.col(b));
  });

  HermitianEigen out;
  for (int i = 0; i < 4; ++i) {
    out.values(i) = vals(order[i]);
    out.vectors.col(i) = vecs.col(order[i]);
  }
  return out;
}

Operator4 matrix_sqrt_psd(const Operator4& m, double psd_tol) {
  const HermitianEigen e = eig_hermitian(m);
  Operator4 root = Operator4::Zero();
  for (int i = 0; i < 4; ++i) {
    double lambda = e.values(i);
    if (lambda < -psd_tol)
      throw InvalidInput("matrix_sqrt_psd: eigenvalue " + std::to_string(lambda) + " is negative");
    lambda = std::max(lambda, 0.0);
    root += std::sqrt(lambda) * e.vectors.col(i) * e.vectors.col(i).adjoint();
  }
  return root;
}

Operator4 kron(const Operator2& a, const Operator2& b) {
  Operator4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Vector4 kron(const JonesVector& a, const JonesVector& b) {
  Vector4 out;
  out << a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1];
  return out;
}

DensityMatrix::DensityMatrix() : m_(Operator4::Identity() * 0.25) {}

DensityMatrix DensityMatrix::from_operator(const Operator4& m, const Tolerances& tol) {
  if (!m.allFinite()) throw InvalidInput("density matrix has non-finite entries");
  if (!is_hermitian(m, tol.hermitian)) throw InvalidInput("density matrix is not Hermitian");
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol.trace)
    throw InvalidInput("density matrix trace " + std::to_string(tr) + " differs from 1");
  const HermitianEigen e = eig_hermitian(m, tol.hermitian);
  if (e.values(3) < -tol.psd)
    throw InvalidInput("density matrix has negative eigenvalue " + std::to_string(e.values(3)));
  return DensityMatrix(0.5 * (m + m.adjoint()));
}

DensityMatrix DensityMatrix::pure(const Vector4& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw InvalidInput("pure state needs a nonzero vector");
  const Vector4 u = psi / n;
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::project_to_physical(const Operator4& m) {
  if (!m.allFinite()) throw InvalidInput("cannot project non-finite operator");
  const Operator4 h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator4> solver(h);
  Eigen::Vector4d vals = solver.eigenvalues().cwiseMax(0.0);
  const double total = vals.sum();
  if (!(total > 0.0)) return DensityMatrix();
  vals /= total;
  const Operator4& v = solver.eigenvectors();
  return DensityMatrix(v * vals.cast<Complex>().asDiagonal() * v.adjoint());
}

double DensityMatrix::expectation(const Vector4& psi) const {
  return psi.dot(m_ * psi).real();
}

double DensityMatrix::expectation(const Operator4& op) const {
  return (op * m_).trace().real();
}

Vector4 bell_phi_plus() {
  Vector4 v;
  v << 1.0, 0.0, 0.0, 1.0;
  return v / std::sqrt(2.0);
}

DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double weight_a) {
  if (!(weight_a >= 0.0 && weight_a <= 1.0)) throw InvalidInput("mixing weight must lie in [0,1]");
  return DensityMatrix::from_operator(weight_a * a.matrix() + (1.0 - weight_a) * b.matrix());
}

double trace_distance(const Operator4& a, const Operator4& b) {
  const Operator4 d = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<Operator4> solver(d);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace qdent
