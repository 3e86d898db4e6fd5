#pragma once

#include <cmath>
#include <limits>

namespace qdent {

// Interface units: FSS in micro-eV, exciton lifetime in ps, spin-scattering
// time in ns, angles in degrees. Every conversion to the internal unit (ns)
// goes through to_ns().

struct MicroEV {
  double value = 0.0;
};

struct Picoseconds {
  double value = 0.0;
};

struct Nanoseconds {
  double value = 0.0;
  static constexpr Nanoseconds infinite() {
    return {std::numeric_limits<double>::infinity()};
  }
  bool is_infinite() const { return std::isinf(value) && value > 0; }
};

struct Degrees {
  double value = 0.0;
  double radians() const { return value * M_PI / 180.0; }
};

constexpr Nanoseconds to_ns(Picoseconds t) { return {t.value * 1e-3}; }

namespace constants {
/// Reduced Planck constant in micro-eV * ns.
inline constexpr double kHbar = 0.6582120;
/// Bohr magneton in micro-eV per tesla.
inline constexpr double kBohrMagneton = 57.8838;
}  // namespace constants

}  // namespace qdent
