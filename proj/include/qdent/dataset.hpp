#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdent/units.hpp"

namespace qdent {

/// Waveplate retardances in waves.
struct Retardances {
  double hwp = 0.5;
  double qwp = 0.25;
  bool operator==(const Retardances&) const = default;
};

inline constexpr Retardances kIdealRetardances{0.5, 0.25};
/// Achromatic plates at the dot emission wavelength.
inline constexpr Retardances kMeasuredRetardances{0.516, 0.258};

/// Waveplates in one detection arm: light passes the QWP, then the HWP,
/// then an H polarizer.
struct ArmSetting {
  Degrees hwp{0.0};
  Degrees qwp{0.0};
  Retardances retardance = kIdealRetardances;
};

/// One polarization-resolved coincidence setting. `label` is the nominal
/// basis pair, XX arm first (e.g. "HV" = XX projected on H, X on V).
struct MeasurementSetting {
  std::string label;
  ArmSetting xx;
  ArmSetting x;
};

struct CoincidenceRecord {
  MeasurementSetting setting;
  double counts = 0.0;  // raw data is integral; dark subtraction may leave fractions
  double acquisition_time_s = 1.0;
  std::optional<double> singles_xx_hz;
  std::optional<double> singles_x_hz;
};

struct TomographyDataset {
  std::vector<CoincidenceRecord> records;
  double dark_rate_hz = 0.0;
  double coincidence_window_ns = 1.0;
  /// Processing steps already applied (e.g. dark subtraction).
  std::vector<std::string> history;

  /// Labels unique, counts >= 0, acquisition times > 0, retardances > 0.
  void validate() const;
  const CoincidenceRecord* find(const std::string& label) const;
};

}  // namespace qdent
