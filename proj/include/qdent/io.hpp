#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdent/cascade.hpp"
#include "qdent/corrections.hpp"
#include "qdent/dataset.hpp"
#include "qdent/fitting.hpp"
#include "qdent/metrics.hpp"

namespace qdent::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);
/// Fixed number of significant digits (%.Ng).
std::string format_significant(double v, int digits);

/// Paired real/imaginary 4x4 tables, row-major in HH, HV, VH, VV order,
/// 12 significant digits.
std::string write_density_matrix(const Operator4& rho);
Operator4 read_density_matrix(const std::string& text);

/// Columnar text: header metadata lines, then
/// label hwp_xx qwp_xx hwp_x qwp_x counts acq_time_s.
/// Retardances and singles rates must be uniform across records.
std::string write_dataset_text(const TomographyDataset& dataset);
TomographyDataset read_dataset_text(const std::string& text);

Json dataset_to_json(const TomographyDataset& dataset);
TomographyDataset dataset_from_json(const Json& doc);

/// Chooses the format from the extension (.json vs anything else).
TomographyDataset load_dataset(const std::filesystem::path& path);
void save_dataset(const TomographyDataset& dataset, const std::filesystem::path& path);

/// Cascade parameter document. Keys: S_ueV, S0_ueV, tau1_ps, tau_ss_ns,
/// k, omega_deg, background, B_max_T, N_nuclei, g_e_z, g_h_z. Unknown keys
/// are rejected. `background` is "unpolarized", "VV", "laser_vertical"
/// (accidental-pair model, needs `laser_g2`) or {"re": 4x4, "im": 4x4}.
/// `tau_ss_ns` accepts "inf".
Json params_to_json(const CascadeParams& params);
CascadeParams params_from_json(const Json& doc, const BackgroundModel* laser_g2 = nullptr);

Json background_model_to_json(const BackgroundModel& model);
BackgroundModel background_model_from_json(const Json& doc);

Json metrics_to_json(const EntanglementMetrics& metrics);
Json fit_to_json(const FitResult& fit);

/// Whitespace-separated table with header S_ueV fidelity sigma_f.
std::vector<FssFidelityPoint> read_points(const std::string& text);
std::string write_points(std::span<const FssFidelityPoint> points);

/// Parses JSON, mapping syntax errors to InvalidInput with line and column.
Json parse_json(const std::string& text, const std::string& source_name);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string sha256_hex(const std::string& bytes);

}  // namespace qdent::io
