#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qdent/cascade.hpp"
#include "qdent/corrections.hpp"
#include "qdent/io.hpp"
#include "qdent/metrics.hpp"
#include "qdent/tomography.hpp"

namespace qdent {

struct TomographyConfig {
  SettingKind settings = SettingKind::Full36;
  double pairs_per_setting = 1e5;
  double acquisition_time_s = 600.0;
  Retardances retardances = kIdealRetardances;
  int mc_trials = 100;
  int multistart = 4;
};

struct FitConfig {
  bool fit_omega = false;
  int mc_trials = 200;
  int curve_samples = 201;
};

/// Fully resolved configuration. `document` keeps the merged JSON that the
/// manifest records, so a rerun from it is bit-exact.
struct PipelineConfig {
  std::string preset;
  CascadeParams cascade;
  BackgroundModel background_model;
  TomographyConfig tomography;
  DarkCountModel dark_counts;
  FitConfig fit;
  std::uint64_t seed = 0;
  std::string output_dir;
  io::Json document;
};

/// Names accepted by the "preset" key.
std::vector<std::string> preset_names();
io::Json preset_document(const std::string& name);

/// Overlays the document on its preset (if any) and validates every field.
/// Unknown keys raise InvalidInput naming their dotted path.
PipelineConfig resolve_config(const io::Json& document);
PipelineConfig load_config(const std::filesystem::path& path);

struct CorrectionStage {
  std::string name;
  DensityMatrix rho;
  EntanglementMetrics metrics;
  double optimal_phase_fidelity = 0.0;
};

struct CorrectionChainOptions {
  ReconstructionOptions reconstruction;
  int mc_trials = 0;
  int jobs = 1;
};

/// raw (ideal projectors) → dark_subtracted → retardance_aware (dataset
/// retardances) → background_corrected (state-level inverse with k and
/// bg_state from the background model).
std::vector<CorrectionStage> run_correction_chain(const TomographyDataset& raw, const DarkCountModel& dark,
                                                  const BackgroundModel& background,
                                                  const CorrectionChainOptions& options);

io::Json correction_chain_to_json(const std::vector<CorrectionStage>& stages);

/// Receives one human-readable line at a time.
using LogSink = std::function<void(const std::string&)>;

struct CommandContext {
  std::string output_dir;  // empty: config value, then $QDENT_OUTPUT_DIR, then "qdent-out"
  int jobs = 1;
  LogSink info;
  LogSink warn;
};

struct SimulateOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

struct ReconstructOptions {
  std::string dataset_path;
  std::string config_path;  // optional: seed, tomography and correction models
  std::optional<std::uint64_t> seed;
  std::optional<int> mc_trials;
  bool ideal_projectors = false;
  bool with_corrections = false;
  std::string background_path;  // optional background-model JSON
};

struct FitCommandOptions {
  std::string points_path;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tau1_ps;
  std::optional<double> k;
  std::optional<bool> fit_omega;
  std::optional<int> mc_trials;
};

struct CorrectOptions {
  std::string dataset_path;
  std::string config_path;
  std::string background_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> mc_trials;
};

struct ReportOptions {
  std::string run_dir;
};

/// Each command returns a process exit code: 0 success, 2 configuration or
/// input error, 3 corrupt data, 4 numerical failure.
int cmd_simulate(const SimulateOptions& options, const CommandContext& context);
int cmd_reconstruct(const ReconstructOptions& options, const CommandContext& context);
int cmd_fit(const FitCommandOptions& options, const CommandContext& context);
int cmd_correct(const CorrectOptions& options, const CommandContext& context);
int cmd_report(const ReportOptions& options, const CommandContext& context);

/// Runs `body`, mapping library exceptions to exit codes and reporting the
/// message through context.warn.
int run_guarded(const CommandContext& context, const std::function<void()>& body);

std::string tool_version();

}  // namespace qdent
