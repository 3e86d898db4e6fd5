#include "qdent/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <map>
#include <set>
#include <sstream>

#include "qdent/fitting.hpp"
#include "qdent/random.hpp"

namespace qdent {

namespace fs = std::filesystem;
using io::Json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Object view that rejects unknown keys and reports bad fields by dotted path.
class Section {
 public:
  Section(const Json& doc, std::string path, std::set<std::string> keys) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw InvalidInput(path_ + ": expected an object");
    for (const auto& [key, value] : doc_.items())
      if (!keys.count(key)) throw InvalidInput("unknown config key '" + field(key) + "'");
  }

  bool has(const std::string& key) const { return doc_.contains(key); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const Json& v = doc_.at(key);
    if (!v.is_number()) throw InvalidInput(field(key) + ": expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const Json& v = doc_.at(key);
    if (!v.is_number_integer()) throw InvalidInput(field(key) + ": expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = doc_.at(key);
    if (!v.is_boolean()) throw InvalidInput(field(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const Json& v = doc_.at(key);
    if (!v.is_string()) throw InvalidInput(field(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const Json& doc_;
  std::string path_;
};

Json base_preset(double tau1_ps, double tau_ss_ns, double g2_xx, double g2_x) {
  Json doc;
  doc["cascade"] = Json{{"S_ueV", 0.0},          {"S0_ueV", 0.25},    {"tau1_ps", tau1_ps},
                        {"tau_ss_ns", tau_ss_ns}, {"omega_deg", 0.0},  {"background", "laser_vertical"},
                        {"B_max_T", 4.0},        {"N_nuclei", 4e5},   {"g_e_z", -0.15},
                        {"g_h_z", 1.1}};
  doc["background_model"] = Json{{"g2_xx", g2_xx}, {"g2_x", g2_x}};
  doc["tomography"] = Json{{"settings", "full36"},       {"pairs_per_setting", 1e5}, {"acquisition_time_s", 600.0},
                           {"hwp_retardance", 0.516},    {"qwp_retardance", 0.258},  {"mc_trials", 100},
                           {"multistart", 4}};
  doc["dark_counts"] = Json{{"dark_rate_hz", 20.0},
                            {"coincidence_window_ns", 2.0},
                            {"singles_xx_hz", 1e5},
                            {"singles_x_hz", 1e5}};
  doc["fit"] = Json{{"fit_omega", false}, {"mc_trials", 200}, {"curve_samples", 201}};
  doc["seed"] = 1;
  return doc;
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string format_signed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.*f", decimals, v);
  return buf;
}

fs::path resolve_output_dir(const CommandContext& context, const std::string& config_dir) {
  if (!context.output_dir.empty()) return context.output_dir;
  if (!config_dir.empty()) return config_dir;
  if (const char* env = std::getenv("QDENT_OUTPUT_DIR"); env && *env) return env;
  return "qdent-out";
}

void log(const LogSink& sink, const std::string& line) {
  if (sink) sink(line);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct InputFile {
  std::string path;
  std::string contents;
};

// Writes artifacts atomically, then a manifest with their digests.
void write_run(const fs::path& dir, const std::string& command, const Json& config, std::uint64_t seed,
               const std::vector<InputFile>& inputs, const std::vector<std::pair<std::string, std::string>>& files,
               const CommandContext& context) {
  Json outputs = Json::array();
  for (const auto& [name, contents] : files) {
    io::write_file_atomic(dir / name, contents);
    outputs.push_back(Json{{"file", name}, {"sha256", io::sha256_hex(contents)}});
    log(context.info, "wrote " + (dir / name).string());
  }
  Json input_list = Json::array();
  for (const auto& in : inputs)
    input_list.push_back(Json{{"path", in.path}, {"sha256", io::sha256_hex(in.contents)}});
  Json manifest;
  manifest["tool"] = "qdent";
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["seed"] = seed;
  manifest["config"] = config;
  manifest["config_sha256"] = io::sha256_hex(config.dump());
  manifest["inputs"] = input_list;
  manifest["outputs"] = outputs;
  manifest["created_utc"] = utc_timestamp();
  io::write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

Json value_json(const ValueWithError& v) { return Json{{"value", v.value}, {"uncertainty", v.error}}; }

std::optional<PipelineConfig> optional_config(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_config(path);
}

BackgroundModel locate_background(const std::string& explicit_path, const std::optional<PipelineConfig>& config,
                                  const fs::path& dataset_path, std::vector<InputFile>& inputs) {
  auto from_file = [&](const fs::path& p) {
    const std::string text = io::read_file(p);
    inputs.push_back({p.string(), text});
    return io::background_model_from_json(io::parse_json(text, p.string()));
  };
  if (!explicit_path.empty()) return from_file(explicit_path);
  if (config) return config->background_model;
  const fs::path sibling = dataset_path.parent_path() / "background_model.json";
  if (fs::exists(sibling)) return from_file(sibling);
  throw InvalidInput("no background model: pass a background-model file or a config");
}

std::vector<StateMetric> standard_metrics() {
  return {[](const DensityMatrix& r) { return fidelity_to_bell(r); }, [](const DensityMatrix& r) { return concurrence(r); },
          [](const DensityMatrix& r) { return largest_eigenvalue(r); }};
}

void apply_errors(EntanglementMetrics& m, const std::vector<MetricEstimate>& e) {
  m.fidelity.error = e[0].std;
  m.concurrence.error = e[1].std;
  m.largest_eigenvalue.error = e[2].std;
}

std::string ladder_table(const Json& stages) {
  std::ostringstream os;
  os << "stage                 fidelity            concurrence         delta_f    delta_c\n";
  for (const auto& s : stages) {
    std::string name = s.at("stage").get<std::string>();
    name.resize(22, ' ');
    const auto cell = [](const Json& v) {
      std::string c = format_fixed(v.at("value").get<double>(), 4) + " +- " +
                      format_fixed(v.at("uncertainty").get<double>(), 4);
      c.resize(20, ' ');
      return c;
    };
    os << name << cell(s.at("fidelity")) << cell(s.at("concurrence"))
       << format_signed(s.at("delta_fidelity").get<double>(), 4) << "    "
       << format_signed(s.at("delta_concurrence").get<double>(), 4) << '\n';
  }
  return os.str();
}

ReconstructionOptions reconstruction_for(const std::optional<PipelineConfig>& config, std::uint64_t seed) {
  ReconstructionOptions r;
  r.seed = seed;
  if (config) r.multistart = config->tomography.multistart;
  return r;
}

}  // namespace

std::string tool_version() { return kVersion; }

std::vector<std::string> preset_names() { return {"qd1", "qd2"}; }

io::Json preset_document(const std::string& name) {
  if (name == "qd1") return base_preset(241.0, 11.0, 0.014, 0.008);
  if (name == "qd2") return base_preset(290.0, 14.0, 0.021, 0.015);
  throw InvalidInput("unknown preset '" + name + "' (expected qd1 or qd2)");
}

PipelineConfig resolve_config(const io::Json& user) {
  const Section top(user, "", {"preset", "cascade", "background_model", "tomography", "dark_counts", "fit", "seed",
                               "output_dir"});
  PipelineConfig cfg;
  cfg.preset = top.string("preset", "");
  Json doc = cfg.preset.empty() ? Json::object() : preset_document(cfg.preset);
  doc.merge_patch(user);

  const Json empty = Json::object();
  const auto section = [&](const char* name) -> const Json& { return doc.contains(name) ? doc.at(name) : empty; };

  try {
    cfg.background_model = io::background_model_from_json(section("background_model"));
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("config ") + e.what());
  }

  Json cascade_doc = section("cascade");
  if (!cascade_doc.is_object()) throw InvalidInput("cascade: expected an object");
  if (!cascade_doc.contains("k")) cascade_doc["k"] = cfg.background_model.k_linear();
  try {
    cfg.cascade = io::params_from_json(cascade_doc, &cfg.background_model);
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("config ") + e.what());
  }
  doc["cascade"] = cascade_doc;

  const Section tomo(section("tomography"), "tomography",
                     {"settings", "pairs_per_setting", "acquisition_time_s", "hwp_retardance", "qwp_retardance",
                      "mc_trials", "multistart"});
  cfg.tomography.settings = parse_setting_kind(tomo.string("settings", "full36"));
  cfg.tomography.pairs_per_setting = tomo.number("pairs_per_setting", cfg.tomography.pairs_per_setting);
  cfg.tomography.acquisition_time_s = tomo.number("acquisition_time_s", cfg.tomography.acquisition_time_s);
  cfg.tomography.retardances.hwp = tomo.number("hwp_retardance", kIdealRetardances.hwp);
  cfg.tomography.retardances.qwp = tomo.number("qwp_retardance", kIdealRetardances.qwp);
  cfg.tomography.mc_trials = tomo.integer("mc_trials", cfg.tomography.mc_trials);
  cfg.tomography.multistart = tomo.integer("multistart", cfg.tomography.multistart);
  if (!(cfg.tomography.pairs_per_setting > 0.0)) throw InvalidInput("tomography.pairs_per_setting: must be > 0");
  if (!(cfg.tomography.acquisition_time_s > 0.0)) throw InvalidInput("tomography.acquisition_time_s: must be > 0");
  if (!(cfg.tomography.retardances.hwp > 0.0 && cfg.tomography.retardances.qwp > 0.0))
    throw InvalidInput("tomography retardances must be > 0");
  if (cfg.tomography.mc_trials < 0) throw InvalidInput("tomography.mc_trials: must be >= 0");
  if (cfg.tomography.multistart < 1) throw InvalidInput("tomography.multistart: must be >= 1");

  const Section dark(section("dark_counts"), "dark_counts",
                     {"dark_rate_hz", "coincidence_window_ns", "singles_xx_hz", "singles_x_hz"});
  cfg.dark_counts.dark_rate_xx_hz = cfg.dark_counts.dark_rate_x_hz = dark.number("dark_rate_hz", 0.0);
  cfg.dark_counts.coincidence_window_ns = dark.number("coincidence_window_ns", 1.0);
  cfg.dark_counts.singles_xx_hz = dark.number("singles_xx_hz", 0.0);
  cfg.dark_counts.singles_x_hz = dark.number("singles_x_hz", 0.0);
  try {
    cfg.dark_counts.validate();
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("dark_counts: ") + e.what());
  }

  const Section fit(section("fit"), "fit", {"fit_omega", "mc_trials", "curve_samples"});
  cfg.fit.fit_omega = fit.boolean("fit_omega", false);
  cfg.fit.mc_trials = fit.integer("mc_trials", cfg.fit.mc_trials);
  cfg.fit.curve_samples = fit.integer("curve_samples", cfg.fit.curve_samples);
  if (cfg.fit.mc_trials < 0) throw InvalidInput("fit.mc_trials: must be >= 0");
  if (cfg.fit.curve_samples < 2) throw InvalidInput("fit.curve_samples: must be >= 2");

  if (doc.contains("seed")) {
    const Json& seed = doc.at("seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
      throw InvalidInput("seed: expected a non-negative integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  doc["seed"] = cfg.seed;
  const Section resolved(doc, "", {"preset", "cascade", "background_model", "tomography", "dark_counts", "fit", "seed",
                                   "output_dir"});
  cfg.output_dir = resolved.string("output_dir", "");
  cfg.document = std::move(doc);
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  const std::string text = io::read_file(path);
  return resolve_config(io::parse_json(text, path.string()));
}

std::vector<CorrectionStage> run_correction_chain(const TomographyDataset& raw, const DarkCountModel& dark,
                                                  const BackgroundModel& background,
                                                  const CorrectionChainOptions& options) {
  const bool already_subtracted =
      std::any_of(raw.history.begin(), raw.history.end(),
                  [](const std::string& h) { return h.rfind("dark_subtracted", 0) == 0; });
  const TomographyDataset subtracted = already_subtracted ? raw : subtract_dark(raw, dark);

  ReconstructionOptions ideal = options.reconstruction;
  ideal.assumed_retardances = kIdealRetardances;
  ReconstructionOptions aware = options.reconstruction;
  aware.assumed_retardances.reset();

  const double k = background.k_linear();
  const DensityMatrix bg = background.bg_state();

  std::vector<CorrectionStage> stages(4);
  stages[0].name = "raw";
  stages[0].rho = mle_reconstruct(raw, ideal).rho;
  stages[1].name = "dark_subtracted";
  stages[1].rho = mle_reconstruct(subtracted, ideal).rho;
  stages[2].name = "retardance_aware";
  stages[2].rho = mle_reconstruct(subtracted, aware).rho;
  stages[3].name = "background_corrected";
  stages[3].rho = background_correct_state(stages[2].rho, k, bg);

  for (auto& s : stages) {
    s.metrics = compute_metrics(s.rho);
    s.optimal_phase_fidelity = optimal_phase_fidelity(s.rho);
  }

  if (options.mc_trials > 0) {
    const auto metrics = standard_metrics();
    const std::array<const TomographyDataset*, 3> data{&raw, &subtracted, &subtracted};
    const std::array<const ReconstructionOptions*, 3> recon{&ideal, &ideal, &aware};
    for (int i = 0; i < 3; ++i) {
      MonteCarloOptions mc;
      mc.trials = options.mc_trials;
      mc.seed = mix_seed(options.reconstruction.seed, 77 + i);
      mc.jobs = options.jobs;
      mc.reconstruction = *recon[i];
      apply_errors(stages[i].metrics, monte_carlo_uncertainty(*data[i], metrics, mc));
    }
    std::vector<StateMetric> corrected;
    for (const auto& m : metrics)
      corrected.push_back([m, k, &bg](const DensityMatrix& r) { return m(background_correct_state(r, k, bg)); });
    MonteCarloOptions mc;
    mc.trials = options.mc_trials;
    mc.seed = mix_seed(options.reconstruction.seed, 80);
    mc.jobs = options.jobs;
    mc.reconstruction = aware;
    apply_errors(stages[3].metrics, monte_carlo_uncertainty(subtracted, corrected, mc));
  }
  return stages;
}

io::Json correction_chain_to_json(const std::vector<CorrectionStage>& stages) {
  Json out = Json::array();
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const double df = i == 0 ? 0.0 : s.metrics.fidelity.value - stages[i - 1].metrics.fidelity.value;
    const double dc = i == 0 ? 0.0 : s.metrics.concurrence.value - stages[i - 1].metrics.concurrence.value;
    out.push_back(Json{{"stage", s.name},
                       {"fidelity", value_json(s.metrics.fidelity)},
                       {"concurrence", value_json(s.metrics.concurrence)},
                       {"largest_eigenvalue", value_json(s.metrics.largest_eigenvalue)},
                       {"optimal_phase_fidelity", s.optimal_phase_fidelity},
                       {"delta_fidelity", df},
                       {"delta_concurrence", dc}});
  }
  return out;
}

int run_guarded(const CommandContext& context, const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const InvalidInput& e) {
    log(context.warn, std::string("error: ") + e.what());
    return 2;
  } catch (const DataCorruption& e) {
    log(context.warn, std::string("error: corrupt data: ") + e.what());
    return 3;
  } catch (const NumericalFailure& e) {
    log(context.warn, std::string("error: numerical failure: ") + e.what());
    return 4;
  } catch (const fs::filesystem_error& e) {
    log(context.warn, std::string("error: ") + e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    log(context.warn, std::string("error: malformed document: ") + e.what());
    return 3;
  } catch (const std::exception& e) {
    log(context.warn, std::string("error: ") + e.what());
    return 1;
  }
}

int cmd_simulate(const SimulateOptions& options, const CommandContext& context) {
  return run_guarded(context, [&] {
    if (options.config_path.empty()) throw InvalidInput("simulate needs a config file");
    const std::string config_text = io::read_file(options.config_path);
    Json user = io::parse_json(config_text, options.config_path);
    if (options.seed && user.is_object()) user["seed"] = *options.seed;
    const PipelineConfig cfg = resolve_config(user);
    const fs::path out = resolve_output_dir(context, cfg.output_dir);

    const DensityMatrix truth = time_averaged_state(cfg.cascade);
    const auto settings = standard_settings(cfg.tomography.settings, cfg.tomography.retardances);
    SamplingOptions sampling;
    sampling.pairs_per_setting = cfg.tomography.pairs_per_setting;
    sampling.seed = cfg.seed;
    sampling.dark_rate_hz = cfg.dark_counts.dark_rate_xx_hz;
    sampling.coincidence_window_ns = cfg.dark_counts.coincidence_window_ns;
    sampling.acquisition_time_s = cfg.tomography.acquisition_time_s;
    sampling.singles_xx_hz = cfg.dark_counts.singles_xx_hz;
    sampling.singles_x_hz = cfg.dark_counts.singles_x_hz;
    const TomographyDataset dataset = sample_dataset(truth, settings, sampling);

    Json truth_doc;
    truth_doc["cascade"] = cfg.document.at("cascade");
    truth_doc["model_fidelity"] = model_fidelity(cfg.cascade);
    const EntanglementMetrics m = compute_metrics(truth);
    truth_doc["fidelity"] = m.fidelity.value;
    truth_doc["concurrence"] = m.concurrence.value;
    truth_doc["largest_eigenvalue"] = m.largest_eigenvalue.value;
    truth_doc["optimal_phase_fidelity"] = optimal_phase_fidelity(truth);

    write_run(out, "simulate", cfg.document, cfg.seed, {{options.config_path, config_text}},
              {{"dataset.tsv", io::write_dataset_text(dataset)},
               {"background_model.json", io::background_model_to_json(cfg.background_model).dump(2) + "\n"},
               {"rho_true.txt", io::write_density_matrix(truth.matrix())},
               {"truth.json", truth_doc.dump(2) + "\n"},
               {"config.json", cfg.document.dump(2) + "\n"}},
              context);
    log(context.info, "simulated " + std::to_string(dataset.records.size()) + " settings; true fidelity " +
                          format_fixed(m.fidelity.value, 6));
  });
}

int cmd_reconstruct(const ReconstructOptions& options, const CommandContext& context) {
  return run_guarded(context, [&] {
    if (options.dataset_path.empty()) throw InvalidInput("reconstruct needs a dataset file");
    std::vector<InputFile> inputs{{options.dataset_path, io::read_file(options.dataset_path)}};
    const TomographyDataset dataset = io::load_dataset(options.dataset_path);
    const auto config = optional_config(options.config_path);
    if (config) inputs.push_back({options.config_path, io::read_file(options.config_path)});
    const std::uint64_t seed = options.seed.value_or(config ? config->seed : 0);
    const int trials = options.mc_trials.value_or(config ? config->tomography.mc_trials : 100);
    const fs::path out = resolve_output_dir(context, config ? config->output_dir : "");

    if (const auto missing = missing_settings(dataset); !missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ",") + m;
      log(context.warn, "note: dataset lacks " + std::to_string(missing.size()) + " of 36 settings: " + list);
    }

    ReconstructionOptions recon = reconstruction_for(config, seed);
    if (options.ideal_projectors) recon.assumed_retardances = kIdealRetardances;

    MleResult mle;
    bool converged = true;
    std::string failure;
    try {
      mle = mle_reconstruct(dataset, recon);
    } catch (const ConvergenceError& e) {
      mle = e.best();
      converged = false;
      failure = e.what();
    }
    EntanglementMetrics metrics = compute_metrics(mle.rho);
    int mc_failures = 0;
    if (trials > 0 && converged) {
      MonteCarloOptions mc;
      mc.trials = trials;
      mc.seed = seed;
      mc.jobs = context.jobs;
      mc.reconstruction = recon;
      const auto est = monte_carlo_uncertainty(dataset, standard_metrics(), mc);
      apply_errors(metrics, est);
      mc_failures = est[0].failures;
    }

    Json report;
    report["fidelity"] = value_json(metrics.fidelity);
    report["concurrence"] = value_json(metrics.concurrence);
    report["largest_eigenvalue"] = value_json(metrics.largest_eigenvalue);
    report["optimal_phase_fidelity"] = optimal_phase_fidelity(mle.rho);
    report["optimal_phase_deg"] = optimal_bell_phase(mle.rho).value;
    report["projectors"] = options.ideal_projectors ? "ideal" : "dataset_retardances";
    report["mle"] = Json{{"objective", mle.objective},
                         {"initial_objective", mle.initial_objective},
                         {"iterations", mle.iterations},
                         {"converged", mle.converged}};
    report["mc_trials"] = trials;
    report["mc_failures"] = mc_failures;

    std::vector<std::pair<std::string, std::string>> files{{"rho.txt", io::write_density_matrix(mle.rho.matrix())}};
    if (options.with_corrections && converged) {
      const BackgroundModel bg = locate_background(options.background_path, config, options.dataset_path, inputs);
      CorrectionChainOptions chain;
      chain.reconstruction = reconstruction_for(config, seed);
      chain.mc_trials = 0;
      chain.jobs = context.jobs;
      report["corrections"] = correction_chain_to_json(run_correction_chain(dataset, dark_model_for(dataset), bg, chain));
    }
    files.emplace_back("metrics.json", report.dump(2) + "\n");

    Json used = config ? config->document : Json::object();
    used["reconstruct"] = Json{{"seed", seed},
                               {"mc_trials", trials},
                               {"ideal_projectors", options.ideal_projectors},
                               {"with_corrections", options.with_corrections}};
    write_run(out, "reconstruct", used, seed, inputs, files, context);
    log(context.info, "fidelity " + format_fixed(metrics.fidelity.value, 4) + " +- " +
                          format_fixed(metrics.fidelity.error, 4) + ", concurrence " +
                          format_fixed(metrics.concurrence.value, 4) + " +- " +
                          format_fixed(metrics.concurrence.error, 4));
    if (!converged) throw NumericalFailure(failure + " (best iterate written)");
  });
}

int cmd_correct(const CorrectOptions& options, const CommandContext& context) {
  return run_guarded(context, [&] {
    if (options.dataset_path.empty()) throw InvalidInput("correct needs a dataset file");
    std::vector<InputFile> inputs{{options.dataset_path, io::read_file(options.dataset_path)}};
    const TomographyDataset dataset = io::load_dataset(options.dataset_path);
    const auto config = optional_config(options.config_path);
    if (config) inputs.push_back({options.config_path, io::read_file(options.config_path)});
    const BackgroundModel bg = locate_background(options.background_path, config, options.dataset_path, inputs);
    const std::uint64_t seed = options.seed.value_or(config ? config->seed : 0);
    const int trials = options.mc_trials.value_or(0);
    const fs::path out = resolve_output_dir(context, config ? config->output_dir : "");

    CorrectionChainOptions chain;
    chain.reconstruction = reconstruction_for(config, seed);
    chain.mc_trials = trials;
    chain.jobs = context.jobs;
    const auto stages = run_correction_chain(dataset, dark_model_for(dataset), bg, chain);
    const Json ladder = correction_chain_to_json(stages);

    Json doc;
    doc["k"] = bg.k_linear();
    doc["background_model"] = io::background_model_to_json(bg);
    doc["stages"] = ladder;
    doc["total_delta_fidelity"] = stages.back().metrics.fidelity.value - stages.front().metrics.fidelity.value;
    doc["total_delta_concurrence"] =
        stages.back().metrics.concurrence.value - stages.front().metrics.concurrence.value;

    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& s : stages) files.emplace_back("rho_" + s.name + ".txt", io::write_density_matrix(s.rho.matrix()));
    files.emplace_back("correction.json", doc.dump(2) + "\n");
    const std::string table = ladder_table(ladder);
    files.emplace_back("correction.txt", table);

    Json used = config ? config->document : Json::object();
    used["correct"] = Json{{"seed", seed}, {"mc_trials", trials}};
    write_run(out, "correct", used, seed, inputs, files, context);
    std::istringstream lines(table);
    for (std::string line; std::getline(lines, line);) log(context.info, line);
  });
}

int cmd_fit(const FitCommandOptions& options, const CommandContext& context) {
  return run_guarded(context, [&] {
    if (options.points_path.empty()) throw InvalidInput("fit needs a points file");
    std::vector<InputFile> inputs{{options.points_path, io::read_file(options.points_path)}};
    const auto points = io::read_points(inputs.front().contents);
    const auto config = optional_config(options.config_path);
    if (config) inputs.push_back({options.config_path, io::read_file(options.config_path)});
    CascadeParams params = config ? config->cascade : CascadeParams{};
    if (!options.tau1_ps && !config) throw InvalidInput("fit needs tau1 (option or config)");
    if (options.tau1_ps) params.tau1 = Picoseconds{*options.tau1_ps};
    if (options.k) params.k = *options.k;
    params.validate();

    FitOptions fo;
    fo.fit_omega = options.fit_omega.value_or(config ? config->fit.fit_omega : false);
    fo.seed = options.seed.value_or(config ? config->seed : 0);
    fo.mc_trials = options.mc_trials.value_or(config ? config->fit.mc_trials : 200);
    fo.jobs = context.jobs;
    const int samples = config ? config->fit.curve_samples : 201;
    const fs::path out = resolve_output_dir(context, config ? config->output_dir : "");

    const FitResult fit = fit_fss_curve(points, params.tau1, params.k, fo);
    Json doc = io::fit_to_json(fit);
    const MicroEV jitter = fss_jitter(params.overhauser);
    const DeviationReport dev = dephasing_free_deviation(points, params, params.fss_floor, jitter);
    doc["dephasing_free"] = Json{{"S0_ueV", params.fss_floor.value},
                                 {"sigma_S_ueV", jitter.value},
                                 {"model", dev.model},
                                 {"z_scores", dev.z_scores},
                                 {"combined_z", dev.combined_z},
                                 {"chi_squared", dev.chi_squared}};

    double s_max = 0.0;
    for (const auto& p : points) s_max = std::max(s_max, std::abs(p.fss.value));
    std::string curve = "S_ueV\tf_model\n";
    for (const auto& [s, f] : sample_fit_curve(fit, 0.0, s_max, samples))
      curve += io::format_double(s) + '\t' + io::format_double(f) + '\n';

    Json used = config ? config->document : Json::object();
    used["fit_command"] = Json{{"tau1_ps", params.tau1.value},
                               {"k", params.k},
                               {"fit_omega", fo.fit_omega},
                               {"seed", fo.seed},
                               {"mc_trials", fo.mc_trials}};
    write_run(out, "fit", used, fo.seed, inputs, {{"fit.json", doc.dump(2) + "\n"}, {"curve.tsv", curve}}, context);
    std::string line = "tau_ss = " + io::format_significant(fit.tau_ss.value, 6) + " ns";
    if (!fit.tau_ss_unbounded) line += " +- " + io::format_significant(fit.tau_ss_error_ns, 3);
    else line += " (unbounded)";
    if (fit.omega_fitted)
      line += ", omega = " + format_fixed(fit.omega.value, 2) + " +- " + format_fixed(fit.omega_error_deg, 2) + " deg";
    line += ", chi2/dof = " + format_fixed(fit.chi_squared, 2) + "/" + std::to_string(fit.dof);
    log(context.info, line);
  });
}

int cmd_report(const ReportOptions& options, const CommandContext& context) {
  return run_guarded(context, [&] {
    const fs::path dir = options.run_dir.empty() ? resolve_output_dir(context, "") : fs::path(options.run_dir);
    if (!fs::is_directory(dir)) throw InvalidInput("run directory not found: " + dir.string());

    std::vector<std::pair<std::string, fs::path>> runs;
    if (fs::exists(dir / "manifest.json")) runs.emplace_back(".", dir);
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) subdirs.push_back(entry.path());
    std::sort(subdirs.begin(), subdirs.end());
    for (const auto& s : subdirs) runs.emplace_back(s.filename().string(), s);

    static const std::map<std::string, std::vector<std::string>> kArtifacts{
        {"simulate", {"dataset.tsv", "truth.json", "rho_true.txt"}},
        {"reconstruct", {"rho.txt", "metrics.json"}},
        {"correct", {"correction.json"}},
        {"fit", {"fit.json", "curve.tsv"}}};

    std::ostringstream text;
    Json doc;
    Json run_docs = Json::array();
    text << "qdent report: " << runs.size() << " run(s)\n";
    for (const auto& [name, path] : runs) {
      Json entry;
      entry["run"] = name;
      std::string command = "unknown";
      Json missing = Json::array();
      try {
        command = io::parse_json(io::read_file(path / "manifest.json"), "manifest").value("command", "unknown");
      } catch (const std::exception&) {
        missing.push_back("manifest.json (unreadable)");
      }
      entry["command"] = command;
      text << "\n== " << name << " (" << command << ")\n";
      if (auto it = kArtifacts.find(command); it != kArtifacts.end())
        for (const auto& f : it->second)
          if (!fs::exists(path / f)) missing.push_back(f);

      const auto load = [&](const char* file) -> std::optional<Json> {
        if (!fs::exists(path / file)) return std::nullopt;
        try {
          return io::parse_json(io::read_file(path / file), file);
        } catch (const std::exception&) {
          missing.push_back(std::string(file) + " (unreadable)");
          return std::nullopt;
        }
      };
      if (command == "simulate") {
        if (auto t = load("truth.json")) {
          entry["truth"] = *t;
          text << "true fidelity " << format_fixed(t->at("fidelity").get<double>(), 4) << ", concurrence "
               << format_fixed(t->at("concurrence").get<double>(), 4) << ", closed-form model "
               << format_fixed(t->at("model_fidelity").get<double>(), 4) << '\n';
        }
      } else if (command == "reconstruct") {
        if (auto m = load("metrics.json")) {
          entry["metrics"] = *m;
          text << "fidelity " << format_fixed(m->at("fidelity").at("value").get<double>(), 4) << " +- "
               << format_fixed(m->at("fidelity").at("uncertainty").get<double>(), 4) << ", concurrence "
               << format_fixed(m->at("concurrence").at("value").get<double>(), 4) << " +- "
               << format_fixed(m->at("concurrence").at("uncertainty").get<double>(), 4) << '\n';
          if (m->contains("corrections")) text << ladder_table(m->at("corrections"));
        }
      } else if (command == "correct") {
        if (auto c = load("correction.json")) {
          entry["correction"] = *c;
          text << "k = " << format_fixed(c->at("k").get<double>(), 6) << '\n' << ladder_table(c->at("stages"));
          text << "total delta fidelity " << format_signed(c->at("total_delta_fidelity").get<double>(), 4) << '\n';
        }
      } else if (command == "fit") {
        if (auto f = load("fit.json")) {
          entry["fit"] = *f;
          text << "tau_ss " << f->at("tau_ss_ns").dump() << " ns +- " << f->at("tau_ss_error_ns").dump()
               << ", chi2 " << format_fixed(f->at("chi_squared").get<double>(), 3) << " (dof "
               << f->at("dof").get<int>() << ")\n";
        }
      }
      if (!missing.empty()) {
        text << "missing:";
        for (const auto& m : missing) text << ' ' << m.get<std::string>();
        text << '\n';
        for (const auto& m : missing) log(context.warn, "warning: " + name + ": missing " + m.get<std::string>());
      }
      entry["missing"] = missing;
      run_docs.push_back(std::move(entry));
    }
    doc["runs"] = run_docs;
    io::write_file_atomic(dir / "report.txt", text.str());
    io::write_file_atomic(dir / "report.json", doc.dump(2) + "\n");
    std::istringstream lines(text.str());
    for (std::string line; std::getline(lines, line);) log(context.info, line);
  });
}

}  // namespace qdent
