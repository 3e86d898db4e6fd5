// qdent command-line front end. Talks to the library only through qdent.h.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "qdent/qdent.h"

namespace {

void print_line(void*, int is_warning, const char* line) {
  std::FILE* stream = is_warning ? stderr : stdout;
  std::fputs(line, stream);
  std::fputc('\n', stream);
}

const char* c_str_or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement analysis for quantum-dot photon pairs"};
  app.set_version_flag("--version", std::string(qdent_version()));
  app.require_subcommand(1);

  std::string output_dir;
  int jobs = 1;
  app.add_option("-o,--output", output_dir, "Output directory (default: config, then $QDENT_OUTPUT_DIR)");
  app.add_option("-j,--jobs", jobs, "Worker threads for Monte-Carlo loops")->check(CLI::PositiveNumber);

  std::string config, dataset, background, points, run_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> mc_trials;
  std::optional<double> tau1, k;
  bool ideal = false, corrections = false, fit_omega = false, no_fit_omega = false;

  auto* sim = app.add_subcommand("simulate", "Simulate a tomography dataset from a config");
  sim->add_option("config", config, "Config file (JSON)")->required();
  sim->add_option("--seed", seed, "Override the config seed");

  auto* rec = app.add_subcommand("reconstruct", "Maximum-likelihood reconstruction and metrics");
  rec->add_option("dataset", dataset, "Dataset file (.tsv or .json)")->required();
  rec->add_option("-c,--config", config, "Config file");
  rec->add_option("--background", background, "Background-model file (JSON)");
  rec->add_option("--seed", seed, "Seed for multistart and Monte-Carlo resampling");
  rec->add_option("--mc-trials", mc_trials, "Monte-Carlo trials for uncertainties")->check(CLI::NonNegativeNumber);
  rec->add_flag("--ideal-projectors", ideal, "Ignore the dataset's waveplate retardances");
  rec->add_flag("--corrections", corrections, "Append the correction-chain deltas");

  auto* fit = app.add_subcommand("fit", "Fit fidelity versus fine-structure splitting");
  fit->add_option("points", points, "Table with columns S_ueV fidelity sigma_f")->required();
  fit->add_option("-c,--config", config, "Config file");
  fit->add_option("--tau1", tau1, "Exciton lifetime in ps");
  fit->add_option("--k", k, "Dot-light fraction");
  fit->add_flag("--fit-omega", fit_omega, "Also fit the setup phase rotation");
  fit->add_flag("--no-fit-omega", no_fit_omega, "Fit the spin-scattering time only");
  fit->add_option("--seed", seed, "Seed for Monte-Carlo parameter errors");
  fit->add_option("--mc-trials", mc_trials, "Monte-Carlo refits")->check(CLI::NonNegativeNumber);

  auto* cor = app.add_subcommand("correct", "Run the dark, retardance and background correction chain");
  cor->add_option("dataset", dataset, "Dataset file")->required();
  cor->add_option("-c,--config", config, "Config file");
  cor->add_option("--background", background, "Background-model file (JSON)");
  cor->add_option("--seed", seed, "Reconstruction seed");
  cor->add_option("--mc-trials", mc_trials, "Monte-Carlo trials per stage")->check(CLI::NonNegativeNumber);

  auto* rep = app.add_subcommand("report", "Summarize the runs in a directory");
  rep->add_option("run_dir", run_dir, "Run directory (default: output directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : QDENT_ERROR_INVALID_INPUT;
  }

  qdent_command_context ctx;
  qdent_command_context_init(&ctx);
  ctx.output_dir = c_str_or_null(output_dir);
  ctx.jobs = jobs;
  ctx.log = print_line;

  qdent_status status = QDENT_OK;
  if (*sim) {
    qdent_simulate_options o;
    qdent_simulate_options_init(&o);
    o.config_path = config.c_str();
    o.has_seed = seed.has_value();
    o.seed = seed.value_or(0);
    status = qdent_cmd_simulate(&o, &ctx);
  } else if (*rec) {
    qdent_reconstruct_options o;
    qdent_reconstruct_options_init(&o);
    o.dataset_path = dataset.c_str();
    o.config_path = c_str_or_null(config);
    o.background_path = c_str_or_null(background);
    o.has_seed = seed.has_value();
    o.seed = seed.value_or(0);
    o.mc_trials = mc_trials.value_or(-1);
    o.ideal_projectors = ideal;
    o.with_corrections = corrections;
    status = qdent_cmd_reconstruct(&o, &ctx);
  } else if (*fit) {
    qdent_fit_options o;
    qdent_fit_options_init(&o);
    o.points_path = points.c_str();
    o.config_path = c_str_or_null(config);
    o.has_seed = seed.has_value();
    o.seed = seed.value_or(0);
    o.has_tau1 = tau1.has_value();
    o.tau1_ps = tau1.value_or(0.0);
    o.has_k = k.has_value();
    o.k = k.value_or(1.0);
    if (fit_omega && no_fit_omega) {
      std::fputs("error: --fit-omega and --no-fit-omega are exclusive\n", stderr);
      return QDENT_ERROR_INVALID_INPUT;
    }
    o.fit_omega = fit_omega ? 1 : (no_fit_omega ? 0 : -1);
    o.mc_trials = mc_trials.value_or(-1);
    status = qdent_cmd_fit(&o, &ctx);
  } else if (*cor) {
    qdent_correct_options o;
    qdent_correct_options_init(&o);
    o.dataset_path = dataset.c_str();
    o.config_path = c_str_or_null(config);
    o.background_path = c_str_or_null(background);
    o.has_seed = seed.has_value();
    o.seed = seed.value_or(0);
    o.mc_trials = mc_trials.value_or(-1);
    status = qdent_cmd_correct(&o, &ctx);
  } else if (*rep) {
    status = qdent_cmd_report(c_str_or_null(run_dir), &ctx);
  }
  return static_cast<int>(status);
}
