#include "qdent/qdent.h"

#include <cstring>
#include <functional>
#include <string>

#include "qdent/pipeline.hpp"

struct qdent_params {
  qdent::CascadeParams value;
};

struct qdent_state {
  qdent::DensityMatrix value;
};

struct qdent_dataset {
  qdent::TomographyDataset value;
};

namespace {

thread_local std::string g_last_error;

qdent_status guarded(const std::function<void()>& body) {
  g_last_error.clear();
  try {
    body();
    return QDENT_OK;
  } catch (const qdent::InvalidInput& e) {
    g_last_error = e.what();
    return QDENT_ERROR_INVALID_INPUT;
  } catch (const qdent::DataCorruption& e) {
    g_last_error = e.what();
    return QDENT_ERROR_DATA_CORRUPTION;
  } catch (const qdent::NumericalFailure& e) {
    g_last_error = e.what();
    return QDENT_ERROR_NUMERICAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return QDENT_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return QDENT_ERROR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (!p) throw qdent::InvalidInput(std::string(name) + " is NULL");
}

std::string str(const char* s) { return s ? s : ""; }

qdent::CommandContext to_context(const qdent_command_context* c) {
  qdent::CommandContext ctx;
  if (!c) return ctx;
  ctx.output_dir = str(c->output_dir);
  ctx.jobs = c->jobs > 0 ? c->jobs : 1;
  if (c->log) {
    const qdent_log_fn fn = c->log;
    void* user = c->log_user;
    ctx.info = [fn, user](const std::string& line) { fn(user, 0, line.c_str()); };
    ctx.warn = [fn, user](const std::string& line) { fn(user, 1, line.c_str()); };
  }
  return ctx;
}

// Commands report their own failures through the log; keep the last message
// readable as well.
qdent_status run_command(const qdent_command_context* c, const std::function<int(const qdent::CommandContext&)>& cmd) {
  g_last_error.clear();
  qdent::CommandContext ctx = to_context(c);
  const qdent::LogSink forward = ctx.warn;
  ctx.warn = [forward](const std::string& line) {
    if (line.rfind("error", 0) == 0) g_last_error = line;
    if (forward) forward(line);
  };
  try {
    return static_cast<qdent_status>(cmd(ctx));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return QDENT_ERROR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* qdent_version(void) {
  static const std::string v = qdent::tool_version();
  return v.c_str();
}

const char* qdent_last_error(void) { return g_last_error.c_str(); }

qdent_status qdent_params_create(qdent_params** out) {
  return guarded([&] {
    require(out, "out");
    *out = new qdent_params{};
  });
}

qdent_status qdent_params_from_json(const char* json, qdent_params** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    const auto doc = qdent::io::parse_json(json, "params");
    *out = new qdent_params{qdent::io::params_from_json(doc)};
  });
}

qdent_status qdent_params_from_preset(const char* name, qdent_params** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    qdent::io::Json doc;
    doc["preset"] = name;
    *out = new qdent_params{qdent::resolve_config(doc).cascade};
  });
}

void qdent_params_destroy(qdent_params* params) { delete params; }

qdent_status qdent_params_set_fss(qdent_params* params, double fss_ueV) {
  return guarded([&] {
    require(params, "params");
    qdent::CascadeParams p = params->value;
    p.fss = qdent::MicroEV{fss_ueV};
    p.validate();
    params->value = p;
  });
}

qdent_status qdent_params_set_k(qdent_params* params, double k) {
  return guarded([&] {
    require(params, "params");
    qdent::CascadeParams p = params->value;
    p.k = k;
    p.validate();
    params->value = p;
  });
}

qdent_status qdent_params_set_omega(qdent_params* params, double omega_deg) {
  return guarded([&] {
    require(params, "params");
    qdent::CascadeParams p = params->value;
    p.omega = qdent::Degrees{omega_deg};
    p.validate();
    params->value = p;
  });
}

qdent_status qdent_params_set_tau_ss(qdent_params* params, double tau_ss_ns) {
  return guarded([&] {
    require(params, "params");
    qdent::CascadeParams p = params->value;
    p.tau_ss = qdent::Nanoseconds{tau_ss_ns};
    p.validate();
    params->value = p;
  });
}

qdent_status qdent_model_fidelity(double fss_ueV, double tau1_ps, double tau_ss_ns, double k, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = qdent::model_fidelity(qdent::MicroEV{fss_ueV}, qdent::Picoseconds{tau1_ps}, qdent::Nanoseconds{tau_ss_ns},
                                 k);
  });
}

qdent_status qdent_k_from_g2(double g2_x, double g2_xx, double* out) {
  return guarded([&] {
    require(out, "out");
    if (!(g2_x >= 0.0) || !(g2_xx >= 0.0)) throw qdent::InvalidInput("g2 values must be >= 0");
    *out = qdent::k_from_g2(g2_x, g2_xx);
  });
}

qdent_status qdent_purcell_projected_fidelity(const qdent_params* params, double purcell_factor, double* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = qdent::purcell_projected_fidelity(params->value, purcell_factor);
  });
}

qdent_status qdent_state_from_arrays(const double re[16], const double im[16], qdent_state** out) {
  return guarded([&] {
    require(re, "re");
    require(out, "out");
    qdent::Operator4 m;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = qdent::Complex(re[4 * i + j], im ? im[4 * i + j] : 0.0);
    *out = new qdent_state{qdent::DensityMatrix::from_operator(m)};
  });
}

qdent_status qdent_state_from_params(const qdent_params* params, qdent_state** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = new qdent_state{qdent::time_averaged_state(params->value)};
  });
}

void qdent_state_destroy(qdent_state* state) { delete state; }

qdent_status qdent_state_get(const qdent_state* state, double re[16], double im[16]) {
  return guarded([&] {
    require(state, "state");
    require(re, "re");
    require(im, "im");
    const auto& m = state->value.matrix();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        re[4 * i + j] = m(i, j).real();
        im[4 * i + j] = m(i, j).imag();
      }
  });
}

qdent_status qdent_state_metrics(const qdent_state* state, qdent_metrics* out) {
  return guarded([&] {
    require(state, "state");
    require(out, "out");
    const auto m = qdent::compute_metrics(state->value);
    out->fidelity = m.fidelity.value;
    out->concurrence = m.concurrence.value;
    out->largest_eigenvalue = m.largest_eigenvalue.value;
    out->optimal_phase_fidelity = qdent::optimal_phase_fidelity(state->value);
  });
}

qdent_status qdent_fidelity_to_bell(const qdent_state* state, double omega_deg, double* out) {
  return guarded([&] {
    require(state, "state");
    require(out, "out");
    *out = qdent::fidelity_to_bell(state->value, qdent::Degrees{omega_deg});
  });
}

qdent_status qdent_dataset_simulate(const qdent_state* state, const char* settings, double pairs_per_setting,
                                    double hwp_retardance, double qwp_retardance, uint64_t seed,
                                    qdent_dataset** out) {
  return guarded([&] {
    require(state, "state");
    require(out, "out");
    const auto kind = qdent::parse_setting_kind(settings ? settings : "full36");
    if (!(hwp_retardance > 0.0 && qwp_retardance > 0.0)) throw qdent::InvalidInput("retardances must be > 0");
    if (!(pairs_per_setting > 0.0)) throw qdent::InvalidInput("pairs_per_setting must be > 0");
    const auto list = qdent::standard_settings(kind, {hwp_retardance, qwp_retardance});
    qdent::SamplingOptions opt;
    opt.pairs_per_setting = pairs_per_setting;
    opt.seed = seed;
    *out = new qdent_dataset{qdent::sample_dataset(state->value, list, opt)};
  });
}

qdent_status qdent_dataset_load(const char* path, qdent_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new qdent_dataset{qdent::io::load_dataset(path)};
  });
}

qdent_status qdent_dataset_save(const qdent_dataset* dataset, const char* path) {
  return guarded([&] {
    require(dataset, "dataset");
    require(path, "path");
    qdent::io::save_dataset(dataset->value, path);
  });
}

void qdent_dataset_destroy(qdent_dataset* dataset) { delete dataset; }

qdent_status qdent_dataset_size(const qdent_dataset* dataset, size_t* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = dataset->value.records.size();
  });
}

void qdent_reconstruct_params_init(qdent_reconstruct_params* params) {
  if (!params) return;
  params->ideal_projectors = 0;
  params->multistart = 4;
  params->seed = 0;
}

qdent_status qdent_reconstruct(const qdent_dataset* dataset, const qdent_reconstruct_params* params,
                               qdent_state** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    qdent::ReconstructionOptions opt;
    if (params) {
      if (params->multistart < 1) throw qdent::InvalidInput("multistart must be >= 1");
      opt.multistart = params->multistart;
      opt.seed = params->seed;
      if (params->ideal_projectors) opt.assumed_retardances = qdent::kIdealRetardances;
    }
    *out = new qdent_state{qdent::mle_reconstruct(dataset->value, opt).rho};
  });
}

void qdent_command_context_init(qdent_command_context* context) {
  if (!context) return;
  context->output_dir = nullptr;
  context->jobs = 1;
  context->log = nullptr;
  context->log_user = nullptr;
}

void qdent_simulate_options_init(qdent_simulate_options* options) {
  if (!options) return;
  std::memset(options, 0, sizeof(*options));
}

void qdent_reconstruct_options_init(qdent_reconstruct_options* options) {
  if (!options) return;
  std::memset(options, 0, sizeof(*options));
  options->mc_trials = -1;
}

void qdent_fit_options_init(qdent_fit_options* options) {
  if (!options) return;
  std::memset(options, 0, sizeof(*options));
  options->fit_omega = -1;
  options->mc_trials = -1;
}

void qdent_correct_options_init(qdent_correct_options* options) {
  if (!options) return;
  std::memset(options, 0, sizeof(*options));
  options->mc_trials = -1;
}

qdent_status qdent_cmd_simulate(const qdent_simulate_options* options, const qdent_command_context* context) {
  if (!options) return guarded([] { throw qdent::InvalidInput("options is NULL"); });
  qdent::SimulateOptions o;
  o.config_path = str(options->config_path);
  if (options->has_seed) o.seed = options->seed;
  return run_command(context, [&](const qdent::CommandContext& ctx) { return qdent::cmd_simulate(o, ctx); });
}

qdent_status qdent_cmd_reconstruct(const qdent_reconstruct_options* options, const qdent_command_context* context) {
  if (!options) return guarded([] { throw qdent::InvalidInput("options is NULL"); });
  qdent::ReconstructOptions o;
  o.dataset_path = str(options->dataset_path);
  o.config_path = str(options->config_path);
  o.background_path = str(options->background_path);
  if (options->has_seed) o.seed = options->seed;
  if (options->mc_trials >= 0) o.mc_trials = options->mc_trials;
  o.ideal_projectors = options->ideal_projectors != 0;
  o.with_corrections = options->with_corrections != 0;
  return run_command(context, [&](const qdent::CommandContext& ctx) { return qdent::cmd_reconstruct(o, ctx); });
}

qdent_status qdent_cmd_fit(const qdent_fit_options* options, const qdent_command_context* context) {
  if (!options) return guarded([] { throw qdent::InvalidInput("options is NULL"); });
  qdent::FitCommandOptions o;
  o.points_path = str(options->points_path);
  o.config_path = str(options->config_path);
  if (options->has_seed) o.seed = options->seed;
  if (options->has_tau1) o.tau1_ps = options->tau1_ps;
  if (options->has_k) o.k = options->k;
  if (options->fit_omega >= 0) o.fit_omega = options->fit_omega != 0;
  if (options->mc_trials >= 0) o.mc_trials = options->mc_trials;
  return run_command(context, [&](const qdent::CommandContext& ctx) { return qdent::cmd_fit(o, ctx); });
}

qdent_status qdent_cmd_correct(const qdent_correct_options* options, const qdent_command_context* context) {
  if (!options) return guarded([] { throw qdent::InvalidInput("options is NULL"); });
  qdent::CorrectOptions o;
  o.dataset_path = str(options->dataset_path);
  o.config_path = str(options->config_path);
  o.background_path = str(options->background_path);
  if (options->has_seed) o.seed = options->seed;
  if (options->mc_trials >= 0) o.mc_trials = options->mc_trials;
  return run_command(context, [&](const qdent::CommandContext& ctx) { return qdent::cmd_correct(o, ctx); });
}

qdent_status qdent_cmd_report(const char* run_dir, const qdent_command_context* context) {
  qdent::ReportOptions o;
  o.run_dir = str(run_dir);
  return run_command(context, [&](const qdent::CommandContext& ctx) { return qdent::cmd_report(o, ctx); });
}

}  // extern "C"
