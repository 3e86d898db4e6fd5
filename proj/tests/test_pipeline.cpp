#include <doctest.h>

#include <filesystem>

#include <unistd.h>

#include "qdent/pipeline.hpp"

using namespace qdent;
namespace fs = std::filesystem;
using io::Json;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qdent_test_pipeline_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Captured {
  std::vector<std::string> info, warn;
  CommandContext context(const fs::path& out) {
    CommandContext c;
    c.output_dir = out.string();
    c.info = [this](const std::string& l) { info.push_back(l); };
    c.warn = [this](const std::string& l) { warn.push_back(l); };
    return c;
  }
  bool warned(const std::string& needle) const {
    for (const auto& w : warn)
      if (w.find(needle) != std::string::npos) return true;
    return false;
  }
};

fs::path write_config(const fs::path& dir, const Json& doc) {
  const fs::path p = dir / "config.in.json";
  io::write_file_atomic(p, doc.dump(2));
  return p;
}

Json quick(const std::string& preset) {
  return Json{{"preset", preset}, {"tomography", {{"mc_trials", 5}}}};
}

double json_number(const fs::path& file, const std::vector<std::string>& path) {
  Json doc = Json::parse(io::read_file(file));
  const Json* at = &doc;
  for (const auto& p : path) at = &at->at(p);
  return at->get<double>();
}

}  // namespace

TEST_CASE("presets resolve to the documented parameters") {
  const PipelineConfig qd1 = resolve_config(Json{{"preset", "qd1"}});
  CHECK(qd1.cascade.tau1.value == 241.0);
  CHECK(qd1.cascade.tau_ss.value == 11.0);
  CHECK(qd1.cascade.fss_floor.value == 0.25);
  CHECK(qd1.background_model.g2_xx == 0.014);
  CHECK(qd1.background_model.g2_x == 0.008);
  CHECK(qd1.cascade.k == doctest::Approx(0.97811).epsilon(1e-5));
  CHECK(qd1.tomography.settings == SettingKind::Full36);
  CHECK(qd1.tomography.retardances == kMeasuredRetardances);
  CHECK(qd1.document.at("cascade").at("k").get<double>() == qd1.cascade.k);

  const PipelineConfig qd2 = resolve_config(Json{{"preset", "qd2"}});
  CHECK(qd2.cascade.tau1.value == 290.0);
  CHECK(qd2.cascade.tau_ss.value == 14.0);
  CHECK(qd2.cascade.k == doctest::Approx((1 - 0.015) * (1 - 0.021)));
  CHECK((qd2.cascade.background.matrix() - qd2.background_model.bg_state().matrix()).norm() < 1e-15);

  CHECK(preset_names() == std::vector<std::string>{"qd1", "qd2"});
  CHECK_THROWS_AS(preset_document("qd3"), InvalidInput);
}

TEST_CASE("config overrides merge over the preset") {
  const PipelineConfig cfg = resolve_config(
      Json{{"preset", "qd1"}, {"cascade", {{"S_ueV", 2.0}, {"k", 0.9}}}, {"seed", 17}, {"fit", {{"fit_omega", true}}}});
  CHECK(cfg.cascade.fss.value == 2.0);
  CHECK(cfg.cascade.k == 0.9);
  CHECK(cfg.cascade.tau1.value == 241.0);
  CHECK(cfg.seed == 17);
  CHECK(cfg.fit.fit_omega);
  CHECK(cfg.fit.mc_trials == 200);

  // Resolving the resolved document is a fixed point.
  const PipelineConfig again = resolve_config(cfg.document);
  CHECK(again.document.dump() == cfg.document.dump());

  const PipelineConfig bare = resolve_config(Json::object());
  CHECK(bare.cascade.k == 1.0);
  CHECK(bare.tomography.retardances == kIdealRetardances);
}

TEST_CASE("config errors name the offending field") {
  const auto message = [](const Json& doc) {
    try {
      resolve_config(doc);
    } catch (const InvalidInput& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(Json{{"preset", "qd1"}, {"tomography", {{"bogus", 1}}}}).find("tomography.bogus") !=
        std::string::npos);
  CHECK(message(Json{{"colour", 1}}).find("colour") != std::string::npos);
  CHECK(message(Json{{"cascade", {{"tau3", 1}}}}).find("tau3") != std::string::npos);
  CHECK(message(Json{{"tomography", {{"mc_trials", "many"}}}}).find("tomography.mc_trials") != std::string::npos);
  CHECK(message(Json{{"tomography", {{"settings", "full99"}}}}) != "no error");
  CHECK(message(Json{{"seed", -3}}).find("seed") != std::string::npos);
  CHECK(message(Json{{"dark_counts", {{"dark_rate_hz", -1}}}}).find("dark_counts") != std::string::npos);
  CHECK(message(Json{{"preset", "qd9"}}).find("qd9") != std::string::npos);
}

TEST_CASE("simulate writes a deterministic 36-record dataset and manifest") {
  const fs::path dir = fresh_dir("simulate");
  const fs::path cfg = write_config(dir, quick("qd1"));
  Captured log;
  SimulateOptions opts;
  opts.config_path = cfg.string();
  REQUIRE(cmd_simulate(opts, log.context(dir / "a")) == 0);
  REQUIRE(cmd_simulate(opts, log.context(dir / "b")) == 0);

  for (const char* f : {"dataset.tsv", "background_model.json", "rho_true.txt", "truth.json", "config.json"})
    CHECK(io::read_file(dir / "a" / f) == io::read_file(dir / "b" / f));
  const TomographyDataset d = io::load_dataset(dir / "a" / "dataset.tsv");
  CHECK(d.records.size() == 36);
  CHECK(d.records[0].setting.xx.retardance == kMeasuredRetardances);

  const Json manifest = Json::parse(io::read_file(dir / "a" / "manifest.json"));
  CHECK(manifest.at("command") == "simulate");
  CHECK(manifest.at("seed") == 1);
  CHECK(manifest.at("version") == tool_version());
  CHECK(manifest.at("config_sha256") == io::sha256_hex(manifest.at("config").dump()));
  CHECK(manifest.at("outputs").size() == 5);
  for (const auto& o : manifest.at("outputs"))
    CHECK(o.at("sha256") == io::sha256_hex(io::read_file(dir / "a" / o.at("file").get<std::string>())));

  // The recorded config reproduces the run on its own.
  const fs::path replay = dir / "replay.json";
  io::write_file_atomic(replay, manifest.at("config").dump());
  opts.config_path = replay.string();
  REQUIRE(cmd_simulate(opts, log.context(dir / "c")) == 0);
  CHECK(io::read_file(dir / "c" / "dataset.tsv") == io::read_file(dir / "a" / "dataset.tsv"));

  opts.seed = 2;
  opts.config_path = cfg.string();
  REQUIRE(cmd_simulate(opts, log.context(dir / "d")) == 0);
  CHECK(io::read_file(dir / "d" / "dataset.tsv") != io::read_file(dir / "a" / "dataset.tsv"));
}

TEST_CASE("simulate rejects bad configs with exit code 2") {
  const fs::path dir = fresh_dir("simulate_bad");
  Captured log;
  SimulateOptions opts;
  opts.config_path = write_config(dir, Json{{"preset", "qd1"}, {"tomography", {{"bogus", 1}}}}).string();
  CHECK(cmd_simulate(opts, log.context(dir / "out")) == 2);
  CHECK(log.warned("tomography.bogus"));

  io::write_file_atomic(dir / "broken.json", "{\n  \"preset\": \"qd1\",\n}");
  opts.config_path = (dir / "broken.json").string();
  CHECK(cmd_simulate(opts, log.context(dir / "out")) == 2);
  CHECK(log.warned("broken.json:3:"));

  opts.config_path = (dir / "absent.json").string();
  CHECK(cmd_simulate(opts, log.context(dir / "out")) == 2);
  CHECK(!fs::exists(dir / "out" / "manifest.json"));
}

TEST_CASE("reconstruct round trip on the QD1 preset") {
  const fs::path dir = fresh_dir("reconstruct");
  const fs::path cfg = write_config(dir, quick("qd1"));
  Captured log;
  SimulateOptions sim;
  sim.config_path = cfg.string();
  REQUIRE(cmd_simulate(sim, log.context(dir / "sim")) == 0);

  ReconstructOptions rec;
  rec.dataset_path = (dir / "sim" / "dataset.tsv").string();
  rec.config_path = cfg.string();
  REQUIRE(cmd_reconstruct(rec, log.context(dir / "rec")) == 0);
  const double truth = json_number(dir / "sim" / "truth.json", {"fidelity"});
  const double f = json_number(dir / "rec" / "metrics.json", {"fidelity", "value"});
  const double err = json_number(dir / "rec" / "metrics.json", {"fidelity", "uncertainty"});
  CHECK(std::abs(f - truth) < 0.005);
  CHECK(err > 0.0);
  CHECK(std::abs(json_number(dir / "sim" / "truth.json", {"model_fidelity"}) - truth) < 0.02);
  const Operator4 rho = io::read_density_matrix(io::read_file(dir / "rec" / "rho.txt"));
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-9);

  REQUIRE(cmd_reconstruct(rec, log.context(dir / "rec2")) == 0);
  CHECK(io::read_file(dir / "rec" / "metrics.json") == io::read_file(dir / "rec2" / "metrics.json"));
}

TEST_CASE("reconstruct of a Bell-state dataset reports unit fidelity") {
  const fs::path dir = fresh_dir("bell");
  const Json doc{{"cascade", {{"tau_ss_ns", "inf"}, {"k", 1.0}, {"S0_ueV", 0.0}}},
                 {"tomography", {{"mc_trials", 0}, {"pairs_per_setting", 1e6}}}};
  const fs::path cfg = write_config(dir, doc);
  Captured log;
  SimulateOptions sim;
  sim.config_path = cfg.string();
  REQUIRE(cmd_simulate(sim, log.context(dir / "sim")) == 0);
  ReconstructOptions rec;
  rec.dataset_path = (dir / "sim" / "dataset.tsv").string();
  rec.config_path = cfg.string();
  REQUIRE(cmd_reconstruct(rec, log.context(dir / "rec")) == 0);
  CHECK(json_number(dir / "rec" / "metrics.json", {"fidelity", "value"}) > 0.998);
}

TEST_CASE("reconstruct error contract") {
  const fs::path dir = fresh_dir("reconstruct_errors");
  Captured log;
  ReconstructOptions rec;
  rec.dataset_path = (dir / "corrupt.tsv").string();
  io::write_file_atomic(rec.dataset_path, "# qdent tomography dataset v1\nlabel hwp_xx\nHH 0\n");
  CHECK(cmd_reconstruct(rec, log.context(dir / "out")) == 3);

  rec.dataset_path = (dir / "nothing.tsv").string();
  CHECK(cmd_reconstruct(rec, log.context(dir / "out")) == 2);

  // An incomplete set of settings fails and names what is missing.
  TomographyDataset partial;
  for (const auto& s : standard_settings(SettingKind::Reduced6)) partial.records.push_back({s, 100.0, 1.0, {}, {}});
  rec.dataset_path = (dir / "partial.tsv").string();
  io::save_dataset(partial, rec.dataset_path);
  rec.mc_trials = 0;
  log.warn.clear();
  CHECK(cmd_reconstruct(rec, log.context(dir / "out")) == 2);
  CHECK(log.warned("VV"));
  CHECK(log.warned("DR"));
}

TEST_CASE("correct runs the four-stage ladder on the QD2 preset") {
  const fs::path dir = fresh_dir("correct");
  const fs::path cfg = write_config(dir, quick("qd2"));
  Captured log;
  SimulateOptions sim;
  sim.config_path = cfg.string();
  REQUIRE(cmd_simulate(sim, log.context(dir / "sim")) == 0);

  CorrectOptions opts;
  opts.dataset_path = (dir / "sim" / "dataset.tsv").string();  // background model found next to it
  REQUIRE(cmd_correct(opts, log.context(dir / "corr")) == 0);
  const Json doc = Json::parse(io::read_file(dir / "corr" / "correction.json"));
  const Json& stages = doc.at("stages");
  REQUIRE(stages.size() == 4);
  const std::vector<std::string> names{"raw", "dark_subtracted", "retardance_aware", "background_corrected"};
  for (int i = 0; i < 4; ++i) CHECK(stages[i].at("stage") == names[i]);
  const double increase = stages[3].at("delta_fidelity").get<double>();
  CHECK(increase > 0.020);
  CHECK(increase < 0.035);
  for (const auto& n : names) CHECK(fs::exists(dir / "corr" / ("rho_" + n + ".txt")));
  CHECK(io::read_file(dir / "corr" / "correction.txt").find("background_corrected") != std::string::npos);

  opts.background_path = (dir / "missing_bg.json").string();
  CHECK(cmd_correct(opts, log.context(dir / "corr2")) == 2);
}

TEST_CASE("fit command") {
  const fs::path dir = fresh_dir("fit");
  std::vector<FssFidelityPoint> pts;
  for (int i = 0; i <= 10; ++i) {
    const MicroEV s{0.6 * i};
    pts.push_back({s,
                   model_curve(s, Picoseconds{241}, Nanoseconds{11}, 0.978, Degrees{0},
                               FidelityEstimator::DensityMatrix),
                   0.01});
  }
  const fs::path points = dir / "points.tsv";
  io::write_file_atomic(points, io::write_points(pts));
  Captured log;
  FitCommandOptions opts;
  opts.points_path = points.string();
  opts.tau1_ps = 241;
  opts.k = 0.978;
  opts.mc_trials = 20;
  REQUIRE(cmd_fit(opts, log.context(dir / "a")) == 0);
  const Json fit = Json::parse(io::read_file(dir / "a" / "fit.json"));
  CHECK(fit.at("tau_ss_ns").get<double>() == doctest::Approx(11.0).epsilon(0.01));
  CHECK(!fit.contains("omega_deg"));
  CHECK(fit.at("dephasing_free").at("z_scores").size() == pts.size());
  const std::string curve = io::read_file(dir / "a" / "curve.tsv");
  CHECK(curve.rfind("S_ueV\tf_model\n", 0) == 0);
  CHECK(std::count(curve.begin(), curve.end(), '\n') == 202);

  opts.fit_omega = true;
  REQUIRE(cmd_fit(opts, log.context(dir / "b")) == 0);
  const Json fit2 = Json::parse(io::read_file(dir / "b" / "fit.json"));
  CHECK(fit2.contains("omega_deg"));
  CHECK(std::abs(fit2.at("omega_deg").get<double>()) < 0.5);

  io::write_file_atomic(dir / "nosigma.tsv", "S_ueV fidelity\n0 0.9\n1 0.8\n3 0.6\n");
  opts.points_path = (dir / "nosigma.tsv").string();
  CHECK(cmd_fit(opts, log.context(dir / "c")) == 2);
  CHECK(log.warned("sigma_f"));
}

TEST_CASE("report") {
  const fs::path dir = fresh_dir("report");
  Captured log;
  ReportOptions opts;
  opts.run_dir = (dir / "empty").string();
  fs::create_directories(opts.run_dir);
  REQUIRE(cmd_report(opts, log.context("")) == 0);
  CHECK(io::read_file(dir / "empty" / "report.txt").find("0 run(s)") != std::string::npos);

  opts.run_dir = (dir / "nowhere").string();
  CHECK(cmd_report(opts, log.context("")) == 2);

  // Two pipelines with the same seed produce identical summaries.
  const fs::path cfg = write_config(dir, quick("qd2"));
  for (const char* run : {"one", "two"}) {
    const fs::path root = dir / run;
    SimulateOptions sim;
    sim.config_path = cfg.string();
    REQUIRE(cmd_simulate(sim, log.context(root / "sim")) == 0);
    ReconstructOptions rec;
    rec.dataset_path = (root / "sim" / "dataset.tsv").string();
    rec.config_path = cfg.string();
    rec.with_corrections = true;
    REQUIRE(cmd_reconstruct(rec, log.context(root / "rec")) == 0);
    opts.run_dir = root.string();
    REQUIRE(cmd_report(opts, log.context("")) == 0);
  }
  const std::string one = io::read_file(dir / "one" / "report.txt");
  CHECK(one == io::read_file(dir / "two" / "report.txt"));
  CHECK(io::read_file(dir / "one" / "report.json") == io::read_file(dir / "two" / "report.json"));
  CHECK(one.find("2 run(s)") != std::string::npos);
  CHECK(one.find("retardance_aware") != std::string::npos);

  // Missing artifacts are listed; the rest of the report is still written.
  fs::remove(dir / "one" / "rec" / "rho.txt");
  log.warn.clear();
  opts.run_dir = (dir / "one").string();
  REQUIRE(cmd_report(opts, log.context("")) == 0);
  CHECK(io::read_file(dir / "one" / "report.txt").find("missing: rho.txt") != std::string::npos);
  CHECK(log.warned("rho.txt"));
}

TEST_CASE("run_guarded maps exceptions to exit codes") {
  Captured log;
  const CommandContext c = log.context("");
  CHECK(run_guarded(c, [] {}) == 0);
  CHECK(run_guarded(c, [] { throw InvalidInput("x"); }) == 2);
  CHECK(run_guarded(c, [] { throw DataCorruption("x"); }) == 3);
  CHECK(run_guarded(c, [] { throw NumericalFailure("x"); }) == 4);
  CHECK(run_guarded(c, [] { throw std::runtime_error("x"); }) == 1);
}
