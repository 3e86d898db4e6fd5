#include "qdent/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace qdent::io {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, const std::string& context) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && tok[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw DataCorruption(context + ": cannot parse number '" + tok + "'");
  return v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

Json matrix_part(const Operator4& m, bool imag) {
  Json rows = Json::array();
  for (int i = 0; i < 4; ++i) {
    Json row = Json::array();
    for (int j = 0; j < 4; ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(row);
  }
  return rows;
}

Operator4 matrix_from_parts(const Json& doc, const std::string& context) {
  if (!doc.is_object() || !doc.contains("re") || !doc.contains("im"))
    throw InvalidInput(context + ": explicit matrix needs 're' and 'im' 4x4 arrays");
  Operator4 m;
  for (int part = 0; part < 2; ++part) {
    const Json& rows = doc.at(part == 0 ? "re" : "im");
    if (!rows.is_array() || rows.size() != 4) throw InvalidInput(context + ": matrix parts must be 4x4");
    for (int i = 0; i < 4; ++i) {
      if (!rows[i].is_array() || rows[i].size() != 4) throw InvalidInput(context + ": matrix parts must be 4x4");
      for (int j = 0; j < 4; ++j) {
        if (!rows[i][j].is_number()) throw InvalidInput(context + ": matrix entries must be numbers");
        const double v = rows[i][j].get<double>();
        if (part == 0)
          m(i, j) = Complex(v, 0.0);
        else
          m(i, j) += Complex(0.0, v);
      }
    }
  }
  return m;
}

double number_field(const Json& doc, const std::string& key, const std::string& context) {
  const Json& v = doc.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  throw InvalidInput(context + "." + key + ": expected a number");
}

Json arm_to_json(const ArmSetting& arm) {
  Json j;
  j["hwp_deg"] = arm.hwp.value;
  j["qwp_deg"] = arm.qwp.value;
  j["hwp_retardance"] = arm.retardance.hwp;
  j["qwp_retardance"] = arm.retardance.qwp;
  return j;
}

ArmSetting arm_from_json(const Json& j) {
  ArmSetting arm;
  arm.hwp = Degrees{j.at("hwp_deg").get<double>()};
  arm.qwp = Degrees{j.at("qwp_deg").get<double>()};
  arm.retardance.hwp = j.at("hwp_retardance").get<double>();
  arm.retardance.qwp = j.at("qwp_retardance").get<double>();
  return arm;
}

Json value_with_error(const ValueWithError& v) {
  Json j;
  j["value"] = v.value;
  j["uncertainty"] = v.error;
  return j;
}

Json finite_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? Json("inf") : Json("-inf");
  if (std::isnan(v)) return Json("nan");
  return Json(v);
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string format_significant(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::string write_density_matrix(const Operator4& rho) {
  std::ostringstream os;
  os << "# two-photon density matrix, basis HH HV VH VV (XX photon first)\n";
  for (int part = 0; part < 2; ++part) {
    os << (part == 0 ? "# real\n" : "# imag\n");
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const double v = part == 0 ? rho(i, j).real() : rho(i, j).imag();
        os << (j ? "\t" : "") << format_significant(v, 12);
      }
      os << '\n';
    }
  }
  return os.str();
}

Operator4 read_density_matrix(const std::string& text) {
  Operator4 m = Operator4::Zero();
  int part = -1;
  int row = 0;
  for (const auto& raw : lines_of(text)) {
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line == "# real") {
        part = 0;
        row = 0;
      } else if (line == "# imag") {
        part = 1;
        row = 0;
      }
      continue;
    }
    if (part < 0 || row >= 4) throw DataCorruption("density matrix: unexpected data line '" + line + "'");
    const auto toks = split_ws(line);
    if (toks.size() != 4) throw DataCorruption("density matrix: expected 4 columns, got " + std::to_string(toks.size()));
    for (int j = 0; j < 4; ++j) {
      const double v = parse_number(toks[j], "density matrix");
      if (part == 0)
        m(row, j) = Complex(v, m(row, j).imag());
      else
        m(row, j) = Complex(m(row, j).real(), v);
    }
    ++row;
    if (part == 1 && row == 4) part = 2;
  }
  if (part != 2) throw DataCorruption("density matrix: missing real or imaginary table");
  return m;
}

std::string write_dataset_text(const TomographyDataset& dataset) {
  dataset.validate();
  std::ostringstream os;
  os << "# qdent tomography dataset v1\n";
  os << "# dark_rate_hz=" << format_double(dataset.dark_rate_hz) << '\n';
  os << "# coincidence_window_ns=" << format_double(dataset.coincidence_window_ns) << '\n';
  if (!dataset.records.empty()) {
    const auto& first = dataset.records.front();
    const Retardances r = first.setting.xx.retardance;
    for (const auto& rec : dataset.records) {
      if (!(rec.setting.xx.retardance == r) || !(rec.setting.x.retardance == r))
        throw InvalidInput("text dataset format needs uniform retardances; use the JSON format");
      if (rec.singles_xx_hz != first.singles_xx_hz || rec.singles_x_hz != first.singles_x_hz)
        throw InvalidInput("text dataset format needs uniform singles rates; use the JSON format");
    }
    os << "# hwp_retardance=" << format_double(r.hwp) << '\n';
    os << "# qwp_retardance=" << format_double(r.qwp) << '\n';
    if (first.singles_xx_hz) os << "# singles_xx_hz=" << format_double(*first.singles_xx_hz) << '\n';
    if (first.singles_x_hz) os << "# singles_x_hz=" << format_double(*first.singles_x_hz) << '\n';
  }
  for (const auto& h : dataset.history) os << "# history=" << h << '\n';
  os << "label\thwp_xx\tqwp_xx\thwp_x\tqwp_x\tcounts\tacq_time_s\n";
  for (const auto& rec : dataset.records) {
    os << rec.setting.label << '\t' << format_double(rec.setting.xx.hwp.value) << '\t'
       << format_double(rec.setting.xx.qwp.value) << '\t' << format_double(rec.setting.x.hwp.value) << '\t'
       << format_double(rec.setting.x.qwp.value) << '\t' << format_double(rec.counts) << '\t'
       << format_double(rec.acquisition_time_s) << '\n';
  }
  return os.str();
}

TomographyDataset read_dataset_text(const std::string& text) {
  TomographyDataset ds;
  Retardances r = kIdealRetardances;
  std::optional<double> singles_xx, singles_x;
  bool header_seen = false;
  int line_no = 0;
  for (const auto& raw : lines_of(text)) {
    ++line_no;
    const std::string line = trim(raw);
    const std::string where = "dataset line " + std::to_string(line_no);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 1);
      if (key == "dark_rate_hz") ds.dark_rate_hz = parse_number(value, where);
      else if (key == "coincidence_window_ns") ds.coincidence_window_ns = parse_number(value, where);
      else if (key == "hwp_retardance") r.hwp = parse_number(value, where);
      else if (key == "qwp_retardance") r.qwp = parse_number(value, where);
      else if (key == "singles_xx_hz") singles_xx = parse_number(value, where);
      else if (key == "singles_x_hz") singles_x = parse_number(value, where);
      else if (key == "history") ds.history.push_back(value);
      continue;
    }
    const auto toks = split_ws(line);
    if (!header_seen) {
      const std::vector<std::string> expected{"label", "hwp_xx", "qwp_xx", "hwp_x", "qwp_x", "counts", "acq_time_s"};
      if (toks != expected) throw DataCorruption(where + ": expected column header '" +
                                                 std::string("label hwp_xx qwp_xx hwp_x qwp_x counts acq_time_s'"));
      header_seen = true;
      continue;
    }
    if (toks.size() != 7) throw DataCorruption(where + ": expected 7 columns, got " + std::to_string(toks.size()));
    CoincidenceRecord rec;
    rec.setting.label = toks[0];
    rec.setting.xx.hwp = Degrees{parse_number(toks[1], where)};
    rec.setting.xx.qwp = Degrees{parse_number(toks[2], where)};
    rec.setting.x.hwp = Degrees{parse_number(toks[3], where)};
    rec.setting.x.qwp = Degrees{parse_number(toks[4], where)};
    rec.counts = parse_number(toks[5], where);
    rec.acquisition_time_s = parse_number(toks[6], where);
    ds.records.push_back(std::move(rec));
  }
  if (!header_seen) throw DataCorruption("dataset: missing column header");
  for (auto& rec : ds.records) {
    rec.setting.xx.retardance = r;
    rec.setting.x.retardance = r;
    rec.singles_xx_hz = singles_xx;
    rec.singles_x_hz = singles_x;
  }
  try {
    ds.validate();
  } catch (const InvalidInput& e) {
    throw DataCorruption(std::string("dataset: ") + e.what());
  }
  return ds;
}

Json dataset_to_json(const TomographyDataset& dataset) {
  dataset.validate();
  Json doc;
  doc["format"] = "qdent-dataset";
  doc["version"] = 1;
  doc["dark_rate_hz"] = dataset.dark_rate_hz;
  doc["coincidence_window_ns"] = dataset.coincidence_window_ns;
  doc["history"] = dataset.history;
  Json records = Json::array();
  for (const auto& rec : dataset.records) {
    Json j;
    j["label"] = rec.setting.label;
    j["xx"] = arm_to_json(rec.setting.xx);
    j["x"] = arm_to_json(rec.setting.x);
    j["counts"] = rec.counts;
    j["acq_time_s"] = rec.acquisition_time_s;
    if (rec.singles_xx_hz) j["singles_xx_hz"] = *rec.singles_xx_hz;
    if (rec.singles_x_hz) j["singles_x_hz"] = *rec.singles_x_hz;
    records.push_back(std::move(j));
  }
  doc["records"] = std::move(records);
  return doc;
}

TomographyDataset dataset_from_json(const Json& doc) {
  try {
    if (doc.value("format", "") != "qdent-dataset") throw DataCorruption("dataset: not a qdent-dataset document");
    TomographyDataset ds;
    ds.dark_rate_hz = doc.at("dark_rate_hz").get<double>();
    ds.coincidence_window_ns = doc.at("coincidence_window_ns").get<double>();
    if (doc.contains("history")) ds.history = doc.at("history").get<std::vector<std::string>>();
    for (const auto& j : doc.at("records")) {
      CoincidenceRecord rec;
      rec.setting.label = j.at("label").get<std::string>();
      rec.setting.xx = arm_from_json(j.at("xx"));
      rec.setting.x = arm_from_json(j.at("x"));
      rec.counts = j.at("counts").get<double>();
      rec.acquisition_time_s = j.at("acq_time_s").get<double>();
      if (j.contains("singles_xx_hz")) rec.singles_xx_hz = j.at("singles_xx_hz").get<double>();
      if (j.contains("singles_x_hz")) rec.singles_x_hz = j.at("singles_x_hz").get<double>();
      ds.records.push_back(std::move(rec));
    }
    ds.validate();
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw DataCorruption(std::string("dataset: ") + e.what());
  } catch (const InvalidInput& e) {
    throw DataCorruption(std::string("dataset: ") + e.what());
  }
}

TomographyDataset load_dataset(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".json") {
    Json doc;
    try {
      doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataCorruption("dataset " + path.string() + ": " + e.what());
    }
    return dataset_from_json(doc);
  }
  return read_dataset_text(text);
}

void save_dataset(const TomographyDataset& dataset, const std::filesystem::path& path) {
  if (path.extension() == ".json")
    write_file_atomic(path, dataset_to_json(dataset).dump(2) + "\n");
  else
    write_file_atomic(path, write_dataset_text(dataset));
}

Json params_to_json(const CascadeParams& p) {
  Json doc;
  doc["S_ueV"] = p.fss.value;
  doc["S0_ueV"] = p.fss_floor.value;
  doc["tau1_ps"] = p.tau1.value;
  doc["tau_ss_ns"] = finite_or_string(p.tau_ss.value);
  doc["k"] = p.k;
  doc["omega_deg"] = p.omega.value;
  const Operator4& bg = p.background.matrix();
  if ((bg - unpolarized_background().matrix()).cwiseAbs().maxCoeff() < 1e-15)
    doc["background"] = "unpolarized";
  else if ((bg - vertical_pair_background().matrix()).cwiseAbs().maxCoeff() < 1e-15)
    doc["background"] = "VV";
  else
    doc["background"] = Json{{"re", matrix_part(bg, false)}, {"im", matrix_part(bg, true)}};
  doc["B_max_T"] = p.overhauser.B_max_T;
  doc["N_nuclei"] = p.overhauser.N_nuclei;
  doc["g_e_z"] = p.overhauser.g_e_z;
  doc["g_h_z"] = p.overhauser.g_h_z;
  return doc;
}

CascadeParams params_from_json(const Json& doc, const BackgroundModel* laser_g2) {
  static const std::set<std::string> kKeys{"S_ueV", "S0_ueV", "tau1_ps", "tau_ss_ns", "k",     "omega_deg",
                                           "background", "B_max_T", "N_nuclei", "g_e_z", "g_h_z"};
  if (!doc.is_object()) throw InvalidInput("cascade: expected an object");
  for (const auto& [key, value] : doc.items())
    if (!kKeys.count(key)) throw InvalidInput("cascade: unknown key '" + key + "'");
  CascadeParams p;
  const std::string ctx = "cascade";
  if (doc.contains("S_ueV")) p.fss = MicroEV{number_field(doc, "S_ueV", ctx)};
  if (doc.contains("S0_ueV")) p.fss_floor = MicroEV{number_field(doc, "S0_ueV", ctx)};
  if (doc.contains("tau1_ps")) p.tau1 = Picoseconds{number_field(doc, "tau1_ps", ctx)};
  if (doc.contains("tau_ss_ns")) p.tau_ss = Nanoseconds{number_field(doc, "tau_ss_ns", ctx)};
  if (doc.contains("k")) p.k = number_field(doc, "k", ctx);
  if (doc.contains("omega_deg")) p.omega = Degrees{number_field(doc, "omega_deg", ctx)};
  if (doc.contains("B_max_T")) p.overhauser.B_max_T = number_field(doc, "B_max_T", ctx);
  if (doc.contains("N_nuclei")) p.overhauser.N_nuclei = number_field(doc, "N_nuclei", ctx);
  if (doc.contains("g_e_z")) p.overhauser.g_e_z = number_field(doc, "g_e_z", ctx);
  if (doc.contains("g_h_z")) p.overhauser.g_h_z = number_field(doc, "g_h_z", ctx);
  if (doc.contains("background")) {
    const Json& bg = doc.at("background");
    if (bg.is_string()) {
      const std::string name = bg.get<std::string>();
      if (name == "unpolarized") {
        p.background = unpolarized_background();
      } else if (name == "VV") {
        p.background = vertical_pair_background();
      } else if (name == "laser_vertical") {
        double g2_xx, g2_x;
        if (laser_g2) {
          g2_xx = laser_g2->g2_xx;
          g2_x = laser_g2->g2_x;
        } else {
          g2_xx = g2_x = 1.0 - std::sqrt(std::clamp(p.k, 0.0, 1.0));
        }
        const Operator2 v = single_photon_state({-1.0, 0.0, 0.0});
        p.background = accidental_pair_background(v, v, g2_xx, g2_x);
      } else {
        throw InvalidInput("cascade.background: unknown preset '" + name +
                           "' (expected unpolarized, VV, laser_vertical or an explicit matrix)");
      }
    } else {
      p.background = DensityMatrix::from_operator(matrix_from_parts(bg, "cascade.background"));
    }
  }
  p.validate();
  return p;
}

Json background_model_to_json(const BackgroundModel& model) {
  Json doc;
  doc["g2_xx"] = model.g2_xx;
  doc["g2_x"] = model.g2_x;
  Json per_basis = Json::object();
  for (const auto& [key, value] : model.g2_per_basis) per_basis[key] = value;
  doc["g2_per_basis"] = per_basis;
  return doc;
}

BackgroundModel background_model_from_json(const Json& doc) {
  static const std::set<std::string> kKeys{"g2_xx", "g2_x", "g2_per_basis"};
  if (!doc.is_object()) throw InvalidInput("background model: expected an object");
  for (const auto& [key, value] : doc.items())
    if (!kKeys.count(key)) throw InvalidInput("background model: unknown key '" + key + "'");
  BackgroundModel m;
  if (doc.contains("g2_xx")) m.g2_xx = number_field(doc, "g2_xx", "background model");
  if (doc.contains("g2_x")) m.g2_x = number_field(doc, "g2_x", "background model");
  if (doc.contains("g2_per_basis")) {
    for (const auto& [key, value] : doc.at("g2_per_basis").items()) {
      if (!value.is_number()) throw InvalidInput("background model: g2_per_basis." + key + " must be a number");
      m.g2_per_basis[key] = value.get<double>();
    }
  }
  if (m.g2_xx < 0.0 || m.g2_x < 0.0) throw InvalidInput("background model: g2 values must be >= 0");
  return m;
}

Json metrics_to_json(const EntanglementMetrics& m) {
  Json doc;
  doc["fidelity"] = value_with_error(m.fidelity);
  doc["concurrence"] = value_with_error(m.concurrence);
  doc["largest_eigenvalue"] = value_with_error(m.largest_eigenvalue);
  return doc;
}

Json fit_to_json(const FitResult& fit) {
  Json doc;
  doc["model"] = fit.omega_fitted ? "visibility_estimator_with_phase" : "closed_form";
  doc["tau1_ps"] = fit.tau1.value;
  doc["k"] = fit.k;
  doc["tau_ss_ns"] = finite_or_string(fit.tau_ss.value);
  doc["tau_ss_error_ns"] = finite_or_string(fit.tau_ss_error_ns);
  doc["tau_ss_interval_ns"] = Json::array({finite_or_string(fit.tau_ss_interval_ns.first),
                                           finite_or_string(fit.tau_ss_interval_ns.second)});
  doc["tau_ss_unbounded"] = fit.tau_ss_unbounded;
  doc["rate_per_ns"] = fit.rate_per_ns;
  doc["rate_error_per_ns"] = fit.rate_error;
  if (fit.omega_fitted) {
    doc["omega_deg"] = fit.omega.value;
    doc["omega_error_deg"] = fit.omega_error_deg;
  }
  doc["chi_squared"] = fit.chi_squared;
  doc["dof"] = fit.dof;
  doc["residuals"] = fit.residuals;
  const auto matrix_json = [](const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
      Json row = Json::array();
      for (int j = 0; j < m.cols(); ++j) row.push_back(finite_or_string(m(i, j)));
      rows.push_back(row);
    }
    return rows;
  };
  doc["rate_covariance"] = matrix_json(fit.rate_covariance);
  doc["covariance"] = matrix_json(fit.covariance);
  doc["mc_failures"] = fit.mc_failures;
  return doc;
}

std::vector<FssFidelityPoint> read_points(const std::string& text) {
  std::vector<FssFidelityPoint> points;
  int col_s = -1, col_f = -1, col_sigma = -1;
  std::size_t ncols = 0;
  int line_no = 0;
  for (const auto& raw : lines_of(text)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto toks = split_ws(line);
    if (ncols == 0) {
      ncols = toks.size();
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i] == "S_ueV") col_s = static_cast<int>(i);
        if (toks[i] == "fidelity") col_f = static_cast<int>(i);
        if (toks[i] == "sigma_f") col_sigma = static_cast<int>(i);
      }
      if (col_s < 0) throw InvalidInput("points: missing S_ueV column");
      if (col_f < 0) throw InvalidInput("points: missing fidelity column");
      if (col_sigma < 0) throw InvalidInput("points: missing sigma_f column");
      continue;
    }
    const std::string where = "points line " + std::to_string(line_no);
    if (toks.size() != ncols) throw DataCorruption(where + ": column count mismatch");
    FssFidelityPoint p;
    p.fss = MicroEV{parse_number(toks[col_s], where)};
    p.fidelity = parse_number(toks[col_f], where);
    p.sigma = parse_number(toks[col_sigma], where);
    points.push_back(p);
  }
  if (ncols == 0) throw InvalidInput("points: empty file");
  return points;
}

std::string write_points(std::span<const FssFidelityPoint> points) {
  std::ostringstream os;
  os << "S_ueV\tfidelity\tsigma_f\n";
  for (const auto& p : points)
    os << format_double(p.fss.value) << '\t' << format_double(p.fidelity) << '\t' << format_double(p.sigma) << '\n';
  return os.str();
}

Json parse_json(const std::string& text, const std::string& source_name) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw InvalidInput(source_name + ":" + std::to_string(line) + ":" + std::to_string(column) +
                       ": JSON syntax error: " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw InvalidInput("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

}  // namespace qdent::io
