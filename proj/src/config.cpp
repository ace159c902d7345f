#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mpb/errors.hpp"
#include "mpb/harness.hpp"

namespace mpb::harness {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
T get_field(const json& obj, const std::string& key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

signal::InterfererKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "bpsk") return signal::InterfererKind::BpskWhite;
  if (s == "tone") return signal::InterfererKind::Tone;
  if (s == "periodical_noise") return signal::InterfererKind::PeriodicalNoise;
  if (s == "mai") return signal::InterfererKind::MaiMultipath;
  throw ConfigError(where + ".kind: unknown interferer kind '" + s + "'");
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

InterfererConfig parse_interferer(const json& j, const std::string& where) {
  reject_unknown(j, {"kind", "doa_deg", "power_db", "offset_hz", "code_index", "path_delays", "path_doas_deg",
                     "path_gains"},
                 where);
  InterfererConfig c;
  if (!j.contains("kind")) throw ConfigError(where + ".kind: missing");
  c.kind = parse_kind(get_field<std::string>(j, "kind", where, ""), where);
  c.doa_deg = get_field(j, "doa_deg", where, 0.0);
  c.power_db = get_field(j, "power_db", where, 0.0);
  c.offset_hz = get_field(j, "offset_hz", where, 0.0);
  c.code_index = get_field(j, "code_index", where, 1);
  c.path_delays = get_field(j, "path_delays", where, std::vector<int>{});
  c.path_doas_deg = get_field(j, "path_doas_deg", where, std::vector<double>{});
  c.path_gains = get_field(j, "path_gains", where, std::vector<double>{});
  return c;
}

SchemeConfig parse_scheme(const json& j) {
  const std::string where = "scheme";
  reject_unknown(j, {"type", "position", "f_mf", "basis_file"}, where);
  SchemeConfig s;
  const auto type = get_field<std::string>(j, "type", where, "maximin");
  if (type == "papc") {
    s.kind = beamformer::Scheme::Papc;
  } else if (type == "maximin") {
    s.kind = beamformer::Scheme::Maximin;
  } else if (type == "custom") {
    s.kind = beamformer::Scheme::Custom;
  } else {
    throw ConfigError("scheme.type: unknown scheme '" + type + "'");
  }
  s.position = get_field(j, "position", where, 0);
  s.f_mf = get_field(j, "f_mf", where, 16.0 / 31.0);
  s.basis_file = get_field<std::string>(j, "basis_file", where, "");
  return s;
}

json to_json(const InterfererConfig& c) {
  json j;
  j["kind"] = signal::kind_name(c.kind);
  j["power_db"] = c.power_db;
  if (c.kind == signal::InterfererKind::MaiMultipath) {
    j["code_index"] = c.code_index;
    j["path_delays"] = c.path_delays;
    j["path_doas_deg"] = c.path_doas_deg;
    if (!c.path_gains.empty()) j["path_gains"] = c.path_gains;
  } else {
    j["doa_deg"] = c.doa_deg;
  }
  if (c.kind == signal::InterfererKind::Tone) j["offset_hz"] = c.offset_hz;
  return j;
}

ExperimentConfig base_preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  for (double s = -30.0; s <= 50.0 + 1e-9; s += 2.0) c.snr_grid_db.push_back(s);
  c.out_dir = "out/" + name;
  return c;
}

InterfererConfig simple(signal::InterfererKind kind, double doa, double offset_hz = 0.0) {
  InterfererConfig c;
  c.kind = kind;
  c.doa_deg = doa;
  c.offset_hz = offset_hz;
  return c;
}

}  // namespace

void validate(const ExperimentConfig& c) {
  if (c.elements < 2) throw ConfigError("array.elements must be >= 2");
  if (!(c.spacing > 0)) throw ConfigError("array.spacing must be > 0");
  if (c.processing_gain != signal::kGoldLength) throw ConfigError("soi.processing_gain must be 31 (Gold family)");
  if (c.code_index < 0 || c.code_index >= signal::kGoldFamilySize) throw ConfigError("soi.code_index out of range");
  if (c.delay < 0 || c.delay >= c.processing_gain) throw ConfigError("soi.delay must be in [0, N)");
  if (!(std::abs(c.soi_doa_deg) < 90.0)) throw ConfigError("soi.doa_deg must lie in (-90, 90)");
  if (!(c.chip_rate_hz > 0)) throw ConfigError("chip_rate_hz must be > 0");
  if (!(c.noise_var > 0)) throw ConfigError("noise_var must be > 0");
  if (c.snr_grid_db.empty()) throw ConfigError("snr_grid_db must not be empty");
  for (std::size_t i = 1; i < c.snr_grid_db.size(); ++i) {
    if (!(c.snr_grid_db[i] > c.snr_grid_db[i - 1])) throw ConfigError("snr_grid_db must be strictly ascending");
  }
  if (!std::isfinite(c.inr_db)) throw ConfigError("inr_db must be finite");
  if (c.symbols < 100) throw ConfigError("symbols must be >= 100");
  if (c.scheme.kind == beamformer::Scheme::Custom && c.scheme.basis_file.empty()) {
    throw ConfigError("scheme.basis_file is required for custom schemes");
  }
  if (c.scheme.kind == beamformer::Scheme::Maximin && !(c.scheme.f_mf > 0 && c.scheme.f_mf < 1)) {
    throw ConfigError("scheme.f_mf must lie in (0, 1)");
  }
  if (c.scheme.kind == beamformer::Scheme::Papc && (c.scheme.position < 0 || c.scheme.position >= c.processing_gain)) {
    throw ConfigError("scheme.position must be in [0, N)");
  }
  // remaining scenario checks live in Scenario::validate
  build_scenario(c, c.snr_grid_db.front()).validate();
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigError("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      e.what());
  }
  reject_unknown(j, {"name", "array", "soi", "chip_rate_hz", "noise_var", "interferers", "scheme", "snr_grid_db",
                     "inr_db", "symbols", "seed", "outputs"},
                 "config");
  ExperimentConfig c;
  c.name = get_field<std::string>(j, "name", "config", c.name);
  if (j.contains("array")) {
    const auto& a = j["array"];
    reject_unknown(a, {"elements", "spacing"}, "array");
    c.elements = get_field(a, "elements", "array", c.elements);
    c.spacing = get_field(a, "spacing", "array", c.spacing);
  }
  if (j.contains("soi")) {
    const auto& s = j["soi"];
    reject_unknown(s, {"processing_gain", "code_index", "delay", "doa_deg"}, "soi");
    c.processing_gain = get_field(s, "processing_gain", "soi", c.processing_gain);
    c.code_index = get_field(s, "code_index", "soi", c.code_index);
    c.delay = get_field(s, "delay", "soi", c.delay);
    c.soi_doa_deg = get_field(s, "doa_deg", "soi", c.soi_doa_deg);
  }
  c.chip_rate_hz = get_field(j, "chip_rate_hz", "config", c.chip_rate_hz);
  c.noise_var = get_field(j, "noise_var", "config", c.noise_var);
  if (j.contains("interferers")) {
    if (!j["interferers"].is_array()) throw ConfigError("interferers: expected an array");
    for (std::size_t i = 0; i < j["interferers"].size(); ++i) {
      c.interferers.push_back(parse_interferer(j["interferers"][i], "interferers[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("scheme")) c.scheme = parse_scheme(j["scheme"]);
  c.snr_grid_db = get_field(j, "snr_grid_db", "config", std::vector<double>{});
  c.inr_db = get_field(j, "inr_db", "config", c.inr_db);
  c.symbols = get_field(j, "symbols", "config", c.symbols);
  c.seed = get_field(j, "seed", "config", c.seed);
  if (j.contains("outputs")) {
    const auto& o = j["outputs"];
    reject_unknown(o, {"dir"}, "outputs");
    c.out_dir = get_field<std::string>(o, "dir", "outputs", c.out_dir);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["array"] = {{"elements", c.elements}, {"spacing", c.spacing}};
  j["soi"] = {{"processing_gain", c.processing_gain},
              {"code_index", c.code_index},
              {"delay", c.delay},
              {"doa_deg", c.soi_doa_deg}};
  j["chip_rate_hz"] = c.chip_rate_hz;
  j["noise_var"] = c.noise_var;
  j["interferers"] = json::array();
  for (const auto& i : c.interferers) j["interferers"].push_back(to_json(i));
  json s;
  s["type"] = beamformer::scheme_name(c.scheme.kind);
  switch (c.scheme.kind) {
    case beamformer::Scheme::Papc: s["position"] = c.scheme.position; break;
    case beamformer::Scheme::Maximin: s["f_mf"] = c.scheme.f_mf; break;
    case beamformer::Scheme::Custom: s["basis_file"] = c.scheme.basis_file; break;
  }
  j["scheme"] = s;
  j["snr_grid_db"] = c.snr_grid_db;
  j["inr_db"] = c.inr_db;
  j["symbols"] = c.symbols;
  j["seed"] = c.seed;
  j["outputs"] = {{"dir", c.out_dir}};
  return j.dump(2) + "\n";
}

std::vector<std::string> preset_names() {
  return {"fig4a-bpsk3", "fig4b-pn2", "fig4c-tones5", "fig4d-mai3", "fig6-pn2"};
}

ExperimentConfig preset(const std::string& name) {
  using K = signal::InterfererKind;
  ExperimentConfig c = base_preset(name);
  if (name == "fig4a-bpsk3") {
    c.interferers = {simple(K::BpskWhite, 30.0), simple(K::BpskWhite, -20.0), simple(K::BpskWhite, 50.0)};
  } else if (name == "fig4b-pn2" || name == "fig6-pn2") {
    c.interferers = {simple(K::PeriodicalNoise, 30.0), simple(K::PeriodicalNoise, -40.0)};
  } else if (name == "fig4c-tones5") {
    const double offsets[] = {100e3, -300e3, 0.0, 400e3, -100e3};
    const double doas[] = {30.0, -50.0, -20.0, 19.0, 45.0};
    for (int i = 0; i < 5; ++i) c.interferers.push_back(simple(K::Tone, doas[i], offsets[i]));
  } else if (name == "fig4d-mai3") {
    InterfererConfig m;
    m.kind = K::MaiMultipath;
    m.code_index = 1;
    m.path_delays = {3, 5, 4};
    m.path_doas_deg = {30.0, -20.0, -50.0};
    c.interferers = {m};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

signal::Scenario build_scenario(const ExperimentConfig& c, double snr_db) {
  signal::Scenario s;
  s.geometry = {c.elements, c.spacing};
  s.soi.processing_gain = c.processing_gain;
  s.soi.code_index = c.code_index;
  s.soi.delay = c.delay;
  s.soi.doa_deg = c.soi_doa_deg;
  s.noise_var = c.noise_var;
  s.soi.power = std::pow(10.0, snr_db / 10.0) * c.noise_var / c.processing_gain;
  s.symbols = c.symbols;
  s.seed = c.seed;
  const double inr = std::pow(10.0, c.inr_db / 10.0);
  for (const auto& ic : c.interferers) {
    signal::InterfererSpec spec;
    spec.kind = ic.kind;
    spec.doa_deg = ic.doa_deg;
    spec.power = inr * c.noise_var * std::pow(10.0, ic.power_db / 10.0);
    spec.tone_offset = ic.offset_hz / c.chip_rate_hz;
    spec.mai_code_index = ic.code_index;
    spec.path_delays = ic.path_delays;
    spec.path_doas_deg = ic.path_doas_deg;
    spec.path_gains = ic.path_gains;
    s.interferers.push_back(spec);
  }
  return s;
}

beamformer::ProjectionBases build_bases(const ExperimentConfig& c) {
  const Eigen::VectorXd c0 = signal::gold31(c.code_index);
  switch (c.scheme.kind) {
    case beamformer::Scheme::Papc: return beamformer::papc_bases(c0, c.scheme.position);
    case beamformer::Scheme::Maximin: return beamformer::maximin_bases(c0, c.scheme.f_mf);
    case beamformer::Scheme::Custom: break;
  }
  // basis file: {"real": [[...]], "imag": [[...]]}, N rows
  std::ifstream in(c.scheme.basis_file);
  if (!in) throw ConfigError("cannot open basis file '" + c.scheme.basis_file + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("basis file: " + std::string(e.what()));
  }
  reject_unknown(j, {"real", "imag"}, "basis_file");
  const auto re = get_field(j, "real", "basis_file", std::vector<std::vector<double>>{});
  const auto im = get_field(j, "imag", "basis_file", std::vector<std::vector<double>>{});
  if (re.empty() || re[0].empty()) throw ConfigError("basis_file.real must be a non-empty N x r array");
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = static_cast<Eigen::Index>(re[0].size());
  if (!im.empty() && (im.size() != re.size() || std::any_of(im.begin(), im.end(), [&](const auto& row) {
                        return static_cast<Eigen::Index>(row.size()) != cols;
                      }))) {
    throw ConfigError("basis_file.imag must have the same shape as basis_file.real");
  }
  ComplexMatrix h(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(re[static_cast<std::size_t>(r)].size()) != cols) {
      throw ConfigError("basis_file.real rows must have equal length");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      double imag = 0.0;
      if (!im.empty()) imag = im.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(k));
      h(r, k) = cdouble(re[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)], imag);
    }
  }
  return beamformer::custom_bases(c0, h);
}

}  // namespace mpb::harness
