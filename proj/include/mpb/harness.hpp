#pragma once

// Experiment configuration, presets and the sweep / pattern / eigen-curve /
// analysis drivers behind the command line tool.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpb/beamformer.hpp"
#include "mpb/signal_model.hpp"
#include "mpb/theory.hpp"

namespace mpb::harness {

struct InterfererConfig {
  signal::InterfererKind kind = signal::InterfererKind::BpskWhite;
  double doa_deg = 0.0;
  double power_db = 0.0;  // relative to the configured INR
  double offset_hz = 0.0; // tones
  int code_index = 1;     // MAI
  std::vector<int> path_delays;
  std::vector<double> path_doas_deg;
  std::vector<double> path_gains;

  bool operator==(const InterfererConfig&) const = default;
};

struct SchemeConfig {
  beamformer::Scheme kind = beamformer::Scheme::Maximin;
  int position = 0;
  double f_mf = 16.0 / 31.0;
  std::string basis_file;

  bool operator==(const SchemeConfig&) const = default;
};

struct ExperimentConfig {
  std::string name = "custom";
  int elements = 8;
  double spacing = 0.5;
  int processing_gain = 31;
  int code_index = 0;
  int delay = 0;
  double soi_doa_deg = 0.0;
  double chip_rate_hz = 3.1e6;
  double noise_var = 1.0;
  std::vector<InterfererConfig> interferers;
  SchemeConfig scheme;
  std::vector<double> snr_grid_db;
  double inr_db = 30.0;
  int symbols = 100000;
  std::uint64_t seed = 1;
  std::string out_dir = ".";

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

// Scenario at one SNR (dB): P0 = SNR sigma^2 / N, interferer powers from
// INR and their relative levels.
signal::Scenario build_scenario(const ExperimentConfig& config, double snr_db);
beamformer::ProjectionBases build_bases(const ExperimentConfig& config);

// Everything that does not depend on SNR.
struct TheoryContext {
  beamformer::AnalyticModel model;
  theory::Thresholds thresholds;
  double gamma1 = 0.0;
};

TheoryContext prepare_theory(const ExperimentConfig& config, const beamformer::ProjectionBases& bases);

struct SweepRow {
  double snr_db = 0.0;
  double g_sim_db = 0.0;
  double g_theory_db = 0.0;
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  double lambda_max_exact = 0.0;
  double lambda_max_pred = 0.0;
  std::string region;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, int workers = 1);

std::string format_number(double x);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct PatternRow {
  double theta_deg = 0.0;
  double papc_gain_db = 0.0;
  double maximin_gain_db = 0.0;
};

// Weights from the simulated covariance pair of each scheme at `snr_db`.
std::vector<PatternRow> run_pattern(const ExperimentConfig& config, double snr_db);
std::string pattern_csv(const std::vector<PatternRow>& rows);

struct EigenRow {
  double snr_db = 0.0;
  double gamma0_plus1 = 0.0;
  double gamma1_plus1 = 0.0;
  double lambda_max_exact = 0.0;
};

struct EigenCurves {
  std::vector<EigenRow> rows;
  std::optional<double> crossing_snr_db;  // where gamma0 + 1 overtakes gamma1 + 1
  double predicted_t0_db = 0.0;
};

EigenCurves run_eigencurves(const ExperimentConfig& config);
std::string eigen_csv(const EigenCurves& curves);

struct InrRow {
  double inr_db = 0.0;
  double gamma1 = 0.0;
  std::optional<double> gamma1_lower;
};

struct Analysis {
  theory::Thresholds thresholds;
  double gamma1 = 0.0;
  double beta = 0.0;
  double c_y0 = 0.0;
  bool has_infinite = false;
  std::optional<bool> bounded_geometric;  // periodic interferers only
  std::vector<InrRow> inr_table;
};

Analysis analyze(const ExperimentConfig& config, const std::vector<double>& inr_db = {10, 20, 30, 40});
std::string analysis_json(const Analysis& analysis);

// Writes `text` to `path`, creating parent directories.
void write_file(const std::string& path, const std::string& text);

}  // namespace mpb::harness
