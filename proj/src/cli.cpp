#include "mpb/cli.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpb/errors.hpp"
#include "mpb/harness.hpp"

namespace mpb::cli {

namespace {

struct Options {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::string scheme;
  std::uint64_t seed = 0;
  int symbols = 0;
  std::vector<double> snr_db;
  double inr_db = 0.0;
  int workers = 1;
  bool full = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment file")->check(CLI::ExistingFile);
  cmd->add_option("--preset", o.preset, "built-in scenario name");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--symbols", o.symbols, "symbols per SNR point")->check(CLI::PositiveNumber);
  cmd->add_option("--snr-db", o.snr_db, "SNR values in dB")->delimiter(',');
  cmd->add_option("--inr-db", o.inr_db, "INR in dB");
  cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--scheme", o.scheme, "override scheme")->check(CLI::IsMember({"papc", "maximin"}));
  cmd->add_flag("--full", o.full, "use 1e6 symbols per point");
}

harness::ExperimentConfig resolve(const CLI::App& cmd, const Options& o, bool snr_is_grid) {
  if (o.config_path.empty() == o.preset.empty()) throw ConfigError("exactly one of --config or --preset is required");
  auto c = o.config_path.empty() ? harness::preset(o.preset) : harness::load_config(o.config_path);
  if (cmd.count("--out")) c.out_dir = o.out_dir;
  if (cmd.count("--seed")) c.seed = o.seed;
  if (o.full) c.symbols = 1000000;
  if (cmd.count("--symbols")) c.symbols = o.symbols;
  if (snr_is_grid && !o.snr_db.empty()) c.snr_grid_db = o.snr_db;
  if (cmd.count("--inr-db")) c.inr_db = o.inr_db;
  if (o.scheme == "papc") c.scheme.kind = beamformer::Scheme::Papc;
  if (o.scheme == "maximin") c.scheme.kind = beamformer::Scheme::Maximin;
  harness::validate(c);
  return c;
}

std::string db_text(double linear) {
  if (linear == 0.0) return "-inf dB";
  if (std::isinf(linear)) return "+inf dB";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f dB", 10.0 * std::log10(linear));
  return buf;
}

std::string path_join(const std::string& dir, const std::string& file) {
  return dir.empty() ? file : dir + "/" + file;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matrix pair beamformer toolkit", "mpb"};
  app.require_subcommand(1);
  Options o;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo and theoretical operating curve");
  auto* pattern = app.add_subcommand("pattern", "array patterns of PAPC and Maximin weights");
  auto* eigen = app.add_subcommand("eigen", "generalized eigenvalue curves versus SNR");
  auto* analyze = app.add_subcommand("analyze", "thresholds and noise-free pair analysis");
  auto* presets = app.add_subcommand("presets", "list built-in scenarios");
  for (auto* cmd : {sweep, pattern, eigen, analyze}) add_common(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (presets->parsed()) {
      for (const auto& name : harness::preset_names()) out << name << "\n";
      return 0;
    }
    if (sweep->parsed()) {
      const auto c = resolve(*sweep, o, true);
      const auto rows = harness::run_sweep(c, o.workers);
      const auto path = path_join(c.out_dir, "sweep.csv");
      harness::write_file(path, harness::sweep_csv(rows));
      int failed = 0;
      for (const auto& r : rows) failed += r.region == "error";
      out << "wrote " << path << " (" << rows.size() << " points";
      if (failed) out << ", " << failed << " failed";
      out << ")\n";
      return 0;
    }
    if (pattern->parsed()) {
      const auto c = resolve(*pattern, o, false);
      const std::vector<double> snrs = o.snr_db.empty() ? std::vector<double>{40.9} : o.snr_db;
      for (double s : snrs) {
        char name[64];
        std::snprintf(name, sizeof name, "pattern_snr%g.csv", s);
        const auto path = path_join(c.out_dir, name);
        harness::write_file(path, harness::pattern_csv(harness::run_pattern(c, s)));
        out << "wrote " << path << "\n";
      }
      return 0;
    }
    if (eigen->parsed()) {
      const auto c = resolve(*eigen, o, true);
      const auto curves = harness::run_eigencurves(c);
      const auto path = path_join(c.out_dir, "eigen.csv");
      harness::write_file(path, harness::eigen_csv(curves));
      out << "wrote " << path << "\n";
      out << "predicted SNR_T0: " << harness::format_number(curves.predicted_t0_db) << " dB\n";
      out << "crossing of gamma0+1 and gamma1+1: "
          << (curves.crossing_snr_db ? harness::format_number(*curves.crossing_snr_db) + " dB" : "none in grid")
          << "\n";
      return 0;
    }
    if (analyze->parsed()) {
      const auto c = resolve(*analyze, o, true);
      const auto a = harness::analyze(c);
      const auto& t = a.thresholds;
      out << "scenario " << c.name << ", scheme " << beamformer::scheme_name(c.scheme.kind) << ", INR "
          << harness::format_number(c.inr_db) << " dB\n";
      out << "beta      " << harness::format_number(a.beta) << "\n";
      out << "gamma1    " << harness::format_number(a.gamma1) << "\n";
      out << "SNR_T0    " << db_text(t.snr_t0) << "\n";
      out << "SNR_T1    " << db_text(t.snr_t1) << "\n";
      out << "SNR_T2    " << db_text(t.snr_t2) << "\n";
      out << "K0        " << harness::format_number(t.k0) << "\n";
      out << "P_I       " << harness::format_number(t.p_i) << "\n";
      out << "G_U       " << db_text(t.g_u) << "\n";
      out << "G_L       " << db_text(t.g_l) << "\n";
      out << "C_Y0      " << harness::format_number(a.c_y0) << "\n";
      out << "has_infinite = " << (a.has_infinite ? "true" : "false") << "\n";
      if (a.bounded_geometric) out << "bounded (geometric) = " << (*a.bounded_geometric ? "true" : "false") << "\n";
      out << "inr_db,gamma1,gamma1_lower_bound\n";
      for (const auto& r : a.inr_table) {
        out << harness::format_number(r.inr_db) << ',' << harness::format_number(r.gamma1) << ','
            << (r.gamma1_lower ? harness::format_number(*r.gamma1_lower) : "n/a") << "\n";
      }
      const auto path = path_join(c.out_dir, "analysis.json");
      harness::write_file(path, harness::analysis_json(a));
      out << "wrote " << path << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace mpb::cli
