#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mpb/errors.hpp"
#include "mpb/harness.hpp"

namespace mpb::harness {

namespace {

double db(double x) { return 10.0 * std::log10(x); }
double from_db(double x) { return std::pow(10.0, x / 10.0); }

// Runs fn(i) for i in [0, count) on `workers` threads. Results are written
// by index, so scheduling cannot change the output.
template <typename Fn>
void parallel_for(int count, int workers, Fn fn) {
  workers = std::clamp(workers, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

TheoryContext prepare_theory(const ExperimentConfig& config, const beamformer::ProjectionBases& bases) {
  const auto scenario = build_scenario(config, config.snr_grid_db.front());
  const auto realization = signal::realize(scenario);
  TheoryContext ctx;
  ctx.model = beamformer::analytic_cov(scenario, bases, realization);
  const int d = ctx.model.d();
  ctx.gamma1 = d > 0 ? theory::gamma_spectrum(ctx.model.q_s, ctx.model.q_i, d)(0) : 0.0;
  const double g_u = theory::g_upper(ctx.model.q_s, ctx.model.q_i, ctx.model.a0);
  const double g_l = ctx.gamma1 > 0 ? theory::g_lower_oracle(ctx.model) : g_u;
  ctx.thresholds = theory::thresholds(ctx.gamma1, ctx.model.beta, ctx.model.n, ctx.model.l, g_u, g_l);
  return ctx;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, int workers) {
  validate(config);
  const auto bases = build_bases(config);
  const auto ctx = prepare_theory(config, bases);
  const auto& model = ctx.model;

  std::vector<SweepRow> rows(config.snr_grid_db.size());
  parallel_for(static_cast<int>(rows.size()), workers, [&](int i) {
    SweepRow& row = rows[static_cast<std::size_t>(i)];
    row.snr_db = config.snr_grid_db[static_cast<std::size_t>(i)];
    const double snr = from_db(row.snr_db);
    try {
      const auto scenario = build_scenario(config, row.snr_db);
      const auto realization = signal::realize(scenario);
      const std::uint64_t key = rng::derive(config.seed, {static_cast<std::uint64_t>(i)});
      const auto mc = beamformer::simulate_point(scenario, realization, bases, key, config.symbols);
      const auto w = beamformer::solve_weights(mc.pair);
      row.g_sim_db = db(beamformer::measure_g_monte_carlo(w.w, mc, model, snr));

      const auto point = theory::curve_value(ctx.thresholds, snr, model.beta, model.n, model.l);
      row.g_theory_db = db(point.g);
      row.region = theory::region_name(point.region);
      row.gamma0 = theory::gamma0(snr, model.l, model.n, model.beta);
      row.gamma1 = ctx.gamma1;
      row.lambda_max_exact = linalg::gen_eig_hpd(model.pair(snr).r_s, model.pair(snr).r_i).values(0);
      row.lambda_max_pred = std::max(row.gamma0, ctx.gamma1) + 1.0;
    } catch (const std::exception&) {
      row.g_sim_db = row.g_theory_db = std::nan("");
      row.region = "error";
    }
  });
  return rows;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "snr_db,g_sim_db,g_theory_db,gamma0,gamma1,lambda_max_exact,lambda_max_pred,region\n";
  for (const auto& r : rows) {
    out << format_number(r.snr_db) << ',' << format_number(r.g_sim_db) << ',' << format_number(r.g_theory_db) << ','
        << format_number(r.gamma0) << ',' << format_number(r.gamma1) << ',' << format_number(r.lambda_max_exact)
        << ',' << format_number(r.lambda_max_pred) << ',' << r.region << '\n';
  }
  return out.str();
}

std::vector<PatternRow> run_pattern(const ExperimentConfig& config, double snr_db) {
  validate(config);
  const auto scenario = build_scenario(config, snr_db);
  const auto realization = signal::realize(scenario);
  const Eigen::VectorXd c0 = scenario.soi.chips();
  const auto grid = beamformer::uniform_grid(-90.0, 90.0, 0.5);

  const std::uint64_t key = rng::derive(config.seed, {rng::kData, 0xfa77e2});
  auto weights = [&](const beamformer::ProjectionBases& bases) {
    const auto mc = beamformer::simulate_point(scenario, realization, bases, key, config.symbols);
    return beamformer::solve_weights(mc.pair).w;
  };
  const double f_mf = config.scheme.kind == beamformer::Scheme::Maximin ? config.scheme.f_mf : 16.0 / 31.0;
  const int position = config.scheme.kind == beamformer::Scheme::Papc ? config.scheme.position : 0;
  const auto papc = beamformer::array_pattern(weights(beamformer::papc_bases(c0, position)), scenario.geometry, grid);
  const auto maximin =
      beamformer::array_pattern(weights(beamformer::maximin_bases(c0, f_mf)), scenario.geometry, grid);

  std::vector<PatternRow> rows(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) rows[i] = {grid[i], papc[i].gain_db, maximin[i].gain_db};
  return rows;
}

std::string pattern_csv(const std::vector<PatternRow>& rows) {
  std::ostringstream out;
  out << "theta_deg,papc_gain_db,maximin_gain_db\n";
  for (const auto& r : rows) {
    out << format_number(r.theta_deg) << ',' << format_number(r.papc_gain_db) << ','
        << format_number(r.maximin_gain_db) << '\n';
  }
  return out.str();
}

EigenCurves run_eigencurves(const ExperimentConfig& config) {
  validate(config);
  const auto bases = build_bases(config);
  const auto scenario = build_scenario(config, config.snr_grid_db.front());
  const auto model = beamformer::analytic_cov(scenario, bases, signal::realize(scenario));
  const int d = model.d();
  const double gamma1 = d > 0 ? theory::gamma_spectrum(model.q_s, model.q_i, d)(0) : 0.0;

  EigenCurves out;
  const auto th = theory::thresholds(gamma1, model.beta, model.n, model.l, 1.0);
  out.predicted_t0_db = th.snr_t0 > 0 ? db(th.snr_t0) : -std::numeric_limits<double>::infinity();
  for (double s_db : config.snr_grid_db) {
    const double snr = from_db(s_db);
    const auto pair = model.pair(snr);
    EigenRow row;
    row.snr_db = s_db;
    row.gamma0_plus1 = theory::gamma0(snr, model.l, model.n, model.beta) + 1.0;
    row.gamma1_plus1 = gamma1 + 1.0;
    row.lambda_max_exact = linalg::gen_eig_hpd(pair.r_s, pair.r_i).values(0);
    out.rows.push_back(row);
  }
  // linear interpolation in dB of the first sign change of gamma0 - gamma1
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    const double a = db(out.rows[i - 1].gamma0_plus1) - db(out.rows[i - 1].gamma1_plus1);
    const double b = db(out.rows[i].gamma0_plus1) - db(out.rows[i].gamma1_plus1);
    if (a < 0 && b >= 0) {
      const double t = a / (a - b);
      out.crossing_snr_db = out.rows[i - 1].snr_db + t * (out.rows[i].snr_db - out.rows[i - 1].snr_db);
      break;
    }
  }
  return out;
}

std::string eigen_csv(const EigenCurves& curves) {
  std::ostringstream out;
  out << "snr_db,gamma0_plus1,gamma1_plus1,lambda_max_exact\n";
  for (const auto& r : curves.rows) {
    out << format_number(r.snr_db) << ',' << format_number(r.gamma0_plus1) << ',' << format_number(r.gamma1_plus1)
        << ',' << format_number(r.lambda_max_exact) << '\n';
  }
  return out.str();
}

Analysis analyze(const ExperimentConfig& config, const std::vector<double>& inr_db) {
  validate(config);
  if (config.interferers.empty()) throw ConfigError("analyze: the scenario has no interferers");
  const auto bases = build_bases(config);
  const auto ctx = prepare_theory(config, bases);

  Analysis a;
  a.thresholds = ctx.thresholds;
  a.gamma1 = ctx.gamma1;
  a.beta = ctx.model.beta;
  const auto nf = theory::noise_free_pair(ctx.model);
  a.c_y0 = nf.c_y0;
  a.has_infinite = nf.has_infinite;

  const auto scenario = build_scenario(config, config.snr_grid_db.front());
  const auto realization = signal::realize(scenario);
  if (const auto s_i = beamformer::periodic_waveforms(scenario, realization)) {
    a.bounded_geometric = theory::boundedness_criterion(bases.h_s, bases.h_i, *s_i);
  }

  for (double x : inr_db) {
    ExperimentConfig c = config;
    c.inr_db = x;
    const auto sc = build_scenario(c, c.snr_grid_db.front());
    const auto m = beamformer::analytic_cov(sc, bases, signal::realize(sc));
    InrRow row;
    row.inr_db = x;
    row.gamma1 = theory::gamma_spectrum(m.q_s, m.q_i, m.d())(0);
    if (a.has_infinite) row.gamma1_lower = theory::gamma1_lower_bound(a.c_y0, from_db(x));
    a.inr_table.push_back(row);
  }
  return a;
}

std::string analysis_json(const Analysis& a) {
  using nlohmann::json;
  auto num = [](double x) -> json {
    if (std::isfinite(x)) return x;
    return format_number(x);
  };
  json j;
  j["thresholds"] = {{"snr_t0_db", num(db(a.thresholds.snr_t0))},
                     {"snr_t1_db", num(db(a.thresholds.snr_t1))},
                     {"snr_t2_db", num(db(a.thresholds.snr_t2))},
                     {"snr_t0", num(a.thresholds.snr_t0)},
                     {"snr_t1", num(a.thresholds.snr_t1)},
                     {"snr_t2", num(a.thresholds.snr_t2)},
                     {"k0", num(a.thresholds.k0)},
                     {"p_i", num(a.thresholds.p_i)},
                     {"g_u", num(a.thresholds.g_u)},
                     {"g_l", num(a.thresholds.g_l)}};
  j["gamma1"] = num(a.gamma1);
  j["beta"] = num(a.beta);
  j["c_y0"] = num(a.c_y0);
  j["has_infinite"] = a.has_infinite;
  j["bounded_geometric"] = a.bounded_geometric ? json(*a.bounded_geometric) : json(nullptr);
  j["gamma1_vs_inr"] = json::array();
  for (const auto& r : a.inr_table) {
    j["gamma1_vs_inr"].push_back({{"inr_db", r.inr_db},
                                  {"gamma1", num(r.gamma1)},
                                  {"gamma1_lower_bound", r.gamma1_lower ? json(*r.gamma1_lower) : json(nullptr)}});
  }
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace mpb::harness
