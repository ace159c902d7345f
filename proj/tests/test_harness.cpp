#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mpb/cli.hpp"
#include "mpb/errors.hpp"
#include "mpb/harness.hpp"

using namespace mpb;
using namespace mpb::harness;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mpb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("mpb_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small(const std::string& name) {
  auto c = preset(name);
  c.symbols = 1000;
  c.snr_grid_db = {-10.0, 10.0, 30.0};
  return c;
}

}  // namespace

TEST_CASE("presets") {
  const auto names = preset_names();
  CHECK(names == std::vector<std::string>{"fig4a-bpsk3", "fig4b-pn2", "fig4c-tones5", "fig4d-mai3", "fig6-pn2"});
  CHECK_THROWS_AS(preset("nope"), ConfigError);

  const auto b = preset("fig4a-bpsk3");
  CHECK(b.elements == 8);
  CHECK(b.processing_gain == 31);
  CHECK(b.interferers.size() == 3);
  for (const auto& i : b.interferers) CHECK(i.kind == signal::InterfererKind::BpskWhite);

  const auto p = preset("fig4b-pn2");
  REQUIRE(p.interferers.size() == 2);
  CHECK(p.interferers[0].doa_deg == 30.0);
  CHECK(p.interferers[1].doa_deg == -40.0);

  const auto t = preset("fig4c-tones5");
  const std::vector<double> offsets = {100e3, -300e3, 0.0, 400e3, -100e3};
  const std::vector<double> doas = {30, -50, -20, 19, 45};
  REQUIRE(t.interferers.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(t.interferers[i].offset_hz == offsets[i]);
    CHECK(t.interferers[i].doa_deg == doas[i]);
  }

  const auto m = preset("fig4d-mai3");
  REQUIRE(m.interferers.size() == 1);
  CHECK(m.interferers[0].path_delays == std::vector<int>{3, 5, 4});

  CHECK(b.snr_grid_db.front() == -30.0);
  CHECK(b.snr_grid_db.back() == 50.0);
}

TEST_CASE("every preset round-trips through JSON") {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    CHECK(parse_config(serialize_config(c)) == c);
    auto papc = c;
    papc.scheme.kind = beamformer::Scheme::Papc;
    papc.scheme.position = 4;
    CHECK(parse_config(serialize_config(papc)) == papc);
  }
}

TEST_CASE("config parsing errors") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"name": "x", "colour": 3})"), doctest::Contains("unknown key 'colour'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"array": {"elements": 8, "gap": 1}})"), doctest::Contains("'gap'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("{\n  \"name\": \"x\",\n  oops\n}"), doctest::Contains("line 3"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"interferers": [{"kind": "laser"}]})"), doctest::Contains("laser"),
                       ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"array": {"elements": "eight"}})"), ConfigError);

  auto c = preset("fig4b-pn2");
  c.snr_grid_db = {10.0, 0.0};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = preset("fig4b-pn2");
  c.scheme.f_mf = 1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = preset("fig4b-pn2");
  c.scheme.kind = beamformer::Scheme::Custom;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("scenario construction") {
  const auto c = preset("fig4c-tones5");
  const auto sc = build_scenario(c, 20.0);
  CHECK(sc.soi.power == doctest::Approx(100.0 * c.noise_var / 31.0));
  REQUIRE(sc.interferers.size() == 5);
  CHECK(sc.interferers[0].power == doctest::Approx(1000.0));
  CHECK(sc.interferers[0].tone_offset == doctest::Approx(100e3 / 3.1e6));
}

TEST_CASE("custom basis file") {
  const auto dir = scratch_dir("basis");
  const auto path = dir / "basis.json";
  {
    std::ofstream out(path);
    out << R"({"real": [)";
    for (int n = 0; n < 31; ++n) out << (n ? "," : "") << "[" << (n == 2 ? 1 : 0) << "]";
    out << "]}";
  }
  auto c = preset("fig4b-pn2");
  c.scheme.kind = beamformer::Scheme::Custom;
  c.scheme.basis_file = path.string();
  const auto b = build_bases(c);
  CHECK(b.rank() == 1);
  CHECK(std::abs(b.h_i(2, 0)) == 1.0);
  CHECK(parse_config(serialize_config(c)) == c);

  {
    std::ofstream out(path);
    out << R"({"real": [[1]], "imag": [[0], [1]]})";
  }
  CHECK_THROWS_AS(build_bases(c), ConfigError);
}

TEST_CASE("number formatting and CSV schema") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");

  const auto rows = run_sweep(small("fig4a-bpsk3"), 1);
  const auto csv = sweep_csv(rows);
  CHECK(csv.rfind("snr_db,g_sim_db,g_theory_db,gamma0,gamma1,lambda_max_exact,lambda_max_pred,region\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  for (const auto& r : rows) {
    CHECK(r.region == "operating");
    CHECK(r.gamma1 == 0.0);
    CHECK(r.lambda_max_pred == doctest::Approx(std::max(r.gamma0, r.gamma1) + 1));
    // the closed-form gamma0 ignores the SOI/interferer overlap, which only
    // lowers the exact value
    CHECK(r.lambda_max_exact <= r.lambda_max_pred * (1 + 1e-12));
    CHECK(r.lambda_max_exact >= 0.9 * r.lambda_max_pred);
  }
}

TEST_CASE("sweep output does not depend on the worker count") {
  const auto c = small("fig4c-tones5");
  const auto one = sweep_csv(run_sweep(c, 1));
  CHECK(sweep_csv(run_sweep(c, 3)) == one);
  auto other = c;
  other.seed = 2;
  CHECK(sweep_csv(run_sweep(other, 1)) != one);
}

TEST_CASE("pattern, eigen curves and analysis") {
  const auto c = small("fig6-pn2");
  const auto pattern = run_pattern(c, 40.9);
  CHECK(pattern.size() == 361);
  CHECK(pattern_csv(pattern).rfind("theta_deg,papc_gain_db,maximin_gain_db\n", 0) == 0);

  auto e = preset("fig4b-pn2");
  e.snr_grid_db.clear();
  for (double s = -10; s <= 50 + 1e-9; s += 0.25) e.snr_grid_db.push_back(s);
  const auto curves = run_eigencurves(e);
  REQUIRE(curves.crossing_snr_db.has_value());
  CHECK(std::abs(*curves.crossing_snr_db - curves.predicted_t0_db) <= 1.0);
  CHECK(eigen_csv(curves).rfind("snr_db,gamma0_plus1,gamma1_plus1,lambda_max_exact\n", 0) == 0);

  const auto white = run_eigencurves(preset("fig4a-bpsk3"));
  for (const auto& r : white.rows) CHECK(r.gamma1_plus1 == 1.0);

  const auto a = analyze(preset("fig4b-pn2"));
  CHECK(a.has_infinite);
  REQUIRE(a.bounded_geometric.has_value());
  CHECK_FALSE(*a.bounded_geometric);
  CHECK(a.inr_table.size() == 4);
  const auto json = analysis_json(a);
  for (const char* key : {"\"thresholds\"", "\"c_y0\"", "\"has_infinite\"", "\"gamma1_vs_inr\""}) {
    CHECK(json.find(key) != std::string::npos);
  }
}

TEST_CASE("command line") {
  SUBCASE("presets") {
    const auto r = run_cli({"presets"});
    CHECK(r.code == 0);
    CHECK(r.out == "fig4a-bpsk3\nfig4b-pn2\nfig4c-tones5\nfig4d-mai3\nfig6-pn2\n");
  }
  SUBCASE("usage errors exit with 1") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"bogus"}).code == 1);
    CHECK(run_cli({"sweep"}).code == 1);
    CHECK(run_cli({"sweep", "--preset", "fig4a-bpsk3", "--scheme", "other"}).code == 1);
    CHECK(run_cli({"sweep", "--preset", "no-such-preset"}).code == 1);
    CHECK(run_cli({"sweep", "--config", "/nonexistent/file.json"}).code == 1);
  }
  SUBCASE("bad config file exits with 1") {
    const auto dir = scratch_dir("badcfg");
    std::ofstream(dir / "c.json") << R"({"name": "x", "extra": 1})";
    const auto r = run_cli({"sweep", "--config", (dir / "c.json").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("extra") != std::string::npos);
  }
  SUBCASE("sweep smoke run") {
    const auto dir = scratch_dir("sweep");
    const auto r = run_cli({"sweep", "--preset", "fig4a-bpsk3", "--symbols", "1000", "--seed", "7", "--snr-db",
                            "0,10", "--out", dir.string()});
    CHECK(r.code == 0);
    const auto csv = read_file(dir / "sweep.csv");
    CHECK(csv.rfind("snr_db,g_sim_db,g_theory_db,gamma0,gamma1,lambda_max_exact,lambda_max_pred,region\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  }
  SUBCASE("analyze writes JSON") {
    const auto dir = scratch_dir("analyze");
    const auto r = run_cli({"analyze", "--preset", "fig4b-pn2", "--inr-db", "30", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("has_infinite = true") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "analysis.json"));
    const auto papc = run_cli({"analyze", "--preset", "fig4b-pn2", "--scheme", "papc", "--out", dir.string()});
    CHECK(papc.out.find("has_infinite = true") != std::string::npos);
  }
  SUBCASE("analyze without interferers is a config error") {
    const auto dir = scratch_dir("noint");
    auto c = preset("fig4b-pn2");
    c.interferers.clear();
    std::ofstream(dir / "c.json") << serialize_config(c);
    CHECK(run_cli({"analyze", "--config", (dir / "c.json").string(), "--out", dir.string()}).code == 1);
  }
}
