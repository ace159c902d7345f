#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mpb/beamformer.hpp"
#include "mpb/errors.hpp"
#include "oracles.hpp"

using namespace mpb;
using namespace mpb::beamformer;

namespace {

const Eigen::VectorXd& code() {
  static const Eigen::VectorXd c = signal::gold31(0);
  return c;
}

double collinearity(const ComplexVector& a, const ComplexVector& b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

signal::Scenario white_scenario(double snr, double inr) {
  signal::Scenario sc;
  sc.noise_var = 1.0;
  sc.soi.power = snr / 31.0;
  for (double doa : {30.0, -20.0, 50.0}) {
    signal::InterfererSpec i;
    i.kind = signal::InterfererKind::BpskWhite;
    i.doa_deg = doa;
    i.power = inr;
    sc.interferers.push_back(i);
  }
  return sc;
}

signal::Scenario tone_scenario(double snr, double inr) {
  signal::Scenario sc;
  sc.soi.power = snr / 31.0;
  signal::InterfererSpec i;
  i.kind = signal::InterfererKind::Tone;
  i.doa_deg = 30.0;
  i.power = inr;
  i.tone_offset = 100e3 / 3.1e6;
  sc.interferers = {i};
  return sc;
}

}  // namespace

TEST_CASE("PAPC bases") {
  const auto b = papc_bases(code(), 0);
  CHECK(b.rank() == 1);
  CHECK(std::abs(b.h_i(0, 0)) == 1.0);
  CHECK(b.h_i.col(0).tail(30).norm() == 0.0);
  CHECK(b.h_s.norm() == doctest::Approx(1));
  CHECK(std::abs((b.h_i.adjoint() * b.h_i)(0, 0) - 1.0) == 0.0);
  for (int m : {0, 7, 30}) CHECK(leakage_ratio(papc_bases(code(), m), code()) == doctest::Approx(1).epsilon(1e-14));
}

TEST_CASE("Maximin bases") {
  for (int k = 1; k < 31; ++k) {
    const auto b = maximin_bases(code(), k / 31.0);
    CHECK(leakage_ratio(b, code()) <= 1e-12);
    CHECK(std::abs(b.h_s.dot(b.h_i.col(0))) <= 1e-12);
  }
  CHECK(leakage_ratio(maximin_bases(code(), 16.0 / 31.0), code()) <= 1e-12);
  CHECK_THROWS_AS(maximin_bases(code(), 1.0), ConfigError);
  CHECK_THROWS(maximin_bases(code(), 0.0));
  CHECK_THROWS(maximin_bases(code(), 1.5));
}

TEST_CASE("custom bases are checked") {
  ComplexMatrix h(31, 1);
  h.col(0) = code().cast<cdouble>() / std::sqrt(31.0);
  CHECK_THROWS_AS(custom_bases(code(), h), ConfigError);
  ComplexMatrix not_orthonormal = ComplexMatrix::Zero(31, 2);
  not_orthonormal(0, 0) = 1.0;
  not_orthonormal(0, 1) = 1.0;
  CHECK_THROWS_AS(custom_bases(code(), not_orthonormal), ConfigError);
  ComplexMatrix ok = ComplexMatrix::Zero(31, 2);
  ok(0, 0) = 1.0;
  ok(1, 1) = 1.0;
  const auto b = custom_bases(code(), ok);
  CHECK(leakage_ratio(b, code()) == doctest::Approx(1));
}

TEST_CASE("snapshots of a pure SOI block") {
  signal::BlockData data;
  const ComplexVector a0 = signal::steering(0.0, {8, 0.5});
  data.blocks.push_back(a0 * code().cast<cdouble>().transpose());
  const auto bases = maximin_bases(code(), 16.0 / 31.0);
  const auto s = snapshots(data, bases);
  REQUIRE(s.x_s.size() == 1);
  CHECK((s.x_s[0] - std::sqrt(31.0) * a0).norm() <= 1e-12);
  CHECK(s.x_i[0].norm() <= 1e-12);
}

TEST_CASE("snapshots are linear") {
  std::mt19937_64 rng(3);
  signal::BlockData x, y, sum;
  for (int k = 0; k < 3; ++k) {
    x.blocks.push_back(oracle::random_complex(8, 31, rng));
    y.blocks.push_back(oracle::random_complex(8, 31, rng));
    sum.blocks.push_back(x.blocks.back() + y.blocks.back());
  }
  const auto bases = papc_bases(code(), 4);
  const auto sx = snapshots(x, bases), sy = snapshots(y, bases), ss = snapshots(sum, bases);
  for (int k = 0; k < 3; ++k) {
    CHECK((ss.x_s[k] - sx.x_s[k] - sy.x_s[k]).norm() <= 1e-12);
    CHECK((ss.x_i[k] - sx.x_i[k] - sy.x_i[k]).norm() <= 1e-12);
  }
}

TEST_CASE("covariance estimation") {
  SUBCASE("constant snapshot") {
    ComplexVector v(3);
    v << 1, cdouble(0, 2), -1;
    Snapshots s;
    for (int k = 0; k < 5; ++k) {
      s.x_s.push_back(v);
      s.x_i.push_back(ComplexMatrix::Zero(3, 1));
    }
    const auto p = estimate_cov_pair(s);
    CHECK((p.r_s - v * v.adjoint()).norm() <= 1e-12);
    CHECK(p.r_i.trace().real() >= 0);
  }
  SUBCASE("merging accumulators equals one pass") {
    std::mt19937_64 rng(9);
    CovAccumulator all(4, 2), a(4, 2), b(4, 2);
    for (int k = 0; k < 20; ++k) {
      const ComplexVector xs = oracle::random_complex(4, 1, rng);
      const ComplexMatrix xi = oracle::random_complex(4, 2, rng);
      all.add(xs, xi);
      (k < 7 ? a : b).add(xs, xi);
    }
    a.merge(b);
    CHECK(a.count() == 20);
    CHECK((a.finish().r_s - all.finish().r_s).norm() <= 1e-12);
    CHECK((a.finish().r_i - all.finish().r_i).norm() <= 1e-12);
  }
  SUBCASE("noise only converges to sigma^2 I") {
    signal::Scenario sc;
    sc.soi.power = 0.0;
    sc.noise_var = 2.0;
    const auto bases = maximin_bases(code(), 16.0 / 31.0);
    const auto mc = simulate_point(sc, signal::realize(sc), bases, 77, 100000);
    const ComplexMatrix err = mc.pair.r_s - 2.0 * ComplexMatrix::Identity(8, 8);
    CHECK(linalg::max_abs(err) <= 0.03 * 2.0);
  }
}

TEST_CASE("analytic covariance structure") {
  const auto bases = maximin_bases(code(), 16.0 / 31.0);
  SUBCASE("no interferers") {
    signal::Scenario sc;
    sc.noise_var = 1.5;
    const auto m = analytic_cov(sc, bases, signal::realize(sc));
    CHECK(linalg::max_abs(ComplexMatrix(m.q_s - 1.5 * ComplexMatrix::Identity(8, 8))) <= 1e-14);
    CHECK(linalg::max_abs(ComplexMatrix(m.q_i - 1.5 * ComplexMatrix::Identity(8, 8))) <= 1e-14);
  }
  SUBCASE("white interferers have no mismatch") {
    const auto sc = white_scenario(1.0, 1000.0);
    const auto m = analytic_cov(sc, bases, signal::realize(sc));
    CHECK(linalg::max_abs(ComplexMatrix(m.q_s - m.q_i)) <= 1e-14 * linalg::max_abs(m.q_s));
  }
  SUBCASE("single tone with PAPC: mismatch has rank one") {
    const auto sc = tone_scenario(1.0, 1000.0);
    const auto m = analytic_cov(sc, papc_bases(code()), signal::realize(sc));
    const auto e = linalg::herm_eig(ComplexMatrix(m.q_s - m.q_i));
    const double top = e.values.cwiseAbs().maxCoeff();
    int nonzero = 0;
    for (int i = 0; i < e.values.size(); ++i) nonzero += std::abs(e.values(i)) > 1e-9 * top;
    CHECK(nonzero <= 1);
  }
  SUBCASE("leakage keeps sigma_I0^2 below sigma_S0^2") {
    const auto sc = tone_scenario(1.0, 1000.0);
    for (const auto& b : {papc_bases(code()), maximin_bases(code(), 0.3)}) {
      const auto m = analytic_cov(sc, b, signal::realize(sc));
      for (double snr : {0.01, 1.0, 1e4}) CHECK(m.sigma_i0_sq(snr) < m.sigma_s0_sq(snr));
    }
  }
}

TEST_CASE("sample covariance converges at the 1/sqrt(K) rate") {
  const auto sc = white_scenario(10.0, 100.0);
  const auto bases = maximin_bases(code(), 16.0 / 31.0);
  const auto real = signal::realize(sc);
  const auto m = analytic_cov(sc, bases, real);
  const ComplexMatrix target = m.pair(10.0).r_s;
  // average over independent streams so the ratio reflects the rate, not
  // one draw
  std::vector<double> err;
  for (int k : {1000, 10000, 100000}) {
    double acc = 0;
    const int reps = 12;
    for (int r = 0; r < reps; ++r) {
      const auto mc = simulate_point(sc, real, bases, rng::derive(5, {static_cast<std::uint64_t>(r)}), k);
      acc += linalg::max_abs(ComplexMatrix(mc.pair.r_s - target));
    }
    err.push_back(acc / reps);
  }
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double ratio = err[i] / err[i - 1];
    CHECK(ratio >= 0.25);
    CHECK(ratio <= 0.45);
  }
}

TEST_CASE("weights") {
  const ComplexVector a0 = signal::steering(0.0, {8, 0.5});
  SUBCASE("identical pair") {
    std::mt19937_64 rng(1);
    const auto r = oracle::random_hpd(8, rng);
    const auto w = solve_weights({r, r, CovKind::Analytic});
    CHECK(w.lambda_max == doctest::Approx(1));
    CHECK(w.w.norm() == doctest::Approx(1));
  }
  SUBCASE("rank-one SOI over white noise") {
    const ComplexMatrix rs = 5.0 * a0 * a0.adjoint() + ComplexMatrix::Identity(8, 8);
    const auto w = solve_weights({rs, ComplexMatrix::Identity(8, 8), CovKind::Analytic});
    CHECK(collinearity(w.w, a0) >= 1 - 1e-12);
  }
  SUBCASE("mismatch-free pair gives Q^-1 a0") {
    const auto sc = white_scenario(1.0, 1000.0);
    const auto m = analytic_cov(sc, papc_bases(code()), signal::realize(sc));
    const auto w = solve_weights(m.pair(3.0));
    const ComplexVector ref = linalg::hpd_solve(m.q_s, a0);
    CHECK(collinearity(w.w, ref) >= 1 - 1e-8);
  }
  SUBCASE("degenerate top cluster resolves toward a0") {
    // lambda = 2 on span{e1, e2}; a0-like vector has weight on e2 only
    ComplexMatrix rs = ComplexMatrix::Identity(3, 3);
    rs(0, 0) = rs(1, 1) = 2.0;
    ComplexVector a(3);
    a << 0, 1, 0.2;
    const auto w = solve_weights({rs, ComplexMatrix::Identity(3, 3), CovKind::Analytic}, a);
    CHECK(std::abs(w.w(1)) == doctest::Approx(1));
  }
}

TEST_CASE("optimal SINR") {
  const ComplexVector a0 = signal::steering(0.0, {8, 0.5});
  const ComplexMatrix q = 2.0 * ComplexMatrix::Identity(8, 8);
  CHECK(sinr_opt(q, a0, 3.0) == doctest::Approx(3.0 * 8 / 2.0));
  CHECK(sinr_opt(q, a0, 6.0) == doctest::Approx(2 * sinr_opt(q, a0, 3.0)));

  signal::Scenario sc;
  sc.soi.power = 1.0 / 31.0;  // SNR 0 dB
  const auto m = analytic_cov(sc, papc_bases(code()), signal::realize(sc));
  CHECK(sinr_opt(m.q_s, m.a0, m.sigma_s0_sq(1.0)) == doctest::Approx(8));
}

TEST_CASE("normalized SINR") {
  const auto sc = tone_scenario(10.0, 1000.0);
  const auto m = analytic_cov(sc, maximin_bases(code(), 16.0 / 31.0), signal::realize(sc));
  const ComplexVector w_opt = linalg::hpd_solve(m.q_s, m.a0);
  CHECK(measure_g_analytic(w_opt, m, 10.0) == doctest::Approx(1).epsilon(1e-12));

  ComplexVector orth = ComplexVector::Zero(8);
  orth(0) = 1.0;
  orth(1) = -1.0;  // a0 is all ones at broadside
  CHECK(measure_g_analytic(orth, m, 10.0) == doctest::Approx(0).epsilon(1e-15));

  const auto w = solve_weights(m.pair(10.0)).w;
  const double g = measure_g_analytic(w, m, 10.0);
  for (cdouble c : {cdouble(3, 0), cdouble(0, -0.01), cdouble(-7, 2)}) {
    CHECK(std::abs(measure_g_analytic(ComplexVector(c * w), m, 10.0) - g) <= 1e-12 * g);
  }
  CHECK(g <= 1.0 + 1e-12);
}

TEST_CASE("white interference: Monte Carlo G stays near 1") {
  const auto bases = maximin_bases(code(), 16.0 / 31.0);
  for (double snr_db : {-10.0, 10.0, 30.0}) {
    const double snr = std::pow(10.0, snr_db / 10);
    const auto sc = white_scenario(snr, 1000.0);
    const auto real = signal::realize(sc);
    const auto m = analytic_cov(sc, bases, real);
    const auto mc = simulate_point(sc, real, bases, 11, 20000);
    const double g = measure_g_monte_carlo(solve_weights(mc.pair).w, mc, m, snr);
    CHECK(std::abs(10 * std::log10(g)) <= 1.0);
  }
}

TEST_CASE("simulate_point is a pure function of its key") {
  const auto sc = tone_scenario(10.0, 100.0);
  const auto real = signal::realize(sc);
  const auto bases = papc_bases(code());
  const auto a = simulate_point(sc, real, bases, 42, 3000);
  const auto b = simulate_point(sc, real, bases, 42, 3000);
  const auto c = simulate_point(sc, real, bases, 43, 3000);
  CHECK((a.pair.r_s - b.pair.r_s).norm() == 0.0);
  CHECK((a.q_s_hat - b.q_s_hat).norm() == 0.0);
  CHECK((a.pair.r_s - c.pair.r_s).norm() > 0.0);
}

TEST_CASE("array pattern") {
  const signal::ArrayGeometry geo{8, 0.5};
  const auto grid = uniform_grid(-90.0, 90.0, 0.5);
  CHECK(grid.size() == 361);
  CHECK(grid.front() == -90.0);
  CHECK(grid.back() == 90.0);

  const ComplexVector w = signal::steering(0.0, geo).normalized();
  const auto p = array_pattern(w, geo, grid);
  double best = -1e300, at = 0;
  for (const auto& x : p)
    if (x.gain_db > best) best = x.gain_db, at = x.theta_deg;
  CHECK(at == 0.0);
  CHECK(best == doctest::Approx(0).epsilon(1e-12));

  ComplexVector e1 = ComplexVector::Zero(8);
  e1(0) = 1.0;
  for (const auto& x : array_pattern(e1, geo, grid)) CHECK(std::abs(x.gain_db) <= 1e-9);
}
