#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "mpb/errors.hpp"
#include "mpb/signal_model.hpp"

using namespace mpb;
using namespace mpb::signal;

TEST_CASE("steering vectors") {
  const auto a = steering(0.0, {8, 0.5});
  CHECK(a.squaredNorm() == doctest::Approx(8));
  for (int i = 0; i < 8; ++i) CHECK(std::abs(a(i) - cdouble(1, 0)) <= 1e-15);

  const auto b = steering(30.0, {2, 0.5});
  CHECK(std::abs(b(0) - cdouble(1, 0)) <= 1e-15);
  CHECK(std::abs(b(1) - cdouble(0, 1)) <= 1e-12);

  for (double th = -89.5; th < 90; th += 7.3) CHECK(steering(th, {12, 0.37}).squaredNorm() == doctest::Approx(12));

  const auto m = steering_matrix({10.0, -20.0}, {4, 0.5});
  CHECK(m.cols() == 2);
  CHECK((m.col(1) - steering(-20.0, {4, 0.5})).norm() == 0.0);
}

TEST_CASE("Gold codes: balance, autocorrelation and distinctness") {
  for (int i = 0; i < kGoldFamilySize; ++i) {
    const auto c = gold31(i);
    REQUIRE(c.size() == kGoldLength);
    CHECK(c.cwiseAbs().minCoeff() == 1.0);
    CHECK(c.squaredNorm() == doctest::Approx(31));
  }
  CHECK((gold31(0) - gold31(1)).cwiseAbs().maxCoeff() > 0);
  CHECK_THROWS(gold31(kGoldFamilySize));
}

TEST_CASE("Gold codes: periodic cross-correlation is three-valued") {
  // brute force over every distinct pair and all 31 cyclic shifts
  const std::set<int> allowed = {-1, -9, 7};
  for (int i = 0; i < kGoldFamilySize; ++i) {
    const auto ci = gold31(i);
    for (int j = i + 1; j < kGoldFamilySize; ++j) {
      const auto cj = gold31(j);
      for (int s = 0; s < kGoldLength; ++s) {
        double acc = 0;
        for (int n = 0; n < kGoldLength; ++n) acc += ci(n) * cj((n + s) % kGoldLength);
        CHECK(allowed.count(static_cast<int>(std::lround(acc))) == 1);
      }
    }
  }
}

TEST_CASE("SOI sequence") {
  SoiSpec spec;
  const auto c0 = spec.chips();
  std::vector<int> ones(4, 1);
  const auto s = soi_sequence(spec, ones, 0, 4 * 31);
  for (int n = 0; n < 4 * 31; ++n) CHECK(s(n).real() == c0(n % 31));

  std::vector<int> bits = {-1, 1};
  const auto t = soi_sequence(spec, bits, 0, 62);
  for (int n = 0; n < 31; ++n) CHECK(t(n).real() == -c0(n));
  for (int n = 31; n < 62; ++n) CHECK(t(n).real() == c0(n - 31));

  CHECK(t.head(31).squaredNorm() == doctest::Approx(31));

  spec.delay = 5;
  const auto d = soi_sequence(spec, ones, 0, 62);
  CHECK(d(5).real() == c0(0));
  CHECK(std::abs(d(4)) == 0.0);
  CHECK(d(36).real() == c0(0));
}

namespace {

Scenario one_interferer(InterfererKind kind) {
  Scenario sc;
  sc.soi.power = 0.0;
  InterfererSpec i;
  i.kind = kind;
  i.doa_deg = 20.0;
  if (kind == InterfererKind::Tone) i.tone_offset = 100e3 / 3.1e6;
  if (kind == InterfererKind::MaiMultipath) {
    i.path_delays = {3, 5};
    i.path_doas_deg = {20.0, -10.0};
  }
  sc.interferers = {i};
  return sc;
}

}  // namespace

TEST_CASE("interferer waveforms") {
  SUBCASE("zero-offset tone is a constant phasor") {
    auto sc = one_interferer(InterfererKind::Tone);
    sc.interferers[0].tone_offset = 0.0;
    const auto r = realize(sc);
    WaveformSource src(sc, r, 9);
    rng::Generator g(1);
    const auto s = src.samples(0, 0, 200, g);
    for (int n = 0; n < 200; ++n) {
      CHECK(std::abs(s(n)) == doctest::Approx(1));
      CHECK(std::abs(s(n) - s(0)) <= 1e-12);
    }
  }
  SUBCASE("periodical noise repeats every symbol") {
    const auto sc = one_interferer(InterfererKind::PeriodicalNoise);
    const auto r = realize(sc);
    WaveformSource src(sc, r, 9);
    rng::Generator g(1);
    const auto s = src.samples(0, 0, 31 * 20, g);
    for (int n = 0; n + 31 < s.size(); ++n) CHECK(std::abs(s(n + 31) - s(n)) <= 1e-12);
  }
  SUBCASE("white BPSK chips are uncorrelated") {
    const auto sc = one_interferer(InterfererKind::BpskWhite);
    const auto r = realize(sc);
    WaveformSource src(sc, r, 9);
    rng::Generator g(1);
    const int count = 100000;
    const auto s = src.samples(0, 0, count, g);
    for (int lag = 1; lag <= 3; ++lag) {
      cdouble acc = 0;
      for (int n = 0; n + lag < count; ++n) acc += s(n + lag) * std::conj(s(n));
      CHECK(std::abs(acc) / count <= 3.0 / std::sqrt(static_cast<double>(count)));
    }
  }
  SUBCASE("every kind has unit average power") {
    for (auto kind : {InterfererKind::BpskWhite, InterfererKind::Tone, InterfererKind::PeriodicalNoise,
                      InterfererKind::MaiMultipath}) {
      const auto sc = one_interferer(kind);
      const auto r = realize(sc);
      WaveformSource src(sc, r, 9);
      rng::Generator g(2);
      for (int p = 0; p < src.path_count(); ++p) {
        const auto s = src.samples(p, 0, 100000, g);
        const double power = s.squaredNorm() / static_cast<double>(s.size());
        CHECK(power >= 0.98);
        CHECK(power <= 1.02);
      }
    }
  }
}

TEST_CASE("MAI paths split the power equally by default") {
  const auto sc = one_interferer(InterfererKind::MaiMultipath);
  const auto paths = expand_paths(sc);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].power == doctest::Approx(0.5));
  CHECK(paths[1].delay == 5);
  CHECK(interference_steering(sc).cols() == 2);
}

TEST_CASE("synth_blocks") {
  SUBCASE("noise-free SOI only") {
    Scenario sc;
    sc.noise_var = 1e-30;
    sc.soi.power = 2.0;
    sc.symbols = 3;
    const auto data = synth_blocks(sc);
    REQUIRE(data.blocks.size() == 3);
    const auto a0 = steering(0.0, sc.geometry);
    const Eigen::VectorXd c0 = sc.soi.chips();
    for (const auto& x : data.blocks) {
      // each block is +-sqrt(P0) a0 c0^T
      const ComplexMatrix ref = std::sqrt(2.0) * a0 * c0.cast<cdouble>().transpose();
      const double err = std::min((x - ref).cwiseAbs().maxCoeff(), (x + ref).cwiseAbs().maxCoeff());
      CHECK(err <= 1e-12);
    }
  }
  SUBCASE("noise variance") {
    Scenario sc;
    sc.soi.power = 0.0;
    sc.noise_var = 2.5;
    sc.symbols = 404;  // 404 * 8 * 31 = 100192 entries
    const auto data = synth_blocks(sc);
    double acc = 0;
    long count = 0;
    for (const auto& x : data.blocks) {
      acc += x.squaredNorm();
      count += x.size();
    }
    CHECK(acc / static_cast<double>(count) == doctest::Approx(2.5).epsilon(0.02));
  }
  SUBCASE("same seed gives identical blocks") {
    auto sc = one_interferer(InterfererKind::Tone);
    sc.symbols = 10;
    const auto a = synth_blocks(sc);
    const auto b = synth_blocks(sc);
    for (std::size_t k = 0; k < a.blocks.size(); ++k) CHECK((a.blocks[k] - b.blocks[k]).norm() == 0.0);
    sc.seed = 2;
    const auto c = synth_blocks(sc);
    CHECK((a.blocks[0] - c.blocks[0]).norm() > 0.0);
  }
}

TEST_CASE("scenario validation") {
  Scenario sc;
  sc.noise_var = -1.0;
  CHECK_THROWS_AS(sc.validate(), ConfigError);
  Scenario bad = one_interferer(InterfererKind::MaiMultipath);
  bad.interferers[0].path_doas_deg.pop_back();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
