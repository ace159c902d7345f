#include "mpb/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mpb/errors.hpp"

namespace mpb::signal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

// Degree-5 m-sequence from a(n+5) = sum of taps, register seeded 00001.
std::vector<int> msequence(const std::vector<int>& taps) {
  std::vector<int> a(kGoldLength + 5, 0);
  a[4] = 1;
  for (int n = 0; n + 5 < static_cast<int>(a.size()); ++n) {
    int s = 0;
    for (int t : taps) s ^= a[n + t];
    a[n + 5] = s;
  }
  a.resize(kGoldLength);
  return a;
}

}  // namespace

ComplexVector steering(double doa_deg, const ArrayGeometry& geometry) {
  if (!(std::abs(doa_deg) < 90.0)) {
    throw ConfigError("steering: DOA must lie strictly inside (-90, 90) degrees, got " + std::to_string(doa_deg));
  }
  const double phase = kTwoPi * geometry.spacing * std::sin(doa_deg * std::numbers::pi / 180.0);
  ComplexVector a(geometry.elements);
  for (int l = 0; l < geometry.elements; ++l) a(l) = std::polar(1.0, phase * l);
  return a;
}

ComplexMatrix steering_matrix(const std::vector<double>& doas_deg, const ArrayGeometry& geometry) {
  ComplexMatrix a(geometry.elements, static_cast<Eigen::Index>(doas_deg.size()));
  for (std::size_t i = 0; i < doas_deg.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = steering(doas_deg[i], geometry);
  return a;
}

Eigen::VectorXd gold31(int index) {
  if (index < 0 || index >= kGoldFamilySize) {
    throw std::out_of_range("gold31: index must be in [0, 33), got " + std::to_string(index));
  }
  static const std::vector<int> u = msequence({0, 2});
  static const std::vector<int> v = msequence({0, 2, 3, 4});
  Eigen::VectorXd out(kGoldLength);
  for (int n = 0; n < kGoldLength; ++n) {
    int chip;
    if (index == 31) {
      chip = u[n];
    } else if (index == 32) {
      chip = v[n];
    } else {
      chip = u[n] ^ v[(n + index) % kGoldLength];
    }
    out(n) = chip ? -1.0 : 1.0;
  }
  return out;
}

Eigen::VectorXd SoiSpec::chips() const {
  if (code.size() > 0) return code;
  if (processing_gain != kGoldLength) {
    throw ConfigError("soi: an explicit code is required when processing_gain != 31");
  }
  return gold31(code_index);
}

const char* kind_name(InterfererKind kind) {
  switch (kind) {
    case InterfererKind::BpskWhite: return "bpsk";
    case InterfererKind::Tone: return "tone";
    case InterfererKind::PeriodicalNoise: return "periodical_noise";
    case InterfererKind::MaiMultipath: return "mai";
  }
  return "unknown";
}

void Scenario::validate() const {
  if (geometry.elements < 2) throw ConfigError("array.elements must be >= 2");
  if (!(geometry.spacing > 0)) throw ConfigError("array.spacing must be > 0");
  if (soi.processing_gain < 2) throw ConfigError("soi.processing_gain must be >= 2");
  const Eigen::VectorXd c0 = soi.chips();
  if (c0.size() != soi.processing_gain) throw ConfigError("soi.code length must equal processing_gain");
  for (Eigen::Index n = 0; n < c0.size(); ++n) {
    if (std::abs(std::abs(c0(n)) - 1.0) > 1e-12) throw ConfigError("soi.code entries must be +-1");
  }
  if (soi.delay < 0 || soi.delay >= soi.processing_gain) throw ConfigError("soi.delay must be in [0, N)");
  if (!(std::abs(soi.doa_deg) < 90.0)) throw ConfigError("soi.doa_deg must lie in (-90, 90)");
  if (!(soi.power >= 0)) throw ConfigError("soi.power must be >= 0");
  if (!(noise_var > 0)) throw ConfigError("noise_var must be > 0");
  if (symbols < 1) throw ConfigError("symbols must be >= 1");
  for (std::size_t i = 0; i < interferers.size(); ++i) {
    const auto& s = interferers[i];
    const std::string tag = "interferers[" + std::to_string(i) + "]";
    if (!(s.power > 0)) throw ConfigError(tag + ".power must be > 0");
    if (s.kind == InterfererKind::MaiMultipath) {
      if (s.path_delays.empty() || s.path_delays.size() != s.path_doas_deg.size()) {
        throw ConfigError(tag + ": MAI needs matching path_delays and path_doas_deg");
      }
      if (!s.path_gains.empty() && s.path_gains.size() != s.path_delays.size()) {
        throw ConfigError(tag + ": path_gains length must match path_delays");
      }
      for (int d : s.path_delays) {
        if (d < 0 || d >= soi.processing_gain) throw ConfigError(tag + ": MAI delays must be in [0, N)");
      }
      for (double g : s.path_gains) {
        if (!(g > 0)) throw ConfigError(tag + ": path_gains must be > 0");
      }
      for (double doa : s.path_doas_deg) {
        if (!(std::abs(doa) < 90.0)) throw ConfigError(tag + ": path DOAs must lie in (-90, 90)");
      }
      if (s.mai_code_index < 0 || s.mai_code_index >= kGoldFamilySize) {
        throw ConfigError(tag + ".code_index out of range");
      }
    } else if (!(std::abs(s.doa_deg) < 90.0)) {
      throw ConfigError(tag + ".doa_deg must lie in (-90, 90)");
    }
  }
}

std::vector<Path> expand_paths(const Scenario& scenario) {
  std::vector<Path> paths;
  for (std::size_t i = 0; i < scenario.interferers.size(); ++i) {
    const auto& s = scenario.interferers[i];
    const int src = static_cast<int>(i);
    if (s.kind != InterfererKind::MaiMultipath) {
      paths.push_back({src, s.doa_deg, s.power, 0});
      continue;
    }
    const std::size_t n = s.path_delays.size();
    double total = 0.0;
    for (std::size_t p = 0; p < n; ++p) total += s.path_gains.empty() ? 1.0 : s.path_gains[p];
    for (std::size_t p = 0; p < n; ++p) {
      const double g = s.path_gains.empty() ? 1.0 : s.path_gains[p];
      paths.push_back({src, s.path_doas_deg[p], s.power * g / total, s.path_delays[p]});
    }
  }
  return paths;
}

ComplexMatrix interference_steering(const Scenario& scenario) {
  const auto paths = expand_paths(scenario);
  std::vector<double> doas;
  doas.reserve(paths.size());
  for (const auto& p : paths) doas.push_back(p.doa_deg);
  return steering_matrix(doas, scenario.geometry);
}

Realization realize(const Scenario& scenario) {
  const int n = scenario.soi.processing_gain;
  Realization r;
  const std::size_t count = scenario.interferers.size();
  r.tone_phase.assign(count, 0.0);
  r.segment.assign(count, ComplexVector());
  r.mai_code.assign(count, Eigen::VectorXd());
  for (std::size_t i = 0; i < count; ++i) {
    const auto& s = scenario.interferers[i];
    rng::Generator gen(rng::derive(scenario.seed, {rng::kRealization, i}));
    switch (s.kind) {
      case InterfererKind::Tone:
        r.tone_phase[i] = kTwoPi * gen.uniform();
        break;
      case InterfererKind::PeriodicalNoise: {
        ComplexVector seg(n);
        for (int m = 0; m < n; ++m) seg(m) = gen.cnormal();
        // exact unit power per period, so the tiled waveform has unit power
        seg *= std::sqrt(static_cast<double>(n)) / seg.norm();
        r.segment[i] = seg;
        break;
      }
      case InterfererKind::MaiMultipath:
        r.mai_code[i] = gold31(s.mai_code_index);
        break;
      case InterfererKind::BpskWhite:
        break;
    }
  }
  return r;
}

WaveformSource::WaveformSource(const Scenario& scenario, const Realization& realization, std::uint64_t stream_key)
    : scenario_(&scenario),
      realization_(&realization),
      paths_(expand_paths(scenario)),
      n_(scenario.soi.processing_gain) {
  mai_keys_.resize(scenario.interferers.size());
  for (std::size_t i = 0; i < mai_keys_.size(); ++i) mai_keys_[i] = rng::derive(stream_key, {rng::kMaiBits, i});
}

bool WaveformSource::is_random(int path) const {
  const auto kind = scenario_->interferers[static_cast<std::size_t>(paths_[static_cast<std::size_t>(path)].source)].kind;
  return kind == InterfererKind::BpskWhite || kind == InterfererKind::MaiMultipath;
}

double WaveformSource::symbol_rate(int path) const {
  const auto& spec = scenario_->interferers[static_cast<std::size_t>(paths_[static_cast<std::size_t>(path)].source)];
  if (spec.kind != InterfererKind::Tone) return 0.0;
  const double r = spec.tone_offset * n_;
  return r - std::floor(r);
}

std::complex<double> WaveformSource::sample(int path, std::int64_t t, rng::Generator& gen) const {
  const Path& p = paths_[static_cast<std::size_t>(path)];
  const auto src = static_cast<std::size_t>(p.source);
  const auto& spec = scenario_->interferers[src];
  switch (spec.kind) {
    case InterfererKind::BpskWhite:
      return {static_cast<double>(gen.sign()), 0.0};
    case InterfererKind::Tone: {
      double cycles = spec.tone_offset * static_cast<double>(t);
      cycles -= std::floor(cycles);
      return std::polar(1.0, kTwoPi * cycles + realization_->tone_phase[src]);
    }
    case InterfererKind::PeriodicalNoise:
      return realization_->segment[src](floor_mod(t, n_));
    case InterfererKind::MaiMultipath: {
      const std::int64_t u = t - p.delay;
      const std::int64_t j = floor_div(u, n_);
      const double bit = rng::sign_bit(mai_keys_[src], static_cast<std::uint64_t>(j));
      return {bit * realization_->mai_code[src](floor_mod(u, n_)), 0.0};
    }
  }
  return {};
}

void WaveformSource::window(std::int64_t k, rng::Generator& gen, ComplexMatrix& out) const {
  out.resize(n_, path_count());
  const std::int64_t t0 = k * n_ + scenario_->soi.delay;
  for (int p = 0; p < path_count(); ++p)
    for (int m = 0; m < n_; ++m) out(m, p) = sample(p, t0 + m, gen);
}

ComplexVector WaveformSource::samples(int path, std::int64_t start, int count, rng::Generator& gen) const {
  ComplexVector out(count);
  for (int i = 0; i < count; ++i) out(i) = sample(path, start + i, gen);
  return out;
}

int soi_bit(std::uint64_t key, std::int64_t k) { return rng::sign_bit(key, static_cast<std::uint64_t>(k)); }

ComplexVector soi_sequence(const SoiSpec& spec, const std::vector<int>& bits, std::int64_t start, int count) {
  const Eigen::VectorXd c0 = spec.chips();
  const std::int64_t n = spec.processing_gain;
  ComplexVector out = ComplexVector::Zero(count);
  for (int i = 0; i < count; ++i) {
    const std::int64_t u = start + i - spec.delay;
    const std::int64_t k = floor_div(u, n);
    if (k < 0 || k >= static_cast<std::int64_t>(bits.size())) continue;
    out(i) = bits[static_cast<std::size_t>(k)] * c0(floor_mod(u, n));
  }
  return out;
}

BlockData synth_blocks(const Scenario& scenario) { return synth_blocks(scenario, realize(scenario)); }

BlockData synth_blocks(const Scenario& scenario, const Realization& realization) {
  scenario.validate();
  const int l = scenario.geometry.elements;
  const int n = scenario.soi.processing_gain;
  const ComplexVector a0 = steering(scenario.soi.doa_deg, scenario.geometry);
  const ComplexMatrix ai = interference_steering(scenario);
  const Eigen::VectorXd c0 = scenario.soi.chips();
  const std::uint64_t stream = rng::derive(scenario.seed, {rng::kData});
  const std::uint64_t bit_key = rng::derive(stream, {rng::kSoiBits});
  WaveformSource source(scenario, realization, stream);

  Eigen::VectorXd amp(source.path_count());
  for (int p = 0; p < source.path_count(); ++p) amp(p) = std::sqrt(source.paths()[static_cast<std::size_t>(p)].power);
  const ComplexMatrix scaled_ai = ai * amp.cast<cdouble>().asDiagonal();
  const ComplexVector soi_row = c0.cast<cdouble>();

  BlockData out;
  out.blocks.resize(static_cast<std::size_t>(scenario.symbols));
  rng::Generator gen(rng::derive(stream, {0}));
  ComplexMatrix window;
  for (int k = 0; k < scenario.symbols; ++k) {
    ComplexMatrix x(l, n);
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < l; ++i) x(i, m) = gen.cnormal(scenario.noise_var);
    const double b0 = soi_bit(bit_key, k);
    x += (std::sqrt(scenario.soi.power) * b0) * a0 * soi_row.transpose();
    if (source.path_count() > 0) {
      source.window(k, gen, window);
      x += scaled_ai * window.transpose();
    }
    out.blocks[static_cast<std::size_t>(k)] = std::move(x);
  }
  return out;
}

}  // namespace mpb::signal
