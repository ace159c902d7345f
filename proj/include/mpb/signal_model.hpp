#pragma once

// Array data synthesis: steering vectors, Gold codes, the SOI pulse train,
// interferer waveforms and blocked snapshots X(k).

#include <cstdint>
#include <vector>

#include "mpb/linalg.hpp"
#include "mpb/rng.hpp"

namespace mpb::signal {

struct ArrayGeometry {
  int elements = 8;
  double spacing = 0.5;  // wavelengths
};

// a[l] = exp(j 2 pi d l sin(theta)), ||a||^2 = L.
ComplexVector steering(double doa_deg, const ArrayGeometry& geometry);
ComplexMatrix steering_matrix(const std::vector<double>& doas_deg, const ArrayGeometry& geometry);

constexpr int kGoldLength = 31;
constexpr int kGoldFamilySize = 33;

// Gold family from the preferred pair x^5+x^2+1, x^5+x^4+x^3+x^2+1, chips
// mapped 0 -> +1, 1 -> -1. Indices 0..30 are u xor (v shifted by index),
// 31 is u, 32 is v.
Eigen::VectorXd gold31(int index);

struct SoiSpec {
  int processing_gain = kGoldLength;
  int code_index = 0;
  Eigen::VectorXd code;  // empty: gold31(code_index)
  int delay = 0;         // n0, chips
  double doa_deg = 0.0;
  double power = 1.0;    // P0

  [[nodiscard]] Eigen::VectorXd chips() const;
};

enum class InterfererKind { BpskWhite, Tone, PeriodicalNoise, MaiMultipath };

const char* kind_name(InterfererKind kind);

struct InterfererSpec {
  InterfererKind kind = InterfererKind::BpskWhite;
  double doa_deg = 0.0;
  double power = 1.0;         // linear; total over paths for MAI
  double tone_offset = 0.0;   // cycles per chip
  int mai_code_index = 1;
  std::vector<int> path_delays;       // chips, MAI only
  std::vector<double> path_doas_deg;  // MAI only
  std::vector<double> path_gains;     // power fractions; empty means equal split
};

struct Scenario {
  ArrayGeometry geometry;
  SoiSpec soi;
  std::vector<InterfererSpec> interferers;
  double noise_var = 1.0;
  int symbols = 1000;
  std::uint64_t seed = 1;

  // Throws ConfigError on inconsistent fields.
  void validate() const;
};

// One directional component of the interference, i.e. one column of A_I.
struct Path {
  int source = 0;  // index into Scenario::interferers
  double doa_deg = 0.0;
  double power = 0.0;
  int delay = 0;
};

std::vector<Path> expand_paths(const Scenario& scenario);
ComplexMatrix interference_steering(const Scenario& scenario);

// Random quantities drawn once per trial: tone phases, periodical-noise
// segments and the MAI users' codes.
struct Realization {
  std::vector<double> tone_phase;
  std::vector<ComplexVector> segment;
  std::vector<Eigen::VectorXd> mai_code;
};

Realization realize(const Scenario& scenario);

// Produces the unit-power interferer samples s_p(t) for every path.
// White chips are taken from the caller's generator; MAI data bits are
// addressed by symbol index through `stream_key`.
class WaveformSource {
 public:
  WaveformSource(const Scenario& scenario, const Realization& realization, std::uint64_t stream_key);

  [[nodiscard]] int path_count() const { return static_cast<int>(paths_.size()); }
  [[nodiscard]] const std::vector<Path>& paths() const { return paths_; }

  // True when the path's window differs from symbol to symbol by more than
  // a phase factor.
  [[nodiscard]] bool is_random(int path) const;

  // Column p of `out` (N x P) receives s_p(kN + n0 + m), m = 0..N-1.
  void window(std::int64_t k, rng::Generator& gen, ComplexMatrix& out) const;

  // Samples of one path over absolute times [start, start + count).
  [[nodiscard]] ComplexVector samples(int path, std::int64_t start, int count, rng::Generator& gen) const;

  [[nodiscard]] std::complex<double> sample(int path, std::int64_t t, rng::Generator& gen) const;

  // Per-symbol phase advance (cycles) of a periodic path: s_p(k) = e^{j 2 pi k rate} s_p(0).
  [[nodiscard]] double symbol_rate(int path) const;

 private:
  const Scenario* scenario_;
  const Realization* realization_;
  std::vector<Path> paths_;
  std::vector<std::uint64_t> mai_keys_;
  int n_;
};

// s0(t) = sum_k b0(k) c0(t - kN - n0) over [start, start + count), unscaled.
ComplexVector soi_sequence(const SoiSpec& spec, const std::vector<int>& bits, std::int64_t start, int count);

int soi_bit(std::uint64_t key, std::int64_t k);

struct BlockData {
  std::vector<ComplexMatrix> blocks;  // X(k), L x N
};

// X(k) = sqrt(P0) b0(k) a0 c0^T + sum_p sqrt(P_p) a_p s_p(k)^T + V(k).
BlockData synth_blocks(const Scenario& scenario);
BlockData synth_blocks(const Scenario& scenario, const Realization& realization);

}  // namespace mpb::signal
