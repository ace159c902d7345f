#pragma once

// The matrix pair beamformer: projection bases, channel snapshots, sample
// and analytic covariance pairs, weights, normalized output SINR, patterns.

#include <cstdint>
#include <optional>
#include <vector>

#include "mpb/linalg.hpp"
#include "mpb/signal_model.hpp"

namespace mpb::beamformer {

enum class Scheme { Papc, Maximin, Custom };

const char* scheme_name(Scheme scheme);

struct ProjectionBases {
  ComplexVector h_s;  // c0 / sqrt(N)
  ComplexMatrix h_i;  // N x r_I, orthonormal columns
  Scheme scheme = Scheme::Custom;

  [[nodiscard]] int rank() const { return static_cast<int>(h_i.cols()); }
  [[nodiscard]] int length() const { return static_cast<int>(h_s.size()); }
};

// H_I = e_m.
ProjectionBases papc_bases(const Eigen::VectorXd& c0, int position = 0);
// H_I = c0 .* exp(j 2 pi f n) / sqrt(N).
ProjectionBases maximin_bases(const Eigen::VectorXd& c0, double f_mf);
// H_I supplied by the caller; must already be orthonormal.
ProjectionBases custom_bases(const Eigen::VectorXd& c0, const ComplexMatrix& h_i);

// Throws ConfigError when ||h_S|| != 1, H_I is not orthonormal, or H_I
// spans h_S.
void check_bases(const ProjectionBases& bases);

// beta = ||H_I^H c0||^2 / r_I.
double leakage_ratio(const ProjectionBases& bases, const Eigen::VectorXd& c0);

struct Snapshots {
  std::vector<ComplexVector> x_s;  // X(k) h_S^*
  std::vector<ComplexMatrix> x_i;  // X(k) H_I^*
};

Snapshots snapshots(const signal::BlockData& data, const ProjectionBases& bases);

enum class CovKind { Sample, Analytic };

struct CovariancePair {
  ComplexMatrix r_s;
  ComplexMatrix r_i;
  CovKind kind = CovKind::Sample;
};

// Running sums of x_S x_S^H and X_I X_I^H.
class CovAccumulator {
 public:
  CovAccumulator(int elements, int rank);
  void add(const ComplexVector& x_s, const ComplexMatrix& x_i);
  void add_signal(const ComplexVector& x_s);
  void merge(const CovAccumulator& other);
  [[nodiscard]] std::int64_t count() const { return count_; }
  [[nodiscard]] CovariancePair finish() const;
  [[nodiscard]] ComplexMatrix signal_covariance() const;

 private:
  ComplexMatrix s_;
  ComplexMatrix i_;
  int rank_;
  std::int64_t count_ = 0;
};

CovariancePair estimate_cov_pair(const Snapshots& snaps);

// Exact second-order model of both channels. Phi_S, Phi_I are the absolute
// D x D interference moments (Phi = sigma^2 INR Phi_0); the SOI terms
// depend on SNR and are added by pair().
struct AnalyticModel {
  ComplexVector a0;
  ComplexMatrix a_i;
  ComplexMatrix phi_s;
  ComplexMatrix phi_i;
  ComplexMatrix phi_s0;
  ComplexMatrix phi_i0;
  RealVector omega;
  ComplexMatrix q_s;
  ComplexMatrix q_i;
  double sigma2 = 1.0;
  double inr = 0.0;
  double beta = 0.0;
  int n = 0;
  int l = 0;
  int r_i = 1;

  [[nodiscard]] int d() const { return static_cast<int>(a_i.cols()); }
  [[nodiscard]] double sigma_s0_sq(double snr) const { return snr * sigma2; }
  [[nodiscard]] double sigma_i0_sq(double snr) const { return beta * snr * sigma2 / n; }
  [[nodiscard]] CovariancePair pair(double snr) const;
};

// D x D matrix E{(S_I^T h^*)(S_I^T h^*)^H} for a unit vector h, before power
// scaling. White chips contribute the identity, periodic waveforms their
// one-period projection, MAI paths the exact expectation over data bits.
ComplexMatrix interference_moment(const signal::Scenario& scenario, const signal::Realization& realization,
                                  const ComplexVector& h);

// One-period waveform matrix S_I (N x D) for periodic interferers; empty
// when some interferer is not periodic.
std::optional<ComplexMatrix> periodic_waveforms(const signal::Scenario& scenario,
                                                const signal::Realization& realization);

// `inr` is the reference INR (linear); 0 selects the strongest interferer.
AnalyticModel analytic_cov(const signal::Scenario& scenario, const ProjectionBases& bases,
                           const signal::Realization& realization, double inr = 0.0);

struct BeamWeights {
  ComplexVector w;
  double lambda_max = 0.0;
};

// Dominant generalized eigenvector of (R_S, R_I), unit norm. With a0 the
// tie within a 1e-8 relative cluster at lambda_max goes to the largest
// |w^H a0|.
BeamWeights solve_weights(const CovariancePair& pair);
BeamWeights solve_weights(const CovariancePair& pair, const ComplexVector& a0);

double sinr_opt(const ComplexMatrix& q_s, const ComplexVector& a0, double sigma_s0_sq);

// sigma_S0^2 |w^H a0|^2 / (w^H Q w) / SINR_opt, where Q is the
// interference-plus-noise covariance the output actually sees (analytic or
// estimated) and SINR_opt always uses the analytic Q_S.
double normalized_sinr(const ComplexVector& w, const ComplexVector& a0, double sigma_s0_sq,
                       const ComplexMatrix& q_seen, const ComplexMatrix& q_s);

double measure_g_analytic(const ComplexVector& w, const AnalyticModel& model, double snr);

struct MonteCarloPoint {
  CovariancePair pair;      // from the full data stream
  ComplexMatrix q_s_hat;    // interference-plus-noise only, independent stream
};

// Projected-snapshot simulation of K symbols: the SOI, each interferer path
// and the noise are pushed through h_S and H_I symbol by symbol without
// forming X(k). Noise enters as correlated Gaussian channel samples with
// covariance sigma^2 (B^H B)^*, B = [h_S^*, H_I^*].
MonteCarloPoint simulate_point(const signal::Scenario& scenario, const signal::Realization& realization,
                               const ProjectionBases& bases, std::uint64_t point_key, int symbols);

double measure_g_monte_carlo(const ComplexVector& w, const MonteCarloPoint& point, const AnalyticModel& model,
                             double snr);

struct PatternPoint {
  double theta_deg;
  double gain_db;
};

std::vector<PatternPoint> array_pattern(const ComplexVector& w, const signal::ArrayGeometry& geometry,
                                        const std::vector<double>& theta_grid_deg);

std::vector<double> uniform_grid(double start, double stop, double step);

}  // namespace mpb::beamformer
