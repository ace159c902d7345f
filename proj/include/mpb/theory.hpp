#pragma once

// Closed-form predictions for the matrix pair beamformer: the mismatch
// metrics gamma_0..gamma_D, the operating curve with its thresholds, the
// lambda_max(G) relation and its eigenvalue bound, and the noise-free pair
// analysis that decides whether gamma_1 grows with INR.

#include <optional>
#include <vector>

#include "mpb/beamformer.hpp"
#include "mpb/linalg.hpp"

namespace mpb::theory {

using beamformer::AnalyticModel;

// (N - beta) L snr / (L beta snr + N).
double gamma0(double snr, int l, int n, double beta);

// (sigma_S0^2 - sigma_I0^2) a0^H R_I^-1 a0 with R_I built exactly.
double gamma0_exact(const AnalyticModel& model, double snr);

// Nonzero generalized eigenvalues of (Q_S - Q_I, Q_I), zero-padded to d and
// sorted descending.
RealVector gamma_spectrum(const ComplexMatrix& q_s, const ComplexMatrix& q_i, int d);

// [a0^H Q_I^-1 a0]^2 / ([a0^H Q_S^-1 a0] [a0^H Q_I^-1 Q_S Q_I^-1 a0]).
double g_upper(const ComplexMatrix& q_s, const ComplexMatrix& q_i, const ComplexVector& a0);

struct Thresholds {
  double snr_t0 = 0.0;
  double snr_t1 = 0.0;
  double snr_t2 = 0.0;
  double k0 = 0.0;
  double p_i = 0.0;
  double g_u = 1.0;
  double g_l = 1.0;
};

Thresholds thresholds(double gamma1, double beta, int n, int l, double g_u, double g_l = 1.0);

enum class Region { Failure, Threshold, Operating };

const char* region_name(Region region);

struct CurvePoint {
  double snr = 0.0;
  double g = 0.0;
  Region region = Region::Operating;
};

// Operating branch above SNR_T2, failure branch below SNR_T1, and a straight
// line in (log SNR, dB G) between the two branch end points.
CurvePoint curve_value(const Thresholds& th, double snr, double beta, int n, int l);
std::vector<CurvePoint> operating_curve(const Thresholds& th, const std::vector<double>& snr_grid, double beta,
                                        int n, int l);

// G at SNR -> 0 by direct evaluation: exact pair at `probe_snr`, exact
// weights, analytic G. Throws std::invalid_argument when the model has no
// mismatch.
double g_lower_oracle(const AnalyticModel& model, double probe_snr = 1e-6);

// Exact joint diagonalization of the mismatch at one SNR:
// T^H Phi_Delta T = Gamma, T^H (A_I^H R_I^-1 A_I)^-1 T = I, A_eps = A_I T^-H.
struct MismatchSpectrum {
  double snr = 0.0;
  double gamma0 = 0.0;        // approximate form
  double gamma0_exact = 0.0;
  RealVector gammas;          // exact, descending, length D
  double beta = 0.0;
  double delta = 0.0;
  ComplexVector psi_t;
  ComplexMatrix a_eps;
  double kappa0 = 0.0;
  double lambda_max_pred = 1.0;  // max(gamma_0, gamma_1) + 1, exact metrics
  double bound_radius = 0.0;
  bool feasible = true;
  double sigma2 = 1.0;
  int n = 0;
  int l = 0;
};

MismatchSpectrum mismatch_spectrum(const AnalyticModel& model, double snr);

struct LambdaBound {
  double prediction = 1.0;
  double radius = 0.0;
  bool feasible = true;
  double lambda_a = 0.0;
  double lambda_b = 0.0;
};

// |lambda_max - (lambda_a + 1)| <= lambda_a f(lambda_b / lambda_a).
LambdaBound lambda_max_bound(double gamma0, double gamma1, double delta);

// G as a function of lambda_max given the spectrum; throws NumericError at a
// pole lambda_max = gamma_i + 1.
double g_of_lambda(double lambda_max, const MismatchSpectrum& spectrum);

// The (D+1) x (D+1) matrix whose eigenvalues are the nontrivial generalized
// eigenvalues of (R_S, R_I).
ComplexMatrix exact_m_matrix(const AnalyticModel& model, const MismatchSpectrum& spectrum);

struct NoiseFreeAnalysis {
  ComplexMatrix y_s;   // at INR = 1
  ComplexMatrix y_i;
  double c_y0 = 0.0;
  bool has_infinite = false;
  int infinite_count = 0;
};

NoiseFreeAnalysis noise_free_pair(const AnalyticModel& model);

// range(P H_I) contains range(P h_S) with P the projector on range(S_I).
// True means gamma_1 stays bounded as INR grows.
bool boundedness_criterion(const ComplexVector& h_s, const ComplexMatrix& h_i, const ComplexMatrix& s_i);

// C_Y0 inr / sqrt(2) - 1, or nothing when sqrt(2) >= C_Y0 inr.
std::optional<double> gamma1_lower_bound(double c_y0, double inr);

struct SupplementaryReport {
  double rho0 = 0.0;
  double kappa0 = 0.0;
  double xi = 0.0;
  double a_r_a_direct = 0.0;
  double a_r_a_closed = 0.0;
  double a_r_a_lemma = 0.0;  // drops xi
  double closed_rel_error = 0.0;
  double lemma_rel_error = 0.0;
};

SupplementaryReport verify_supplementary_identities(const AnalyticModel& model, double snr);

}  // namespace mpb::theory
