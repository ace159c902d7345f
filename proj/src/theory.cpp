#include "mpb/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mpb/errors.hpp"

namespace mpb::theory {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double positive(double x) { return std::max(x, 0.0); }

double quad_inv(const ComplexMatrix& q, const ComplexVector& a) {
  return a.dot(linalg::hpd_solve(q, a)).real();
}

double to_db(double x) { return 10.0 * std::log10(x); }

double operating_branch(const Thresholds& th, double snr) {
  if (th.snr_t0 == 0.0 || th.p_i == 0.0) return th.g_u;
  const double r = 1.0 - th.snr_t0 / snr;
  if (r == 0.0) return 0.0;
  return (th.p_i + 1.0) / (th.p_i / (r * r) + 1.0) * th.g_u;
}

double failure_branch(const Thresholds& th, double snr, double beta, int n, int l) {
  const double ratio = std::isinf(th.snr_t0) ? 0.0 : snr / th.snr_t0;
  const double den = 1.0 - ratio + th.k0 * (l * beta * snr / n + 1.0);
  const double v = (1.0 + th.k0) / den;
  return v * v * th.g_l;
}

}  // namespace

double gamma0(double snr, int l, int n, double beta) {
  if (!(beta >= 0.0 && beta < n)) throw std::invalid_argument("gamma0: beta must lie in [0, N)");
  if (snr < 0.0) throw std::invalid_argument("gamma0: snr must be non-negative");
  return (n - beta) * l * snr / (l * beta * snr + n);
}

double gamma0_exact(const AnalyticModel& model, double snr) {
  const auto pair = model.pair(snr);
  return (model.sigma_s0_sq(snr) - model.sigma_i0_sq(snr)) * quad_inv(pair.r_i, model.a0);
}

RealVector gamma_spectrum(const ComplexMatrix& q_s, const ComplexMatrix& q_i, int d) {
  if (d < 0) throw std::invalid_argument("gamma_spectrum: negative count");
  const auto eig = linalg::gen_eig_hpd(ComplexMatrix(q_s - q_i), q_i);
  const double scale = std::max(1.0, linalg::max_abs(eig.values));
  std::vector<double> nonzero;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (std::abs(eig.values(i)) > 1e-8 * scale) nonzero.push_back(eig.values(i));
  }
  // keep the d largest in magnitude if rounding produced extras
  std::sort(nonzero.begin(), nonzero.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  if (static_cast<int>(nonzero.size()) > d) nonzero.resize(static_cast<std::size_t>(d));
  nonzero.resize(static_cast<std::size_t>(d), 0.0);
  std::sort(nonzero.begin(), nonzero.end(), std::greater<>());
  return Eigen::Map<RealVector>(nonzero.data(), d);
}

double g_upper(const ComplexMatrix& q_s, const ComplexMatrix& q_i, const ComplexVector& a0) {
  const ComplexVector qi_a = linalg::hpd_solve(q_i, a0);
  const double num = a0.dot(qi_a).real();
  const double den_s = quad_inv(q_s, a0);
  const double den_c = qi_a.dot(q_s * qi_a).real();
  if (!(num > 0 && den_s > 0 && den_c > 0)) throw NumericError("g_upper: non-positive quadratic form");
  return num * num / (den_s * den_c);
}

Thresholds thresholds(double gamma1, double beta, int n, int l, double g_u, double g_l) {
  if (!std::isfinite(gamma1)) throw std::invalid_argument("thresholds: gamma1 must be finite");
  if (!(g_u > 0.0 && g_u <= 1.0 + 1e-12)) throw std::invalid_argument("thresholds: G_U must lie in (0, 1]");
  Thresholds th;
  th.g_u = std::min(g_u, 1.0);
  th.g_l = g_l;
  th.p_i = positive(1.0 / th.g_u - 1.0);

  if (gamma1 <= 0.0) {
    th.snr_t0 = 0.0;
  } else {
    const double den = positive((n - beta) / gamma1 - beta);
    th.snr_t0 = den == 0.0 ? kInf : (static_cast<double>(n) / l) / den;
  }
  th.snr_t1 = (1.0 - std::sqrt(0.5)) * th.snr_t0;
  th.snr_t2 = th.snr_t0 / (1.0 - std::sqrt(th.p_i / (2.0 * th.p_i + 1.0)));

  th.k0 = 0.0;
  if (beta > 0.0) {
    const double excess = positive(gamma1 - (n - beta) / beta);
    if (excess > 0.0) {
      const double lead = std::isinf(th.snr_t0) ? 0.0 : (static_cast<double>(n) / l) / th.snr_t0;
      th.k0 = (beta + lead) / (n - beta) * excess;
    }
  }
  return th;
}

const char* region_name(Region region) {
  switch (region) {
    case Region::Failure: return "failure";
    case Region::Threshold: return "threshold";
    case Region::Operating: return "operating";
  }
  return "unknown";
}

CurvePoint curve_value(const Thresholds& th, double snr, double beta, int n, int l) {
  if (!(snr > 0.0)) throw std::invalid_argument("curve_value: snr must be positive");
  CurvePoint p;
  p.snr = snr;
  if (snr > th.snr_t2) {
    p.region = Region::Operating;
    p.g = operating_branch(th, snr);
  } else if (snr < th.snr_t1) {
    p.region = Region::Failure;
    p.g = failure_branch(th, snr, beta, n, l);
  } else {
    p.region = Region::Threshold;
    const double g1 = to_db(failure_branch(th, th.snr_t1, beta, n, l));
    const double g2 = to_db(operating_branch(th, th.snr_t2));
    const double x1 = std::log10(th.snr_t1);
    const double x2 = std::log10(th.snr_t2);
    const double t = x2 > x1 ? (std::log10(snr) - x1) / (x2 - x1) : 1.0;
    p.g = std::pow(10.0, (g1 + t * (g2 - g1)) / 10.0);
  }
  return p;
}

std::vector<CurvePoint> operating_curve(const Thresholds& th, const std::vector<double>& snr_grid, double beta,
                                        int n, int l) {
  if (snr_grid.empty()) throw std::invalid_argument("operating_curve: empty grid");
  std::vector<CurvePoint> out;
  out.reserve(snr_grid.size());
  for (double s : snr_grid) out.push_back(curve_value(th, s, beta, n, l));
  return out;
}

double g_lower_oracle(const AnalyticModel& model, double probe_snr) {
  if (model.d() == 0) throw std::invalid_argument("g_lower_oracle: no interference, G_L undefined");
  const RealVector g = gamma_spectrum(model.q_s, model.q_i, model.d());
  if (!(g(0) > 0.0)) throw std::invalid_argument("g_lower_oracle: gamma1 = 0, G_L undefined");
  const auto pair = model.pair(probe_snr);
  const auto w = beamformer::solve_weights(pair, model.a0);
  return beamformer::measure_g_analytic(w.w, model, probe_snr);
}

MismatchSpectrum mismatch_spectrum(const AnalyticModel& model, double snr) {
  MismatchSpectrum s;
  s.snr = snr;
  s.beta = model.beta;
  s.sigma2 = model.sigma2;
  s.n = model.n;
  s.l = model.l;
  s.gamma0 = gamma0(snr, model.l, model.n, model.beta);

  const auto pair = model.pair(snr);
  const ComplexVector ri_a0 = linalg::hpd_solve(pair.r_i, model.a0);
  s.gamma0_exact = (model.sigma_s0_sq(snr) - model.sigma_i0_sq(snr)) * model.a0.dot(ri_a0).real();

  const int d = model.d();
  if (d == 0) {
    s.gammas = RealVector(0);
    s.psi_t = ComplexVector(0);
    s.a_eps = ComplexMatrix(model.l, 0);
  } else {
    const ComplexMatrix ri_a = linalg::hpd_solve(pair.r_i, model.a_i);
    const ComplexMatrix z = linalg::hermitian_part(ComplexMatrix(model.a_i.adjoint() * ri_a));
    const ComplexMatrix w =
        linalg::hermitian_part(linalg::hpd_solve(z, ComplexMatrix(ComplexMatrix::Identity(d, d))));
    const ComplexMatrix phi_delta = linalg::hermitian_part(ComplexMatrix(model.phi_s - model.phi_i));
    const auto sd = linalg::simultaneous_diag(phi_delta, w);
    s.gammas = sd.gamma;
    // T^H W T = I gives T^-H = W T.
    s.a_eps = model.a_i * (w * sd.t);
    const double c = model.l * model.beta * snr / model.n + 1.0;
    s.psi_t = c * (s.a_eps.adjoint() * ri_a0);
    s.delta = (model.sigma2 / model.l) * std::norm(s.psi_t(0)) / c;
  }
  s.kappa0 = verify_supplementary_identities(model, snr).kappa0;

  const double g1 = d > 0 ? s.gammas(0) : 0.0;
  const auto bound = lambda_max_bound(s.gamma0_exact, std::max(g1, 0.0), s.delta);
  s.lambda_max_pred = bound.prediction;
  s.bound_radius = bound.radius;
  s.feasible = bound.feasible;
  return s;
}

LambdaBound lambda_max_bound(double gamma0, double gamma1, double delta) {
  LambdaBound b;
  b.lambda_a = std::max(gamma0, gamma1);
  b.lambda_b = std::min(gamma0, gamma1);
  b.prediction = b.lambda_a + 1.0;
  if (b.lambda_a <= 0.0) {
    b.radius = 0.0;
    b.feasible = true;
    return b;
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    b.feasible = false;
    b.radius = kInf;
    return b;
  }
  const double x = b.lambda_b / b.lambda_a;
  const auto band = linalg::f_band(delta);
  if (x > band.lower_edge()) {
    b.feasible = false;
    b.radius = kInf;
    return b;
  }
  b.radius = b.lambda_a * linalg::f_bound(x, delta);
  return b;
}

double g_of_lambda(double lambda_max, const MismatchSpectrum& spectrum) {
  const double scale = spectrum.sigma2 / spectrum.l;
  double psi_s = 0.0;
  double psi_i = 0.0;
  for (Eigen::Index i = 0; i < spectrum.gammas.size(); ++i) {
    const double pole = spectrum.gammas(i) + 1.0;
    const double gap = lambda_max - pole;
    if (std::abs(gap) < 1e-12 * std::abs(pole)) throw NumericError("g_of_lambda: lambda_max sits on a pole");
    const double ratio = (lambda_max - 1.0) / gap;
    const double p = std::norm(spectrum.psi_t(i));
    psi_s += ratio * p;
    psi_i += pole * ratio * ratio * p;
  }
  psi_s *= scale;
  psi_i *= scale;
  const double s = spectrum.l * spectrum.beta * spectrum.snr;
  const double lead = 1.0 + spectrum.n / (s + spectrum.n) * psi_s;
  const double den = (psi_i - s / (s + spectrum.n) * psi_s * psi_s) + lead * lead;
  return lead * lead / den;
}

ComplexMatrix exact_m_matrix(const AnalyticModel& model, const MismatchSpectrum& spectrum) {
  const int d = model.d();
  const auto pair = model.pair(spectrum.snr);
  ComplexMatrix b(model.l, d + 1);
  b.col(0) = model.a0;
  b.rightCols(d) = spectrum.a_eps;
  const ComplexMatrix gram = b.adjoint() * linalg::hpd_solve(pair.r_i, b);
  RealVector diag(d + 1);
  diag(0) = model.sigma_s0_sq(spectrum.snr) - model.sigma_i0_sq(spectrum.snr);
  diag.tail(d) = spectrum.gammas;
  ComplexMatrix m = diag.cast<cdouble>().asDiagonal() * gram;
  m += ComplexMatrix::Identity(d + 1, d + 1);
  return m;
}

NoiseFreeAnalysis noise_free_pair(const AnalyticModel& model) {
  if (model.d() == 0) throw std::invalid_argument("noise_free_pair: scenario has no interferers");
  NoiseFreeAnalysis out;
  out.y_s = linalg::hermitian_part(ComplexMatrix(model.a_i * model.phi_s0 * model.a_i.adjoint()));
  out.y_i = linalg::hermitian_part(ComplexMatrix(model.a_i * model.phi_i0 * model.a_i.adjoint()));
  const ComplexMatrix e0 = linalg::orthonormal_range(ComplexMatrix(out.y_s + out.y_i));
  out.c_y0 = e0.cols() > 0 ? linalg::crawford(out.y_s, out.y_i, e0) : 0.0;
  const auto h = linalg::gen_eig_homogeneous(out.y_s, out.y_i);
  out.infinite_count = static_cast<int>(h.infinite_count());
  out.has_infinite = out.infinite_count > 0;
  return out;
}

bool boundedness_criterion(const ComplexVector& h_s, const ComplexMatrix& h_i, const ComplexMatrix& s_i) {
  if (s_i.size() == 0) throw std::invalid_argument("boundedness_criterion: empty waveform matrix");
  if (s_i.rows() != h_s.size() || h_i.rows() != h_s.size()) {
    throw std::invalid_argument("boundedness_criterion: dimension mismatch");
  }
  const ComplexMatrix v = linalg::orthonormal_range(s_i);
  const ComplexMatrix p = linalg::projector(v);
  const ComplexMatrix u = linalg::orthonormal_range_abs(ComplexMatrix(p * h_i), 1e-10);
  const ComplexMatrix wb = linalg::orthonormal_range_abs(ComplexMatrix(p * h_s), 1e-10);
  return linalg::subspace_contains(u, wb, 1e-8);
}

std::optional<double> gamma1_lower_bound(double c_y0, double inr) {
  const double scaled = c_y0 * inr;
  if (!(scaled > std::sqrt(2.0))) return std::nullopt;
  return scaled / std::sqrt(2.0) - 1.0;
}

SupplementaryReport verify_supplementary_identities(const AnalyticModel& model, double snr) {
  SupplementaryReport r;
  const double l = model.l;
  const double c = l * model.beta * snr / model.n;
  const auto pair = model.pair(snr);
  r.a_r_a_direct = quad_inv(pair.r_i, model.a0);
  r.a_r_a_lemma = (l / model.sigma2) * model.n / (l * model.beta * snr + model.n);

  const int d = model.d();
  if (d > 0) {
    const ComplexMatrix ident = ComplexMatrix::Identity(d, d);
    const ComplexVector psi = model.a_i.adjoint() * model.a0 / l;
    const ComplexMatrix psi_i = linalg::hermitian_part(ComplexMatrix(model.a_i.adjoint() * model.a_i / l));
    const ComplexMatrix psi_i_inv = linalg::hermitian_part(linalg::hpd_solve(psi_i, ident));
    const ComplexMatrix xi_inner = linalg::hermitian_part(ComplexMatrix((l / model.sigma2) * model.phi_i + psi_i_inv));
    const ComplexMatrix xi_mat = linalg::hermitian_part(linalg::hpd_solve(xi_inner, ident));
    const ComplexVector u = psi_i_inv * psi;
    r.rho0 = psi.dot(u).real();
    r.kappa0 = u.dot(xi_mat * u).real();
    r.xi = r.rho0 - r.kappa0;
  }
  r.a_r_a_closed = (l / model.sigma2) * (1.0 - r.xi) / (c * (1.0 - r.xi) + 1.0);
  r.closed_rel_error = std::abs(r.a_r_a_closed - r.a_r_a_direct) / r.a_r_a_direct;
  r.lemma_rel_error = std::abs(r.a_r_a_lemma - r.a_r_a_direct) / r.a_r_a_direct;
  return r;
}

}  // namespace mpb::theory
