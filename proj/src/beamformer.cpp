#include "mpb/beamformer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mpb/errors.hpp"

namespace mpb::beamformer {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kBatch = 1024;

bool periodic_kind(signal::InterfererKind k) {
  return k == signal::InterfererKind::Tone || k == signal::InterfererKind::PeriodicalNoise;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool same_rate(double a, double b) {
  double d = a - b;
  d -= std::floor(d);
  return d < 1e-9 || d > 1.0 - 1e-9;
}

}  // namespace

const char* scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::Papc: return "papc";
    case Scheme::Maximin: return "maximin";
    case Scheme::Custom: return "custom";
  }
  return "unknown";
}

ProjectionBases papc_bases(const Eigen::VectorXd& c0, int position) {
  const auto n = static_cast<int>(c0.size());
  if (position < 0 || position >= n) {
    throw ConfigError("papc position must be in [0, N), got " + std::to_string(position));
  }
  ProjectionBases b;
  b.h_s = c0.cast<cdouble>() / std::sqrt(static_cast<double>(n));
  b.h_i = ComplexMatrix::Zero(n, 1);
  b.h_i(position, 0) = 1.0;
  b.scheme = Scheme::Papc;
  check_bases(b);
  return b;
}

ProjectionBases maximin_bases(const Eigen::VectorXd& c0, double f_mf) {
  if (!(f_mf > 0.0 && f_mf <= 1.0)) {
    throw ConfigError("maximin f_mf must lie in (0, 1], got " + std::to_string(f_mf));
  }
  const auto n = static_cast<int>(c0.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  ProjectionBases b;
  b.h_s = c0.cast<cdouble>() * scale;
  b.h_i.resize(n, 1);
  for (int m = 0; m < n; ++m) {
    double cycles = f_mf * m;
    cycles -= std::floor(cycles);
    b.h_i(m, 0) = c0(m) * scale * std::polar(1.0, kTwoPi * cycles);
  }
  b.scheme = Scheme::Maximin;
  check_bases(b);
  return b;
}

ProjectionBases custom_bases(const Eigen::VectorXd& c0, const ComplexMatrix& h_i) {
  if (h_i.rows() != c0.size() || h_i.cols() < 1) {
    throw ConfigError("custom basis must have N rows and at least one column");
  }
  ProjectionBases b;
  b.h_s = c0.cast<cdouble>() / std::sqrt(static_cast<double>(c0.size()));
  b.h_i = h_i;
  b.scheme = Scheme::Custom;
  check_bases(b);
  return b;
}

void check_bases(const ProjectionBases& bases) {
  if (bases.h_i.rows() != bases.h_s.size()) throw ConfigError("bases: H_I row count must equal N");
  if (std::abs(bases.h_s.norm() - 1.0) > 1e-12) throw ConfigError("bases: h_S must have unit norm");
  const ComplexMatrix gram = bases.h_i.adjoint() * bases.h_i;
  const double tol = bases.scheme == Scheme::Custom ? 1e-10 : 1e-12;
  if (linalg::max_abs(ComplexMatrix(gram - ComplexMatrix::Identity(gram.rows(), gram.cols()))) > tol) {
    throw ConfigError("bases: H_I columns must be orthonormal");
  }
  // h_S inside range(H_I) leaves the interference channel with the full SOI.
  const ComplexVector resid = bases.h_s - bases.h_i * (bases.h_i.adjoint() * bases.h_s);
  if (resid.norm() < 1e-9) throw ConfigError("bases: range(H_I) contains h_S (degenerate interference channel)");
}

double leakage_ratio(const ProjectionBases& bases, const Eigen::VectorXd& c0) {
  const ComplexVector proj = bases.h_i.adjoint() * c0.cast<cdouble>();
  return proj.squaredNorm() / bases.rank();
}

Snapshots snapshots(const signal::BlockData& data, const ProjectionBases& bases) {
  Snapshots out;
  out.x_s.reserve(data.blocks.size());
  out.x_i.reserve(data.blocks.size());
  const ComplexVector hs = bases.h_s.conjugate();
  const ComplexMatrix hi = bases.h_i.conjugate();
  for (const auto& x : data.blocks) {
    out.x_s.emplace_back(x * hs);
    out.x_i.emplace_back(x * hi);
  }
  return out;
}

CovAccumulator::CovAccumulator(int elements, int rank)
    : s_(ComplexMatrix::Zero(elements, elements)), i_(ComplexMatrix::Zero(elements, elements)), rank_(rank) {}

void CovAccumulator::add(const ComplexVector& x_s, const ComplexMatrix& x_i) {
  s_.noalias() += x_s * x_s.adjoint();
  i_.noalias() += x_i * x_i.adjoint();
  ++count_;
}

void CovAccumulator::add_signal(const ComplexVector& x_s) {
  s_.noalias() += x_s * x_s.adjoint();
  ++count_;
}

void CovAccumulator::merge(const CovAccumulator& other) {
  s_ += other.s_;
  i_ += other.i_;
  count_ += other.count_;
}

CovariancePair CovAccumulator::finish() const {
  if (count_ == 0) throw std::invalid_argument("estimate_cov_pair: no snapshots");
  CovariancePair p;
  p.r_s = linalg::hermitian_part(ComplexMatrix(s_ / static_cast<double>(count_)));
  p.r_i = linalg::hermitian_part(ComplexMatrix(i_ / (static_cast<double>(count_) * rank_)));
  p.kind = CovKind::Sample;
  return p;
}

ComplexMatrix CovAccumulator::signal_covariance() const {
  if (count_ == 0) throw std::invalid_argument("CovAccumulator: no snapshots");
  return linalg::hermitian_part(ComplexMatrix(s_ / static_cast<double>(count_)));
}

CovariancePair estimate_cov_pair(const Snapshots& snaps) {
  if (snaps.x_s.empty()) throw std::invalid_argument("estimate_cov_pair: K = 0");
  CovAccumulator acc(static_cast<int>(snaps.x_s.front().size()), static_cast<int>(snaps.x_i.front().cols()));
  for (std::size_t k = 0; k < snaps.x_s.size(); ++k) acc.add(snaps.x_s[k], snaps.x_i[k]);
  return acc.finish();
}

CovariancePair AnalyticModel::pair(double snr) const {
  CovariancePair p;
  const ComplexMatrix aa = a0 * a0.adjoint();
  p.r_s = q_s + sigma_s0_sq(snr) * aa;
  p.r_i = q_i + sigma_i0_sq(snr) * aa;
  p.kind = CovKind::Analytic;
  return p;
}

ComplexMatrix interference_moment(const signal::Scenario& scenario, const signal::Realization& realization,
                                  const ComplexVector& h) {
  const int n = scenario.soi.processing_gain;
  signal::WaveformSource source(scenario, realization, 0);
  const auto& paths = source.paths();
  const int d = source.path_count();
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  const ComplexVector hc = h.conjugate();
  rng::Generator unused(0);

  // projections of the symbol-0 window for periodic paths
  std::vector<cdouble> proj(static_cast<std::size_t>(d));
  // MAI: projection split by the data-bit block each chip falls into
  std::vector<std::array<cdouble, 3>> blocks(static_cast<std::size_t>(d));
  for (int p = 0; p < d; ++p) {
    const auto& spec = scenario.interferers[static_cast<std::size_t>(paths[static_cast<std::size_t>(p)].source)];
    if (periodic_kind(spec.kind)) {
      proj[static_cast<std::size_t>(p)] =
          source.samples(p, scenario.soi.delay, n, unused).transpose() * hc;
    } else if (spec.kind == signal::InterfererKind::MaiMultipath) {
      auto& bl = blocks[static_cast<std::size_t>(p)];
      bl = {cdouble(0), cdouble(0), cdouble(0)};
      const auto& code = realization.mai_code[static_cast<std::size_t>(paths[static_cast<std::size_t>(p)].source)];
      for (int t = 0; t < n; ++t) {
        const std::int64_t u = static_cast<std::int64_t>(scenario.soi.delay) + t - paths[static_cast<std::size_t>(p)].delay;
        const std::int64_t j = floor_div(u, n);
        const std::int64_t idx = u - j * n;
        bl[static_cast<std::size_t>(j + 1)] += hc(t) * code(idx);
      }
    }
  }

  for (int p = 0; p < d; ++p) {
    const auto sp = static_cast<std::size_t>(p);
    const auto& pp = paths[sp];
    const auto& spec_p = scenario.interferers[static_cast<std::size_t>(pp.source)];
    for (int q = 0; q < d; ++q) {
      const auto sq = static_cast<std::size_t>(q);
      const auto& pq = paths[sq];
      const auto& spec_q = scenario.interferers[static_cast<std::size_t>(pq.source)];
      if (spec_p.kind == signal::InterfererKind::BpskWhite) {
        if (p == q) m(p, q) = h.squaredNorm();
      } else if (periodic_kind(spec_p.kind) && periodic_kind(spec_q.kind)) {
        if (same_rate(source.symbol_rate(p), source.symbol_rate(q))) m(p, q) = proj[sp] * std::conj(proj[sq]);
      } else if (spec_p.kind == signal::InterfererKind::MaiMultipath && pp.source == pq.source) {
        cdouble s = 0;
        for (std::size_t b = 0; b < 3; ++b) s += blocks[sp][b] * std::conj(blocks[sq][b]);
        m(p, q) = s;
      }
    }
  }
  return linalg::hermitian_part(m);
}

std::optional<ComplexMatrix> periodic_waveforms(const signal::Scenario& scenario,
                                                const signal::Realization& realization) {
  signal::WaveformSource source(scenario, realization, 0);
  const int n = scenario.soi.processing_gain;
  ComplexMatrix s(n, source.path_count());
  rng::Generator unused(0);
  for (int p = 0; p < source.path_count(); ++p) {
    const auto& spec = scenario.interferers[static_cast<std::size_t>(source.paths()[static_cast<std::size_t>(p)].source)];
    if (!periodic_kind(spec.kind)) return std::nullopt;
    s.col(p) = source.samples(p, scenario.soi.delay, n, unused);
  }
  return s;
}

AnalyticModel analytic_cov(const signal::Scenario& scenario, const ProjectionBases& bases,
                           const signal::Realization& realization, double inr) {
  scenario.validate();
  check_bases(bases);
  const Eigen::VectorXd c0 = scenario.soi.chips();
  if (bases.length() != c0.size()) throw ConfigError("analytic_cov: basis length must equal N");

  AnalyticModel m;
  m.n = scenario.soi.processing_gain;
  m.l = scenario.geometry.elements;
  m.r_i = bases.rank();
  m.sigma2 = scenario.noise_var;
  m.a0 = signal::steering(scenario.soi.doa_deg, scenario.geometry);
  m.a_i = signal::interference_steering(scenario);
  m.beta = leakage_ratio(bases, c0);

  const auto paths = signal::expand_paths(scenario);
  const int d = static_cast<int>(paths.size());
  Eigen::VectorXd power(d);
  double strongest = 0.0;
  for (const auto& s : scenario.interferers) strongest = std::max(strongest, s.power);
  for (int p = 0; p < d; ++p) power(p) = paths[static_cast<std::size_t>(p)].power;
  m.inr = inr > 0 ? inr : strongest / m.sigma2;

  const ComplexMatrix ms = interference_moment(scenario, realization, bases.h_s);
  ComplexMatrix mi = ComplexMatrix::Zero(d, d);
  for (int c = 0; c < bases.rank(); ++c) mi += interference_moment(scenario, realization, bases.h_i.col(c));
  mi /= static_cast<double>(bases.rank());

  const Eigen::VectorXcd root = power.cwiseSqrt().cast<cdouble>();
  m.phi_s = linalg::hermitian_part(ComplexMatrix(root.asDiagonal() * ms * root.asDiagonal()));
  m.phi_i = linalg::hermitian_part(ComplexMatrix(root.asDiagonal() * mi * root.asDiagonal()));
  const double ref = m.inr > 0 ? m.sigma2 * m.inr : 1.0;
  m.phi_s0 = m.phi_s / ref;
  m.phi_i0 = m.phi_i / ref;
  m.omega = power / ref;

  const ComplexMatrix noise = m.sigma2 * ComplexMatrix::Identity(m.l, m.l);
  m.q_s = linalg::hermitian_part(ComplexMatrix(m.a_i * m.phi_s * m.a_i.adjoint() + noise));
  m.q_i = linalg::hermitian_part(ComplexMatrix(m.a_i * m.phi_i * m.a_i.adjoint() + noise));
  return m;
}

BeamWeights solve_weights(const CovariancePair& pair) {
  const auto eig = linalg::gen_eig_hpd(pair.r_s, pair.r_i);
  BeamWeights out;
  out.lambda_max = eig.values(0);
  out.w = eig.vectors.col(0).normalized();
  return out;
}

BeamWeights solve_weights(const CovariancePair& pair, const ComplexVector& a0) {
  const auto eig = linalg::gen_eig_hpd(pair.r_s, pair.r_i);
  const double top = eig.values(0);
  const double cut = top - 1e-8 * std::max(std::abs(top), 1.0);
  Eigen::Index cluster = 1;
  while (cluster < eig.values.size() && eig.values(cluster) >= cut) ++cluster;

  BeamWeights out;
  out.lambda_max = top;
  out.w = eig.vectors.col(0).normalized();
  if (cluster > 1) {
    // best |w^H a0| / ||w|| over the eigenspace is the projection of a0
    const ComplexMatrix basis = linalg::orthonormal_range(ComplexMatrix(eig.vectors.leftCols(cluster)));
    const ComplexVector proj = basis * (basis.adjoint() * a0);
    if (proj.norm() > 1e-12 * a0.norm()) out.w = proj.normalized();
  }
  return out;
}

double sinr_opt(const ComplexMatrix& q_s, const ComplexVector& a0, double sigma_s0_sq) {
  const ComplexVector x = linalg::hpd_solve(q_s, a0);
  return sigma_s0_sq * a0.dot(x).real();
}

double normalized_sinr(const ComplexVector& w, const ComplexVector& a0, double sigma_s0_sq,
                       const ComplexMatrix& q_seen, const ComplexMatrix& q_s) {
  const double denom = w.dot(q_seen * w).real();
  if (!(denom > 0)) throw NumericError("normalized_sinr: output interference-plus-noise power is not positive");
  const double opt = sinr_opt(q_s, a0, sigma_s0_sq);
  if (!(opt > 0)) throw NumericError("normalized_sinr: SINR_opt is not positive");
  return sigma_s0_sq * std::norm(w.dot(a0)) / denom / opt;
}

double measure_g_analytic(const ComplexVector& w, const AnalyticModel& model, double snr) {
  // G is invariant to sigma_S0^2; a zero SNR is evaluated at unit scale.
  const double s = snr > 0 ? model.sigma_s0_sq(snr) : 1.0;
  return normalized_sinr(w, model.a0, s, model.q_s, model.q_s);
}

MonteCarloPoint simulate_point(const signal::Scenario& scenario, const signal::Realization& realization,
                               const ProjectionBases& bases, std::uint64_t point_key, int symbols) {
  if (symbols < 1) throw std::invalid_argument("simulate_point: symbols must be >= 1");
  const int n = scenario.soi.processing_gain;
  const int l = scenario.geometry.elements;
  const int r = bases.rank();
  const Eigen::VectorXd c0 = scenario.soi.chips();
  const ComplexVector a0 = signal::steering(scenario.soi.doa_deg, scenario.geometry);
  const ComplexMatrix a_i = signal::interference_steering(scenario);
  const auto paths = signal::expand_paths(scenario);
  const int d = static_cast<int>(paths.size());

  // columns: h_S^*, then H_I^*
  ComplexMatrix proj_basis(n, 1 + r);
  proj_basis.col(0) = bases.h_s.conjugate();
  proj_basis.rightCols(r) = bases.h_i.conjugate();

  ComplexMatrix a_scaled = a_i;
  for (int p = 0; p < d; ++p) a_scaled.col(p) *= std::sqrt(paths[static_cast<std::size_t>(p)].power);

  const ComplexMatrix noise_factor =
      std::sqrt(scenario.noise_var) * linalg::cholesky(ComplexMatrix((proj_basis.adjoint() * proj_basis).conjugate()));

  const double amp0 = std::sqrt(scenario.soi.power);
  const Eigen::RowVectorXcd soi_gain = amp0 * (c0.cast<cdouble>().transpose() * proj_basis);

  auto run = [&](std::uint64_t stream_key, bool full) {
    signal::WaveformSource source(scenario, realization, stream_key);
    const std::uint64_t bit_key = rng::derive(stream_key, {rng::kSoiBits});

    std::vector<int> random_paths;
    std::vector<int> periodic_paths;
    for (int p = 0; p < d; ++p) (source.is_random(p) ? random_paths : periodic_paths).push_back(p);

    rng::Generator unused(0);
    // symbol-0 projections of periodic paths and their per-symbol rotation
    ComplexMatrix periodic0(d, 1 + r);
    std::vector<double> rate(static_cast<std::size_t>(d), 0.0);
    for (int p : periodic_paths) {
      periodic0.row(p) = source.samples(p, scenario.soi.delay, n, unused).transpose() * proj_basis;
      rate[static_cast<std::size_t>(p)] = source.symbol_rate(p);
    }

    CovAccumulator acc(l, r);
    ComplexMatrix y(d, 1 + r);          // per-path channel projections
    ComplexMatrix chan(l, 1 + r);       // [x_S, X_I]
    ComplexVector chips(n);
    Eigen::VectorXcd g(1 + r);
    ComplexVector x_s(l);
    ComplexMatrix x_i(l, r);

    const int batches = (symbols + kBatch - 1) / kBatch;
    for (int b = 0; b < batches; ++b) {
      rng::Generator gen(rng::derive(stream_key, {static_cast<std::uint64_t>(b)}));
      const int k_end = std::min(symbols, (b + 1) * kBatch);
      for (int k = b * kBatch; k < k_end; ++k) {
        const std::int64_t t0 = static_cast<std::int64_t>(k) * n + scenario.soi.delay;
        for (int p : random_paths) {
          for (int m = 0; m < n; ++m) chips(m) = source.sample(p, t0 + m, gen);
          y.row(p).noalias() = chips.transpose() * proj_basis;
        }
        for (int p : periodic_paths) {
          double cycles = rate[static_cast<std::size_t>(p)] * k;
          cycles -= std::floor(cycles);
          y.row(p) = periodic0.row(p) * std::polar(1.0, kTwoPi * cycles);
        }
        if (d > 0) {
          chan.noalias() = a_scaled * y;
        } else {
          chan.setZero();
        }
        if (full) {
          const double b0 = signal::soi_bit(bit_key, k);
          chan.noalias() += (b0 * a0) * soi_gain;
        }
        for (int i = 0; i < l; ++i) {
          for (int c = 0; c < 1 + r; ++c) g(c) = gen.cnormal();
          chan.row(i).noalias() += (noise_factor * g).transpose();
        }
        x_s = chan.col(0);
        if (full) {
          x_i = chan.rightCols(r);
          acc.add(x_s, x_i);
        } else {
          acc.add_signal(x_s);
        }
      }
    }
    return acc;
  };

  MonteCarloPoint out;
  out.pair = run(rng::derive(point_key, {rng::kData}), true).finish();
  out.q_s_hat = run(rng::derive(point_key, {rng::kNoiseOnly}), false).signal_covariance();
  return out;
}

double measure_g_monte_carlo(const ComplexVector& w, const MonteCarloPoint& point, const AnalyticModel& model,
                             double snr) {
  const double s = snr > 0 ? model.sigma_s0_sq(snr) : 1.0;
  return normalized_sinr(w, model.a0, s, point.q_s_hat, model.q_s);
}

std::vector<PatternPoint> array_pattern(const ComplexVector& w, const signal::ArrayGeometry& geometry,
                                        const std::vector<double>& theta_grid_deg) {
  std::vector<PatternPoint> out;
  out.reserve(theta_grid_deg.size());
  double peak = 0.0;
  std::vector<double> mag;
  mag.reserve(theta_grid_deg.size());
  for (double theta : theta_grid_deg) {
    if (std::abs(theta) > 90.0) throw std::invalid_argument("array_pattern: theta must lie in [-90, 90]");
    const double phase = kTwoPi * geometry.spacing * std::sin(theta * std::numbers::pi / 180.0);
    cdouble resp = 0;
    for (int i = 0; i < geometry.elements; ++i) resp += std::conj(w(i)) * std::polar(1.0, phase * i);
    mag.push_back(std::abs(resp));
    peak = std::max(peak, std::abs(resp));
  }
  for (std::size_t i = 0; i < theta_grid_deg.size(); ++i) {
    out.push_back({theta_grid_deg[i], 20.0 * std::log10(mag[i]) - 20.0 * std::log10(peak)});
  }
  return out;
}

std::vector<double> uniform_grid(double start, double stop, double step) {
  if (!(step > 0) || stop < start) throw std::invalid_argument("uniform_grid: need step > 0 and stop >= start");
  const auto count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = start + step * i;
  return out;
}

}  // namespace mpb::beamformer
