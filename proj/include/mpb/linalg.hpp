#pragma once

// Dense complex linear algebra for Hermitian problems: Jacobi eigensolver,
// Cholesky reduction of definite pairs, the homogeneous (nu, mu) form for
// semi-definite pairs, one-sided Jacobi SVD for subspace geometry, and the
// perturbation toolbox (Gerschgorin disks, Crawford number, the f(x) bound).
//
// Everything is templated on the real scalar so the same code runs in
// double and long double. Eigen provides storage, products and triangular
// solves; no Eigen decomposition is used here.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpb/errors.hpp"

namespace mpb {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using cdouble = std::complex<double>;
using ComplexMatrix = CMatrix<double>;
using ComplexVector = CVector<double>;
using RealVector = RVector<double>;

namespace linalg {

template <typename Real>
struct HermEigResult {
  RVector<Real> values;   // descending
  CMatrix<Real> vectors;  // columns aligned with values
};

// Generalized eigenvalues <nu, mu> of a semi-definite pair, chordally
// normalized (nu^2 + mu^2 = 1). mu == 0 marks an infinite eigenvalue.
// Ordered by nu/mu descending, infinite ones first.
template <typename Real>
struct GenEigHomogeneous {
  RVector<Real> nu;
  RVector<Real> mu;
  CMatrix<Real> vectors;
  Eigen::Index finite_count = 0;

  [[nodiscard]] Eigen::Index size() const { return nu.size(); }
  [[nodiscard]] Eigen::Index infinite_count() const { return size() - finite_count; }
  [[nodiscard]] bool is_infinite(Eigen::Index i) const { return i < infinite_count(); }
  [[nodiscard]] Real ratio(Eigen::Index i) const {
    return is_infinite(i) ? std::numeric_limits<Real>::infinity() : nu(i) / mu(i);
  }
};

template <typename Real>
struct GerschgorinDisk {
  std::complex<Real> center;
  Real radius = 0;
  Eigen::Index row_index = 0;

  [[nodiscard]] bool contains(std::complex<Real> z, Real slack = 0) const {
    return std::abs(z - center) <= radius + slack;
  }
};

template <typename Real>
struct SvdResult {
  CMatrix<Real> u;       // m x n, columns with singular value 0 are zero
  RVector<Real> values;  // descending
  CMatrix<Real> v;       // n x n unitary
};

// ---------------------------------------------------------------------------
// small helpers

template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  return m.size() == 0 ? Real(0) : m.cwiseAbs().maxCoeff();
}

template <typename Real>
CMatrix<Real> hermitian_part(const CMatrix<Real>& a) {
  return (a + a.adjoint()) * Real(0.5);
}

template <typename Real>
void require_square(const CMatrix<Real>& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
  }
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver: cyclic complex Jacobi.

template <typename Real>
HermEigResult<Real> herm_eig(const CMatrix<Real>& input) {
  using Complex = std::complex<Real>;
  require_square(input, "herm_eig");
  const Eigen::Index n = input.rows();

  const Real scale = max_abs(input);
  if ((input - input.adjoint()).cwiseAbs().maxCoeff() > Real(1e-8) * scale) {
    throw std::invalid_argument("herm_eig: matrix is not Hermitian");
  }

  CMatrix<Real> a = hermitian_part(input);
  CMatrix<Real> v = CMatrix<Real>::Identity(n, n);

  const Real frob = a.norm();
  const Real target = Real(1e-12) * frob;
  constexpr int kMaxSweeps = 50;

  auto off_mass = [&] {
    Real s = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < kMaxSweeps && off_mass() > target; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex g = a(p, q);
        const Real r = std::abs(g);
        if (r <= std::numeric_limits<Real>::min()) continue;
        const Complex e = g / r;
        const Real tau = (a(q, q).real() - a(p, p).real()) / (2 * r);
        const Real t = (tau >= 0 ? Real(1) : Real(-1)) / (std::abs(tau) + std::sqrt(1 + tau * tau));
        const Real c = 1 / std::sqrt(1 + t * t);
        const Real s = t * c;
        const Complex jpq = s * e;             // J(p,q)
        const Complex jqp = -s * std::conj(e);  // J(q,p)

        // A <- A J
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp + jqp * akq;
          a(k, q) = jpq * akp + c * akq;
        }
        // A <- J^H A
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + c * aqk;
        }
        a(p, q) = a(q, p) = Complex(0);
        a(p, p) = Complex(a(p, p).real(), 0);
        a(q, q) = Complex(a(q, q).real(), 0);
        // V <- V J
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp + jqp * vkq;
          v(k, q) = jpq * vkp + c * vkq;
        }
      }
    }
  }
  if (off_mass() > target) {
    throw NumericError("herm_eig: Jacobi iteration did not converge in 50 sweeps");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() > a(j, j).real(); });

  HermEigResult<Real> out{RVector<Real>(n), CMatrix<Real>(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]).real();
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cholesky factor B = L L^H.

template <typename Real>
CMatrix<Real> cholesky(const CMatrix<Real>& b_in) {
  require_square(b_in, "cholesky");
  const Eigen::Index n = b_in.rows();
  const CMatrix<Real> b = hermitian_part(b_in);
  const Real floor = Real(1e-12) * max_abs(b);
  CMatrix<Real> l = CMatrix<Real>::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Real d = b(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > floor)) {
      throw NumericError("cholesky: matrix is not positive definite (pivot " + std::to_string(j) + ")");
    }
    const Real ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      std::complex<Real> s = b(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

// Solves A X = B for HPD A through its Cholesky factor.
template <typename Real>
CMatrix<Real> hpd_solve(const CMatrix<Real>& a, const CMatrix<Real>& b) {
  const CMatrix<Real> l = cholesky(a);
  CMatrix<Real> y = l.template triangularView<Eigen::Lower>().solve(b);
  return l.adjoint().template triangularView<Eigen::Upper>().solve(y);
}

template <typename Real>
CVector<Real> hpd_solve(const CMatrix<Real>& a, const CVector<Real>& b) {
  return hpd_solve(a, CMatrix<Real>(b)).col(0);
}

// A v = lambda B v for Hermitian A and HPD B; eigenvectors are B-orthonormal.
template <typename Real>
HermEigResult<Real> gen_eig_hpd(const CMatrix<Real>& a, const CMatrix<Real>& b) {
  require_square(a, "gen_eig_hpd");
  if (b.rows() != a.rows() || b.cols() != a.cols()) {
    throw std::invalid_argument("gen_eig_hpd: dimension mismatch");
  }
  const CMatrix<Real> l = cholesky(b);
  const auto lower = l.template triangularView<Eigen::Lower>();
  // C = L^-1 A L^-H
  CMatrix<Real> tmp = lower.solve(hermitian_part(a));
  CMatrix<Real> c = lower.solve(tmp.adjoint()).adjoint();
  auto eig = herm_eig(hermitian_part(c));
  eig.vectors = l.adjoint().template triangularView<Eigen::Upper>().solve(eig.vectors);
  return eig;
}

// Simultaneous diagonalization T^H Phi T = Gamma, T^H W T = I.
template <typename Real>
struct SimultaneousDiag {
  CMatrix<Real> t;
  RVector<Real> gamma;  // descending
};

template <typename Real>
SimultaneousDiag<Real> simultaneous_diag(const CMatrix<Real>& phi, const CMatrix<Real>& w) {
  auto eig = gen_eig_hpd(phi, w);
  return {std::move(eig.vectors), std::move(eig.values)};
}

// ---------------------------------------------------------------------------
// One-sided (Hestenes) Jacobi SVD. Accurate for small singular values, which
// the rank decisions below depend on.

template <typename Real>
SvdResult<Real> svd(const CMatrix<Real>& m) {
  using Complex = std::complex<Real>;
  const Eigen::Index rows = m.rows();
  const Eigen::Index n = m.cols();
  CMatrix<Real> u = m;
  CMatrix<Real> v = CMatrix<Real>::Identity(n, n);
  const Real eps = std::numeric_limits<Real>::epsilon() * static_cast<Real>(std::max<Eigen::Index>(rows, 1));

  constexpr int kMaxSweeps = 60;
  bool rotated = true;
  for (int sweep = 0; sweep < kMaxSweeps && rotated; ++sweep) {
    rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Real alpha = u.col(p).squaredNorm();
        const Real beta = u.col(q).squaredNorm();
        const Complex g = u.col(p).dot(u.col(q));  // u_p^H u_q
        const Real r = std::abs(g);
        if (r <= eps * std::sqrt(alpha * beta) || r <= std::numeric_limits<Real>::min()) continue;
        rotated = true;
        const Complex e = g / r;
        const Real zeta = (beta - alpha) / (2 * r);
        const Real t = (zeta >= 0 ? Real(1) : Real(-1)) / (std::abs(zeta) + std::sqrt(1 + zeta * zeta));
        const Real c = 1 / std::sqrt(1 + t * t);
        const Real s = t * c;
        const Complex jpq = s * e;
        const Complex jqp = -s * std::conj(e);
        const CVector<Real> up = u.col(p);
        u.col(p) = c * up + jqp * u.col(q);
        u.col(q) = jpq * up + c * u.col(q);
        const CVector<Real> vp = v.col(p);
        v.col(p) = c * vp + jqp * v.col(q);
        v.col(q) = jpq * vp + c * v.col(q);
      }
    }
    if (sweep == kMaxSweeps - 1 && rotated) {
      throw NumericError("svd: one-sided Jacobi did not converge");
    }
  }

  RVector<Real> sv(n);
  for (Eigen::Index j = 0; j < n; ++j) sv(j) = u.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return sv(i) > sv(j); });

  SvdResult<Real> out{CMatrix<Real>::Zero(rows, n), RVector<Real>(n), CMatrix<Real>(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = order[k];
    out.values(k) = sv(j);
    if (sv(j) > 0) out.u.col(k) = u.col(j) / sv(j);
    out.v.col(k) = v.col(j);
  }
  return out;
}

// Default relative rank tolerance: max(m, n) * 2^-52.
template <typename Real>
Real default_rank_tol(const CMatrix<Real>& m) {
  return static_cast<Real>(std::max(m.rows(), m.cols())) * std::numeric_limits<double>::epsilon();
}

template <typename Real>
Eigen::Index numerical_rank(const SvdResult<Real>& s, Real tol) {
  if (s.values.size() == 0 || s.values(0) <= 0) return 0;
  const Real cut = tol * s.values(0);
  Eigen::Index r = 0;
  while (r < s.values.size() && s.values(r) >= cut && s.values(r) > 0) ++r;
  return r;
}

template <typename Real>
Real spectral_norm(const CMatrix<Real>& m) {
  if (m.size() == 0) return 0;
  return svd(m).values(0);
}

// Orthonormal basis of range(M). A zero matrix yields an empty (rows x 0) basis.
template <typename Real>
CMatrix<Real> orthonormal_range(const CMatrix<Real>& m, Real tol) {
  if (!(tol > 0)) throw std::invalid_argument("orthonormal_range: tol must be positive");
  if (m.cols() == 0) return CMatrix<Real>(m.rows(), 0);
  const auto s = svd(m);
  const Eigen::Index r = numerical_rank(s, tol);
  return s.u.leftCols(r);
}

// Basis of the singular directions with sigma >= abs_tol; a numerically
// zero matrix gives an empty basis regardless of its own scale.
template <typename Real>
CMatrix<Real> orthonormal_range_abs(const CMatrix<Real>& m, Real abs_tol) {
  if (m.cols() == 0) return CMatrix<Real>(m.rows(), 0);
  const auto s = svd(m);
  Eigen::Index r = 0;
  while (r < s.values.size() && s.values(r) >= abs_tol) ++r;
  return s.u.leftCols(r);
}

template <typename Real>
CMatrix<Real> orthonormal_range(const CMatrix<Real>& m) {
  return orthonormal_range(m, default_rank_tol(m));
}

// Orthonormal basis of N(M) = {x : M x = 0}.
template <typename Real>
CMatrix<Real> null_space(const CMatrix<Real>& m, Real tol) {
  if (!(tol > 0)) throw std::invalid_argument("null_space: tol must be positive");
  const auto s = svd(m);
  const Eigen::Index r = numerical_rank(s, tol);
  return s.v.rightCols(m.cols() - r);
}

template <typename Real>
CMatrix<Real> null_space(const CMatrix<Real>& m) {
  return null_space(m, default_rank_tol(m));
}

// Orthonormal basis of range(Q)^perp in C^rows.
template <typename Real>
CMatrix<Real> orthogonal_complement(const CMatrix<Real>& q, Eigen::Index rows) {
  if (q.cols() == 0) return CMatrix<Real>::Identity(rows, rows);
  return null_space(CMatrix<Real>(q.adjoint()));
}

template <typename Real>
CMatrix<Real> projector(const CMatrix<Real>& q) {
  return q * q.adjoint();
}

template <typename Real>
CMatrix<Real> pinv(const CMatrix<Real>& m, Real tol) {
  const auto s = svd(m);
  const Eigen::Index r = numerical_rank(s, tol);
  CMatrix<Real> out = CMatrix<Real>::Zero(m.cols(), m.rows());
  for (Eigen::Index k = 0; k < r; ++k) out += s.v.col(k) * (s.u.col(k).adjoint() / s.values(k));
  return out;
}

template <typename Real>
CMatrix<Real> pinv(const CMatrix<Real>& m) {
  return pinv(m, default_rank_tol(m));
}

// range(U) contains range(V) when ||(I - U U^H) V||_2 <= tol.
template <typename Real>
bool subspace_contains(const CMatrix<Real>& u, const CMatrix<Real>& v, Real tol) {
  if (u.rows() != v.rows()) throw std::invalid_argument("subspace_contains: row dimension mismatch");
  if (v.cols() == 0) return true;
  CMatrix<Real> residual = v;
  if (u.cols() > 0) residual -= u * (u.adjoint() * v);
  return spectral_norm(residual) <= tol;
}

// ---------------------------------------------------------------------------
// Semi-definite pairs.

// Clip eigenvalues in [-1e-10 ||A||, 0) to zero; larger negative ones mean
// the input is not PSD.
template <typename Real>
CMatrix<Real> clip_psd(const CMatrix<Real>& a) {
  const auto eig = herm_eig(a);
  const Real scale = std::max(std::abs(eig.values(0)), std::abs(eig.values(eig.values.size() - 1)));
  RVector<Real> lam = eig.values;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < 0) {
      if (lam(i) < -Real(1e-10) * scale) throw std::invalid_argument("matrix is not positive semi-definite");
      lam(i) = 0;
    }
  }
  CMatrix<Real> out = eig.vectors * lam.template cast<std::complex<Real>>().asDiagonal() * eig.vectors.adjoint();
  return hermitian_part(out);
}

template <typename Real>
GenEigHomogeneous<Real> gen_eig_homogeneous(const CMatrix<Real>& a_in, const CMatrix<Real>& b_in) {
  require_square(a_in, "gen_eig_homogeneous");
  if (b_in.rows() != a_in.rows() || b_in.cols() != a_in.cols()) {
    throw std::invalid_argument("gen_eig_homogeneous: dimension mismatch");
  }
  const CMatrix<Real> a = clip_psd(a_in);
  const CMatrix<Real> b = clip_psd(b_in);

  // N(A) ∩ N(B) = N(A + B) for PSD A, B.
  const CMatrix<Real> sum = a + b;
  const Real tol = std::max(default_rank_tol(sum), Real(1e-10));
  const CMatrix<Real> e0 = orthonormal_range(sum, tol);

  GenEigHomogeneous<Real> out;
  const Eigen::Index k = e0.cols();
  out.nu.resize(k);
  out.mu.resize(k);
  out.vectors.resize(a.rows(), k);
  if (k == 0) return out;

  const CMatrix<Real> ad = hermitian_part(CMatrix<Real>(e0.adjoint() * a * e0));
  const CMatrix<Real> cd = hermitian_part(CMatrix<Real>(e0.adjoint() * sum * e0));
  // A x = tau (A + B) x  <=>  (1 - tau) A x = tau B x, i.e. <nu, mu> = <tau, 1 - tau>.
  const auto eig = gen_eig_hpd(ad, cd);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Real tau = std::clamp(eig.values(i), Real(0), Real(1));
    const Real nrm = std::hypot(tau, 1 - tau);
    out.nu(i) = tau / nrm;
    out.mu(i) = (1 - tau) / nrm;
    if (out.mu(i) <= Real(1e-8)) out.mu(i) = 0;
    out.vectors.col(i) = e0 * eig.vectors.col(i);
  }
  out.finite_count = 0;
  for (Eigen::Index i = 0; i < k; ++i)
    if (out.mu(i) > 0) ++out.finite_count;
  return out;
}

// ---------------------------------------------------------------------------
// Perturbation toolbox.

template <typename Real>
std::vector<GerschgorinDisk<Real>> gerschgorin(const CMatrix<Real>& m) {
  require_square(m, "gerschgorin");
  std::vector<GerschgorinDisk<Real>> disks;
  disks.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Real r = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
    disks.push_back({m(i, i), std::max(r, Real(0)), i});
  }
  return disks;
}

template <typename Real>
bool in_disk_union(const std::vector<GerschgorinDisk<Real>>& disks, std::complex<Real> z, Real slack = 0) {
  return std::any_of(disks.begin(), disks.end(), [&](const auto& d) { return d.contains(z, slack); });
}

// Feasible region of the f(x) bound, x outside (1 - 2 g_minus, 1 + 2 g_plus).
template <typename Real>
struct FBand {
  Real gamma_minus;
  Real gamma_plus;
  [[nodiscard]] Real lower_edge() const { return 1 - 2 * gamma_minus; }
  [[nodiscard]] Real upper_edge() const { return 1 + 2 * gamma_plus; }
  [[nodiscard]] bool feasible(Real x) const { return x <= lower_edge() || x >= upper_edge(); }
};

template <typename Real>
FBand<Real> f_band(Real delta) {
  const Real root = std::sqrt(delta * delta + delta);
  return {root - delta, root + delta};
}

// f(x) = (1 - x - sqrt((1 - x)^2 - 4 delta |x|)) / 2. Only the left branch
// x <= 1 - 2 gamma_minus is non-negative; the eigenvalue bound never needs
// the right one.
template <typename Real>
Real f_bound(Real x, Real delta) {
  if (!(delta >= 0 && delta < 1)) throw std::invalid_argument("f_bound: delta must lie in [0, 1)");
  const auto band = f_band(delta);
  if (!band.feasible(x)) {
    throw std::domain_error("f_bound: x lies inside the infeasible band (1 - 2g-, 1 + 2g+)");
  }
  const Real disc = std::max(Real(0), (1 - x) * (1 - x) - 4 * delta * std::abs(x));
  return (1 - x - std::sqrt(disc)) / 2;
}

// Crawford number min_{||x||=1} sqrt((x^H A x)^2 + (x^H B x)^2), with the
// minimization restricted to range(basis). Computed as the distance from
// the origin to the convex field of values of A + iB:
//   C = max(0, max_theta lambda_min(A cos(theta) + B sin(theta))).
template <typename Real>
Real crawford(const CMatrix<Real>& a_in, const CMatrix<Real>& b_in, const CMatrix<Real>& basis) {
  require_square(a_in, "crawford");
  if (b_in.rows() != a_in.rows() || b_in.cols() != a_in.cols() || basis.rows() != a_in.rows()) {
    throw std::invalid_argument("crawford: dimension mismatch");
  }
  if (basis.cols() == 0) throw std::invalid_argument("crawford: empty basis");
  const CMatrix<Real> a = hermitian_part(CMatrix<Real>(basis.adjoint() * a_in * basis));
  const CMatrix<Real> b = hermitian_part(CMatrix<Real>(basis.adjoint() * b_in * basis));

  auto lambda_min = [&](Real theta) {
    const CMatrix<Real> m = a * std::cos(theta) + b * std::sin(theta);
    const auto vals = herm_eig(m).values;
    return vals(vals.size() - 1);
  };

  constexpr int kGrid = 720;
  const Real two_pi = 2 * std::numbers::pi_v<Real>;
  const Real step = two_pi / kGrid;
  Real best_theta = 0;
  Real best = -std::numeric_limits<Real>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const Real th = step * i;
    const Real val = lambda_min(th);
    if (val > best) {
      best = val;
      best_theta = th;
    }
  }
  // golden-section refinement on [theta - step, theta + step]
  const Real invphi = (std::sqrt(Real(5)) - 1) / 2;
  Real lo = best_theta - step;
  Real hi = best_theta + step;
  Real x1 = hi - invphi * (hi - lo);
  Real x2 = lo + invphi * (hi - lo);
  Real f1 = lambda_min(x1);
  Real f2 = lambda_min(x2);
  for (int it = 0; it < 60 && hi - lo > Real(1e-12); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = lambda_min(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = lambda_min(x1);
    }
  }
  best = std::max({best, f1, f2});
  return std::max(best, Real(0));
}

template <typename Real>
Real crawford(const CMatrix<Real>& a, const CMatrix<Real>& b) {
  return crawford(a, b, CMatrix<Real>(CMatrix<Real>::Identity(a.rows(), a.rows())));
}

}  // namespace linalg
}  // namespace mpb
