#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "annkit/annulus.hpp"
#include "annkit/common.hpp"

namespace annkit {

// Finite complex square matrices stand in for the bounded operators; all
// functions below take them by const reference and never mutate inputs.

inline std::vector<Cx> spectrum(const Eigen::MatrixXcd& t) {
  if (t.rows() != t.cols())
    throw std::invalid_argument("spectrum: matrix must be square");
  require_finite(t, "spectrum");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(t, /*computeEigenvectors=*/false);
  if (ces.info() != Eigen::Success)
    throw std::runtime_error("spectrum: eigen solver did not converge");
  std::vector<Cx> eigs(ces.eigenvalues().data(),
                       ces.eigenvalues().data() + ces.eigenvalues().size());
  std::sort(eigs.begin(), eigs.end(), [](Cx a, Cx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return eigs;
}

inline double op_norm(const Eigen::MatrixXcd& t) {
  require_finite(t, "op_norm");
  return largest_singular_value(t);
}

inline Eigen::MatrixXcd inverse_by_solve(const Eigen::MatrixXcd& t,
                                         double rcond_floor = 1e-14) {
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(t);
  const double rc = lu.rcond();
  if (!(rc > rcond_floor))
    throw std::domain_error("matrix is numerically singular (rcond " +
                            std::to_string(rc) + ")");
  return lu.solve(
      Eigen::MatrixXcd::Identity(t.rows(), t.cols()));
}

// Hermitian defect (r^2+1) I - r^2 T^{-1} (T^{-1})^* - T T^*; membership in
// the operator class means this is PSD with the spectrum inside the ring.
inline Eigen::MatrixXcd defect(const Eigen::MatrixXcd& t, double r) {
  if (t.rows() != t.cols())
    throw std::invalid_argument("defect: matrix must be square");
  require_finite(t, "defect");
  Annulus::unit(r);
  const Eigen::MatrixXcd inv = inverse_by_solve(t);
  const Eigen::Index n = t.rows();
  Eigen::MatrixXcd d = (r * r + 1.0) * Eigen::MatrixXcd::Identity(n, n) -
                       r * r * (inv * inv.adjoint()) - t * t.adjoint();
  return hermitize(d);
}

struct MembershipReport {
  bool is_member = false;
  bool singular = false;
  double defect_min_eig = std::numeric_limits<double>::quiet_NaN();
  std::vector<Cx> eigenvalues;
  double spectral_margin = 0.0;  // min over eigs of min(|l| - r, 1 - |l|)
  double ttstar_min = 0.0;       // eigenvalue range of T T*
  double ttstar_max = 0.0;
};

inline MembershipReport check_membership(const Eigen::MatrixXcd& t, double r,
                                         double tol = kPsdTol) {
  if (t.rows() != t.cols())
    throw std::invalid_argument("check_membership: matrix must be square");
  require_finite(t, "check_membership");
  Annulus::unit(r);
  MembershipReport rep;
  rep.eigenvalues = spectrum(t);
  rep.spectral_margin = std::numeric_limits<double>::infinity();
  for (Cx l : rep.eigenvalues) {
    const double m = std::abs(l);
    rep.spectral_margin = std::min(rep.spectral_margin, std::min(m - r, 1.0 - m));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t * t.adjoint(),
                                                     Eigen::EigenvaluesOnly);
  rep.ttstar_min = es.eigenvalues().minCoeff();
  rep.ttstar_max = es.eigenvalues().maxCoeff();
  try {
    rep.defect_min_eig = min_eigenvalue(defect(t, r));
  } catch (const std::domain_error&) {
    rep.singular = true;
    rep.is_member = false;
    return rep;
  }
  rep.is_member = rep.defect_min_eig >= -tol * (r * r + 1.0) &&
                  rep.spectral_margin > 0.0;
  return rep;
}

inline Eigen::MatrixXcd random_unitary(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("random_unitary: need dim >= 1");
  Eigen::MatrixXcd g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Cx d = r(j, j);
    const Cx phase = std::abs(d) > 0.0 ? d / std::abs(d) : Cx(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

enum class SampleStrategy { normal, perturbed };

struct MemberSample {
  Eigen::MatrixXcd matrix;
  bool fallback = false;      // perturbation backoff exhausted
  double nonnormality = 0.0;  // ||T T* - T* T||
};

// Draws a member of the operator class. "normal" conjugates a diagonal of
// eigenvalues kept a fixed margin away from both circles, which is always a
// member by the scalar defect formula. "perturbed" adds a strictly upper
// triangular bump in the same unitary frame and halves it until the
// membership checker accepts.
inline MemberSample sample_member(double r, int dim, SampleStrategy strategy,
                                  std::uint64_t seed) {
  Annulus::unit(r);
  if (dim < 1) throw std::invalid_argument("sample_member: need dim >= 1");
  Rng rng(seed);
  const double delta = 0.02 * (1.0 - r);
  const double lo = r + delta, hi = 1.0 - delta;
  Eigen::VectorXcd eigs(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double mod = std::sqrt(rng.uniform(lo * lo, hi * hi));
    eigs(i) = std::polar(mod, rng.uniform(0.0, 2.0 * kPi));
  }
  const Eigen::MatrixXcd u = random_unitary(dim, rng);
  const Eigen::MatrixXcd normal = u * eigs.asDiagonal() * u.adjoint();
  if (strategy == SampleStrategy::normal) return {normal, false, 0.0};

  Eigen::MatrixXcd bump = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = i + 1; j < dim; ++j)
      bump(i, j) = rng.complex_gaussian();
  double scale = 0.1 * (1.0 - r);
  for (int attempt = 0; attempt < 60; ++attempt, scale *= 0.5) {
    const Eigen::MatrixXcd d =
        Eigen::MatrixXcd(eigs.asDiagonal()) + scale * bump;
    const Eigen::MatrixXcd t = u * d * u.adjoint();
    if (check_membership(t, r).is_member) {
      const double nn = op_norm(t * t.adjoint() - t.adjoint() * t);
      return {t, false, nn};
    }
  }
  return {normal, true, 0.0};
}

struct ConverseCounterexample {
  Eigen::MatrixXcd matrix;           // [[sqrt r, 1-r], [0, sqrt r]]
  double norm = 0.0;                 // ||A||, equals 1 for every r
  double norm_scaled_inverse = 0.0;  // ||r A^{-1}||, equals 1 for every r
  double defect_form = 0.0;          // <defect (1, sqrt r), (1, sqrt r)>, < 0
};

// The 2x2 witness that ||A|| = ||r A^{-1}|| = 1 does not imply membership:
// its defect has a negative direction for every r in (0, 1).
inline ConverseCounterexample converse_counterexample(double r) {
  Annulus::unit(r);
  Eigen::MatrixXcd a(2, 2);
  a << std::sqrt(r), 1.0 - r, 0.0, std::sqrt(r);
  ConverseCounterexample out;
  out.matrix = a;
  out.norm = op_norm(a);
  out.norm_scaled_inverse = op_norm(r * inverse_by_solve(a));
  Eigen::VectorXcd x(2);
  x << 1.0, std::sqrt(r);
  out.defect_form = (x.adjoint() * defect(a, r) * x)(0, 0).real();
  return out;
}

}  // namespace annkit
