#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "annkit/annulus.hpp"
#include "annkit/common.hpp"
#include "annkit/laurent.hpp"
#include "annkit/multspace.hpp"

namespace annkit {

// Finite interpolation data on the ring, carried together with the images of
// the nodes under the ball embedding.
struct PickProblem {
  double r = 0.0;
  std::vector<Cx> nodes;
  std::vector<Cx> targets;
  std::vector<BallPoint2> embedded;
};

inline PickProblem make_pick_problem(double r, std::vector<Cx> nodes,
                                     std::vector<Cx> targets) {
  Annulus::unit(r);
  if (nodes.empty())
    throw std::invalid_argument("make_pick_problem: need at least one node");
  if (nodes.size() != targets.size())
    throw std::invalid_argument("make_pick_problem: nodes/targets mismatch");
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (nodes[i] == nodes[j])
        throw std::invalid_argument("make_pick_problem: coincident nodes");
  PickProblem p{r, std::move(nodes), std::move(targets), {}};
  p.embedded.reserve(p.nodes.size());
  for (Cx z : p.nodes) p.embedded.push_back(embed_b(r, z));
  return p;
}

// Smallest multiplier norm among two-variable ball extensions matching the
// data at the embedded nodes: the Pick bisection against the two-variable
// ball kernel. A lower bound for the full extension problem that increases
// under node refinement.
inline double min_extension_norm(const PickProblem& p, double tol = 1e-8) {
  if (!(tol > 0.0))
    throw std::invalid_argument("min_extension_norm: need tol > 0");
  const Eigen::MatrixXcd g = gram(KernelKind::drury_arveson_2(), p.embedded);
  return detail::smallest_pick_constant(g, p.targets, 0.0, tol);
}

// Norm of the least-norm element of the kernel space matching the values:
// sqrt(w^H G^{-1} w). Cholesky with a one-shot diagonal jitter retry; Gram
// matrices with condition beyond 1e12 are rejected.
template <class Point>
double min_norm_interpolant(const KernelKind& kind,
                            const std::vector<Point>& points,
                            const std::vector<Cx>& values) {
  if (points.empty())
    throw std::invalid_argument("min_norm_interpolant: no points");
  if (points.size() != values.size())
    throw std::invalid_argument("min_norm_interpolant: points/values mismatch");
  const Eigen::MatrixXcd g = gram(kind, points);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 0.0) || lmax / lmin > 1e12)
    throw std::domain_error(
        "min_norm_interpolant: Gram matrix is singular or has condition > 1e12");
  Eigen::VectorXcd w(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    w(static_cast<Eigen::Index>(i)) = values[i];
  Eigen::LLT<Eigen::MatrixXcd> llt(g);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-12 * g.trace().real();
    llt.compute(g + jitter * Eigen::MatrixXcd::Identity(g.rows(), g.cols()));
    if (llt.info() != Eigen::Success)
      throw std::domain_error("min_norm_interpolant: Cholesky failed");
  }
  const double sq = (w.adjoint() * llt.solve(w))(0, 0).real();
  return std::sqrt(std::max(0.0, sq));
}

struct PullbackResiduals {
  double ball = 0.0;
  double bidisk = 0.0;
};

// The annulus kernel is a constant multiple of the two pulled-back kernels,
// so the least-norm interpolation norms agree after fixed rescalings:
//   ring norm = sqrt((1+r^2)/(1-r^2)) * ball norm
//             = sqrt(1/(1-r^2))       * bidisk norm.
inline PullbackResiduals pullback_checks(double r, const std::vector<Cx>& nodes,
                                         const std::vector<Cx>& values) {
  const double ann = min_norm_interpolant(KernelKind::annulus(r), nodes, values);
  std::vector<BallPoint2> emb;
  std::vector<BallPoint2> pairs;
  emb.reserve(nodes.size());
  pairs.reserve(nodes.size());
  for (Cx z : nodes) {
    emb.push_back(embed_b(r, z));
    pairs.push_back({z, r / z});
  }
  const double ball =
      min_norm_interpolant(KernelKind::drury_arveson_2(), emb, values);
  const double bidisk =
      min_norm_interpolant(KernelKind::bidisk(), pairs, values);
  PullbackResiduals res;
  res.ball = std::abs(std::sqrt((1.0 + r * r) / (1.0 - r * r)) * ball - ann);
  res.bidisk = std::abs(std::sqrt(1.0 / (1.0 - r * r)) * bidisk - ann);
  return res;
}

// Smallest eigenvalue of the ball Pick matrix [(c^2 - w_i conj(w_j)) a2_ij];
// evaluated just above and below a computed bound it certifies the bisection.
inline double pick_matrix_min_eig(const PickProblem& p, double c) {
  const Eigen::MatrixXcd g = gram(KernelKind::drury_arveson_2(), p.embedded);
  Eigen::MatrixXcd m(g.rows(), g.cols());
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      m(i, j) = (c * c - p.targets[static_cast<std::size_t>(i)] *
                             std::conj(p.targets[static_cast<std::size_t>(j)])) *
                g(i, j);
  return min_eigenvalue(hermitize(m));
}

struct ExtensionIntervalCheck {
  double c_star = 0.0;       // finite-node ball extension norm
  double lower_bound = 0.0;  // max_i |phi(z_i)|
  double upper_bound = 0.0;  // sqrt(2) * sup norm
  bool lower_ok = false;
  bool upper_ok = false;
  double psd_margin_above = 0.0;  // Pick-matrix min eigenvalue at c_star + tol
  double psd_margin_below = 0.0;  // and at c_star - tol
};

// Finite-node witness that the minimal ball extension norm of a symbol sits
// inside [sup lower bound at the nodes, sqrt(2) * sup].
inline ExtensionIntervalCheck extension_interval_check(
    const LaurentPoly& phi, double r, const std::vector<Cx>& nodes,
    double tol = 1e-7) {
  std::vector<Cx> targets(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) targets[i] = phi(nodes[i]);
  const PickProblem p = make_pick_problem(r, nodes, std::move(targets));
  ExtensionIntervalCheck out;
  out.c_star = min_extension_norm(p, std::min(tol, 1e-8));
  for (const Cx& w : p.targets)
    out.lower_bound = std::max(out.lower_bound, std::abs(w));
  out.upper_bound = std::sqrt(2.0) * sup_norm(phi, Annulus::unit(r));
  out.lower_ok = out.c_star >= out.lower_bound - tol;
  out.upper_ok = out.c_star <= out.upper_bound + tol;
  out.psd_margin_above = pick_matrix_min_eig(p, out.c_star + tol);
  out.psd_margin_below = pick_matrix_min_eig(p, std::max(out.c_star - tol, 0.0));
  return out;
}

// Radial-angular product grid strictly inside the ring; radii are spaced
// geometrically and each ring is rotated to keep the nodes distinct.
inline std::vector<Cx> default_node_grid(double r, int radii = 3,
                                         int angles = 8) {
  Annulus::unit(r);
  if (radii < 1 || angles < 1)
    throw std::invalid_argument("default_node_grid: need radii, angles >= 1");
  std::vector<Cx> nodes;
  nodes.reserve(static_cast<std::size_t>(radii) * static_cast<std::size_t>(angles));
  for (int i = 1; i <= radii; ++i) {
    const double rho =
        std::pow(r, static_cast<double>(i) / static_cast<double>(radii + 1));
    const double twist = 2.0 * kPi * i / (static_cast<double>(radii + 1) * angles);
    for (int k = 0; k < angles; ++k)
      nodes.push_back(std::polar(rho, 2.0 * kPi * k / angles + twist));
  }
  return nodes;
}

}  // namespace annkit
