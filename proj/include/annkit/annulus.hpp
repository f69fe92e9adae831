#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "annkit/common.hpp"

namespace annkit {

// Open annulus {rho_in < |z| < rho_out}. The canonical domain has
// rho_out = 1 and rho_in = r in (0, 1).
struct Annulus {
  double rho_in;
  double rho_out;

  Annulus(double in, double out) : rho_in(in), rho_out(out) {
    if (!(in > 0.0) || !(in < out))
      throw std::invalid_argument("Annulus: need 0 < rho_in < rho_out");
  }

  static Annulus unit(double r) {
    if (!(r > 0.0 && r < 1.0))
      throw std::invalid_argument("Annulus::unit: need 0 < r < 1");
    return {r, 1.0};
  }

  // The shrunken ring {r + 1/n < |z| < 1 - 1/n}; nonempty iff n > 2/(1-r).
  static Annulus shrunk(double r, long n) {
    if (!(r > 0.0 && r < 1.0))
      throw std::invalid_argument("Annulus::shrunk: need 0 < r < 1");
    if (static_cast<double>(n) <= 2.0 / (1.0 - r))
      throw std::invalid_argument("Annulus::shrunk: need n > 2/(1-r)");
    const double inv = 1.0 / static_cast<double>(n);
    return {r + inv, 1.0 - inv};
  }

  bool contains(Cx z) const {
    const double m = std::abs(z);
    return m > rho_in && m < rho_out;
  }
};

// Point in the open unit ball of C^2.
struct BallPoint2 {
  Cx z1;
  Cx z2;

  double squared_norm() const { return std::norm(z1) + std::norm(z2); }
  bool in_ball() const { return squared_norm() < 1.0; }
  bool in_bidisk() const { return std::abs(z1) < 1.0 && std::abs(z2) < 1.0; }
};

struct KernelKind {
  enum class Tag { annulus, annulus_general, drury_arveson_2, bidisk };

  Tag tag = Tag::annulus;
  double rho_in = 0.0;
  double rho_out = 1.0;

  static KernelKind annulus(double r) {
    Annulus::unit(r);  // validates r
    return {Tag::annulus, r, 1.0};
  }
  static KernelKind annulus_general(double rho_in, double rho_out) {
    Annulus dom(rho_in, rho_out);  // validates radii
    return {Tag::annulus_general, dom.rho_in, dom.rho_out};
  }
  static KernelKind drury_arveson_2() { return {Tag::drury_arveson_2}; }
  static KernelKind bidisk() { return {Tag::bidisk}; }

  bool scalar_points() const {
    return tag == Tag::annulus || tag == Tag::annulus_general;
  }

  Annulus domain() const {
    if (!scalar_points())
      throw std::invalid_argument("KernelKind: ball kernels have no annulus");
    return {rho_in, rho_out};
  }

  std::string name() const {
    switch (tag) {
      case Tag::annulus: return "annulus";
      case Tag::annulus_general: return "annulus_general";
      case Tag::drury_arveson_2: return "drury_arveson_2";
      case Tag::bidisk: return "bidisk";
    }
    return "?";
  }
};

// Reproducing kernel of the reweighted Hardy space on {r < |z| < 1}:
//   k(lam, mu) = (1 - r^2) / ((1 - lam conj(mu)) (1 - r^2 / (lam conj(mu)))).
inline Cx annulus_kernel(double r, Cx lam, Cx mu) {
  const Cx p = lam * std::conj(mu);
  return (1.0 - r * r) / ((1.0 - p) * (1.0 - r * r / p));
}

// Two-radius variant 1 / ((1 - rho_in^2/(lam conj(mu))) (1 - lam conj(mu)/rho_out^2)),
// the natural kernel of a general ring; no leading normalization factor.
inline Cx annulus_kernel_general(double rho_in, double rho_out, Cx lam, Cx mu) {
  const Cx p = lam * std::conj(mu);
  return 1.0 /
         ((1.0 - rho_in * rho_in / p) * (1.0 - p / (rho_out * rho_out)));
}

inline Cx drury_arveson_kernel(const BallPoint2& lam, const BallPoint2& mu) {
  return 1.0 / (1.0 - lam.z1 * std::conj(mu.z1) - lam.z2 * std::conj(mu.z2));
}

inline Cx bidisk_kernel(const BallPoint2& lam, const BallPoint2& mu) {
  return 1.0 / ((1.0 - lam.z1 * std::conj(mu.z1)) *
                (1.0 - lam.z2 * std::conj(mu.z2)));
}

inline Cx kernel_eval(const KernelKind& kind, Cx lam, Cx mu) {
  if (!kind.scalar_points())
    throw std::invalid_argument("kernel_eval: " + kind.name() +
                                " expects two-coordinate points");
  const Annulus dom = kind.domain();
  if (!dom.contains(lam) || !dom.contains(mu))
    throw std::invalid_argument("kernel_eval: point outside the annulus");
  if (kind.tag == KernelKind::Tag::annulus)
    return annulus_kernel(kind.rho_in, lam, mu);
  return annulus_kernel_general(kind.rho_in, kind.rho_out, lam, mu);
}

inline Cx kernel_eval(const KernelKind& kind, const BallPoint2& lam,
                      const BallPoint2& mu) {
  switch (kind.tag) {
    case KernelKind::Tag::drury_arveson_2:
      if (!lam.in_ball() || !mu.in_ball())
        throw std::invalid_argument("kernel_eval: point outside the ball");
      return drury_arveson_kernel(lam, mu);
    case KernelKind::Tag::bidisk:
      if (!lam.in_bidisk() || !mu.in_bidisk())
        throw std::invalid_argument("kernel_eval: point outside the bidisk");
      return bidisk_kernel(lam, mu);
    default:
      throw std::invalid_argument("kernel_eval: " + kind.name() +
                                  " expects scalar points");
  }
}

// Embedding of the annulus into the unit ball of C^2,
//   b(z) = (z / sqrt(r^2+1), (r / sqrt(r^2+1)) / z),
// which lands strictly inside the ball for every z in the annulus.
inline BallPoint2 embed_b(double r, Cx lam) {
  const Annulus dom = Annulus::unit(r);
  if (!dom.contains(lam))
    throw std::invalid_argument("embed_b: point outside the annulus");
  const double s = std::sqrt(r * r + 1.0);
  return {lam / s, (r / s) / lam};
}

template <class Point>
Eigen::MatrixXcd gram(const KernelKind& kind, const std::vector<Point>& pts) {
  if (pts.empty()) throw std::invalid_argument("gram: empty point list");
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = Cx(kernel_eval(kind, pts[i], pts[i]).real(), 0.0);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      g(i, j) = kernel_eval(kind, pts[i], pts[j]);
      g(j, i) = std::conj(g(i, j));
    }
  }
  return g;
}

struct KernelIdentityResiduals {
  double ball = 0.0;    // vs the rescaled two-variable ball kernel at b(z)
  double bidisk = 0.0;  // vs the rescaled bidisk kernel at (z, r/z)
};

// The annulus kernel factors through both the ball and the bidisk:
//   k(lam, mu) = (1-r^2)/(1+r^2) * a2(b(lam), b(mu))
//              = (1-r^2) * s2((lam, r/lam), (mu, r/mu)).
// Returns the max absolute residual of each identity over the samples.
inline KernelIdentityResiduals verify_kernel_identities(
    double r, const std::vector<std::pair<Cx, Cx>>& samples) {
  KernelIdentityResiduals res;
  for (const auto& [lam, mu] : samples) {
    const Cx k = kernel_eval(KernelKind::annulus(r), lam, mu);
    const Cx via_ball = (1.0 - r * r) / (1.0 + r * r) *
                        drury_arveson_kernel(embed_b(r, lam), embed_b(r, mu));
    const Cx via_bidisk =
        (1.0 - r * r) *
        bidisk_kernel({lam, r / lam}, {mu, r / mu});
    res.ball = std::max(res.ball, std::abs(k - via_ball));
    res.bidisk = std::max(res.bidisk, std::abs(k - via_bidisk));
  }
  return res;
}

}  // namespace annkit
