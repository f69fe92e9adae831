#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "annkit/annulus.hpp"
#include "annkit/calculus.hpp"
#include "annkit/common.hpp"
#include "annkit/laurent.hpp"
#include "annkit/operators.hpp"

namespace annkit {

// The reweighted Hardy space as a sequence space. Its orthonormal basis is
// {z^n / r^n}_{n <= -1} together with {z^n}_{n >= 0}; with basis weights
// v_j = r^j (j <= -1), v_j = 1 (j >= 0) the multiplication operator by a
// symbol sum a_m z^m has entries (k, n) = a_{k-n} v_k / v_n.

inline double basis_weight(double r, int j) {
  return j <= -1 ? std::pow(r, j) : 1.0;
}

struct MultMatrix {
  double r = 0.0;
  int order = 0;               // truncation to basis indices -order..order
  Eigen::MatrixXcd entries;    // (2 order + 1)^2, row/col i <-> index i - order
};

inline MultMatrix mult_matrix(const LaurentPoly& phi, double r, int order) {
  Annulus::unit(r);
  if (order < 1 || order < phi.reach())
    throw std::invalid_argument(
        "mult_matrix: truncation order below the symbol reach");
  const int dim = 2 * order + 1;
  MultMatrix out{r, order, Eigen::MatrixXcd::Zero(dim, dim)};
  if (phi.is_zero()) return out;
  for (int col = -order; col <= order; ++col) {
    const double vn = basis_weight(r, col);
    for (int m = phi.n_min(); m <= phi.n_max(); ++m) {
      const int row = col + m;
      if (row < -order || row > order) continue;
      const Cx a = phi.coeff(m);
      if (a == Cx{}) continue;
      out.entries(row + order, col + order) = a * basis_weight(r, row) / vn;
    }
  }
  return out;
}

struct MultNormBracket {
  double estimate = 0.0;  // largest singular value at the final truncation
  double lower = 0.0;     // certified lower bound (compressions only grow)
  double upper = 0.0;     // sqrt(2) * sup norm envelope
  bool converged = false;
  int order_used = 0;
};

// Multiplier-norm bracket from a doubling truncation schedule. The truncated
// matrices are compressions of the full multiplication operator, so their
// norms increase monotonically toward it and certify the lower edge; the
// upper edge is the sqrt(2) * sup envelope.
inline MultNormBracket mult_norm(const LaurentPoly& phi, double r,
                                 double tol = 1e-8, int order_max = 128) {
  Annulus::unit(r);
  if (!(tol > 0.0)) throw std::invalid_argument("mult_norm: need tol > 0");
  int start = 8;
  while (start < std::max(phi.reach(), 1)) start *= 2;
  if (start > order_max)
    throw std::invalid_argument("mult_norm: order_max below the symbol reach");
  MultNormBracket out;
  out.upper = std::sqrt(2.0) * sup_norm(phi, Annulus::unit(r));
  double prev = -1.0;
  for (int order = start; order <= order_max; order *= 2) {
    const double s = largest_singular_value(mult_matrix(phi, r, order).entries);
    out.estimate = s;
    out.lower = std::max(out.lower, s);
    out.order_used = order;
    if (prev >= 0.0 && std::abs(s - prev) < tol) {
      out.converged = true;
      break;
    }
    prev = s;
  }
  return out;
}

struct ShiftReport {
  MultMatrix shift;                  // multiplication by z, truncated
  Eigen::MatrixXcd interior_defect;  // indices -order+1 .. order-1
};

// Truncated bilateral shift together with its defect on the interior block,
// where the bi-infinite weight pattern is exact. The corners of a finite
// truncation break the inverse structure, so the defect statement is only
// made on the interior, where it equals (1 - r^2) e_0 e_0*.
inline ShiftReport shift_report(double r, int order) {
  Annulus::unit(r);
  if (order < 2) throw std::invalid_argument("shift_report: need order >= 2");
  const MultMatrix s = mult_matrix(LaurentPoly::monomial(1), r, order);
  const MultMatrix sinv = mult_matrix(LaurentPoly::monomial(-1), r, order);
  const int dim = 2 * order + 1;
  const Eigen::MatrixXcd full =
      (r * r + 1.0) * Eigen::MatrixXcd::Identity(dim, dim) -
      r * r * (sinv.entries * sinv.entries.adjoint()) -
      s.entries * s.entries.adjoint();
  ShiftReport rep{s, full.block(1, 1, dim - 2, dim - 2)};
  return rep;
}

// Pointwise form of the shift-defect computation: the defect symbol times
// the kernel collapses to the constant 1 - r^2. Returns the residual.
inline double defect_kernel_identity_residual(double r, Cx lam, Cx mu) {
  const Annulus dom = Annulus::unit(r);
  if (!dom.contains(lam) || !dom.contains(mu))
    throw std::invalid_argument(
        "defect_kernel_identity_residual: point outside the annulus");
  const Cx k = annulus_kernel(r, lam, mu);
  const Cx p = lam * std::conj(mu);
  return std::abs((r * r + 1.0) * k - (r * r / p) * k - p * k -
                  (1.0 - r * r));
}

namespace detail {

// Smallest c >= 0 such that [(c^2 - w_i conj(w_j)) g_ij] is PSD, by
// bisection. The matrix grows in the Loewner order with c, so feasibility
// is monotone. hi_hint must be PSD-feasible or 0 (then grow by doubling).
inline double smallest_pick_constant(const Eigen::MatrixXcd& g,
                                     const std::vector<Cx>& w, double hi_hint,
                                     double tol) {
  const Eigen::Index n = g.rows();
  Eigen::MatrixXcd scaled(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      scaled(i, j) = w[static_cast<std::size_t>(i)] *
                     std::conj(w[static_cast<std::size_t>(j)]) * g(i, j);
  auto feasible = [&](double c) {
    return is_psd(hermitize(c * c * g - scaled));
  };
  double lo = 0.0;
  for (const Cx& v : w) lo = std::max(lo, std::abs(v));
  if (feasible(lo)) return lo;
  double hi = hi_hint > lo ? hi_hint : std::max(2.0 * lo, 1.0);
  for (int i = 0; !feasible(hi); ++i) {
    if (i >= 64)
      throw std::runtime_error("smallest_pick_constant: no feasible bound");
    hi *= 2.0;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

// Certified lower bound for the multiplier norm: the smallest c making the
// sampled Pick matrix PSD. Nondecreasing as the point set grows.
inline double pick_lower_bound(const LaurentPoly& phi, double r,
                               const std::vector<Cx>& points,
                               double tol = 1e-8) {
  if (points.empty())
    throw std::invalid_argument("pick_lower_bound: need at least one point");
  const Eigen::MatrixXcd g = gram(KernelKind::annulus(r), points);
  std::vector<Cx> vals(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) vals[i] = phi(points[i]);
  const double envelope = std::sqrt(2.0) * sup_norm(phi, Annulus::unit(r));
  return detail::smallest_pick_constant(g, vals, envelope, tol);
}

// The two radius inequalities comparing the shrunken ring {r+1/n < |z| < 1-1/n}
// coefficients with the full-ring ones; both hold whenever n > 2/(1-r).
inline std::pair<bool, bool> shrunk_annulus_inequalities(double r, long n) {
  Annulus::shrunk(r, n);  // validates r and n > 2/(1-r)
  const double a = r + 1.0 / static_cast<double>(n);
  const double b = 1.0 - 1.0 / static_cast<double>(n);
  const bool first = a * a / (1.0 + (a / b) * (a / b)) >= r * r / (1.0 + r * r);
  const bool second = 1.0 / (b * b + a * a) >= 1.0 / (1.0 + r * r);
  return {first, second};
}

// ---------------------------------------------------------------------------
// Randomized verification of the operator-norm bound over the member class.

enum class StrategyMode { normal, perturbed, both };

struct VnConfig {
  double r = 0.5;
  int trials = 100;
  std::vector<int> dims = {2, 3, 4, 5, 6, 7, 8};
  std::uint64_t seed = 1;
  double tol = 1e-8;          // violation slack on the sqrt(2) margins
  double normal_tol = 1e-10;  // violation slack on the normal-strategy margin
  int bandwidth = 10;
  StrategyMode strategy = StrategyMode::both;
  bool keep_trials = false;
};

struct VnTrial {
  int index = 0;
  int dim = 0;
  SampleStrategy strategy = SampleStrategy::normal;
  double phi_of_t_norm = 0.0;
  double sup = 0.0;
  double mult_lower = 0.0;
  double mult_upper = 0.0;
  double margin_sqrt2 = 0.0;
  double margin_mult = 0.0;
  std::string skipped;  // nonempty = trial skipped, with the reason
};

struct VnReport {
  int trials_requested = 0;
  int trials_run = 0;
  int skipped = 0;
  std::vector<std::string> violations;
  std::optional<double> min_margin_sqrt2;
  std::optional<double> min_margin_mult;
  std::optional<double> min_margin_normal;  // only over normal-strategy trials
  std::optional<double> max_ratio;          // ||phi(T)|| / sup
  std::vector<VnTrial> trials;              // kept when keep_trials is set
};

inline LaurentPoly random_symbol(Rng& rng, int bandwidth) {
  const int lo = -static_cast<int>(rng.integer(static_cast<std::uint64_t>(bandwidth) + 1));
  const int hi = static_cast<int>(rng.integer(static_cast<std::uint64_t>(bandwidth) + 1));
  std::vector<Cx> coeffs(static_cast<std::size_t>(hi - lo + 1));
  for (Cx& c : coeffs) c = rng.complex_gaussian();
  LaurentPoly phi(lo, std::move(coeffs));
  if (phi.is_zero()) phi = LaurentPoly::constant(1.0);
  return phi;
}

inline VnReport vn_experiment(const VnConfig& cfg) {
  Annulus::unit(cfg.r);
  if (cfg.trials < 0) throw std::invalid_argument("vn_experiment: trials < 0");
  if (cfg.dims.empty()) throw std::invalid_argument("vn_experiment: no dims");
  for (int d : cfg.dims)
    if (d < 1) throw std::invalid_argument("vn_experiment: dim < 1");
  const double sqrt2 = std::sqrt(2.0);
  VnReport rep;
  rep.trials_requested = cfg.trials;
  auto fold_min = [](std::optional<double>& slot, double v) {
    slot = slot ? std::min(*slot, v) : v;
  };
  auto fold_max = [](std::optional<double>& slot, double v) {
    slot = slot ? std::max(*slot, v) : v;
  };
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t base = cfg.seed + static_cast<std::uint64_t>(trial);
    VnTrial tr;
    tr.index = trial;
    tr.dim = cfg.dims[static_cast<std::size_t>(trial) % cfg.dims.size()];
    switch (cfg.strategy) {
      case StrategyMode::normal: tr.strategy = SampleStrategy::normal; break;
      case StrategyMode::perturbed: tr.strategy = SampleStrategy::perturbed; break;
      case StrategyMode::both:
        tr.strategy = trial % 2 == 0 ? SampleStrategy::normal
                                     : SampleStrategy::perturbed;
        break;
    }
    // Distinct streams for the operator and the symbol.
    Rng symbol_rng(base ^ 0x9e3779b97f4a7c15ull);
    const LaurentPoly phi = random_symbol(symbol_rng, cfg.bandwidth);
    try {
      const MemberSample sample = sample_member(cfg.r, tr.dim, tr.strategy, base);
      tr.sup = sup_norm(phi, Annulus::unit(cfg.r));
      if (tr.sup < 1e-12) throw std::runtime_error("degenerate symbol");
      tr.phi_of_t_norm =
          op_norm(apply_function(phi, sample.matrix, cfg.r).value);
      const MultNormBracket mb = mult_norm(phi, cfg.r);
      tr.mult_lower = mb.lower;
      tr.mult_upper = mb.upper;
      tr.margin_sqrt2 = sqrt2 * tr.sup - tr.phi_of_t_norm;
      tr.margin_mult = mb.upper - tr.phi_of_t_norm;
    } catch (const std::exception& e) {
      tr.skipped = e.what();
    }
    if (tr.skipped.empty()) {
      ++rep.trials_run;
      fold_min(rep.min_margin_sqrt2, tr.margin_sqrt2);
      fold_min(rep.min_margin_mult, tr.margin_mult);
      fold_max(rep.max_ratio, tr.phi_of_t_norm / tr.sup);
      if (tr.margin_sqrt2 < -cfg.tol)
        rep.violations.push_back("trial " + std::to_string(trial) +
                                 ": sqrt2 envelope violated by " +
                                 std::to_string(-tr.margin_sqrt2));
      if (tr.margin_mult < -cfg.tol)
        rep.violations.push_back("trial " + std::to_string(trial) +
                                 ": multiplier envelope violated by " +
                                 std::to_string(-tr.margin_mult));
      if (tr.strategy == SampleStrategy::normal) {
        const double margin_normal = tr.sup - tr.phi_of_t_norm;
        fold_min(rep.min_margin_normal, margin_normal);
        if (margin_normal < -cfg.normal_tol)
          rep.violations.push_back("trial " + std::to_string(trial) +
                                   ": normal sup bound violated by " +
                                   std::to_string(-margin_normal));
      }
    } else {
      ++rep.skipped;
    }
    if (cfg.keep_trials) rep.trials.push_back(std::move(tr));
  }
  return rep;
}

}  // namespace annkit
