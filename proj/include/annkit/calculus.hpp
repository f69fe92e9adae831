#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "annkit/annulus.hpp"
#include "annkit/common.hpp"
#include "annkit/laurent.hpp"
#include "annkit/operators.hpp"

namespace annkit {

enum class CalcMethod { automatic, series, eigen, contour };

inline const char* to_string(CalcMethod m) {
  switch (m) {
    case CalcMethod::automatic: return "automatic";
    case CalcMethod::series: return "series";
    case CalcMethod::eigen: return "eigen";
    case CalcMethod::contour: return "contour";
  }
  return "?";
}

struct FunctionCalcResult {
  Eigen::MatrixXcd value;
  CalcMethod used = CalcMethod::series;
  bool eigen_fallback = false;    // eigen requested but too ill-conditioned
  bool contour_converged = true;  // quadrature refinement met its target
  int contour_nodes = 0;          // nodes per circle at the final refinement
};

namespace detail {

inline void require_spectrum_in_ring(const std::vector<Cx>& eigs, double r) {
  const Annulus dom = Annulus::unit(r);
  for (Cx l : eigs)
    if (!dom.contains(l))
      throw std::domain_error(
          "functional calculus: spectrum not strictly inside the annulus");
}

inline Eigen::MatrixXcd calculus_series(const LaurentPoly& phi,
                                        const Eigen::MatrixXcd& t) {
  const Eigen::Index n = t.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  if (phi.is_zero()) return out;
  if (phi.coeff(0) != Cx{}) out += phi.coeff(0) * id;
  Eigen::MatrixXcd pow = id;
  for (int k = 1; k <= phi.n_max(); ++k) {
    pow = pow * t;
    if (phi.coeff(k) != Cx{}) out += phi.coeff(k) * pow;
  }
  if (phi.n_min() < 0) {
    const Eigen::MatrixXcd inv = inverse_by_solve(t);
    pow = id;
    for (int k = -1; k >= phi.n_min(); --k) {
      pow = pow * inv;
      if (phi.coeff(k) != Cx{}) out += phi.coeff(k) * pow;
    }
  }
  return out;
}

inline Eigen::MatrixXcd calculus_contour(const LaurentPoly& phi,
                                         const Eigen::MatrixXcd& t, double r,
                                         const std::vector<Cx>& eigs,
                                         bool* converged, int* nodes_used) {
  const Eigen::Index n = t.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  double mod_lo = 1.0, mod_hi = 0.0;
  for (Cx l : eigs) {
    mod_lo = std::min(mod_lo, std::abs(l));
    mod_hi = std::max(mod_hi, std::abs(l));
  }
  // Circles at the geometric means between the spectral extremes and the
  // respective boundary circles.
  const double rho_in = std::sqrt(r * mod_lo);
  const double rho_out = std::sqrt(mod_hi);
  auto quadrature = [&](int m) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [rho, sign] :
         {std::pair<double, double>{rho_out, 1.0}, {rho_in, -1.0}}) {
      Eigen::MatrixXcd circle = Eigen::MatrixXcd::Zero(n, n);
      for (int k = 0; k < m; ++k) {
        const Cx z = std::polar(rho, 2.0 * kPi * k / m);
        circle += phi(z) * z * (z * id - t).partialPivLu().solve(id);
      }
      acc += (sign / m) * circle;
    }
    return acc;
  };
  int m = 512;
  Eigen::MatrixXcd prev = quadrature(m);
  *converged = false;
  while (m < 32768) {
    m *= 2;
    Eigen::MatrixXcd next = quadrature(m);
    const double diff = (next - prev).norm();
    prev = std::move(next);
    if (diff < 1e-10 * std::max(1.0, prev.norm())) {
      *converged = true;
      break;
    }
  }
  *nodes_used = m;
  return prev;
}

}  // namespace detail

// Laurent functional calculus phi(T) = sum a_n T^n for spectra strictly
// inside the ring. Three routes: the defining finite sum, eigendecomposition
// (diagonalizable T), and two-circle Cauchy quadrature; "automatic" picks
// eigen when the eigenvector basis is well conditioned and contour otherwise.
inline FunctionCalcResult apply_function(const LaurentPoly& phi,
                                         const Eigen::MatrixXcd& t, double r,
                                         CalcMethod method = CalcMethod::automatic) {
  if (t.rows() != t.cols())
    throw std::invalid_argument("apply_function: matrix must be square");
  require_finite(t, "apply_function");
  const std::vector<Cx> eigs = spectrum(t);
  detail::require_spectrum_in_ring(eigs, r);

  FunctionCalcResult res;
  if (method == CalcMethod::series) {
    res.value = detail::calculus_series(phi, t);
    res.used = CalcMethod::series;
    return res;
  }

  if (method == CalcMethod::eigen || method == CalcMethod::automatic) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(t);
    if (ces.info() == Eigen::Success) {
      const Eigen::MatrixXcd v = ces.eigenvectors();
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
      const double smin = svd.singularValues().minCoeff();
      const double cond =
          smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                     : std::numeric_limits<double>::infinity();
      if (cond < 1e8) {
        Eigen::VectorXcd fl(ces.eigenvalues().size());
        for (Eigen::Index i = 0; i < fl.size(); ++i)
          fl(i) = phi(ces.eigenvalues()(i));
        res.value = v * fl.asDiagonal() *
                    v.partialPivLu().solve(Eigen::MatrixXcd::Identity(
                        t.rows(), t.cols()));
        res.used = CalcMethod::eigen;
        return res;
      }
    }
    res.eigen_fallback = (method == CalcMethod::eigen);
  }

  res.value = detail::calculus_contour(phi, t, r, eigs, &res.contour_converged,
                                       &res.contour_nodes);
  res.used = CalcMethod::contour;
  return res;
}

// Finitely supported hereditary symbol h(lam, mu) = sum c_{mn} lam^m conj(mu)^n.
class HereditarySeries {
 public:
  HereditarySeries() = default;

  HereditarySeries(int m_min, int n_min, Eigen::MatrixXcd coeffs)
      : m_min_(m_min), n_min_(n_min), coeffs_(std::move(coeffs)) {
    require_finite(coeffs_, "HereditarySeries");
    trim();
  }

  static HereditarySeries constant(Cx c) {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = c;
    return {0, 0, std::move(m)};
  }

  // h(lam, mu) = f(lam) * conj(g(mu)).
  static HereditarySeries dyad(const LaurentPoly& f, const LaurentPoly& g) {
    if (f.is_zero() || g.is_zero()) return {};
    Eigen::MatrixXcd m(f.n_max() - f.n_min() + 1, g.n_max() - g.n_min() + 1);
    for (int i = f.n_min(); i <= f.n_max(); ++i)
      for (int j = g.n_min(); j <= g.n_max(); ++j)
        m(i - f.n_min(), j - g.n_min()) = f.coeff(i) * std::conj(g.coeff(j));
    return {f.n_min(), g.n_min(), std::move(m)};
  }

  // The defect symbol 1 + r^2 - r^2/(lam conj(mu)) - lam conj(mu); feeding it
  // through the hereditary calculus reproduces the operator defect.
  static HereditarySeries defect_kernel(double r) {
    Annulus::unit(r);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
    m(0, 0) = -r * r;     // c_{-1,-1}
    m(1, 1) = 1 + r * r;  // c_{0,0}
    m(2, 2) = -1.0;       // c_{1,1}
    return {-1, -1, std::move(m)};
  }

  bool is_zero() const { return coeffs_.size() == 0; }
  int m_min() const { return m_min_; }
  int m_max() const { return m_min_ + static_cast<int>(coeffs_.rows()) - 1; }
  int n_min() const { return n_min_; }
  int n_max() const { return n_min_ + static_cast<int>(coeffs_.cols()) - 1; }

  Cx coeff(int m, int n) const {
    if (is_zero() || m < m_min() || m > m_max() || n < n_min() || n > n_max())
      return {};
    return coeffs_(m - m_min_, n - n_min_);
  }

  const Eigen::MatrixXcd& coeffs() const { return coeffs_; }

  Cx eval(Cx lam, Cx mu) const {
    if (is_zero()) return {};
    if ((lam == Cx{} && m_min_ < 0) || (mu == Cx{} && n_min_ < 0))
      throw std::invalid_argument("HereditarySeries: eval at 0 with negative powers");
    const Cx cmu = std::conj(mu);
    // Power tables over the (small) index boxes.
    std::vector<Cx> lp(static_cast<std::size_t>(coeffs_.rows()));
    std::vector<Cx> mp(static_cast<std::size_t>(coeffs_.cols()));
    for (int i = 0; i < static_cast<int>(lp.size()); ++i)
      lp[static_cast<std::size_t>(i)] = pow_int(lam, m_min_ + i);
    for (int j = 0; j < static_cast<int>(mp.size()); ++j)
      mp[static_cast<std::size_t>(j)] = pow_int(cmu, n_min_ + j);
    Cx acc{};
    for (Eigen::Index i = 0; i < coeffs_.rows(); ++i)
      for (Eigen::Index j = 0; j < coeffs_.cols(); ++j)
        acc += coeffs_(i, j) * lp[static_cast<std::size_t>(i)] *
               mp[static_cast<std::size_t>(j)];
    return acc;
  }

  // c*_{mn} = conj(c_{nm}); applying the result to T gives the adjoint of
  // applying the original.
  HereditarySeries involution() const {
    if (is_zero()) return {};
    return {n_min_, m_min_, coeffs_.transpose().conjugate()};
  }

  bool operator==(const HereditarySeries& o) const {
    return m_min_ == o.m_min_ && n_min_ == o.n_min_ &&
           coeffs_.rows() == o.coeffs_.rows() &&
           coeffs_.cols() == o.coeffs_.cols() && coeffs_ == o.coeffs_;
  }

 private:
  static Cx pow_int(Cx z, int k) {
    Cx out(1.0, 0.0);
    const Cx base = k >= 0 ? z : 1.0 / z;
    for (int i = 0; i < std::abs(k); ++i) out *= base;
    return out;
  }

  void trim() {
    if (coeffs_.size() == 0) {
      *this = HereditarySeries();
      return;
    }
    int rlo = 0, rhi = static_cast<int>(coeffs_.rows()) - 1;
    int clo = 0, chi = static_cast<int>(coeffs_.cols()) - 1;
    auto row_zero = [&](int i) { return coeffs_.row(i).isZero(0.0); };
    auto col_zero = [&](int j) { return coeffs_.col(j).isZero(0.0); };
    while (rlo <= rhi && row_zero(rlo)) ++rlo;
    while (rhi >= rlo && row_zero(rhi)) --rhi;
    while (clo <= chi && col_zero(clo)) ++clo;
    while (chi >= clo && col_zero(chi)) --chi;
    if (rlo > rhi || clo > chi) {
      m_min_ = n_min_ = 0;
      coeffs_.resize(0, 0);
      return;
    }
    const Eigen::MatrixXcd block =
        coeffs_.block(rlo, clo, rhi - rlo + 1, chi - clo + 1);
    m_min_ += rlo;
    n_min_ += clo;
    coeffs_ = block;
  }

  int m_min_ = 0;
  int n_min_ = 0;
  Eigen::MatrixXcd coeffs_;
};

// h(T) = sum c_{mn} T^m (T*)^n, every T power to the left of every T* power.
inline Eigen::MatrixXcd apply_hereditary(const HereditarySeries& h,
                                         const Eigen::MatrixXcd& t, double r) {
  if (t.rows() != t.cols())
    throw std::invalid_argument("apply_hereditary: matrix must be square");
  require_finite(t, "apply_hereditary");
  detail::require_spectrum_in_ring(spectrum(t), r);
  const Eigen::Index n = t.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  if (h.is_zero()) return out;

  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  auto power_table = [&](const Eigen::MatrixXcd& base, int lo, int hi) {
    std::vector<Eigen::MatrixXcd> table(static_cast<std::size_t>(hi - lo + 1));
    Eigen::MatrixXcd inv;
    if (lo < 0) inv = inverse_by_solve(base);
    Eigen::MatrixXcd pos = id, neg = id;
    if (lo <= 0 && hi >= 0) table[static_cast<std::size_t>(-lo)] = id;
    for (int k = 1; k <= hi; ++k) {
      pos = pos * base;
      if (k >= lo) table[static_cast<std::size_t>(k - lo)] = pos;
    }
    for (int k = -1; k >= lo; --k) {
      neg = neg * inv;
      if (k <= hi) table[static_cast<std::size_t>(k - lo)] = neg;
    }
    return table;
  };
  const auto tpow = power_table(t, h.m_min(), h.m_max());
  const auto spow = power_table(t.adjoint(), h.n_min(), h.n_max());
  for (int m = h.m_min(); m <= h.m_max(); ++m) {
    Eigen::MatrixXcd right = Eigen::MatrixXcd::Zero(n, n);
    bool any = false;
    for (int k = h.n_min(); k <= h.n_max(); ++k) {
      const Cx c = h.coeff(m, k);
      if (c == Cx{}) continue;
      right += c * spow[static_cast<std::size_t>(k - h.n_min())];
      any = true;
    }
    if (any) out += tpow[static_cast<std::size_t>(m - h.m_min())] * right;
  }
  return out;
}

// Torus samples H(j, k) = F(rho1 e^{i 2 pi j / J}, rho2 e^{i 2 pi k / K}).
template <class F>
Eigen::MatrixXcd sample_hereditary(F&& f, double rho1, int grid1, double rho2,
                                   int grid2) {
  if (grid1 < 1 || grid2 < 1)
    throw std::invalid_argument("sample_hereditary: empty grid");
  Eigen::MatrixXcd h(grid1, grid2);
  for (int j = 0; j < grid1; ++j)
    for (int k = 0; k < grid2; ++k)
      h(j, k) = f(std::polar(rho1, 2.0 * kPi * j / grid1),
                  std::polar(rho2, 2.0 * kPi * k / grid2));
  return h;
}

// Double Laurent coefficients from torus samples, radially unweighted by
// rho1^-m rho2^-n; holomorphic in the first slot, anti-holomorphic in the
// second. Exact for series supported in the requested box.
inline HereditarySeries hereditary_from_samples(const Eigen::MatrixXcd& samples,
                                                double rho1, double rho2,
                                                int m_min, int m_max,
                                                int n_min, int n_max) {
  if (m_min > m_max || n_min > n_max)
    throw std::invalid_argument("hereditary_from_samples: empty box");
  if (!(rho1 > 0.0) || !(rho2 > 0.0))
    throw std::invalid_argument("hereditary_from_samples: need positive radii");
  const int grid1 = static_cast<int>(samples.rows());
  const int grid2 = static_cast<int>(samples.cols());
  if (grid1 <= m_max - m_min || grid2 <= n_max - n_min)
    throw std::invalid_argument(
        "hereditary_from_samples: grid too small for the box (aliasing)");
  // Separable inversion: transform rows first, then columns.
  const int rows = m_max - m_min + 1;
  const int cols = n_max - n_min + 1;
  Eigen::MatrixXcd partial(rows, grid2);
  for (int m = m_min; m <= m_max; ++m)
    for (int k = 0; k < grid2; ++k) {
      Cx acc{};
      for (int j = 0; j < grid1; ++j)
        acc += samples(j, k) * std::polar(1.0, -2.0 * kPi * j * m / grid1);
      partial(m - m_min, k) = acc / static_cast<double>(grid1);
    }
  Eigen::MatrixXcd coeffs(rows, cols);
  for (int m = m_min; m <= m_max; ++m)
    for (int n = n_min; n <= n_max; ++n) {
      Cx acc{};
      for (int k = 0; k < grid2; ++k)
        acc += partial(m - m_min, k) * std::polar(1.0, 2.0 * kPi * k * n / grid2);
      coeffs(m - m_min, n - n_min) =
          acc / (static_cast<double>(grid2) * std::pow(rho1, m) * std::pow(rho2, n));
    }
  return {m_min, n_min, std::move(coeffs)};
}

struct PsdFactorization {
  std::vector<double> eigenvalues;  // kept, descending
  Eigen::MatrixXcd factors;         // column i = sqrt(eig_i) * eigvec_i
  double dropped_mass = 0.0;        // total magnitude of dropped negatives
  double reconstruction_residual = 0.0;  // Frobenius
  std::vector<Cx> grid;             // points behind the Gram, when known
};

// Finite-grid factorization of a PSD kernel sample: G ~ factors * factors^H.
inline PsdFactorization factor_psd(const Eigen::MatrixXcd& g,
                                   double tol = kPsdTol) {
  if (g.rows() != g.cols())
    throw std::invalid_argument("factor_psd: matrix must be square");
  require_finite(g, "factor_psd");
  const Eigen::MatrixXcd h = hermitize(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("factor_psd: eigen solver failed");
  const double trace = std::max(h.trace().real(), 0.0);
  const double cut = tol * trace;
  if (es.eigenvalues().minCoeff() < -cut)
    throw std::domain_error("factor_psd: matrix is not PSD within tolerance");
  PsdFactorization out;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
    const double l = es.eigenvalues()(i);
    if (l > cut)
      keep.push_back(i);
    else if (l < 0.0)
      out.dropped_mass += -l;
  }
  out.factors.resize(h.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const double l = es.eigenvalues()(keep[c]);
    out.eigenvalues.push_back(l);
    out.factors.col(static_cast<Eigen::Index>(c)) =
        std::sqrt(l) * es.eigenvectors().col(keep[c]);
  }
  out.reconstruction_residual = (h - out.factors * out.factors.adjoint()).norm();
  return out;
}

inline PsdFactorization factor_kernel_gram(const KernelKind& kind,
                                           const std::vector<Cx>& points,
                                           double tol = kPsdTol) {
  PsdFactorization out = factor_psd(gram(kind, points), tol);
  out.grid = points;
  return out;
}

struct ModelKernelReport {
  double min_eig = 0.0;
  bool psd = false;
};

// Builds [(C^2 - phi(z_i) conj(phi(z_j))) k(z_i, z_j)] and reports its
// smallest eigenvalue; PSD here certifies the multiplier bound C at the
// sampled points.
inline ModelKernelReport model_kernel_check(const LaurentPoly& phi, double c,
                                            double r,
                                            const std::vector<Cx>& points) {
  const KernelKind kind = KernelKind::annulus(r);
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  if (n == 0) throw std::invalid_argument("model_kernel_check: no points");
  Eigen::MatrixXcd m(n, n);
  std::vector<Cx> vals(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) vals[i] = phi(points[i]);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = (c * c - vals[static_cast<std::size_t>(i)] *
                             std::conj(vals[static_cast<std::size_t>(j)])) *
                kernel_eval(kind, points[static_cast<std::size_t>(i)],
                            points[static_cast<std::size_t>(j)]);
  ModelKernelReport rep;
  const Eigen::MatrixXcd hm = hermitize(m);
  rep.min_eig = min_eigenvalue(hm);
  rep.psd = rep.min_eig >= -kPsdTol * std::max(1.0, std::abs(hm.trace().real()));
  return rep;
}

}  // namespace annkit
