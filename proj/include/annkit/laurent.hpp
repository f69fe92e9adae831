#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "annkit/annulus.hpp"
#include "annkit/common.hpp"

namespace annkit {

// Finitely supported two-sided Laurent polynomial sum a_n z^n. Kept in
// canonical form: zero coefficients trimmed at both ends, the zero symbol
// has empty support.
class LaurentPoly {
 public:
  LaurentPoly() = default;

  LaurentPoly(int n_min, std::vector<Cx> coeffs)
      : n_min_(n_min), coeffs_(std::move(coeffs)) {
    for (const Cx& a : coeffs_)
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw std::invalid_argument("LaurentPoly: non-finite coefficient");
    trim();
  }

  static LaurentPoly zero() { return {}; }
  static LaurentPoly constant(Cx c) { return {0, {c}}; }
  static LaurentPoly monomial(int n, Cx a = Cx(1.0, 0.0)) { return {n, {a}}; }

  bool is_zero() const { return coeffs_.empty(); }
  int n_min() const { return n_min_; }
  int n_max() const {
    return n_min_ + static_cast<int>(coeffs_.size()) - 1;
  }
  // Largest power appearing in the multiplication-operator band.
  int reach() const {
    if (is_zero()) return 0;
    return std::max(std::abs(n_min()), std::abs(n_max()));
  }
  int band_width() const { return is_zero() ? 0 : n_max() - n_min(); }

  Cx coeff(int n) const {
    if (is_zero() || n < n_min_ || n > n_max()) return {};
    return coeffs_[static_cast<std::size_t>(n - n_min_)];
  }

  const std::vector<Cx>& coeffs() const { return coeffs_; }

  // Two Horner passes, one per tail. Needs z != 0 when negative powers
  // are present.
  Cx operator()(Cx z) const {
    if (is_zero()) return {};
    if (z == Cx{} && n_min_ < 0)
      throw std::invalid_argument("LaurentPoly: eval at 0 with negative powers");
    const int hi = n_max();
    Cx plus{};  // sum_{n >= 0} a_n z^n
    if (hi >= 0)
      for (int n = hi; n >= 0; --n) plus = plus * z + coeff(n);
    Cx minus{};  // sum_{n <= -1} a_n z^n, Horner in w = 1/z
    if (n_min_ < 0) {
      const Cx w = 1.0 / z;
      const int top = std::min(hi, -1);
      Cx acc = coeff(n_min_);
      for (int n = n_min_ + 1; n <= top; ++n) acc = acc * w + coeff(n);
      for (int i = 0; i < -top; ++i) acc *= w;
      minus = acc;
    }
    return plus + minus;
  }

  LaurentPoly& operator+=(const LaurentPoly& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) return *this = o;
    const int lo = std::min(n_min_, o.n_min_);
    const int hi = std::max(n_max(), o.n_max());
    std::vector<Cx> out(static_cast<std::size_t>(hi - lo + 1));
    for (int n = lo; n <= hi; ++n)
      out[static_cast<std::size_t>(n - lo)] = coeff(n) + o.coeff(n);
    n_min_ = lo;
    coeffs_ = std::move(out);
    trim();
    return *this;
  }

  LaurentPoly& operator*=(Cx s) {
    if (s == Cx{}) return *this = {};
    for (Cx& a : coeffs_) a *= s;
    return *this;
  }

  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) {
    a += b;
    return a;
  }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) {
    LaurentPoly nb = b;
    nb *= Cx(-1.0, 0.0);
    a += nb;
    return a;
  }
  friend LaurentPoly operator*(Cx s, LaurentPoly p) {
    p *= s;
    return p;
  }
  friend LaurentPoly operator*(LaurentPoly p, Cx s) {
    p *= s;
    return p;
  }

  // Coefficient convolution; support adds.
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    const int lo = a.n_min() + b.n_min();
    const int hi = a.n_max() + b.n_max();
    std::vector<Cx> out(static_cast<std::size_t>(hi - lo + 1));
    for (int i = a.n_min(); i <= a.n_max(); ++i)
      for (int j = b.n_min(); j <= b.n_max(); ++j)
        out[static_cast<std::size_t>(i + j - lo)] += a.coeff(i) * b.coeff(j);
    return {lo, std::move(out)};
  }

  bool operator==(const LaurentPoly& o) const {
    return n_min_ == o.n_min_ && coeffs_ == o.coeffs_;
  }

 private:
  void trim() {
    std::size_t head = 0;
    while (head < coeffs_.size() && coeffs_[head] == Cx{}) ++head;
    std::size_t tail = coeffs_.size();
    while (tail > head && coeffs_[tail - 1] == Cx{}) --tail;
    if (head == tail) {
      coeffs_.clear();
      n_min_ = 0;
      return;
    }
    n_min_ += static_cast<int>(head);
    coeffs_ = std::vector<Cx>(coeffs_.begin() + static_cast<long>(head),
                              coeffs_.begin() + static_cast<long>(tail));
  }

  int n_min_ = 0;
  std::vector<Cx> coeffs_;
};

// The extremal family r^n z^-n + z^n used to exhibit the sharpness of the
// sqrt(2) constant; its sup over the closed annulus is 1 + r^n.
inline LaurentPoly sharpness_symbol(double r, int n) {
  if (n < 1) throw std::invalid_argument("sharpness_symbol: need n >= 1");
  Annulus::unit(r);  // validates r
  std::vector<Cx> coeffs(static_cast<std::size_t>(2 * n + 1));
  coeffs.front() = std::pow(r, n);
  coeffs.back() = 1.0;
  return {-n, std::move(coeffs)};
}

// Inverse of the Laurent expansion from equispaced samples on |z| = rho:
//   a_n = (1 / (M rho^n)) sum_k f(rho e^{2 pi i k / M}) e^{-2 pi i k n / M},
// exact for symbols supported in [n_min, n_max] once M > n_max - n_min.
inline LaurentPoly coeffs_from_samples(const std::vector<Cx>& samples,
                                       double rho, int n_min, int n_max) {
  if (n_min > n_max)
    throw std::invalid_argument("coeffs_from_samples: empty band");
  if (!(rho > 0.0))
    throw std::invalid_argument("coeffs_from_samples: need rho > 0");
  const int m = static_cast<int>(samples.size());
  if (m <= n_max - n_min)
    throw std::invalid_argument(
        "coeffs_from_samples: too few samples for the band (aliasing)");
  std::vector<Cx> coeffs(static_cast<std::size_t>(n_max - n_min + 1));
  for (int n = n_min; n <= n_max; ++n) {
    Cx acc{};
    for (int k = 0; k < m; ++k) {
      const double ang = -2.0 * kPi * k * n / m;
      acc += samples[static_cast<std::size_t>(k)] * std::polar(1.0, ang);
    }
    coeffs[static_cast<std::size_t>(n - n_min)] =
        acc / (static_cast<double>(m) * std::pow(rho, n));
  }
  return {n_min, std::move(coeffs)};
}

namespace detail {

// Ternary search for the max of |phi| on an arc of circle |z| = rho.
inline double refine_arc_max(const LaurentPoly& phi, double rho, double lo,
                             double hi, int steps) {
  auto value = [&](double t) { return std::abs(phi(std::polar(rho, t))); };
  for (int i = 0; i < steps; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (value(m1) < value(m2))
      lo = m1;
    else
      hi = m2;
  }
  return std::max(value(lo), std::max(value(hi), value(0.5 * (lo + hi))));
}

inline double circle_sup(const LaurentPoly& phi, double rho, int samples) {
  std::vector<double> vals(static_cast<std::size_t>(samples));
  const double h = 2.0 * kPi / samples;
  for (int k = 0; k < samples; ++k)
    vals[static_cast<std::size_t>(k)] = std::abs(phi(std::polar(rho, k * h)));
  // Refine around the top few local maxima so that two nearly tied peaks
  // cannot leave the reported sup stuck on the wrong one.
  std::vector<int> peaks;
  for (int k = 0; k < samples; ++k) {
    const double prev = vals[static_cast<std::size_t>((k + samples - 1) % samples)];
    const double next = vals[static_cast<std::size_t>((k + 1) % samples)];
    if (vals[static_cast<std::size_t>(k)] >= prev &&
        vals[static_cast<std::size_t>(k)] >= next)
      peaks.push_back(k);
  }
  if (peaks.empty()) peaks.push_back(0);
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) {
    return vals[static_cast<std::size_t>(a)] > vals[static_cast<std::size_t>(b)];
  });
  if (peaks.size() > 8) peaks.resize(8);
  double best = 0.0;
  for (int k : peaks)
    best = std::max(best, refine_arc_max(phi, rho, (k - 1) * h, (k + 1) * h, 40));
  return best;
}

}  // namespace detail

// Sup of |phi| over the closed ring, computed on the two boundary circles
// (the maximum principle makes that the sup over the open ring for symbols
// holomorphic across the closure, which covers every Laurent polynomial).
inline double sup_norm(const LaurentPoly& phi, const Annulus& dom,
                       int samples_per_circle = 4096) {
  if (samples_per_circle < 256)
    throw std::invalid_argument("sup_norm: need at least 256 samples per circle");
  if (phi.is_zero()) return 0.0;
  return std::max(detail::circle_sup(phi, dom.rho_in, samples_per_circle),
                  detail::circle_sup(phi, dom.rho_out, samples_per_circle));
}

struct HardyNorms {
  double classical = 0.0;   // sum (r^{2n} + 1) |a_n|^2, square-rooted
  double reweighted = 0.0;  // negative tail weighted by r^{2n}, nonneg tail flat
};

inline HardyNorms hardy_norms(const LaurentPoly& phi, double r) {
  Annulus::unit(r);  // validates r
  double classical_sq = 0.0;
  double reweighted_sq = 0.0;
  if (!phi.is_zero()) {
    for (int n = phi.n_min(); n <= phi.n_max(); ++n) {
      const double a2 = std::norm(phi.coeff(n));
      if (a2 == 0.0) continue;
      const double w = std::pow(r, 2 * n);
      classical_sq += (w + 1.0) * a2;
      reweighted_sq += (n <= -1 ? w : 1.0) * a2;
    }
  }
  return {std::sqrt(classical_sq), std::sqrt(reweighted_sq)};
}

}  // namespace annkit
