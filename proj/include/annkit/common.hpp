#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace annkit {

using Cx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Scale-aware PSD tolerance: a Hermitian matrix counts as PSD when its
// smallest eigenvalue is >= -tol * max(1, |trace|).
inline constexpr double kPsdTol = 1e-10;

inline Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& a) {
  return 0.5 * (a + a.adjoint());
}

inline double min_eigenvalue(const Eigen::MatrixXcd& hermitian) {
  if (hermitian.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian,
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigen solver failed on Hermitian matrix");
  return es.eigenvalues().minCoeff();
}

inline bool is_psd(const Eigen::MatrixXcd& hermitian, double tol = kPsdTol) {
  const double scale = std::max(1.0, std::abs(hermitian.trace().real()));
  return min_eigenvalue(hermitian) >= -tol * scale;
}

inline double largest_singular_value(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() <= 64 && m.cols() <= 64) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
  }
  // For larger matrices go through m^H m; the symmetric solver keeps the
  // relative accuracy of the top eigenvalue.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m,
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigen solver failed in largest_singular_value");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline void require_finite(const Eigen::MatrixXcd& m, const char* what) {
  if (!m.allFinite())
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

// Deterministic random stream. std::mt19937_64 has a pinned-down algorithm,
// but the standard distributions do not, so uniforms and gaussians are
// derived by hand to keep seeded runs reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  std::uint64_t integer(std::uint64_t n) {  // [0, n)
    return eng_() % n;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * kPi * uniform();
    spare_ = mag * std::sin(ang);
    have_spare_ = true;
    return mag * std::cos(ang);
  }

  Cx complex_gaussian() {  // unit-variance complex normal
    const double s = std::sqrt(0.5);
    const double re = gaussian();
    const double im = gaussian();
    return {s * re, s * im};
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace annkit
