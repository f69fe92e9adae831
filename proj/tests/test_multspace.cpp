#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "annkit/common.hpp"
#include "annkit/laurent.hpp"
#include "annkit/multspace.hpp"
#include "annkit/pick.hpp"

using namespace annkit;

namespace {

LaurentPoly random_poly(Rng& rng, int reach) {
  const int lo = -static_cast<int>(rng.integer(reach + 1));
  const int hi = static_cast<int>(rng.integer(reach + 1));
  std::vector<Cx> coeffs(static_cast<std::size_t>(hi - lo + 1));
  for (Cx& c : coeffs) c = rng.complex_gaussian();
  LaurentPoly p(lo, std::move(coeffs));
  return p.is_zero() ? LaurentPoly::constant(1.0) : p;
}

}  // namespace

TEST_CASE("multiplication matrix entries") {
  const double r = 0.5;
  SECTION("coordinate symbol is the weighted shift") {
    const MultMatrix m = mult_matrix(LaurentPoly::monomial(1), r, 4);
    const int c = m.order;  // center offset
    CHECK(m.entries(c + 0, c - 1) == Cx{0.5, 0.0});  // a_1 v_0 / v_{-1} = r
    CHECK(m.entries(c - 1, c - 2) == Cx{0.5, 0.0});
    for (int k = 0; k < 4; ++k)
      CHECK(m.entries(c + k + 1, c + k) == Cx{1.0, 0.0});
    // Nothing off the first subdiagonal.
    CHECK(m.entries(c, c) == Cx{});
    CHECK(m.entries(c - 1, c) == Cx{});
  }
  SECTION("constants give the identity") {
    const MultMatrix m = mult_matrix(LaurentPoly::constant(1.0), r, 3);
    CHECK((m.entries - Eigen::MatrixXcd::Identity(7, 7)).norm() == 0.0);
  }
  SECTION("linear in the symbol") {
    const MultMatrix a = mult_matrix(LaurentPoly::monomial(1), r, 5);
    const MultMatrix b = mult_matrix(LaurentPoly::monomial(-1), r, 5);
    const MultMatrix sum = mult_matrix(
        LaurentPoly::monomial(1) + LaurentPoly::monomial(-1), r, 5);
    CHECK((sum.entries - a.entries - b.entries).norm() == 0.0);
  }
  SECTION("order below the symbol reach is rejected") {
    CHECK_THROWS_AS(mult_matrix(sharpness_symbol(r, 5), r, 4),
                    std::invalid_argument);
  }
}

TEST_CASE("multiplier norm bracket") {
  const double r = 0.5;
  SECTION("coordinate symbol has norm one") {
    const MultNormBracket mb = mult_norm(LaurentPoly::monomial(1), r);
    CHECK(mb.estimate == Catch::Approx(1.0).epsilon(1e-10));
    CHECK(mb.converged);
    CHECK(mb.lower <= mb.estimate + 1e-12);
    CHECK(mb.estimate <= mb.upper + 1e-12);
  }
  SECTION("constants are exact at every truncation") {
    const MultNormBracket mb = mult_norm(LaurentPoly::constant({3.0, 4.0}), r);
    CHECK(mb.estimate == Catch::Approx(5.0).epsilon(1e-13));
    CHECK(mb.converged);
  }
  SECTION("zero symbol") {
    const MultNormBracket mb = mult_norm(LaurentPoly{}, r);
    CHECK(mb.estimate == 0.0);
    CHECK(mb.upper == 0.0);
  }
  SECTION("extremal family lands in the predicted bracket") {
    for (int n : {1, 3, 8, 20}) {
      const MultNormBracket mb = mult_norm(sharpness_symbol(r, n), r);
      CHECK(mb.lower >= std::sqrt(2.0) - 1e-8);
      CHECK(mb.estimate <= std::sqrt(2.0) * (1.0 + std::pow(r, n)) + 1e-8);
    }
  }
  SECTION("order_max below the reach is rejected") {
    CHECK_THROWS_AS(mult_norm(sharpness_symbol(r, 20), r, 1e-8, 16),
                    std::invalid_argument);
  }
}

TEST_CASE("truncation norms are monotone in the order") {
  const double r = 0.5;
  Rng rng(61);
  for (int i = 0; i < 10; ++i) {
    const LaurentPoly phi = random_poly(rng, 6);
    double prev = 0.0;
    for (int order : {8, 16, 32, 64}) {
      const double s = largest_singular_value(mult_matrix(phi, r, order).entries);
      CHECK(s >= prev - 1e-12);
      prev = s;
    }
  }
}

TEST_CASE("shift defect on the interior block") {
  for (double r : {0.3, 0.5, 0.8}) {
    const ShiftReport rep = shift_report(r, 32);
    const int dim = static_cast<int>(rep.interior_defect.rows());
    REQUIRE(dim == 63);
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(dim, dim);
    expected(31, 31) = 1.0 - r * r;  // basis index 0
    CHECK((rep.interior_defect - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(is_psd(rep.interior_defect));
  }
  SECTION("defect vanishes as r -> 1") {
    const ShiftReport rep = shift_report(0.999, 8);
    CHECK(rep.interior_defect.cwiseAbs().maxCoeff() < 2.1e-3);
  }
  SECTION("order floor") {
    CHECK_THROWS_AS(shift_report(0.5, 1), std::invalid_argument);
  }
}

TEST_CASE("pointwise defect-kernel identity") {
  CHECK(defect_kernel_identity_residual(0.5, {0.6, 0.0}, {0.0, 0.8}) < 1e-13);
  CHECK(defect_kernel_identity_residual(0.5, {0.7, 0.1}, {0.7, 0.1}) < 1e-13);
  for (double r : {0.3, 0.5, 0.8}) {
    Rng rng(67);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double lo = r + 0.01 * (1.0 - r), hi = 1.0 - 0.01 * (1.0 - r);
      const Cx a = std::polar(std::sqrt(rng.uniform(lo * lo, hi * hi)),
                              rng.uniform(0.0, 2.0 * kPi));
      const Cx b = std::polar(std::sqrt(rng.uniform(lo * lo, hi * hi)),
                              rng.uniform(0.0, 2.0 * kPi));
      worst = std::max(worst, defect_kernel_identity_residual(r, a, b));
    }
    CHECK(worst < 1e-12);
  }
  CHECK_THROWS_AS(defect_kernel_identity_residual(0.5, {0.2, 0.0}, {0.7, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("pick lower bound") {
  const double r = 0.5;
  SECTION("single point gives |phi|") {
    const LaurentPoly g2 = sharpness_symbol(r, 2);
    const Cx z0{0.7, 0.1};
    const double v = pick_lower_bound(g2, r, {z0});
    CHECK(v == Catch::Approx(std::abs(g2(z0))).margin(1e-7));
  }
  SECTION("constants") {
    const double v =
        pick_lower_bound(LaurentPoly::constant({0.0, -2.0}), r,
                         default_node_grid(r));
    CHECK(v == Catch::Approx(2.0).margin(1e-7));
  }
  SECTION("zero symbol") {
    CHECK(pick_lower_bound(LaurentPoly{}, r, default_node_grid(r)) == 0.0);
  }
  SECTION("sandwiched by the truncation estimate and the envelope") {
    Rng rng(71);
    const std::vector<Cx> nodes = default_node_grid(r);
    for (int i = 0; i < 10; ++i) {
      const LaurentPoly phi = random_poly(rng, 5);
      const double plb = pick_lower_bound(phi, r, nodes);
      const MultNormBracket mb = mult_norm(phi, r);
      CHECK(plb <= mb.estimate + 1e-6);
      CHECK(mb.estimate <= mb.upper + 1e-8);
    }
  }
  SECTION("monotone under node inclusion") {
    Rng rng(73);
    const LaurentPoly phi = random_poly(rng, 4);
    std::vector<Cx> nodes;
    double prev = 0.0;
    for (int stage = 0; stage < 4; ++stage) {
      for (int k = 0; k < 4; ++k)
        nodes.push_back(std::polar(rng.uniform(0.55, 0.95),
                                   rng.uniform(0.0, 2.0 * kPi)));
      const double v = pick_lower_bound(phi, r, nodes);
      CHECK(v >= prev - 1e-7);
      prev = v;
    }
  }
  SECTION("empty node list rejected") {
    CHECK_THROWS_AS(pick_lower_bound(LaurentPoly::monomial(1), r, {}),
                    std::invalid_argument);
  }
}

TEST_CASE("shrunken ring inequalities") {
  CHECK(shrunk_annulus_inequalities(0.5, 5) == std::pair{true, true});
  CHECK(shrunk_annulus_inequalities(0.9, 21) == std::pair{true, true});
  SECTION("the two sides meet as n grows") {
    const double r = 0.5;
    const long n = 10000;
    CHECK(shrunk_annulus_inequalities(r, n) == std::pair{true, true});
    const double a = r + 1.0 / n, b = 1.0 - 1.0 / n;
    CHECK(std::abs(a * a / (1.0 + (a / b) * (a / b)) - r * r / (1.0 + r * r)) <
          1e-3);
    CHECK(std::abs(1.0 / (b * b + a * a) - 1.0 / (1.0 + r * r)) < 1e-3);
  }
  CHECK_THROWS_AS(shrunk_annulus_inequalities(0.5, 4), std::invalid_argument);
}

TEST_CASE("randomized norm-bound experiment") {
  SECTION("no trials means an empty report") {
    VnConfig cfg;
    cfg.trials = 0;
    const VnReport rep = vn_experiment(cfg);
    CHECK(rep.trials_run == 0);
    CHECK_FALSE(rep.min_margin_sqrt2.has_value());
    CHECK(rep.violations.empty());
  }
  SECTION("mixed strategies stay under the envelope") {
    VnConfig cfg;
    cfg.trials = 40;
    cfg.dims = {2, 3, 4};
    cfg.seed = 11;
    const VnReport rep = vn_experiment(cfg);
    CHECK(rep.trials_run == 40);
    CHECK(rep.skipped == 0);
    CHECK(rep.violations.empty());
    REQUIRE(rep.min_margin_sqrt2.has_value());
    CHECK(*rep.min_margin_sqrt2 >= -1e-8);
  }
  SECTION("normal members never beat the sup norm") {
    VnConfig cfg;
    cfg.trials = 40;
    cfg.strategy = StrategyMode::normal;
    cfg.seed = 13;
    const VnReport rep = vn_experiment(cfg);
    CHECK(rep.violations.empty());
    REQUIRE(rep.max_ratio.has_value());
    CHECK(*rep.max_ratio <= 1.0 + 1e-10);
  }
  SECTION("deterministic per config") {
    VnConfig cfg;
    cfg.trials = 10;
    cfg.seed = 21;
    cfg.keep_trials = true;
    const VnReport a = vn_experiment(cfg);
    const VnReport b = vn_experiment(cfg);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
      CHECK(a.trials[i].phi_of_t_norm == b.trials[i].phi_of_t_norm);
      CHECK(a.trials[i].margin_sqrt2 == b.trials[i].margin_sqrt2);
    }
  }
}
