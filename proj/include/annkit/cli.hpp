#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "annkit/annulus.hpp"
#include "annkit/calculus.hpp"
#include "annkit/laurent.hpp"
#include "annkit/multspace.hpp"
#include "annkit/operators.hpp"
#include "annkit/pick.hpp"
#include "annkit/serialize.hpp"

namespace annkit {

struct RunConfig {
  std::string command;
  double r = 0.5;
  bool r_set = false;
  std::string dims = "2..8";
  int trials = -1;  // per-command default when negative
  std::uint64_t seed = 1;
  double tol = -1.0;  // per-command default when negative
  int n_max = 20;
  int order_max = 128;
  int dim = 4;
  std::string output = "-";
  std::string format = "json";
  std::string matrix_file;
  std::string points_file;
  std::string symbol_file;
  int gn = 0;  // pick the sharpness family member as the symbol
  std::string strategy = "both";
  bool per_trial = false;
  bool no_timestamp = false;
};

namespace cli_detail {

inline std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      if (lo < 1 || hi < lo) throw std::invalid_argument("range");
      for (int d = lo; d <= hi; ++d) dims.push_back(d);
      return dims;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) dims.push_back(std::stoi(item));
  } catch (const std::exception&) {
    throw std::invalid_argument("dims: expected 'a..b' or a comma list, got '" +
                                text + "'");
  }
  if (dims.empty()) throw std::invalid_argument("dims: empty list");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("dims: entries must be >= 1");
  return dims;
}

inline StrategyMode parse_strategy(const std::string& s) {
  if (s == "normal") return StrategyMode::normal;
  if (s == "perturbed") return StrategyMode::perturbed;
  if (s == "both") return StrategyMode::both;
  throw std::invalid_argument("strategy: expected normal|perturbed|both");
}

inline Cx random_annulus_point(Rng& rng, double r, double margin) {
  const double lo = r + margin, hi = 1.0 - margin;
  const double mod = std::sqrt(rng.uniform(lo * lo, hi * hi));
  return std::polar(mod, rng.uniform(0.0, 2.0 * kPi));
}

inline std::string num(double x) { return json(x).dump(); }

inline std::string csv_render(const std::vector<std::string>& header,
                              const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i)
    out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

inline std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CommandOutcome {
  json body = json::object();
  std::vector<std::string> violations;
  std::string csv;
};

inline LaurentPoly load_symbol(const RunConfig& cfg) {
  if (!cfg.symbol_file.empty() && cfg.gn > 0)
    throw std::invalid_argument("pass either --symbol-file or --gn, not both");
  if (!cfg.symbol_file.empty())
    return laurent_from_json(load_json_file(cfg.symbol_file));
  if (cfg.gn > 0) return sharpness_symbol(cfg.r, cfg.gn);
  throw std::invalid_argument("a symbol is required: --symbol-file or --gn");
}

// ---- subcommand handlers --------------------------------------------------

inline CommandOutcome run_kernel_check(const RunConfig& cfg) {
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-12;
  const int pairs = cfg.trials >= 0 ? cfg.trials : 1000;
  Rng rng(cfg.seed);
  const double margin = 0.05 * (1.0 - cfg.r);
  std::vector<std::pair<Cx, Cx>> samples;
  samples.reserve(static_cast<std::size_t>(pairs));
  double defect_resid = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const Cx a = random_annulus_point(rng, cfg.r, margin);
    const Cx b = random_annulus_point(rng, cfg.r, margin);
    samples.emplace_back(a, b);
    defect_resid =
        std::max(defect_resid, defect_kernel_identity_residual(cfg.r, a, b));
  }
  const KernelIdentityResiduals res = verify_kernel_identities(cfg.r, samples);
  CommandOutcome out;
  out.body["pairs"] = pairs;
  out.body["max_residual_ball"] = res.ball;
  out.body["max_residual_bidisk"] = res.bidisk;
  out.body["max_residual_shift_defect"] = defect_resid;
  out.body["tol"] = tol;
  if (res.ball > tol)
    out.violations.push_back("ball pullback identity residual above tol");
  if (res.bidisk > tol)
    out.violations.push_back("bidisk pullback identity residual above tol");
  if (defect_resid > tol)
    out.violations.push_back("shift defect identity residual above tol");
  out.csv = csv_render(
      {"r", "pairs", "max_residual_ball", "max_residual_bidisk",
       "max_residual_shift_defect"},
      {{num(cfg.r), std::to_string(pairs), num(res.ball), num(res.bidisk),
        num(defect_resid)}});
  return out;
}

inline CommandOutcome run_member_check(const RunConfig& cfg) {
  if (cfg.matrix_file.empty())
    throw std::invalid_argument("member-check requires --matrix-file");
  const double tol = cfg.tol > 0.0 ? cfg.tol : kPsdTol;
  const Eigen::MatrixXcd t = matrix_from_json(load_json_file(cfg.matrix_file));
  const MembershipReport rep = check_membership(t, cfg.r, tol);
  CommandOutcome out;
  out.body["dim"] = t.rows();
  out.body["tol"] = tol;
  out.body["is_member"] = rep.is_member;
  out.body["singular"] = rep.singular;
  if (!rep.singular) out.body["defect_min_eig"] = rep.defect_min_eig;
  out.body["spectral_margin"] = rep.spectral_margin;
  out.body["ttstar_min"] = rep.ttstar_min;
  out.body["ttstar_max"] = rep.ttstar_max;
  out.body["spectrum"] = to_json(rep.eigenvalues);
  if (rep.is_member &&
      (rep.ttstar_min < cfg.r * cfg.r - 1e-8 || rep.ttstar_max > 1.0 + 1e-8))
    out.violations.push_back(
        "member whose T T* eigenvalues leave [r^2, 1] beyond tolerance");
  out.csv = csv_render(
      {"r", "dim", "is_member", "singular", "defect_min_eig",
       "spectral_margin", "ttstar_min", "ttstar_max"},
      {{num(cfg.r), std::to_string(t.rows()), rep.is_member ? "1" : "0",
        rep.singular ? "1" : "0",
        rep.singular ? "nan" : num(rep.defect_min_eig),
        num(rep.spectral_margin), num(rep.ttstar_min), num(rep.ttstar_max)}});
  return out;
}

inline CommandOutcome run_sample(const RunConfig& cfg) {
  if (cfg.format == "csv")
    throw std::invalid_argument("sample emits a matrix file; csv unsupported");
  SampleStrategy strat = SampleStrategy::normal;
  if (cfg.strategy == "perturbed")
    strat = SampleStrategy::perturbed;
  else if (cfg.strategy != "normal" && cfg.strategy != "both")
    throw std::invalid_argument("strategy: expected normal|perturbed");
  const MemberSample sample = sample_member(cfg.r, cfg.dim, strat, cfg.seed);
  const MembershipReport rep = check_membership(sample.matrix, cfg.r);
  CommandOutcome out;
  out.body = to_json(sample.matrix);  // loadable as a matrix file
  out.body["strategy"] =
      strat == SampleStrategy::normal ? "normal" : "perturbed";
  out.body["fallback"] = sample.fallback;
  out.body["nonnormality"] = sample.nonnormality;
  out.body["is_member"] = rep.is_member;
  if (!rep.is_member)
    out.violations.push_back("sampled matrix failed the membership check");
  return out;
}

inline CommandOutcome run_vn_verify(const RunConfig& cfg) {
  VnConfig vn;
  vn.r = cfg.r;
  vn.trials = cfg.trials >= 0 ? cfg.trials : 100;
  vn.dims = parse_dims(cfg.dims);
  vn.seed = cfg.seed;
  vn.tol = cfg.tol > 0.0 ? cfg.tol : 1e-8;
  vn.strategy = parse_strategy(cfg.strategy);
  vn.keep_trials = cfg.per_trial;
  const VnReport rep = vn_experiment(vn);
  CommandOutcome out;
  json summary;
  summary["tol"] = vn.tol;
  summary["trials_requested"] = rep.trials_requested;
  summary["trials_run"] = rep.trials_run;
  summary["skipped"] = rep.skipped;
  summary["min_margin_sqrt2"] =
      rep.min_margin_sqrt2 ? json(*rep.min_margin_sqrt2) : json();
  summary["min_margin_mult"] =
      rep.min_margin_mult ? json(*rep.min_margin_mult) : json();
  summary["min_margin_normal"] =
      rep.min_margin_normal ? json(*rep.min_margin_normal) : json();
  summary["max_ratio"] = rep.max_ratio ? json(*rep.max_ratio) : json();
  out.body["summary"] = summary;
  out.violations = rep.violations;
  std::vector<std::vector<std::string>> rows;
  if (cfg.per_trial) {
    json trials = json::array();
    for (const VnTrial& t : rep.trials) {
      trials.push_back(json{
          {"trial", t.index},
          {"dim", t.dim},
          {"strategy",
           t.strategy == SampleStrategy::normal ? "normal" : "perturbed"},
          {"phi_of_t_norm", t.phi_of_t_norm},
          {"sup", t.sup},
          {"mult_lower", t.mult_lower},
          {"mult_upper", t.mult_upper},
          {"margin_sqrt2", t.margin_sqrt2},
          {"margin_mult", t.margin_mult},
          {"skipped", t.skipped}});
      rows.push_back(
          {std::to_string(t.index), std::to_string(t.dim),
           t.strategy == SampleStrategy::normal ? "normal" : "perturbed",
           num(t.phi_of_t_norm), num(t.sup), num(t.mult_lower),
           num(t.mult_upper), num(t.margin_sqrt2), num(t.margin_mult),
           t.skipped.empty() ? "" : "skipped"});
    }
    out.body["trials"] = trials;
    out.csv = csv_render({"trial", "dim", "strategy", "phi_of_t_norm", "sup",
                          "mult_lower", "mult_upper", "margin_sqrt2",
                          "margin_mult", "status"},
                         rows);
  } else {
    out.csv = csv_render(
        {"trials_run", "skipped", "min_margin_sqrt2", "min_margin_mult",
         "min_margin_normal", "max_ratio", "violations"},
        {{std::to_string(rep.trials_run), std::to_string(rep.skipped),
          rep.min_margin_sqrt2 ? num(*rep.min_margin_sqrt2) : "nan",
          rep.min_margin_mult ? num(*rep.min_margin_mult) : "nan",
          rep.min_margin_normal ? num(*rep.min_margin_normal) : "nan",
          rep.max_ratio ? num(*rep.max_ratio) : "nan",
          std::to_string(rep.violations.size())}});
  }
  return out;
}

inline CommandOutcome run_mult_norm(const RunConfig& cfg) {
  const LaurentPoly phi = load_symbol(cfg);
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-8;
  const MultNormBracket mb = mult_norm(phi, cfg.r, tol, cfg.order_max);
  CommandOutcome out;
  out.body["symbol"] = to_json(phi);
  out.body["tol"] = tol;
  out.body["lower"] = mb.lower;
  out.body["estimate"] = mb.estimate;
  out.body["upper"] = mb.upper;
  out.body["converged"] = mb.converged;
  out.body["order_used"] = mb.order_used;
  if (!(mb.lower <= mb.estimate + tol && mb.estimate <= mb.upper + tol))
    out.violations.push_back("bracket ordering lower <= estimate <= upper failed");
  out.csv = csv_render(
      {"r", "lower", "estimate", "upper", "converged", "order_used"},
      {{num(cfg.r), num(mb.lower), num(mb.estimate), num(mb.upper),
        mb.converged ? "1" : "0", std::to_string(mb.order_used)}});
  return out;
}

inline CommandOutcome run_sharpness(const RunConfig& cfg) {
  if (cfg.n_max < 1) throw std::invalid_argument("sharpness: need --n-max >= 1");
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-8;
  const double sqrt2 = std::sqrt(2.0);
  CommandOutcome out;
  json rows_json = json::array();
  std::vector<std::vector<std::string>> rows;
  double prev_ratio = 0.0;
  for (int n = 1; n <= cfg.n_max; ++n) {
    const LaurentPoly gn = sharpness_symbol(cfg.r, n);
    const MultNormBracket mb = mult_norm(gn, cfg.r, tol, cfg.order_max);
    const double sup = 1.0 + std::pow(cfg.r, n);
    const double ratio = mb.lower / sup;
    rows_json.push_back(json{{"n", n},
                             {"mult_lower", mb.lower},
                             {"sup", sup},
                             {"ratio", ratio}});
    rows.push_back({std::to_string(n), num(mb.lower), num(sup), num(ratio)});
    if (mb.lower < sqrt2 - 1e-8)
      out.violations.push_back("n=" + std::to_string(n) +
                               ": multiplier lower bound fell below sqrt(2)");
    if (ratio < prev_ratio - 1e-12)
      out.violations.push_back("n=" + std::to_string(n) +
                               ": sharpness ratio decreased");
    prev_ratio = ratio;
  }
  out.body["tol"] = tol;
  out.body["rows"] = rows_json;
  out.csv = csv_render({"n", "mult_lower", "sup", "ratio"}, rows);
  return out;
}

inline CommandOutcome run_pick_extend(const RunConfig& cfg) {
  const LaurentPoly phi = load_symbol(cfg);
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-7;
  std::vector<Cx> nodes;
  if (!cfg.points_file.empty())
    nodes = points_from_json(load_json_file(cfg.points_file));
  else
    nodes = default_node_grid(cfg.r);
  const ExtensionIntervalCheck chk =
      extension_interval_check(phi, cfg.r, nodes, tol);
  const double plb = pick_lower_bound(phi, cfg.r, nodes, std::min(tol, 1e-8));
  const double transfer = std::abs(chk.c_star - plb);
  CommandOutcome out;
  out.body["nodes"] = to_json(nodes);
  out.body["tol"] = tol;
  out.body["c_star"] = chk.c_star;
  out.body["lower_bound"] = chk.lower_bound;
  out.body["upper_bound"] = chk.upper_bound;
  out.body["lower_ok"] = chk.lower_ok;
  out.body["upper_ok"] = chk.upper_ok;
  out.body["psd_margin_above"] = chk.psd_margin_above;
  out.body["psd_margin_below"] = chk.psd_margin_below;
  out.body["pick_lower_bound"] = plb;
  out.body["transfer_residual"] = transfer;
  if (!chk.lower_ok)
    out.violations.push_back("extension norm fell below the node lower bound");
  if (!chk.upper_ok)
    out.violations.push_back("extension norm exceeded the sqrt(2) envelope");
  if (transfer > tol)
    out.violations.push_back(
        "ball and ring Pick problems disagreed beyond tolerance");
  out.csv = csv_render(
      {"r", "nodes", "c_star", "lower_bound", "upper_bound", "lower_ok",
       "upper_ok", "pick_lower_bound", "transfer_residual"},
      {{num(cfg.r), std::to_string(nodes.size()), num(chk.c_star),
        num(chk.lower_bound), num(chk.upper_bound), chk.lower_ok ? "1" : "0",
        chk.upper_ok ? "1" : "0", num(plb), num(transfer)}});
  return out;
}

inline CommandOutcome run_factor(const RunConfig& cfg) {
  const double tol = cfg.tol > 0.0 ? cfg.tol : kPsdTol;
  CommandOutcome out;
  Eigen::MatrixXcd g;
  std::vector<Cx> grid;
  if (!cfg.matrix_file.empty()) {
    g = matrix_from_json(load_json_file(cfg.matrix_file));
  } else if (!cfg.points_file.empty()) {
    grid = points_from_json(load_json_file(cfg.points_file));
    g = gram(KernelKind::annulus(cfg.r), grid);
  } else {
    throw std::invalid_argument("factor requires --matrix-file or --points-file");
  }
  const double max_diag = g.diagonal().real().maxCoeff();
  try {
    PsdFactorization f = factor_psd(g, tol);
    f.grid = grid;
    out.body["size"] = g.rows();
    out.body["tol"] = tol;
    out.body["rank"] = f.eigenvalues.size();
    out.body["eigenvalues"] = f.eigenvalues;
    out.body["reconstruction_residual"] = f.reconstruction_residual;
    out.body["dropped_mass"] = f.dropped_mass;
    out.body["max_diag"] = max_diag;
    out.body["conditioning_warning"] = max_diag > 1e8;
    if (!grid.empty()) {
      out.body["grid"] = to_json(grid);
      out.body["kernel"] = KernelKind::annulus(cfg.r).name();
    }
    out.csv = csv_render(
        {"size", "rank", "reconstruction_residual", "dropped_mass", "max_diag",
         "conditioning_warning"},
        {{std::to_string(g.rows()), std::to_string(f.eigenvalues.size()),
          num(f.reconstruction_residual), num(f.dropped_mass), num(max_diag),
          max_diag > 1e8 ? "1" : "0"}});
  } catch (const std::domain_error& e) {
    out.body["size"] = g.rows();
    out.body["max_diag"] = max_diag;
    out.violations.push_back(e.what());
    out.csv = csv_render({"size", "rank", "reconstruction_residual",
                          "dropped_mass", "max_diag", "conditioning_warning"},
                         {{std::to_string(g.rows()), "0", "nan", "nan",
                           num(max_diag), max_diag > 1e8 ? "1" : "0"}});
  }
  return out;
}

inline CommandOutcome run_counterexample(const RunConfig& cfg) {
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-10;
  std::vector<double> rs;
  if (cfg.r_set) {
    rs.push_back(cfg.r);
  } else {
    for (int i = 1; i <= 99; ++i) rs.push_back(0.01 * i);
  }
  CommandOutcome out;
  json rows_json = json::array();
  std::vector<std::vector<std::string>> rows;
  for (double r : rs) {
    const ConverseCounterexample ce = converse_counterexample(r);
    const double formula =
        r * r * (r + 1.0 - 1.0 / r - (2.0 - 1.0 / r) * (2.0 - 1.0 / r));
    const bool ok = std::abs(ce.norm - 1.0) <= tol &&
                    std::abs(ce.norm_scaled_inverse - 1.0) <= tol &&
                    std::abs(ce.defect_form - formula) <= tol &&
                    ce.defect_form < 0.0;
    rows_json.push_back(json{{"r", r},
                             {"norm", ce.norm},
                             {"norm_scaled_inverse", ce.norm_scaled_inverse},
                             {"defect_form", ce.defect_form},
                             {"formula", formula},
                             {"ok", ok}});
    rows.push_back({num(r), num(ce.norm), num(ce.norm_scaled_inverse),
                    num(ce.defect_form), num(formula), ok ? "1" : "0"});
    if (!ok)
      out.violations.push_back("r=" + std::to_string(r) +
                               ": counterexample identities failed");
  }
  out.body["tol"] = tol;
  out.body["rows"] = rows_json;
  out.csv = csv_render(
      {"r", "norm", "norm_scaled_inverse", "defect_form", "formula", "ok"},
      rows);
  return out;
}

inline json config_echo(const RunConfig& cfg) {
  json j;
  j["r"] = cfg.r;
  j["dims"] = cfg.dims;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["tol"] = cfg.tol;
  j["n_max"] = cfg.n_max;
  j["order_max"] = cfg.order_max;
  j["dim"] = cfg.dim;
  j["format"] = cfg.format;
  j["matrix_file"] = cfg.matrix_file;
  j["points_file"] = cfg.points_file;
  j["symbol_file"] = cfg.symbol_file;
  j["gn"] = cfg.gn;
  j["strategy"] = cfg.strategy;
  j["per_trial"] = cfg.per_trial;
  return j;
}

}  // namespace cli_detail

// Parses argv, runs the subcommand, writes the report. Exit status 0 on
// success, 1 on input errors, 2 when an inequality or invariant check failed.
inline int run_cli(int argc, const char* const* argv) {
  using namespace cli_detail;
  RunConfig cfg;
  CLI::App app{"desk-scale operator-theory checks on the annulus"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--r", cfg.r, "inner radius of the annulus, in (0,1)")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9))
        ->each([&](const std::string&) { cfg.r_set = true; });
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--tol", cfg.tol, "tolerance (per-command default)");
    sub->add_option("--trials", cfg.trials, "number of trials/sample pairs");
    sub->add_option("--output,-o", cfg.output, "output path, '-' for stdout");
    sub->add_option("--format", cfg.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--no-timestamp", cfg.no_timestamp,
                  "omit the timestamp field for byte-identical reruns");
  };

  CLI::App* kernel = app.add_subcommand(
      "kernel-check", "kernel pullback and shift-defect identities");
  add_common(kernel);

  CLI::App* member = app.add_subcommand(
      "member-check", "membership report for a matrix file");
  add_common(member);
  member->add_option("--matrix-file", cfg.matrix_file, "matrix JSON file");

  CLI::App* sample = app.add_subcommand("sample", "draw a member matrix");
  add_common(sample);
  sample->add_option("--dim", cfg.dim, "matrix dimension")->check(CLI::PositiveNumber);
  sample->add_option("--strategy", cfg.strategy, "normal (default) or perturbed");

  CLI::App* vn = app.add_subcommand(
      "vn-verify", "randomized check of the sqrt(2) operator-norm bound");
  add_common(vn);
  vn->add_option("--dims", cfg.dims, "matrix dimensions, 'a..b' or comma list");
  vn->add_option("--strategy", cfg.strategy, "normal, perturbed or both");
  vn->add_flag("--per-trial", cfg.per_trial, "record per-trial rows");

  CLI::App* mult = app.add_subcommand(
      "mult-norm", "multiplier-norm bracket for a symbol");
  add_common(mult);
  mult->add_option("--symbol-file", cfg.symbol_file, "Laurent symbol JSON file");
  mult->add_option("--gn", cfg.gn, "use the sharpness family symbol of this index");
  mult->add_option("--order-max", cfg.order_max, "largest truncation order");

  CLI::App* sharp = app.add_subcommand(
      "sharpness", "lower-bound trajectory toward the sqrt(2) constant");
  add_common(sharp);
  sharp->add_option("--n-max", cfg.n_max, "largest family index");
  sharp->add_option("--order-max", cfg.order_max, "largest truncation order");

  CLI::App* pick = app.add_subcommand(
      "pick-extend", "finite-node ball extension norm of a symbol");
  add_common(pick);
  pick->add_option("--symbol-file", cfg.symbol_file, "Laurent symbol JSON file");
  pick->add_option("--gn", cfg.gn, "use the sharpness family symbol of this index");
  pick->add_option("--points-file", cfg.points_file, "nodes JSON file");

  CLI::App* factor = app.add_subcommand(
      "factor", "PSD factorization of a Gram matrix");
  add_common(factor);
  factor->add_option("--matrix-file", cfg.matrix_file, "Gram matrix JSON file");
  factor->add_option("--points-file", cfg.points_file,
                     "annulus points JSON file (Gram built from --r)");

  CLI::App* counter = app.add_subcommand(
      "counterexample", "norm identities of the non-member witness");
  add_common(counter);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  CommandOutcome outcome;
  try {
    if (kernel->parsed()) {
      cfg.command = "kernel-check";
      outcome = run_kernel_check(cfg);
    } else if (member->parsed()) {
      cfg.command = "member-check";
      outcome = run_member_check(cfg);
    } else if (sample->parsed()) {
      cfg.command = "sample";
      outcome = run_sample(cfg);
    } else if (vn->parsed()) {
      cfg.command = "vn-verify";
      outcome = run_vn_verify(cfg);
    } else if (mult->parsed()) {
      cfg.command = "mult-norm";
      outcome = run_mult_norm(cfg);
    } else if (sharp->parsed()) {
      cfg.command = "sharpness";
      outcome = run_sharpness(cfg);
    } else if (pick->parsed()) {
      cfg.command = "pick-extend";
      outcome = run_pick_extend(cfg);
    } else if (factor->parsed()) {
      cfg.command = "factor";
      outcome = run_factor(cfg);
    } else if (counter->parsed()) {
      cfg.command = "counterexample";
      outcome = run_counterexample(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  json report = outcome.body;
  report["schema_version"] = 1;
  report["command"] = cfg.command;
  report["config"] = config_echo(cfg);
  report["violations"] = outcome.violations;
  if (!cfg.no_timestamp) report["timestamp"] = utc_timestamp();

  const std::string text =
      cfg.format == "csv" ? outcome.csv : report.dump(2) + "\n";
  try {
    if (cfg.output == "-")
      std::cout << text;
    else
      save_text_file(cfg.output, text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (const std::string& v : outcome.violations)
    std::cerr << "violation: " << v << "\n";
  return outcome.violations.empty() ? 0 : 2;
}

}  // namespace annkit
