// npiv: simulate, estimate and select in nonparametric instrumental
// regression, and run Monte Carlo rate studies.
//
// Exit codes: 0 success, 2 user or config error, 3 I/O error,
// 4 internal invariant violation.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "npiv/config.hpp"
#include "npiv/estimator.hpp"
#include "npiv/io.hpp"
#include "npiv/rate_study.hpp"
#include "npiv/selection.hpp"
#include "npiv/simulate.hpp"

namespace {

using namespace npiv;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

void write_text(const std::string& path, const std::string& text)
{
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << text;
  out.flush();
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json load_json(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

std::vector<Index> parse_grid(const std::string& text)
{
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Index v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || v < 1) {
      throw InputError("grid entry '" + item + "' is not a positive integer");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw InputError("empty n grid");
  }
  return out;
}

// simulate -------------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  Index n = 0;
};

int cmd_simulate(const SimulateArgs& args)
{
  const Config cfg = load_config(args.config);
  const std::uint64_t seed = args.seed.value_or(cfg.study.seed);
  const Sample sample = generate_sample(cfg.structural, cfg.op, cfg.sigma, args.n, seed);
  const Json echo{{"config", cfg.source},
                  {"seed", seed},
                  {"n", args.n},
                  {"sigma", cfg.sigma},
                  {"density_floor", cfg.op.density_floor},
                  {"d", std::isfinite(cfg.op.link_d) ? Json(cfg.op.link_d) : Json(nullptr)},
                  {"operator", to_json(cfg.op)}};
  std::cerr << echo.dump() << "\n";
  if (args.out.empty() || args.out == "-") {
    write_sample_csv(std::cout, sample);
    std::cout.flush();
  } else {
    write_sample_csv(args.out, sample);
  }
  return 0;
}

// estimate -------------------------------------------------------------------

struct EstimateArgs {
  std::string sample;
  Index k = 1;
  std::string mode = "general";
  int s = 0;
  std::string omega;
  std::string truth;
  std::string out;
};

StructuralSpec load_truth(const std::string& path)
{
  const Json doc = load_json(path);
  if (doc.is_object() && doc.contains("structural")) {
    for (const auto& item : doc.items()) {
      static const std::set<std::string> sections{"structural", "operator", "noise", "selection", "study"};
      if (!sections.contains(item.key())) {
        throw InputError("truth file '" + path + "': unknown key '" + item.key() + "'");
      }
    }
    return parse_structural(doc["structural"]);
  }
  return parse_structural(doc);
}

int cmd_estimate(const EstimateArgs& args)
{
  const Sample sample = read_sample_csv(args.sample);
  EstimatorMode mode;
  if (args.mode == "general") {
    mode = EstimatorMode::general;
  } else if (args.mode == "diagonal") {
    mode = EstimatorMode::diagonal;
  } else {
    throw InputError("--mode must be 'general' or 'diagonal'");
  }
  const auto est = mode == EstimatorMode::general ? galerkin_estimate(sample, args.k) : diagonal_estimate(sample, args.k);
  const WeightSequence omega =
      args.omega.empty() ? WeightSequence::derivative(args.s) : WeightSequence::parse(args.omega);

  Json report{{"schema", 1},
              {"n", sample.size()},
              {"k", est.k},
              {"mode", to_string(est.mode)},
              {"thresholded", est.thresholded},
              {"coefficients", to_json(est.coeffs)},
              {"derivative_order", args.s}};
  if (args.s > 0) {
    report["derivative_coefficients"] = to_json(derivative_coeffs(est, args.s));
  }
  if (!args.truth.empty()) {
    const StructuralSpec truth = load_truth(args.truth);
    report["omega"] = omega.to_string();
    report["risk"] = risk_weighted(est, truth.b, omega, std::max(truth.J_phi, est.k));
  }
  write_text(args.out, dump(report));
  return 0;
}

// select ---------------------------------------------------------------------

struct SelectArgs {
  std::string sample;
  std::string omega = "constant";
  double penalty_const = kDefaultPenaltyConst;
  std::string out;
};

// Off-diagonal check on the leading block, independent of N_hat (a rotated
// operator can push N_hat down to 1).
void warn_off_diagonal(const Sample& sample, Index n_upper)
{
  const Index k = std::min<Index>(n_upper, 16);
  if (k < 2) {
    return;
  }
  const Matrix<double> t = empirical_operator_matrix(sample, k);
  double worst = 0.0;
  for (Index l = 0; l < k; ++l) {
    for (Index j = 0; j < k; ++j) {
      if (l != j) {
        worst = std::max(worst, std::abs(t(l, j)));
      }
    }
  }
  const double tolerance = 6.0 / std::sqrt(static_cast<double>(sample.size()));
  if (worst > tolerance) {
    std::cerr << "warning: largest off-diagonal entry of the empirical operator is " << worst
              << " (> 6/sqrt(n) = " << tolerance
              << "); the adaptive choice assumes an operator that is diagonal in the trigonometric basis\n";
  }
}

int cmd_select(const SelectArgs& args)
{
  const Sample sample = read_sample_csv(args.sample);
  const WeightSequence omega = WeightSequence::parse(args.omega);
  const auto trace = penalized_select(sample, omega, args.penalty_const);
  if (trace.k_hat < 1 || trace.k_hat > trace.N_hat) {
    throw InvariantError("selected dimension outside 1..N_hat");
  }
  warn_off_diagonal(sample, trace.n_upper);
  const Json report{{"schema", 1},
                    {"n", trace.n},
                    {"omega", omega.to_string()},
                    {"penalty_const", trace.penalty_const},
                    {"EY2_hat", trace.EY2_hat},
                    {"N_upper", trace.n_upper},
                    {"N_hat", trace.N_hat},
                    {"k_hat", trace.k_hat},
                    {"criterion", to_json(trace.criterion)},
                    {"contrast", to_json(trace.contrast)},
                    {"penalty", to_json(trace.penalty)},
                    {"delta_hat", to_json(trace.delta_hat)},
                    {"T_diag", to_json(trace.t_diag)},
                    {"g_hat", to_json(trace.g_hat)},
                    {"thresholded", trace.estimate.thresholded},
                    {"coefficients", to_json(trace.estimate.coeffs)}};
  write_text(args.out, dump(report));
  return 0;
}

// oracle ---------------------------------------------------------------------

struct OracleArgs {
  std::string omega = "constant";
  std::string gamma;
  std::string lambda;
  double d = 1.0;
  std::string n_grid;
  Index k_max = 0;
  std::string format = "json";
  std::string out;
};

int cmd_oracle(const OracleArgs& args)
{
  const WeightSequence omega = WeightSequence::parse(args.omega);
  const WeightSequence gamma = WeightSequence::parse(args.gamma);
  const WeightSequence lambda = WeightSequence::parse(args.lambda);
  if (!(args.d >= 1.0)) {
    throw InputError("--d must be >= 1");
  }
  std::vector<OracleRow> rows;
  for (Index n : parse_grid(args.n_grid)) {
    rows.push_back(oracle_row(omega, gamma, lambda, args.d, n, args.k_max > 0 ? args.k_max : default_oracle_kmax(n)));
  }
  if (args.format == "csv") {
    std::ostringstream out;
    out << "n,k_star,R_star,N_n,N_n_l,delta_kstar\n";
    for (const auto& r : rows) {
      out << r.n << ',' << r.k_star << ',' << format_double(r.R_star) << ',' << r.N_n << ',' << r.N_n_l << ','
          << format_double(r.delta_k_star) << '\n';
    }
    write_text(args.out, out.str());
  } else if (args.format == "json") {
    Json table = Json::array();
    for (const auto& r : rows) {
      table.push_back(Json{{"n", r.n},
                           {"k_star", r.k_star},
                           {"R_star", r.R_star},
                           {"N_n", r.N_n},
                           {"N_n_l", r.N_n_l},
                           {"delta_kstar", r.delta_k_star}});
    }
    write_text(args.out, dump(Json{{"schema", 1},
                                   {"omega", omega.to_string()},
                                   {"gamma", gamma.to_string()},
                                   {"lambda", lambda.to_string()},
                                   {"d", args.d},
                                   {"rows", table}}));
  } else {
    throw InputError("--format must be 'json' or 'csv'");
  }
  return 0;
}

// rate-study -----------------------------------------------------------------

struct RateStudyArgs {
  std::string config;
  std::string n_grid;
  std::optional<Index> replications;
  std::optional<std::uint64_t> seed;
  std::string out = "rate_study";
  std::optional<unsigned> jobs;
  bool emit_gnuplot = false;
};

int cmd_rate_study(const RateStudyArgs& args)
{
  Config cfg = load_config(args.config);
  if (!args.n_grid.empty()) {
    cfg.study.n_grid = parse_grid(args.n_grid);
  }
  if (args.replications) {
    cfg.study.replications = *args.replications;
  }
  if (args.seed) {
    cfg.study.seed = *args.seed;
  }
  const unsigned jobs = args.jobs.value_or(default_jobs());
  const RateStudyReport report = run_rate_study(cfg, jobs);

  Json doc = to_json(report);
  write_text(args.out + ".json", dump(doc));
  std::ostringstream csv;
  write_replications_csv(csv, report);
  write_text(args.out + ".csv", csv.str());
  if (args.emit_gnuplot) {
    write_text(args.out + ".gp", gnuplot_script(args.out + ".csv", report));
  }
  std::cerr << "fitted slope " << report.fitted_slope << " (theoretical " << report.theoretical_slope
            << (report.regime == SmoothingRegime::finitely ? " per log n" : " per log log n") << ")\n";
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Nonparametric instrumental regression: Galerkin estimation, adaptive dimension selection and "
               "Monte Carlo rate studies"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a sample from a config and write it as y,z,w CSV");
  simulate->add_option("config", sim.config, "JSON config with structural, operator and noise sections")->required();
  simulate->add_option("-o,--out", sim.out, "Output CSV path (default: stdout)");
  simulate->add_option("--seed", sim.seed, "RNG seed (default: study.seed or 0)");
  simulate->add_option("-n,--n", sim.n, "Number of observations")->required()->check(CLI::PositiveNumber);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Galerkin estimate at a fixed dimension");
  estimate->add_option("sample", est.sample, "Sample CSV (y,z,w)")->required();
  estimate->add_option("-k,--k", est.k, "Dimension")->required()->check(CLI::PositiveNumber);
  estimate->add_option("--mode", est.mode, "general or diagonal")->check(CLI::IsMember({"general", "diagonal"}));
  estimate->add_option("-s,--s", est.s, "Derivative order")->check(CLI::NonNegativeNumber);
  estimate->add_option("--omega", est.omega, "Risk weights (default derivative:<s>)");
  estimate->add_option("--truth", est.truth, "JSON file with a structural section; adds the weighted risk");
  estimate->add_option("-o,--out", est.out, "Output JSON path (default: stdout)");

  SelectArgs sel;
  auto* select = app.add_subcommand("select", "Data-driven dimension choice by penalized contrast");
  select->add_option("sample", sel.sample, "Sample CSV (y,z,w)")->required();
  select->add_option("--omega", sel.omega, "Weights of the loss (e.g. constant, derivative:1)");
  select->add_option("--penalty-const", sel.penalty_const, "Penalty constant")->check(CLI::PositiveNumber);
  select->add_option("-o,--out", sel.out, "Output JSON path (default: stdout)");

  OracleArgs orc;
  auto* oracle = app.add_subcommand("oracle", "Oracle dimension, rate and dimension bounds for known sequences");
  oracle->add_option("--omega", orc.omega, "Loss weights");
  oracle->add_option("--gamma", orc.gamma, "Smoothness weights, e.g. sobolev:2")->required();
  oracle->add_option("--lambda", orc.lambda, "Operator weights, e.g. polynomial:1")->required();
  oracle->add_option("--d", orc.d, "Link condition constant (>= 1)");
  oracle->add_option("--n-grid", orc.n_grid, "Comma-separated sample sizes")->required();
  oracle->add_option("--k-max", orc.k_max, "Search range for k* (default min(n, 10000))");
  oracle->add_option("--format", orc.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  oracle->add_option("-o,--out", orc.out, "Output path (default: stdout)");

  RateStudyArgs rs;
  auto* rate = app.add_subcommand("rate-study", "Monte Carlo study of the adaptive estimator's risk against n");
  rate->add_option("config", rs.config, "JSON config")->required();
  rate->add_option("--n-grid", rs.n_grid, "Comma-separated sample sizes (overrides study.n_grid)");
  rate->add_option("--replications", rs.replications, "Replications per sample size");
  rate->add_option("--seed", rs.seed, "RNG seed");
  rate->add_option("--out", rs.out, "Output prefix; writes <out>.json and <out>.csv");
  rate->add_option("--jobs", rs.jobs, "Worker threads (default $NPIV_JOBS or hardware concurrency)")
      ->check(CLI::PositiveNumber);
  rate->add_flag("--emit-gnuplot", rs.emit_gnuplot, "Also write <out>.gp");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*simulate) {
      return cmd_simulate(sim);
    }
    if (*estimate) {
      return cmd_estimate(est);
    }
    if (*select) {
      return cmd_select(sel);
    }
    if (*oracle) {
      return cmd_oracle(orc);
    }
    if (*rate) {
      return cmd_rate_study(rs);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
