#include "npiv/rate_study.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "npiv/estimator.hpp"
#include "npiv/io.hpp"
#include "npiv/selection.hpp"

namespace npiv {

OracleRow oracle_row(const WeightSequence& omega, const WeightSequence& gamma, const WeightSequence& lambda, double d,
                     Index n, Index k_max)
{
  OracleRow row;
  row.n = n;
  const auto kstar = oracle_kstar(omega, gamma, lambda, n, k_max);
  row.k_star = kstar.k_star;
  row.R_star = kstar.rate;
  row.N_n = dimension_bound_known(omega, lambda, d, n);
  row.N_n_l = lower_dimension_scan(omega, lambda, d, n, row.N_n);
  row.delta_k_star = known_sequences(omega, lambda, row.k_star).delta(row.k_star - 1);
  return row;
}

std::uint64_t replication_seed(std::uint64_t seed, Index n, Index replication)
{
  return derive_key({seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replication)});
}

double median(std::vector<double> values)
{
  if (values.empty()) {
    throw DomainError("median of an empty set");
  }
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q)
{
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

double interquartile_range(std::vector<double> values)
{
  if (values.empty()) {
    throw DomainError("interquartile range of an empty set");
  }
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
}

double ols_slope(std::span<const double> xs, std::span<const double> ys)
{
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DomainError("ols_slope needs two equally long series of length >= 2");
  }
  const double nn = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / nn;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / nn;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (!(sxx > 0.0)) {
    throw DomainError("ols_slope: abscissae are all equal");
  }
  return sxy / sxx;
}

ReplicationResult run_replication(const Config& cfg, Index n, Index replication, Index k_star)
{
  const Sample sample =
      generate_sample(cfg.structural, cfg.op, cfg.sigma, n, replication_seed(cfg.study.seed, n, replication));
  const WeightSequence& omega = cfg.selection.omega;
  const auto trace = penalized_select(sample, omega, cfg.selection.penalty_const);

  ReplicationResult out;
  out.n = n;
  out.replication = replication;
  out.k_hat = trace.k_hat;
  out.N_hat = trace.N_hat;
  out.thresholded = trace.estimate.thresholded;
  const Index j_max_adaptive = std::max(cfg.structural.J_phi, trace.k_hat);
  out.risk = risk_weighted(trace.estimate, cfg.structural.b, omega, j_max_adaptive);

  // The first min(k*, N_hat) diagonal entries are already in the trace.
  Vector<double> t_diag(k_star);
  Vector<double> g_hat(k_star);
  const Index shared = std::min(k_star, trace.N_hat);
  t_diag.head(shared) = trace.t_diag.head(shared);
  g_hat.head(shared) = trace.g_hat.head(shared);
  if (k_star > shared) {
    t_diag.tail(k_star - shared) = empirical_operator_diagonal(sample, shared + 1, k_star);
    g_hat.tail(k_star - shared) = empirical_rhs(sample, k_star).tail(k_star - shared);
  }
  const auto fixed = diagonal_solve(t_diag, g_hat, n);
  out.oracle_risk = risk_weighted(fixed, cfg.structural.b, omega, std::max(cfg.structural.J_phi, k_star));
  return out;
}

RateStudyReport run_rate_study(const Config& cfg, unsigned jobs, bool allow_small)
{
  const auto& grid = cfg.study.n_grid;
  const Index R = cfg.study.replications;
  if (!allow_small && grid.size() < 3) {
    throw InputError("rate study needs a grid of at least 3 sample sizes");
  }
  if (grid.empty()) {
    throw InputError("rate study needs a non-empty grid");
  }
  if (!allow_small && R < 10) {
    throw InputError("rate study needs at least 10 replications");
  }
  if (R < 1) {
    throw InputError("rate study needs at least 1 replication");
  }
  const auto lambda = cfg.op.lambda();
  if (!lambda) {
    throw InputError("rate study needs a polynomial or exponential operator");
  }
  const auto s = derivative_order(cfg.selection.omega);
  if (!s) {
    throw InputError("rate study needs omega of kind constant, derivative or sobolev");
  }

  RateStudyReport report;
  report.config = cfg.source;
  report.grid = grid;
  report.replications = R;
  report.seed = cfg.study.seed;
  report.regime = cfg.op.decay == OperatorDecay::polynomial ? SmoothingRegime::finitely : SmoothingRegime::infinitely;
  report.s = *s;

  const WeightSequence gamma = WeightSequence::sobolev(cfg.structural.p);
  std::vector<OracleRow> oracles;
  for (Index n : grid) {
    oracles.push_back(oracle_row(cfg.selection.omega, gamma, *lambda, cfg.op.link_d, n, default_oracle_kmax(n)));
  }

  const std::size_t cells = grid.size() * static_cast<std::size_t>(R);
  std::vector<ReplicationResult> results(cells);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&]() {
    for (std::size_t idx = next.fetch_add(1); idx < cells; idx = next.fetch_add(1)) {
      const std::size_t g = idx / static_cast<std::size_t>(R);
      const Index rep = static_cast<Index>(idx % static_cast<std::size_t>(R));
      try {
        results[idx] = run_replication(cfg, grid[g], rep, oracles[g].k_star);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next.store(cells);
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) {
      pool.emplace_back(worker);
    }
    worker();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  std::vector<double> log_n;
  std::vector<double> loglog_n;
  std::vector<double> log_risk;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> risks;
    std::vector<double> oracle_risks;
    std::vector<double> khats;
    for (Index r = 0; r < R; ++r) {
      const auto& cell = results[g * static_cast<std::size_t>(R) + static_cast<std::size_t>(r)];
      risks.push_back(cell.risk);
      oracle_risks.push_back(cell.oracle_risk);
      khats.push_back(static_cast<double>(cell.k_hat));
    }
    GridSummary summary;
    summary.n = grid[g];
    summary.median_risk = median(risks);
    summary.mean_risk = std::accumulate(risks.begin(), risks.end(), 0.0) / static_cast<double>(R);
    summary.iqr = interquartile_range(risks);
    summary.median_k_hat = median(khats);
    summary.median_oracle_risk = median(oracle_risks);
    summary.oracle = oracles[g];
    report.per_n.push_back(summary);
    const double ln = std::log(static_cast<double>(grid[g]));
    log_n.push_back(ln);
    loglog_n.push_back(std::log(ln));
    log_risk.push_back(std::log(summary.median_risk));
  }
  if (grid.size() >= 2) {
    report.fitted_slope = ols_slope(log_n, log_risk);
    report.fitted_loglog_slope = ols_slope(loglog_n, log_risk);
  } else {
    report.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    report.fitted_loglog_slope = std::numeric_limits<double>::quiet_NaN();
  }
  const double p = cfg.structural.p;
  const double a = cfg.op.a;
  report.theoretical_slope = report.regime == SmoothingRegime::finitely ? -2.0 * (p - *s) / (2.0 * p + 2.0 * a + 1.0)
                                                                        : -(p - *s) / a;
  report.replications_raw = std::move(results);
  return report;
}

namespace {

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

} // namespace

Json to_json(const RateStudyReport& report)
{
  Json per_n = Json::array();
  for (const auto& row : report.per_n) {
    per_n.push_back(Json{{"n", row.n},
                         {"median_risk", row.median_risk},
                         {"mean_risk", row.mean_risk},
                         {"iqr", row.iqr},
                         {"median_k_hat", row.median_k_hat},
                         {"median_oracle_risk", row.median_oracle_risk},
                         {"oracle_kstar", row.oracle.k_star},
                         {"oracle_Rstar", row.oracle.R_star},
                         {"N_n", row.oracle.N_n},
                         {"N_n_l", row.oracle.N_n_l},
                         {"delta_kstar", row.oracle.delta_k_star}});
  }
  return Json{{"schema", 1},
              {"config", report.config},
              {"grid", report.grid},
              {"replications", report.replications},
              {"seed", report.seed},
              {"regime", report.regime == SmoothingRegime::finitely ? "finitely_smoothing" : "infinitely_smoothing"},
              {"s", report.s},
              {"per_n", per_n},
              {"fitted_slope", finite_or_null(report.fitted_slope)},
              {"fitted_loglog_slope", finite_or_null(report.fitted_loglog_slope)},
              {"theoretical_slope", report.theoretical_slope}};
}

void write_replications_csv(std::ostream& out, const RateStudyReport& report)
{
  out << "n,replication,k_hat,N_hat,thresholded,risk,oracle_risk\n";
  for (const auto& r : report.replications_raw) {
    out << r.n << ',' << r.replication << ',' << r.k_hat << ',' << r.N_hat << ',' << (r.thresholded ? 1 : 0) << ','
        << format_double(r.risk) << ',' << format_double(r.oracle_risk) << '\n';
  }
}

std::string gnuplot_script(const std::string& report_csv, const RateStudyReport& report)
{
  std::ostringstream out;
  out << "# median adaptive risk against n\n"
      << "set logscale xy\n"
      << "set xlabel 'n'\n"
      << "set ylabel 'weighted risk'\n"
      << "set key top right\n"
      << "$median << EOD\n";
  for (const auto& row : report.per_n) {
    out << row.n << ' ' << format_double(row.median_risk) << ' ' << format_double(row.median_oracle_risk) << '\n';
  }
  out << "EOD\n"
      << "plot '" << report_csv << "' using 1:6 with points pt 7 ps 0.3 lc rgb '#999999' title 'replications', \\\n"
      << "     $median using 1:2 with linespoints lw 2 title sprintf('median adaptive (slope %.3f)', "
      << format_double(report.fitted_slope) << "), \\\n"
      << "     $median using 1:3 with linespoints dt 2 title 'median at oracle k*'\n";
  return out.str();
}

unsigned default_jobs()
{
  if (const char* env = std::getenv("NPIV_JOBS")) {
    unsigned value = 0;
    const std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size() && value > 0) {
      return value;
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace npiv
