#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "npiv/config.hpp"

namespace npiv {

//! Oracle quantities for one sample size.
struct OracleRow {
  Index n = 0;
  Index k_star = 1;
  double R_star = 0.0;
  Index N_n = 1;
  Index N_n_l = 1;
  double delta_k_star = 0.0;
};

//! k*, R* (search over 1..k_max), N_n, N_n^l and delta_{k*}.
OracleRow oracle_row(const WeightSequence& omega, const WeightSequence& gamma, const WeightSequence& lambda, double d,
                     Index n, Index k_max);

//! Search range used when no explicit k_max is given.
inline Index default_oracle_kmax(Index n) { return std::min<Index>(n, 10000); }

struct ReplicationResult {
  Index n = 0;
  Index replication = 0;
  Index k_hat = 1;
  Index N_hat = 1;
  bool thresholded = false;
  double risk = 0.0;        //!< adaptive estimator
  double oracle_risk = 0.0; //!< diagonal estimator at the fixed oracle dimension k*
};

struct GridSummary {
  Index n = 0;
  double median_risk = 0.0;
  double mean_risk = 0.0;
  double iqr = 0.0;
  double median_k_hat = 0.0;
  double median_oracle_risk = 0.0;
  OracleRow oracle;
};

enum class SmoothingRegime { finitely, infinitely };

struct RateStudyReport {
  Json config;
  std::vector<Index> grid;
  Index replications = 0;
  std::uint64_t seed = 0;
  SmoothingRegime regime = SmoothingRegime::finitely;
  double s = 0.0;
  std::vector<GridSummary> per_n;
  //! Least-squares slope of log median risk against log n.
  double fitted_slope = 0.0;
  //! Least-squares slope of log median risk against log log n.
  double fitted_loglog_slope = 0.0;
  //! -2(p - s)/(2p + 2a + 1) for polynomial decay (per log n),
  //! -(p - s)/a for exponential decay (per log log n).
  double theoretical_slope = 0.0;
  std::vector<ReplicationResult> replications_raw; //!< ordered by (n, replication)
};

//! Per-replication RNG key: independent of scheduling and of the grid order.
std::uint64_t replication_seed(std::uint64_t seed, Index n, Index replication);

//! Median (average of the two middle values for even sizes).
double median(std::vector<double> values);
//! Interquartile range with linear interpolation between order statistics.
double interquartile_range(std::vector<double> values);
//! Ordinary least-squares slope of ys against xs.
double ols_slope(std::span<const double> xs, std::span<const double> ys);

//! Evaluates one (n, replication) cell.
ReplicationResult run_replication(const Config& cfg, Index n, Index replication, Index k_star);

//! Runs every (n, replication) cell on up to `jobs` threads. Output does
//! not depend on `jobs`. Grid needs >= 3 sizes unless `allow_small` is set;
//! replications need >= 10.
RateStudyReport run_rate_study(const Config& cfg, unsigned jobs, bool allow_small = false);

Json to_json(const RateStudyReport& report);
void write_replications_csv(std::ostream& out, const RateStudyReport& report);
//! gnuplot script plotting median risk against n on log-log axes.
std::string gnuplot_script(const std::string& report_csv, const RateStudyReport& report);

//! Reads NPIV_JOBS; falls back to the hardware concurrency (at least 1).
unsigned default_jobs();

} // namespace npiv
