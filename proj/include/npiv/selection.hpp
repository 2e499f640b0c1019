#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "npiv/basis.hpp"
#include "npiv/estimator.hpp"
#include "npiv/sample.hpp"

namespace npiv {

inline constexpr double kDefaultPenaltyConst = 540.0;

//! Penalty sequences Delta_k, tau_k, delta_k for k = 1..k_max (entry k - 1).
//!   Delta_k = max_{j<=k} w_j / l_j
//!   tau_k   = max_{j<=k} max(w_j, 1) / l_j
//!   delta_k = k Delta_k log(max(tau_k, k + 2)) / log(k + 2)
//! with l_j = lambda_j (known operator) or T_jj^2 (empirical). In the
//! empirical case every k carries the indicator min_{j<=k} T_jj^2 >= 1/n and
//! all three values are zero where it fails.
struct PenaltySequences {
  Index k_max = 0;
  Vector<double> Delta;
  Vector<double> tau;
  Vector<double> delta;
  bool empirical = false;
};

namespace detail {

inline double delta_from(Index k, double Delta, double tau)
{
  const double kk = static_cast<double>(k);
  return kk * Delta * std::log(std::max(tau, kk + 2.0)) / std::log(kk + 2.0);
}

inline void require_positive(Index v, const char* what)
{
  if (v < 1) {
    throw DomainError(std::string(what) + " must be >= 1");
  }
}

} // namespace detail

inline PenaltySequences known_sequences(const WeightSequence& omega, const WeightSequence& lambda, Index k_max)
{
  detail::require_positive(k_max, "known_sequences: k_max");
  PenaltySequences out{k_max, Vector<double>(k_max), Vector<double>(k_max), Vector<double>(k_max), false};
  double Delta = 0.0;
  double tau = 0.0;
  for (Index k = 1; k <= k_max; ++k) {
    const double w = omega(k);
    const double l = lambda(k);
    Delta = std::max(Delta, w / l);
    tau = std::max(tau, std::max(w, 1.0) / l);
    out.Delta(k - 1) = Delta;
    out.tau(k - 1) = tau;
    out.delta(k - 1) = detail::delta_from(k, Delta, tau);
  }
  return out;
}

//! Empirical sequences from diagonal entries T_jj, j = 1..t_diag.size().
template <typename Scalar>
PenaltySequences empirical_sequences_from_diagonal(const Vector<Scalar>& t_diag, const WeightSequence& omega,
                                                   Index n)
{
  const Index k_max = t_diag.size();
  detail::require_positive(k_max, "empirical_sequences: k_max");
  detail::require_positive(n, "empirical_sequences: n");
  PenaltySequences out{k_max, Vector<double>(k_max), Vector<double>(k_max), Vector<double>(k_max), true};
  const double floor = 1.0 / static_cast<double>(n);
  double Delta = 0.0;
  double tau = 0.0;
  bool indicator = true;
  for (Index k = 1; k <= k_max; ++k) {
    const double t2 = static_cast<double>(t_diag(k - 1) * t_diag(k - 1));
    indicator = indicator && t2 >= floor;
    if (!indicator) {
      out.Delta(k - 1) = 0.0;
      out.tau(k - 1) = 0.0;
      out.delta(k - 1) = 0.0;
      continue;
    }
    const double w = omega(k);
    Delta = std::max(Delta, w / t2);
    tau = std::max(tau, std::max(w, 1.0) / t2);
    out.Delta(k - 1) = Delta;
    out.tau(k - 1) = tau;
    out.delta(k - 1) = detail::delta_from(k, Delta, tau);
  }
  return out;
}

template <typename Scalar>
PenaltySequences empirical_sequences(const BasicSample<Scalar>& sample, const WeightSequence& omega, Index k_max)
{
  return empirical_sequences_from_diagonal(empirical_operator_diagonal(sample, k_max), omega, sample.size());
}

//! Largest N in 1..n with
//!   n^7 exp(-n lambda_N / (288 d)) <= (2016 d / lambda_1)^7  and  delta_N <= n,
//! or 1 when no N qualifies. delta_N is non-decreasing, so the scan stops at
//! the first N with delta_N > n.
inline Index dimension_bound_known(const WeightSequence& omega, const WeightSequence& lambda, double d, Index n)
{
  if (!(d >= 1.0)) {
    throw DomainError("dimension_bound_known: link constant d must be >= 1");
  }
  detail::require_positive(n, "dimension_bound_known: n");
  const double nn = static_cast<double>(n);
  const double rhs = 7.0 * std::log(2016.0 * d / lambda(1));
  const double log_n7 = 7.0 * std::log(nn);
  double Delta = 0.0;
  double tau = 0.0;
  Index best = 0;
  for (Index N = 1; N <= n; ++N) {
    const double w = omega(N);
    const double l = lambda(N);
    Delta = std::max(Delta, w / l);
    tau = std::max(tau, std::max(w, 1.0) / l);
    if (detail::delta_from(N, Delta, tau) > nn) {
      break;
    }
    if (log_n7 - nn * l / (288.0 * d) <= rhs) {
      best = N;
    }
  }
  return std::max<Index>(best, 1);
}

//! N_n^l: largest j <= cap with lambda_j / (j max(w_j, 1)) >= 4 d log(n) / n, or 1.
inline Index lower_dimension_scan(const WeightSequence& omega, const WeightSequence& lambda, double d, Index n,
                                  Index cap)
{
  detail::require_positive(n, "diagnostic_Nl: n");
  detail::require_positive(cap, "diagnostic_Nl: cap");
  const double threshold = 4.0 * d * std::log(static_cast<double>(n)) / static_cast<double>(n);
  for (Index j = cap; j >= 1; --j) {
    if (lambda(j) / (static_cast<double>(j) * std::max(omega(j), 1.0)) >= threshold) {
      return j;
    }
  }
  return 1;
}

//! N_n^l with the range capped by dimension_bound_known.
inline Index diagnostic_Nl(const WeightSequence& omega, const WeightSequence& lambda, double d, Index n)
{
  return lower_dimension_scan(omega, lambda, d, n, dimension_bound_known(omega, lambda, d, n));
}

struct EmpiricalDimensionBound {
  Index upper = 1; //!< largest N <= n with max_{j<=N} w_j <= n
  Index bound = 1; //!< data-driven bound on the model dimension
};

//! Upper scan range: largest N <= n with max_{j<=N} w_j / n <= 1 (at least 1).
inline Index empirical_upper_bound(const WeightSequence& omega, Index n)
{
  detail::require_positive(n, "empirical_dimension_bound: n");
  const double nn = static_cast<double>(n);
  Index upper = 0;
  for (Index j = 1; j <= n; ++j) {
    if (omega(j) > nn) {
      break;
    }
    upper = j;
  }
  return std::max<Index>(upper, 1);
}

//! Stopping rule: the bound is one less than the first j <= upper with
//! T_jj^2 / (j max(w_j, 1)) < log(n) / n, clamped to >= 1; upper when no j
//! violates. Diagonal entries are computed only as far as the scan goes.
template <typename Scalar>
EmpiricalDimensionBound empirical_dimension_bound(const BasicSample<Scalar>& sample, const WeightSequence& omega)
{
  const Index n = sample.size();
  EmpiricalDimensionBound out;
  out.upper = empirical_upper_bound(omega, n);
  out.bound = out.upper;
  const double threshold = std::log(static_cast<double>(n)) / static_cast<double>(n);
  for (Index j = 1; j <= out.upper; ++j) {
    const double tjj = static_cast<double>(empirical_operator_diagonal(sample, j, j)(0));
    if (tjj * tjj / (static_cast<double>(j) * std::max(omega(j), 1.0)) < threshold) {
      out.bound = std::max<Index>(j - 1, 1);
      break;
    }
  }
  return out;
}

//! (1/n) sum_i y_i^2.
template <typename Scalar>
Scalar estimate_EY2(const BasicSample<Scalar>& sample)
{
  Scalar acc(0);
  for (Index i = 0; i < sample.size(); ++i) {
    acc += sample.y()(i) * sample.y()(i);
  }
  return acc / Scalar(sample.size());
}

//! Full record of the penalized contrast choice over k = 1..N_hat.
template <typename Scalar>
struct SelectionTrace {
  Index n = 0;
  Index n_upper = 0;
  Index N_hat = 0;
  double penalty_const = kDefaultPenaltyConst;
  Scalar EY2_hat = 0;
  Vector<Scalar> t_diag;    //!< T_jj, j = 1..N_hat
  Vector<Scalar> g_hat;     //!< g_j, j = 1..N_hat
  Vector<double> delta_hat; //!< empirical delta_k, k = 1..N_hat
  Vector<Scalar> contrast;  //!< -||phi_k||_w^2
  Vector<Scalar> penalty;   //!< penalty_const * EY2_hat * delta_k / n
  Vector<Scalar> criterion; //!< contrast + penalty
  Index k_hat = 1;
  GalerkinEstimate<Scalar> estimate; //!< diagonal estimate at k_hat
};

//! k_hat = argmin_{1<=k<=N_hat} { -||phi_k||_w^2 + c * EY2_hat * delta_k / n },
//! ties resolved toward the smaller k.
template <typename Scalar>
SelectionTrace<Scalar> penalized_select(const BasicSample<Scalar>& sample, const WeightSequence& omega,
                                        double penalty_const = kDefaultPenaltyConst)
{
  if (!(penalty_const > 0.0) || !std::isfinite(penalty_const)) {
    throw DomainError("penalized_select: penalty constant must be positive");
  }
  const Index n = sample.size();
  const auto bound = empirical_dimension_bound(sample, omega);
  const Index N = bound.bound;

  SelectionTrace<Scalar> trace;
  trace.n = n;
  trace.n_upper = bound.upper;
  trace.N_hat = N;
  trace.penalty_const = penalty_const;
  trace.EY2_hat = estimate_EY2(sample);
  trace.t_diag = empirical_operator_diagonal(sample, N);
  trace.g_hat = empirical_rhs(sample, N);
  trace.delta_hat = empirical_sequences_from_diagonal(trace.t_diag, omega, n).delta;
  trace.contrast.resize(N);
  trace.penalty.resize(N);
  trace.criterion.resize(N);

  const Scalar scale = Scalar(penalty_const) * trace.EY2_hat / Scalar(n);
  for (Index k = 1; k <= N; ++k) {
    const auto est = diagonal_solve<Scalar>(trace.t_diag.head(k), trace.g_hat.head(k), n);
    trace.contrast(k - 1) = -weighted_norm_sq(est.coeffs, omega);
    trace.penalty(k - 1) = scale * Scalar(trace.delta_hat(k - 1));
    trace.criterion(k - 1) = trace.contrast(k - 1) + trace.penalty(k - 1);
  }
  Index best = 1;
  for (Index k = 2; k <= N; ++k) {
    if (trace.criterion(k - 1) < trace.criterion(best - 1)) {
      best = k;
    }
  }
  trace.k_hat = best;
  trace.estimate = diagonal_solve<Scalar>(trace.t_diag.head(best), trace.g_hat.head(best), n);
  return trace;
}

struct OracleDimension {
  Index k_star = 1;
  double rate = 0.0; //!< R* = attained minimum of the objective
};

//! k* = argmin_{1<=k<=k_max} max(w_k / gamma_k, sum_{j<=k} w_j / (n lambda_j)).
inline OracleDimension oracle_kstar(const WeightSequence& omega, const WeightSequence& gamma,
                                    const WeightSequence& lambda, Index n, Index k_max)
{
  detail::require_positive(n, "oracle_kstar: n");
  detail::require_positive(k_max, "oracle_kstar: k_max");
  const double nn = static_cast<double>(n);
  OracleDimension best{1, std::numeric_limits<double>::infinity()};
  double variance = 0.0;
  for (Index k = 1; k <= k_max; ++k) {
    variance += omega(k) / (nn * lambda(k));
    const double objective = std::max(omega(k) / gamma(k), variance);
    if (objective < best.rate) {
      best = {k, objective};
    }
  }
  return best;
}

} // namespace npiv
