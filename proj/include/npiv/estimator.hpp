#pragma once

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numbers>

#include "npiv/basis.hpp"
#include "npiv/sample.hpp"

namespace npiv {

enum class EstimatorMode { general, diagonal };

inline const char* to_string(EstimatorMode mode)
{
  return mode == EstimatorMode::general ? "general" : "diagonal";
}

//! Galerkin estimate of the structural function in dimension k.
//! A thresholded estimate is identically zero.
template <typename Scalar>
struct GalerkinEstimate {
  CoefficientVector<Scalar> coeffs;
  Index k = 0;
  bool thresholded = false;
  EstimatorMode mode = EstimatorMode::general;
};

namespace detail {

template <typename Scalar>
void require_dimension(const BasicSample<Scalar>&, Index k, const char* what)
{
  if (k < 1) {
    throw DomainError(std::string(what) + ": dimension k must be >= 1");
  }
}

template <typename Scalar>
GalerkinEstimate<Scalar> zero_estimate(Index k, EstimatorMode mode)
{
  return {CoefficientVector<Scalar>::Zero(k), k, true, mode};
}

} // namespace detail

// Empirical moments. Every entry is a sum over i = 1..n accumulated in row
// order and divided by n once at the end, so the diagonal, the full matrix
// and any loop that follows the same order agree bit for bit.

//! [T]_k with entry (l, j) = (1/n) sum_i psi_l(w_i) psi_j(z_i).
template <typename Scalar>
Matrix<Scalar> empirical_operator_matrix(const BasicSample<Scalar>& sample, Index k)
{
  detail::require_dimension(sample, k, "empirical_operator_matrix");
  Matrix<Scalar> t = Matrix<Scalar>::Zero(k, k);
  Vector<Scalar> at_w(k);
  Vector<Scalar> at_z(k);
  for (Index i = 0; i < sample.size(); ++i) {
    for (Index j = 1; j <= k; ++j) {
      at_w(j - 1) = trig_basis(j, sample.w()(i));
      at_z(j - 1) = trig_basis(j, sample.z()(i));
    }
    t.noalias() += at_w * at_z.transpose();
  }
  return t / Scalar(sample.size());
}

//! Diagonal entries [T]_jj, j = first..last (1-based, inclusive).
template <typename Scalar>
Vector<Scalar> empirical_operator_diagonal(const BasicSample<Scalar>& sample, Index first, Index last)
{
  if (first < 1 || last < first - 1) {
    throw DomainError("empirical_operator_diagonal: invalid index range");
  }
  Vector<Scalar> out(last - first + 1);
  for (Index j = first; j <= last; ++j) {
    Scalar acc(0);
    for (Index i = 0; i < sample.size(); ++i) {
      acc += trig_basis(j, sample.w()(i)) * trig_basis(j, sample.z()(i));
    }
    out(j - first) = acc / Scalar(sample.size());
  }
  return out;
}

template <typename Scalar>
Vector<Scalar> empirical_operator_diagonal(const BasicSample<Scalar>& sample, Index k)
{
  detail::require_dimension(sample, k, "empirical_operator_diagonal");
  return empirical_operator_diagonal(sample, Index(1), k);
}

//! [g]_k with entry l = (1/n) sum_i y_i psi_l(w_i).
template <typename Scalar>
Vector<Scalar> empirical_rhs(const BasicSample<Scalar>& sample, Index k)
{
  detail::require_dimension(sample, k, "empirical_rhs");
  Vector<Scalar> out(k);
  for (Index l = 1; l <= k; ++l) {
    Scalar acc(0);
    for (Index i = 0; i < sample.size(); ++i) {
      acc += sample.y()(i) * trig_basis(l, sample.w()(i));
    }
    out(l - 1) = acc / Scalar(sample.size());
  }
  return out;
}

//! Thresholded least-squares solution [T]^{-1}[g], or zero when [T] is
//! numerically singular or ||[T]^{-1}|| > sqrt(n).
//!
//! The spectral norm of the inverse is 1 / sigma_min. [T] counts as singular
//! when sigma_min <= eps * k * sigma_max.
template <typename Scalar>
GalerkinEstimate<Scalar> galerkin_solve(const Matrix<Scalar>& t, const Vector<Scalar>& g, Index n)
{
  const Index k = t.rows();
  if (k < 1 || t.cols() != k || g.size() != k) {
    throw DomainError("galerkin_solve: need a square k x k matrix and a length-k vector");
  }
  if (n < 1) {
    throw DomainError("galerkin_solve: sample size must be >= 1");
  }
  using std::sqrt;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(t);
  const auto& sv = svd.singularValues();
  const Scalar sigma_max = sv(0);
  const Scalar sigma_min = sv(k - 1);
  const bool singular =
      !(sigma_max > Scalar(0)) || sigma_min <= std::numeric_limits<Scalar>::epsilon() * Scalar(k) * sigma_max;
  if (singular || Scalar(1) / sigma_min > sqrt(Scalar(n))) {
    return detail::zero_estimate<Scalar>(k, EstimatorMode::general);
  }
  return {t.partialPivLu().solve(g), k, false, EstimatorMode::general};
}

//! Diagonal estimator: [phi]_j = g_j / T_jj when min_{j<=k} T_jj^2 >= 1/n,
//! zero otherwise.
template <typename Scalar>
GalerkinEstimate<Scalar> diagonal_solve(const Vector<Scalar>& t_diag, const Vector<Scalar>& g, Index n)
{
  const Index k = t_diag.size();
  if (k < 1 || g.size() != k) {
    throw DomainError("diagonal_solve: need equal-length, non-empty diagonal and rhs");
  }
  if (n < 1) {
    throw DomainError("diagonal_solve: sample size must be >= 1");
  }
  const Scalar floor = Scalar(1) / Scalar(n);
  for (Index j = 0; j < k; ++j) {
    if (!(t_diag(j) * t_diag(j) >= floor)) {
      return detail::zero_estimate<Scalar>(k, EstimatorMode::diagonal);
    }
  }
  return {g.cwiseQuotient(t_diag), k, false, EstimatorMode::diagonal};
}

template <typename Scalar>
GalerkinEstimate<Scalar> galerkin_estimate(const BasicSample<Scalar>& sample, Index k)
{
  return galerkin_solve(empirical_operator_matrix(sample, k), empirical_rhs(sample, k), sample.size());
}

template <typename Scalar>
GalerkinEstimate<Scalar> diagonal_estimate(const BasicSample<Scalar>& sample, Index k)
{
  return diagonal_solve(empirical_operator_diagonal(sample, k), empirical_rhs(sample, k), sample.size());
}

//! Coefficients of the s-th derivative of sum_j coeffs_j psi_j.
//!
//! Each differentiation maps the (cos, sin) pair (a, b) at frequency m to
//! (2 pi m b, -2 pi m a) and kills the constant. When the input ends on a
//! cosine term (even length) the output grows by one so the sine partner
//! fits. s = 0 returns the input unchanged.
template <typename Scalar>
CoefficientVector<Scalar> derivative_coeffs(const CoefficientVector<Scalar>& coeffs, int s)
{
  if (s < 0) {
    throw DomainError("derivative_coeffs: order must be >= 0");
  }
  if (s == 0) {
    return coeffs;
  }
  const Index k = coeffs.size();
  const Index out_size = (k > 0 && k % 2 == 0) ? k + 1 : k;
  CoefficientVector<Scalar> out = CoefficientVector<Scalar>::Zero(out_size);
  out.head(k) = coeffs;
  if (out_size > 0) {
    out(0) = Scalar(0);
  }
  for (Index m = 1; 2 * m < out_size; ++m) {
    const Scalar omega = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(m);
    Scalar a = out(2 * m - 1);
    Scalar b = out(2 * m);
    for (int step = 0; step < s; ++step) {
      const Scalar next_a = omega * b;
      b = -omega * a;
      a = next_a;
    }
    out(2 * m - 1) = a;
    out(2 * m) = b;
  }
  return out;
}

template <typename Scalar>
CoefficientVector<Scalar> derivative_coeffs(const GalerkinEstimate<Scalar>& est, int s)
{
  return derivative_coeffs(est.coeffs, s);
}

//! ||phi_hat - phi||_w^2 with the truth given by coefficients b_1..b_J:
//!   sum_{j<=k} w_j (c_j - b_j)^2 + sum_{k<j<=j_max} w_j b_j^2.
template <typename Scalar>
Scalar risk_weighted(const CoefficientVector<Scalar>& coeffs, const CoefficientVector<Scalar>& truth,
                     const WeightSequence& w, Index j_max)
{
  const Index k = coeffs.size();
  if (j_max < k || j_max < truth.size()) {
    throw DomainError("risk_weighted: j_max must cover the estimate dimension and the truth truncation");
  }
  const auto b = [&](Index j) { return j <= truth.size() ? truth(j - 1) : Scalar(0); };
  Scalar acc(0);
  for (Index j = 1; j <= k; ++j) {
    const Scalar diff = coeffs(j - 1) - b(j);
    acc += Scalar(w(j)) * diff * diff;
  }
  for (Index j = k + 1; j <= j_max; ++j) {
    const Scalar bj = b(j);
    if (bj != Scalar(0)) {
      acc += Scalar(w(j)) * bj * bj;
    }
  }
  return acc;
}

template <typename Scalar>
Scalar risk_weighted(const GalerkinEstimate<Scalar>& est, const CoefficientVector<Scalar>& truth,
                     const WeightSequence& w, Index j_max)
{
  return risk_weighted(est.coeffs, truth, w, j_max);
}

//! sum_j coeffs_j psi_j(s).
template <typename Scalar>
Scalar evaluate_series(const CoefficientVector<Scalar>& coeffs, Scalar s)
{
  if (!(s >= Scalar(0) && s <= Scalar(1))) {
    throw DomainError("evaluate: point must lie in [0,1]");
  }
  Scalar acc(0);
  for (Index j = 1; j <= coeffs.size(); ++j) {
    acc += coeffs(j - 1) * trig_basis(j, s);
  }
  return acc;
}

template <typename Scalar>
Scalar evaluate_estimate(const GalerkinEstimate<Scalar>& est, Scalar s)
{
  return evaluate_series(est.coeffs, s);
}

} // namespace npiv
