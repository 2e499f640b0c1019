#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include "npiv/error.hpp"

namespace npiv {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

//! Coefficients [f]_j = <f, psi_j>, stored 0-based: coeffs(j - 1) holds [f]_j.
template <typename Scalar>
using CoefficientVector = Vector<Scalar>;

//! Frequency carried by basis index j (psi_2j and psi_2j+1 share frequency j).
constexpr Index frequency_of(Index j) { return j / 2; }

//! Trigonometric basis of L^2[0,1]:
//!   psi_1 = 1, psi_2m(s) = sqrt(2) cos(2 pi m s), psi_2m+1(s) = sqrt(2) sin(2 pi m s).
template <typename Scalar>
Scalar trig_basis(Index j, Scalar s)
{
  if (j < 1) {
    throw DomainError("trig_basis: index must be >= 1, got " + std::to_string(j));
  }
  if (!(s >= Scalar(0) && s <= Scalar(1))) {
    throw DomainError("trig_basis: point must lie in [0,1]");
  }
  if (j == 1) {
    return Scalar(1);
  }
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar arg = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(frequency_of(j)) * s;
  return sqrt(Scalar(2)) * ((j % 2 == 0) ? cos(arg) : sin(arg));
}

//! Values psi_1(s), ..., psi_k(s) by angle addition. Faster than k calls to
//! trig_basis and accurate to a few hundred ulps for k in the thousands.
template <typename Scalar>
void trig_row(Scalar s, Index k, std::type_identity_t<Eigen::Ref<Vector<Scalar>>> out)
{
  using std::cos;
  using std::sin;
  using std::sqrt;
  if (k < 1) {
    return;
  }
  out(0) = Scalar(1);
  const Scalar theta = Scalar(2) * std::numbers::pi_v<Scalar> * s;
  const Scalar c1 = cos(theta);
  const Scalar s1 = sin(theta);
  const Scalar root2 = sqrt(Scalar(2));
  Scalar cm = c1;
  Scalar sm = s1;
  for (Index m = 1; 2 * m <= k; ++m) {
    out(2 * m - 1) = root2 * cm;
    if (2 * m + 1 <= k) {
      out(2 * m) = root2 * sm;
    }
    const Scalar next_c = cm * c1 - sm * s1;
    sm = sm * c1 + cm * s1;
    cm = next_c;
  }
}

//! Strictly positive weight sequence (w_j)_{j>=1} evaluated lazily from a
//! generator. Built-in kinds are normalized so that w_1 = 1:
//!
//!   constant            w_j = 1
//!   sobolev(r)          w_j = j^{2r}          (j >= 2)
//!   derivative(s)       w_j = j^{2s}          (j >= 2)
//!   polynomial_decay(a) w_j = j^{-2a}         (j >= 2)
//!   exponential_decay(a) w_j = exp(-j^{2a})   (j >= 2)
//!   custom(table)       w_j = table[j - 1]
//!
//! Weights are attached to the basis index, not to the frequency, so
//! sobolev(r) differs from the frequency-based norm by a factor of at most 4^r.
class WeightSequence {
public:
  enum class Kind { constant, sobolev, derivative, polynomial_decay, exponential_decay, custom };

  WeightSequence() = default;

  static WeightSequence constant() { return WeightSequence(Kind::constant, 0.0); }
  static WeightSequence sobolev(double r);
  static WeightSequence derivative(int s);
  static WeightSequence polynomial_decay(double a);
  static WeightSequence exponential_decay(double a);
  static WeightSequence custom(std::vector<double> table);

  //! Parses "constant", "sobolev:2", "derivative:1", "polynomial:1",
  //! "exponential:0.5" or "custom:1,0.25,0.1".
  static WeightSequence parse(const std::string& text);

  double operator()(Index j) const;

  //! w_1, ..., w_k.
  Vector<double> head(Index k) const;

  Kind kind() const { return kind_; }
  double parameter() const { return parameter_; }
  //! Number of entries a custom table covers; unbounded for built-in kinds.
  Index extent() const;
  std::string to_string() const;

private:
  WeightSequence(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}

  Kind kind_ = Kind::constant;
  double parameter_ = 0.0;
  std::shared_ptr<const std::vector<double>> table_;
};

//! sum_j w_j [f]_j^2, accumulated in index order.
template <typename Derived>
typename Derived::Scalar weighted_norm_sq(const Eigen::MatrixBase<Derived>& f, const WeightSequence& w)
{
  using Scalar = typename Derived::Scalar;
  Scalar acc(0);
  for (Index j = 0; j < f.size(); ++j) {
    acc += Scalar(w(j + 1)) * f(j) * f(j);
  }
  return acc;
}

//! Membership in the ellipsoid { f : ||f||_gamma^2 <= rho }.
template <typename Derived>
bool ellipsoid_contains(const Eigen::MatrixBase<Derived>& f, const WeightSequence& gamma,
                        typename Derived::Scalar rho)
{
  if (!(rho > 0)) {
    throw DomainError("ellipsoid_contains: radius must be positive");
  }
  return weighted_norm_sq(f, gamma) <= rho;
}

} // namespace npiv
