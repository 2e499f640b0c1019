#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "npiv/basis.hpp"
#include "npiv/rng.hpp"
#include "npiv/sample.hpp"

namespace npiv {

enum class OperatorDecay { polynomial, exponential, custom };

const char* to_string(OperatorDecay decay);
OperatorDecay parse_operator_decay(const std::string& text);

//! Conditional expectation operator that is diagonal in the trigonometric
//! basis: T psi_j = t_j psi_j with t_1 = 1, t_j = c sqrt(lambda_j) for
//! 2 <= j <= J and t_j = 0 beyond J.
//!
//! It is realized by the joint density of (Z, W) on [0,1]^2
//!   f(z, w) = 1 + sum_{j=2..J} t_j psi_j(z) psi_j(w),
//! which has uniform marginals and E[psi_j(Z) | W] = t_j psi_j(W).
struct OperatorSpec {
  OperatorDecay decay = OperatorDecay::polynomial;
  double a = 1.0;
  Index J = 2;
  double c = 1.0;
  Vector<double> t; //!< t_1..t_J
  double density_floor = 0.0;
  //! Link constant d = max_j max(lambda_j / t_j^2, t_j^2 / lambda_j) over j <= J.
  //! NaN for operators given by raw coefficients.
  double link_d = std::numeric_limits<double>::quiet_NaN();
  //! Extended link constant; equals link_d for diagonal operators.
  double link_D = std::numeric_limits<double>::quiet_NaN();

  //! t_j for any j >= 1 (zero beyond J).
  double coefficient(Index j) const { return j <= J ? t(j - 1) : 0.0; }
  //! lambda for the decay family; empty for raw coefficients.
  std::optional<WeightSequence> lambda() const;
  //! Rejection envelope M = 1 + 2 sum_{j>=2} |t_j|.
  double envelope() const;
};

//! Largest c <= 1 keeping the density nonnegative in the worst case:
//! c = min(1, 1 / (2 sum_{j=2..J} sqrt(lambda_j))).
OperatorSpec make_operator(OperatorDecay decay, double a, Index J);

//! Operator from raw coefficients t_1..t_J (t_1 must be 1). Throws
//! DomainError when 1 - 2 sum_{j>=2} |t_j| < 0.
OperatorSpec make_operator_from_coefficients(const Vector<double>& t);

double joint_density(const OperatorSpec& op, double z, double w);

//! Fourier coefficients b_1..b_J of the structural function and its
//! Sobolev class W_p^rho.
struct StructuralSpec {
  Vector<double> b;
  double p = 2.0;
  double rho = 1.0;
  Index J_phi = 0;
};

enum class StructuralProfile { power_law, custom };

//! b_j = kappa j^{-(p + 0.51)}, kappa chosen so that sum_j gamma_j b_j^2 = 0.99 rho
//! with gamma = sobolev(p).
StructuralSpec make_structural(double p, double rho, Index J_phi);

//! Validates sum_j gamma_j b_j^2 <= rho; the DomainError message carries the
//! computed norm.
StructuralSpec make_structural_custom(double p, double rho, const Vector<double>& b);

//! phi(s) = sum_j b_j psi_j(s).
double structural_value(const StructuralSpec& phi, double s);

//! [g]_j = t_j b_j for j = 1..max(J, J_phi).
Vector<double> true_g_coeffs(const StructuralSpec& phi, const OperatorSpec& op);

//! n draws (z, w) from the operator's joint density by rejection from the
//! uniform proposal on [0,1]^2. Column 0 holds z, column 1 holds w.
Eigen::Matrix<double, Eigen::Dynamic, 2> sample_joint(const OperatorSpec& op, Index n, std::uint64_t seed);

//! Standard deviation of the Gaussian error: sigma / 3^{1/4}, which gives
//! E[U^4] = sigma^4 exactly.
inline double noise_sd(double sigma) { return sigma / std::pow(3.0, 0.25); }

//! y_i = phi(z_i) + u_i with u_i ~ N(0, sigma^2 / sqrt(3)) independent of (z, w).
Sample generate_sample(const StructuralSpec& phi, const OperatorSpec& op, double sigma, Index n,
                       std::uint64_t seed);

} // namespace npiv
