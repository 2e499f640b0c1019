#include "npiv/simulate.hpp"

#include <algorithm>
#include <sstream>

namespace npiv {

namespace {

constexpr std::uint64_t kJointStream = 0;
constexpr std::uint64_t kNoiseStream = 1;

OperatorSpec finish_operator(OperatorSpec op)
{
  double total = 0.0;
  for (Index j = 2; j <= op.J; ++j) {
    total += std::abs(op.t(j - 1));
  }
  op.density_floor = 1.0 - 2.0 * total;
  return op;
}

} // namespace

const char* to_string(OperatorDecay decay)
{
  switch (decay) {
  case OperatorDecay::polynomial:
    return "polynomial";
  case OperatorDecay::exponential:
    return "exponential";
  case OperatorDecay::custom:
    return "custom";
  }
  return "unknown";
}

OperatorDecay parse_operator_decay(const std::string& text)
{
  if (text == "polynomial") {
    return OperatorDecay::polynomial;
  }
  if (text == "exponential") {
    return OperatorDecay::exponential;
  }
  if (text == "custom") {
    return OperatorDecay::custom;
  }
  throw InputError("unknown operator decay '" + text + "' (expected polynomial, exponential or custom)");
}

std::optional<WeightSequence> OperatorSpec::lambda() const
{
  switch (decay) {
  case OperatorDecay::polynomial:
    return WeightSequence::polynomial_decay(a);
  case OperatorDecay::exponential:
    return WeightSequence::exponential_decay(a);
  case OperatorDecay::custom:
    return std::nullopt;
  }
  return std::nullopt;
}

double OperatorSpec::envelope() const
{
  double total = 0.0;
  for (Index j = 2; j <= J; ++j) {
    total += std::abs(t(j - 1));
  }
  return 1.0 + 2.0 * total;
}

OperatorSpec make_operator(OperatorDecay decay, double a, Index J)
{
  if (decay == OperatorDecay::custom) {
    throw DomainError("make_operator: use make_operator_from_coefficients for custom operators");
  }
  if (J < 2) {
    throw DomainError("make_operator: truncation J must be >= 2");
  }
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("make_operator: decay parameter a must be positive");
  }
  OperatorSpec op;
  op.decay = decay;
  op.a = a;
  op.J = J;
  const WeightSequence lambda = *op.lambda();

  // below this t_j^2 / lambda_j is no longer computable
  if (!(lambda(J) >= 1e-290)) {
    throw DomainError("make_operator: lambda_J underflows for J = " + std::to_string(J) + "; use a smaller J");
  }
  double root_sum = 0.0;
  for (Index j = 2; j <= J; ++j) {
    root_sum += std::sqrt(lambda(j));
  }
  op.c = std::min(1.0, 1.0 / (2.0 * root_sum));
  op.t.resize(J);
  op.t(0) = 1.0;
  for (;;) {
    double total = 0.0;
    for (Index j = 2; j <= J; ++j) {
      op.t(j - 1) = op.c * std::sqrt(lambda(j));
      total += op.t(j - 1);
    }
    if (1.0 - 2.0 * total >= 0.0) {
      break;
    }
    // rounding pushed the floor below zero
    op.c = std::nextafter(op.c, 0.0);
  }

  double d = 1.0;
  for (Index j = 1; j <= J; ++j) {
    const double t2 = op.t(j - 1) * op.t(j - 1);
    d = std::max({d, lambda(j) / t2, t2 / lambda(j)});
  }
  op.link_d = d;
  op.link_D = d;
  return finish_operator(std::move(op));
}

OperatorSpec make_operator_from_coefficients(const Vector<double>& t)
{
  if (t.size() < 2) {
    throw DomainError("operator coefficients need at least t_1 and t_2");
  }
  if (t(0) != 1.0) {
    throw DomainError("operator coefficient t_1 must equal 1 (uniform marginals)");
  }
  for (Index j = 0; j < t.size(); ++j) {
    if (!std::isfinite(t(j))) {
      throw DomainError("operator coefficient t_" + std::to_string(j + 1) + " is not finite");
    }
  }
  OperatorSpec op;
  op.decay = OperatorDecay::custom;
  op.a = 0.0;
  op.J = t.size();
  op.c = 1.0;
  op.t = t;
  op = finish_operator(std::move(op));
  if (op.density_floor < 0.0) {
    std::ostringstream msg;
    msg << "operator coefficients give a density that can be negative: 1 - 2 sum |t_j| = " << op.density_floor;
    throw DomainError(msg.str());
  }
  return op;
}

double joint_density(const OperatorSpec& op, double z, double w)
{
  Vector<double> at_z(op.J);
  Vector<double> at_w(op.J);
  trig_row(z, op.J, at_z);
  trig_row(w, op.J, at_w);
  double f = 1.0;
  for (Index j = 2; j <= op.J; ++j) {
    f += op.t(j - 1) * at_z(j - 1) * at_w(j - 1);
  }
  return f;
}

StructuralSpec make_structural(double p, double rho, Index J_phi)
{
  if (!(p > 0.5) || !std::isfinite(p)) {
    throw DomainError("make_structural: Sobolev order p must exceed 1/2");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw DomainError("make_structural: radius rho must be positive");
  }
  if (J_phi < 1) {
    throw DomainError("make_structural: truncation J_phi must be >= 1");
  }
  Vector<double> b(J_phi);
  for (Index j = 1; j <= J_phi; ++j) {
    b(j - 1) = std::pow(static_cast<double>(j), -(p + 0.51));
  }
  const double norm = weighted_norm_sq(b, WeightSequence::sobolev(p));
  b *= std::sqrt(0.99 * rho / norm);
  return {std::move(b), p, rho, J_phi};
}

StructuralSpec make_structural_custom(double p, double rho, const Vector<double>& b)
{
  if (!(p > 0.5) || !std::isfinite(p)) {
    throw DomainError("make_structural: Sobolev order p must exceed 1/2");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw DomainError("make_structural: radius rho must be positive");
  }
  if (b.size() < 1) {
    throw DomainError("make_structural: custom profile needs at least one coefficient");
  }
  const double norm = weighted_norm_sq(b, WeightSequence::sobolev(p));
  if (!(norm <= rho)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "structural coefficients leave the Sobolev ellipsoid: sum gamma_j b_j^2 = " << norm << " > rho = " << rho;
    throw DomainError(msg.str());
  }
  return {b, p, rho, b.size()};
}

double structural_value(const StructuralSpec& phi, double s)
{
  if (!(s >= 0.0 && s <= 1.0)) {
    throw DomainError("structural_value: point must lie in [0,1]");
  }
  Vector<double> row(phi.J_phi);
  trig_row(s, phi.J_phi, row);
  return phi.b.dot(row);
}

Vector<double> true_g_coeffs(const StructuralSpec& phi, const OperatorSpec& op)
{
  const Index size = std::max(op.J, phi.J_phi);
  Vector<double> g(size);
  for (Index j = 1; j <= size; ++j) {
    const double bj = j <= phi.J_phi ? phi.b(j - 1) : 0.0;
    g(j - 1) = op.coefficient(j) * bj;
  }
  return g;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> sample_joint(const OperatorSpec& op, Index n, std::uint64_t seed)
{
  if (n < 1) {
    throw DomainError("sample_joint: n must be >= 1");
  }
  if (op.density_floor < 0.0) {
    throw DomainError("sample_joint: operator density is not nonnegative");
  }
  CounterRng rng(seed, kJointStream);
  const double envelope = op.envelope();
  Eigen::Matrix<double, Eigen::Dynamic, 2> out(n, 2);
  Vector<double> at_z(op.J);
  Vector<double> at_w(op.J);
  Index accepted = 0;
  while (accepted < n) {
    const double z = rng.uniform();
    const double w = rng.uniform();
    const double u = rng.uniform();
    trig_row(z, op.J, at_z);
    trig_row(w, op.J, at_w);
    double f = 1.0;
    for (Index j = 2; j <= op.J; ++j) {
      f += op.t(j - 1) * at_z(j - 1) * at_w(j - 1);
    }
    if (u * envelope < f) {
      out(accepted, 0) = z;
      out(accepted, 1) = w;
      ++accepted;
    }
  }
  return out;
}

Sample generate_sample(const StructuralSpec& phi, const OperatorSpec& op, double sigma, Index n,
                       std::uint64_t seed)
{
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("generate_sample: sigma must be positive");
  }
  const auto zw = sample_joint(op, n, seed);
  CounterRng rng(seed, kNoiseStream);
  std::normal_distribution<double> noise(0.0, noise_sd(sigma));
  Vector<double> y(n);
  Vector<double> row(phi.J_phi);
  for (Index i = 0; i < n; ++i) {
    trig_row(zw(i, 0), phi.J_phi, row);
    y(i) = phi.b.dot(row) + noise(rng);
  }
  return Sample(std::move(y), zw.col(0), zw.col(1));
}

} // namespace npiv
