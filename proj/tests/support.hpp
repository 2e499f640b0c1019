#pragma once

// Shared helpers for the test binaries: small random generators and
// brute-force reference evaluators written independently of the library
// (plain loops, no shared code paths beyond WeightSequence lookups).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "npiv/basis.hpp"
#include "npiv/sample.hpp"

namespace npiv::testing {

inline double ref_psi(Index j, double s)
{
  if (j == 1) {
    return 1.0;
  }
  const double m = static_cast<double>(j / 2);
  const double arg = 2.0 * std::numbers::pi * m * s;
  return std::sqrt(2.0) * (j % 2 == 0 ? std::cos(arg) : std::sin(arg));
}

// random weight sequences -----------------------------------------------------

inline WeightSequence random_omega(std::mt19937_64& gen)
{
  std::uniform_int_distribution<int> pick(0, 3);
  switch (pick(gen)) {
  case 0:
    return WeightSequence::constant();
  case 1:
    return WeightSequence::derivative(std::uniform_int_distribution<int>(1, 2)(gen));
  case 2:
    return WeightSequence::sobolev(std::uniform_real_distribution<double>(0.1, 1.5)(gen));
  default: {
    std::vector<double> table(400);
    double acc = 1.0;
    table[0] = 1.0;
    for (std::size_t j = 1; j < table.size(); ++j) {
      acc *= std::uniform_real_distribution<double>(1.0, 1.3)(gen);
      table[j] = acc;
    }
    return WeightSequence::custom(table);
  }
  }
}

inline WeightSequence random_lambda(std::mt19937_64& gen)
{
  std::uniform_int_distribution<int> pick(0, 2);
  switch (pick(gen)) {
  case 0:
    return WeightSequence::polynomial_decay(std::uniform_real_distribution<double>(0.25, 2.0)(gen));
  case 1:
    return WeightSequence::exponential_decay(std::uniform_real_distribution<double>(0.2, 0.8)(gen));
  default: {
    std::vector<double> table(400);
    double acc = 1.0;
    table[0] = 1.0;
    for (std::size_t j = 1; j < table.size(); ++j) {
      acc *= std::uniform_real_distribution<double>(0.8, 1.0)(gen);
      table[j] = acc;
    }
    return WeightSequence::custom(table);
  }
  }
}

inline WeightSequence random_gamma(std::mt19937_64& gen)
{
  return WeightSequence::sobolev(std::uniform_real_distribution<double>(0.6, 3.0)(gen));
}

// brute-force references --------------------------------------------------------

inline double ref_Delta(const WeightSequence& w, const WeightSequence& l, Index k)
{
  double best = 0.0;
  for (Index j = 1; j <= k; ++j) {
    best = std::max(best, w(j) / l(j));
  }
  return best;
}

inline double ref_tau(const WeightSequence& w, const WeightSequence& l, Index k)
{
  double best = 0.0;
  for (Index j = 1; j <= k; ++j) {
    best = std::max(best, std::max(w(j), 1.0) / l(j));
  }
  return best;
}

inline double ref_delta(const WeightSequence& w, const WeightSequence& l, Index k)
{
  const double kk = static_cast<double>(k);
  return kk * ref_Delta(w, l, k) * std::log(std::max(ref_tau(w, l, k), kk + 2.0)) / std::log(kk + 2.0);
}

// N_n by full scan over N = 1..n with both conditions tested at every N
// (no early exit). The exponential condition is compared in log form.
inline Index ref_dimension_bound(const WeightSequence& w, const WeightSequence& l, double d, Index n)
{
  const double nn = static_cast<double>(n);
  Index best = 0;
  for (Index N = 1; N <= n; ++N) {
    const bool expo = 7.0 * std::log(nn) - nn * l(N) / (288.0 * d) <= 7.0 * std::log(2016.0 * d / l(1));
    const bool pen = ref_delta(w, l, N) / nn <= 1.0;
    if (expo && pen) {
      best = N;
    }
  }
  return best == 0 ? 1 : best;
}

inline Index ref_lower_scan(const WeightSequence& w, const WeightSequence& l, double d, Index n, Index cap)
{
  const double thr = 4.0 * d * std::log(static_cast<double>(n)) / static_cast<double>(n);
  Index best = 0;
  for (Index j = 1; j <= cap; ++j) {
    if (l(j) / (static_cast<double>(j) * std::max(w(j), 1.0)) >= thr) {
      best = j;
    }
  }
  return best == 0 ? 1 : best;
}

struct RefOracle {
  Index k = 1;
  double r = 0.0;
};

inline RefOracle ref_oracle(const WeightSequence& w, const WeightSequence& g, const WeightSequence& l, Index n,
                            Index k_max)
{
  RefOracle best{0, 0.0};
  for (Index k = 1; k <= k_max; ++k) {
    double var = 0.0;
    for (Index j = 1; j <= k; ++j) {
      var += w(j) / (static_cast<double>(n) * l(j));
    }
    const double obj = std::max(w(k) / g(k), var);
    if (best.k == 0 || obj < best.r) {
      best = {k, obj};
    }
  }
  return best;
}

// Row-order accumulation, same as the documented summation order.
inline double ref_T(const Sample& s, Index l, Index j)
{
  double acc = 0.0;
  for (Index i = 0; i < s.size(); ++i) {
    acc += ref_psi(l, s.w()(i)) * ref_psi(j, s.z()(i));
  }
  return acc / static_cast<double>(s.size());
}

inline double ref_g(const Sample& s, Index l)
{
  double acc = 0.0;
  for (Index i = 0; i < s.size(); ++i) {
    acc += s.y()(i) * ref_psi(l, s.w()(i));
  }
  return acc / static_cast<double>(s.size());
}

// Empirical N_hat by direct definition: scan upper range, stop at first
// violation.
inline Index ref_empirical_upper(const WeightSequence& w, Index n)
{
  Index upper = 0;
  for (Index N = 1; N <= n; ++N) {
    double mx = 0.0;
    for (Index j = 1; j <= N; ++j) {
      mx = std::max(mx, w(j));
    }
    if (mx / static_cast<double>(n) <= 1.0) {
      upper = N;
    }
  }
  return upper == 0 ? 1 : upper;
}

inline Index ref_empirical_bound(const Sample& s, const WeightSequence& w)
{
  const Index n = s.size();
  const Index upper = ref_empirical_upper(w, n);
  const double thr = std::log(static_cast<double>(n)) / static_cast<double>(n);
  for (Index j = 1; j <= upper; ++j) {
    const double t = ref_T(s, j, j);
    if (t * t / (static_cast<double>(j) * std::max(w(j), 1.0)) < thr) {
      return j - 1 < 1 ? 1 : j - 1;
    }
  }
  return upper;
}

// random samples ----------------------------------------------------------------

inline Sample random_sample(std::mt19937_64& gen, Index n)
{
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> nrm(0.0, 1.0);
  Vector<double> y(n), z(n), w(n);
  for (Index i = 0; i < n; ++i) {
    z(i) = u01(gen);
    // w correlated with z through a shifted copy
    w(i) = std::fmod(z(i) + 0.15 * u01(gen), 1.0);
    y(i) = std::sin(2.0 * std::numbers::pi * z(i)) + 0.3 * nrm(gen);
  }
  return Sample(y, z, w);
}

inline std::string read_file(const std::string& path)
{
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    return {};
  }
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) {
    out.append(buf, got);
  }
  std::fclose(f);
  return out;
}

} // namespace npiv::testing
