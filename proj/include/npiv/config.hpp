#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "npiv/basis.hpp"
#include "npiv/selection.hpp"
#include "npiv/simulate.hpp"

namespace npiv {

using Json = nlohmann::json;

inline constexpr Index kDefaultOperatorTruncation = 64;
inline constexpr Index kDefaultStructuralTruncation = 200;

//! Noise level given either directly or as a signal-to-noise ratio
//! sd(phi(Z)) / sd(U), where sd(phi(Z))^2 = sum_{j>=2} b_j^2 under the
//! uniform marginal of Z.
struct NoiseConfig {
  std::optional<double> sigma;
  std::optional<double> snr;

  double resolve_sigma(const StructuralSpec& phi) const;
};

struct SelectionConfig {
  WeightSequence omega = WeightSequence::constant();
  double penalty_const = kDefaultPenaltyConst;
};

struct StudyConfig {
  std::vector<Index> n_grid;
  Index replications = 0;
  std::uint64_t seed = 0;
};

//! Single JSON document with sections `structural`, `operator`, `noise`,
//! `selection`, `study`. Unknown keys at any level are rejected.
struct Config {
  StructuralSpec structural;
  OperatorSpec op;
  NoiseConfig noise;
  double sigma = 0.0; //!< resolved noise level
  SelectionConfig selection;
  StudyConfig study;
  Json source; //!< document as read
};

Config parse_config(const Json& doc);
Config load_config(const std::string& path);

//! Structural section only, for files that describe a truth.
StructuralSpec parse_structural(const Json& section);

Json to_json(const OperatorSpec& op);
Json to_json(const StructuralSpec& phi);
Json to_json(const Vector<double>& v);

//! Derivative order carried by omega: s for derivative(s) / sobolev(s),
//! 0 for constant, empty otherwise.
std::optional<double> derivative_order(const WeightSequence& omega);

} // namespace npiv
