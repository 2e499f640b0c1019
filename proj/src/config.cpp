#include "npiv/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>

namespace npiv {

namespace {

void check_keys(const Json& obj, const std::string& where, const std::set<std::string>& allowed)
{
  if (!obj.is_object()) {
    throw InputError("config: '" + where + "' must be a JSON object");
  }
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) {
      throw InputError("config: unknown key '" + item.key() + "' in '" + where + "'");
    }
  }
}

double get_number(const Json& obj, const std::string& where, const std::string& key)
{
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw InputError("config: missing '" + where + "." + key + "'");
  }
  if (!it->is_number()) {
    throw InputError("config: '" + where + "." + key + "' must be a number");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw InputError("config: '" + where + "." + key + "' must be finite");
  }
  return v;
}

Index get_index(const Json& obj, const std::string& where, const std::string& key)
{
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw InputError("config: missing '" + where + "." + key + "'");
  }
  if (!it->is_number_integer()) {
    throw InputError("config: '" + where + "." + key + "' must be an integer");
  }
  return it->get<Index>();
}

Vector<double> get_vector(const Json& obj, const std::string& where, const std::string& key)
{
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw InputError("config: missing '" + where + "." + key + "'");
  }
  if (!it->is_array() || it->empty()) {
    throw InputError("config: '" + where + "." + key + "' must be a non-empty array of numbers");
  }
  Vector<double> out(static_cast<Index>(it->size()));
  Index i = 0;
  for (const auto& v : *it) {
    if (!v.is_number()) {
      throw InputError("config: '" + where + "." + key + "' must contain only numbers");
    }
    out(i++) = v.get<double>();
  }
  return out;
}

template <typename F>
auto rethrow_as_input(const std::string& where, F&& f)
{
  try {
    return f();
  } catch (const DomainError& e) {
    throw InputError("config: '" + where + "': " + e.what());
  }
}

OperatorSpec parse_operator(const Json& section)
{
  check_keys(section, "operator", {"decay", "a", "J", "t"});
  const auto decay_it = section.find("decay");
  if (decay_it == section.end() || !decay_it->is_string()) {
    throw InputError("config: 'operator.decay' must be one of \"polynomial\", \"exponential\", \"custom\"");
  }
  const OperatorDecay decay = parse_operator_decay(decay_it->get<std::string>());
  if (decay == OperatorDecay::custom) {
    if (section.contains("a") || section.contains("J")) {
      throw InputError("config: custom operator takes only 't'");
    }
    const Vector<double> t = get_vector(section, "operator", "t");
    return rethrow_as_input("operator", [&] { return make_operator_from_coefficients(t); });
  }
  if (section.contains("t")) {
    throw InputError("config: 'operator.t' is only valid with decay \"custom\"");
  }
  const double a = get_number(section, "operator", "a");
  const Index J = section.contains("J") ? get_index(section, "operator", "J") : kDefaultOperatorTruncation;
  return rethrow_as_input("operator", [&] { return make_operator(decay, a, J); });
}

NoiseConfig parse_noise(const Json& section)
{
  check_keys(section, "noise", {"sigma", "snr"});
  NoiseConfig out;
  if (section.contains("sigma")) {
    out.sigma = get_number(section, "noise", "sigma");
  }
  if (section.contains("snr")) {
    out.snr = get_number(section, "noise", "snr");
  }
  if (out.sigma.has_value() == out.snr.has_value()) {
    throw InputError("config: 'noise' needs exactly one of 'sigma' or 'snr'");
  }
  if ((out.sigma && !(*out.sigma > 0.0)) || (out.snr && !(*out.snr > 0.0))) {
    throw InputError("config: noise level must be positive");
  }
  return out;
}

SelectionConfig parse_selection(const Json& section)
{
  check_keys(section, "selection", {"omega", "penalty_const"});
  SelectionConfig out;
  if (section.contains("omega")) {
    if (!section["omega"].is_string()) {
      throw InputError("config: 'selection.omega' must be a weight spec string such as \"derivative:1\"");
    }
    out.omega = WeightSequence::parse(section["omega"].get<std::string>());
  }
  if (section.contains("penalty_const")) {
    out.penalty_const = get_number(section, "selection", "penalty_const");
    if (!(out.penalty_const > 0.0)) {
      throw InputError("config: 'selection.penalty_const' must be positive");
    }
  }
  return out;
}

StudyConfig parse_study(const Json& section)
{
  check_keys(section, "study", {"n_grid", "replications", "seed"});
  StudyConfig out;
  if (section.contains("n_grid")) {
    const auto& grid = section["n_grid"];
    if (!grid.is_array()) {
      throw InputError("config: 'study.n_grid' must be an array of positive integers");
    }
    for (const auto& v : grid) {
      if (!v.is_number_integer() || v.get<Index>() < 1) {
        throw InputError("config: 'study.n_grid' must contain positive integers");
      }
      out.n_grid.push_back(v.get<Index>());
    }
  }
  if (section.contains("replications")) {
    out.replications = get_index(section, "study", "replications");
  }
  if (section.contains("seed")) {
    const auto& s = section["seed"];
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      throw InputError("config: 'study.seed' must be a non-negative integer");
    }
    out.seed = s.get<std::uint64_t>();
  }
  return out;
}

} // namespace

double NoiseConfig::resolve_sigma(const StructuralSpec& phi) const
{
  if (sigma) {
    return *sigma;
  }
  double centered = 0.0;
  for (Index j = 2; j <= phi.J_phi; ++j) {
    centered += phi.b(j - 1) * phi.b(j - 1);
  }
  if (!(centered > 0.0)) {
    throw InputError("config: 'noise.snr' needs a non-constant structural function");
  }
  const double sd_u = std::sqrt(centered) / *snr;
  return sd_u * std::pow(3.0, 0.25);
}

StructuralSpec parse_structural(const Json& section)
{
  check_keys(section, "structural", {"p", "rho", "J_phi", "profile", "b"});
  const double p = get_number(section, "structural", "p");
  const double rho = get_number(section, "structural", "rho");
  std::string profile = "power_law";
  if (section.contains("profile")) {
    if (!section["profile"].is_string()) {
      throw InputError("config: 'structural.profile' must be \"power_law\" or \"custom\"");
    }
    profile = section["profile"].get<std::string>();
  }
  if (profile == "power_law") {
    if (section.contains("b")) {
      throw InputError("config: 'structural.b' is only valid with profile \"custom\"");
    }
    const Index J_phi =
        section.contains("J_phi") ? get_index(section, "structural", "J_phi") : kDefaultStructuralTruncation;
    return rethrow_as_input("structural", [&] { return make_structural(p, rho, J_phi); });
  }
  if (profile == "custom") {
    const Vector<double> b = get_vector(section, "structural", "b");
    if (section.contains("J_phi") && get_index(section, "structural", "J_phi") != b.size()) {
      throw InputError("config: 'structural.J_phi' must equal the length of 'structural.b'");
    }
    return rethrow_as_input("structural", [&] { return make_structural_custom(p, rho, b); });
  }
  throw InputError("config: unknown structural profile '" + profile + "'");
}

Config parse_config(const Json& doc)
{
  check_keys(doc, "<root>", {"structural", "operator", "noise", "selection", "study"});
  for (const char* required : {"structural", "operator", "noise"}) {
    if (!doc.contains(required)) {
      throw InputError(std::string("config: missing section '") + required + "'");
    }
  }
  Config cfg;
  cfg.source = doc;
  cfg.structural = parse_structural(doc["structural"]);
  cfg.op = parse_operator(doc["operator"]);
  cfg.noise = parse_noise(doc["noise"]);
  cfg.sigma = cfg.noise.resolve_sigma(cfg.structural);
  if (doc.contains("selection")) {
    cfg.selection = parse_selection(doc["selection"]);
  }
  if (doc.contains("study")) {
    cfg.study = parse_study(doc["study"]);
  }
  return cfg;
}

Config load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file '" + path + "'");
  }
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("config '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

Json to_json(const Vector<double>& v)
{
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i));
  }
  return out;
}

namespace {

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

} // namespace

Json to_json(const OperatorSpec& op)
{
  return Json{{"decay", to_string(op.decay)},
              {"a", op.a},
              {"J", op.J},
              {"c", op.c},
              {"t", to_json(op.t)},
              {"density_floor", op.density_floor},
              {"d", finite_or_null(op.link_d)},
              {"D", finite_or_null(op.link_D)}};
}

Json to_json(const StructuralSpec& phi)
{
  return Json{{"b", to_json(phi.b)}, {"p", phi.p}, {"rho", phi.rho}, {"J_phi", phi.J_phi}};
}

std::optional<double> derivative_order(const WeightSequence& omega)
{
  switch (omega.kind()) {
  case WeightSequence::Kind::constant:
    return 0.0;
  case WeightSequence::Kind::derivative:
  case WeightSequence::Kind::sobolev:
    return omega.parameter();
  default:
    return std::nullopt;
  }
}

} // namespace npiv
