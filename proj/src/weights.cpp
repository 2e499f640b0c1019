#include "npiv/basis.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace npiv {

namespace {

double parse_number(const std::string& text, const std::string& context)
{
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw InputError("weight spec '" + context + "': cannot parse number '" + text + "'");
  }
  return value;
}

std::string format_parameter(double x)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

} // namespace

WeightSequence WeightSequence::sobolev(double r)
{
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw DomainError("sobolev weights need r >= 0");
  }
  return WeightSequence(Kind::sobolev, r);
}

WeightSequence WeightSequence::derivative(int s)
{
  if (s < 0) {
    throw DomainError("derivative weights need s >= 0");
  }
  return WeightSequence(Kind::derivative, static_cast<double>(s));
}

WeightSequence WeightSequence::polynomial_decay(double a)
{
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("polynomial decay needs a > 0");
  }
  return WeightSequence(Kind::polynomial_decay, a);
}

WeightSequence WeightSequence::exponential_decay(double a)
{
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("exponential decay needs a > 0");
  }
  return WeightSequence(Kind::exponential_decay, a);
}

WeightSequence WeightSequence::custom(std::vector<double> table)
{
  if (table.empty()) {
    throw DomainError("custom weights need at least one entry");
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!(table[i] > 0.0) || !std::isfinite(table[i])) {
      throw DomainError("custom weight at index " + std::to_string(i + 1) + " is not a positive finite number");
    }
  }
  WeightSequence w(Kind::custom, 0.0);
  w.table_ = std::make_shared<const std::vector<double>>(std::move(table));
  return w;
}

double WeightSequence::operator()(Index j) const
{
  if (j < 1) {
    throw DomainError("weight index must be >= 1, got " + std::to_string(j));
  }
  const double x = static_cast<double>(j);
  switch (kind_) {
  case Kind::constant:
    return 1.0;
  case Kind::sobolev:
  case Kind::derivative:
    return j == 1 ? 1.0 : std::pow(x, 2.0 * parameter_);
  case Kind::polynomial_decay:
    return j == 1 ? 1.0 : std::pow(x, -2.0 * parameter_);
  case Kind::exponential_decay:
    return j == 1 ? 1.0 : std::exp(-std::pow(x, 2.0 * parameter_));
  case Kind::custom:
    if (j > static_cast<Index>(table_->size())) {
      throw DomainError("custom weight table covers indices 1.." + std::to_string(table_->size()) +
                        ", index " + std::to_string(j) + " requested");
    }
    return (*table_)[static_cast<std::size_t>(j - 1)];
  }
  throw InvariantError("unknown weight kind");
}

Vector<double> WeightSequence::head(Index k) const
{
  Vector<double> out(k);
  for (Index j = 1; j <= k; ++j) {
    out(j - 1) = (*this)(j);
  }
  return out;
}

Index WeightSequence::extent() const
{
  if (kind_ == Kind::custom) {
    return static_cast<Index>(table_->size());
  }
  return Eigen::NumTraits<Index>::highest();
}

std::string WeightSequence::to_string() const
{
  switch (kind_) {
  case Kind::constant:
    return "constant";
  case Kind::sobolev:
    return "sobolev:" + format_parameter(parameter_);
  case Kind::derivative:
    return "derivative:" + format_parameter(parameter_);
  case Kind::polynomial_decay:
    return "polynomial:" + format_parameter(parameter_);
  case Kind::exponential_decay:
    return "exponential:" + format_parameter(parameter_);
  case Kind::custom: {
    std::string out = "custom:";
    for (std::size_t i = 0; i < table_->size(); ++i) {
      if (i) {
        out += ',';
      }
      out += format_parameter((*table_)[i]);
    }
    return out;
  }
  }
  throw InvariantError("unknown weight kind");
}

WeightSequence WeightSequence::parse(const std::string& text)
{
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : text.substr(colon + 1);
  const auto need_arg = [&]() {
    if (arg.empty()) {
      throw InputError("weight spec '" + text + "': missing parameter after ':'");
    }
    return parse_number(arg, text);
  };
  try {
    if (name == "constant") {
      if (colon != std::string::npos) {
        throw InputError("weight spec '" + text + "': constant takes no parameter");
      }
      return constant();
    }
    if (name == "sobolev") {
      return sobolev(need_arg());
    }
    if (name == "derivative") {
      const double s = need_arg();
      if (s != std::floor(s)) {
        throw InputError("weight spec '" + text + "': derivative order must be an integer");
      }
      return derivative(static_cast<int>(s));
    }
    if (name == "polynomial") {
      return polynomial_decay(need_arg());
    }
    if (name == "exponential") {
      return exponential_decay(need_arg());
    }
    if (name == "custom") {
      std::vector<double> table;
      std::stringstream ss(arg);
      std::string item;
      while (std::getline(ss, item, ',')) {
        table.push_back(parse_number(item, text));
      }
      return custom(std::move(table));
    }
  } catch (const DomainError& e) {
    throw InputError("weight spec '" + text + "': " + e.what());
  }
  throw InputError("unknown weight kind in '" + text +
                   "' (expected constant, sobolev, derivative, polynomial, exponential or custom)");
}

} // namespace npiv
