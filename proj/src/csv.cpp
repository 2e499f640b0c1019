#include "npiv/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "npiv/error.hpp"

namespace npiv {

std::string format_double(double x)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) {
    throw InvariantError("format_double: to_chars failed");
  }
  return std::string(buf, ptr);
}

namespace {

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_field(std::string_view field, const std::string& source, std::size_t row, const char* name)
{
  field = trim(field);
  if (!field.empty() && field.front() == '+') {
    field.remove_prefix(1);
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw InputError(source + ": row " + std::to_string(row) + ": cannot parse " + name + " value '" +
                     std::string(field) + "'");
  }
  return value;
}

} // namespace

Sample parse_sample_csv(std::istream& in, const std::string& source)
{
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError(source + ": empty file, expected header 'y,z,w'");
  }
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
  if (trim(line) != "y,z,w") {
    throw InputError(source + ": header must be 'y,z,w', got '" + std::string(trim(line)) + "'");
  }

  std::vector<double> ys;
  std::vector<double> zs;
  std::vector<double> ws;
  std::size_t row = 0;
  std::size_t first_blank = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view view = trim(line);
    if (view.empty()) {
      if (first_blank == 0) {
        first_blank = row;
      }
      continue;
    }
    if (first_blank != 0) {
      throw InputError(source + ": row " + std::to_string(first_blank) + ": blank line inside data");
    }
    const auto c1 = view.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
        view.find(',', c2 + 1) != std::string_view::npos) {
      throw InputError(source + ": row " + std::to_string(row) + ": expected exactly 3 comma-separated fields");
    }
    const double y = parse_field(view.substr(0, c1), source, row, "y");
    const double z = parse_field(view.substr(c1 + 1, c2 - c1 - 1), source, row, "z");
    const double w = parse_field(view.substr(c2 + 1), source, row, "w");
    if (!(z >= 0.0 && z <= 1.0)) {
      throw InputError(source + ": row " + std::to_string(row) + ": z = " + format_double(z) + " outside [0,1]");
    }
    if (!(w >= 0.0 && w <= 1.0)) {
      throw InputError(source + ": row " + std::to_string(row) + ": w = " + format_double(w) + " outside [0,1]");
    }
    ys.push_back(y);
    zs.push_back(z);
    ws.push_back(w);
  }
  if (ys.empty()) {
    throw InputError(source + ": no data rows");
  }
  const auto to_vec = [](const std::vector<double>& v) {
    return Vector<double>(Eigen::Map<const Vector<double>>(v.data(), static_cast<Index>(v.size())));
  };
  return Sample(to_vec(ys), to_vec(zs), to_vec(ws));
}

Sample read_sample_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open sample file '" + path + "'");
  }
  return parse_sample_csv(in, path);
}

void write_sample_csv(std::ostream& out, const Sample& sample)
{
  out << "y,z,w\n";
  for (Index i = 0; i < sample.size(); ++i) {
    out << format_double(sample.y()(i)) << ',' << format_double(sample.z()(i)) << ','
        << format_double(sample.w()(i)) << '\n';
  }
}

void write_sample_csv(const std::string& path, const Sample& sample)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  write_sample_csv(out, sample);
  out.flush();
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

} // namespace npiv
