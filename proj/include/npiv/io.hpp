#pragma once

#include <iosfwd>
#include <string>

#include "npiv/sample.hpp"

namespace npiv {

//! Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

//! Reads the `y,z,w` CSV format: header line `y,z,w`, one observation per
//! line. Blank trailing lines are ignored. Errors name the 1-based data row.
Sample parse_sample_csv(std::istream& in, const std::string& source = "<input>");
Sample read_sample_csv(const std::string& path);

void write_sample_csv(std::ostream& out, const Sample& sample);
void write_sample_csv(const std::string& path, const Sample& sample);

} // namespace npiv
