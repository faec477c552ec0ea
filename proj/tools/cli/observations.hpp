#pragma once

#include <istream>
#include <string>
#include <vector>

namespace gsr::cli {

/// One real per line. A non-numeric first line is taken as a header and
/// skipped; trailing blank lines are ignored. Throws DomainError naming the
/// line of anything else that does not parse.
std::vector<double> read_observations(std::istream& in);

std::vector<double> read_observations_file(const std::string& path);

}  // namespace gsr::cli
