#include "cli/observations.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <string_view>

#include "gsr_arl/errors.hpp"

namespace gsr::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

std::vector<double> read_observations(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

  std::vector<double> values;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view field = trim(lines[i]);
    const auto value = parse_real(field);
    if (value) {
      values.push_back(*value);
      continue;
    }
    if (i == 0 && !field.empty()) continue;  // header
    throw DomainError("observation file line " + std::to_string(i + 1) +
                      " is not a real number: '" + std::string(field) + "'");
  }
  if (values.empty()) throw DomainError("observation file holds no observations");
  return values;
}

std::vector<double> read_observations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open observation file '" + path + "'");
  return read_observations(in);
}

}  // namespace gsr::cli
