#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gsr_arl/mc_sim.hpp"

namespace gsr::cli {

inline constexpr std::string_view kSchema = "gsr-arl/1";

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitRegime = 3;
inline constexpr int kExitUsage = 64;

enum class Subcommand { exact, approx, bound, solve, backward, simulate, calibrate, detect, regime };
enum class OutputFormat { json, csv };
enum class SimulateTarget { arl, martingale, xi };

/// A parsed command line. Fields a subcommand does not use keep their defaults.
struct CommandRequest {
  Subcommand subcommand = Subcommand::exact;
  OutputFormat format = OutputFormat::json;

  double theta = 1.0;
  std::optional<double> threshold;
  double headstart = 0.0;
  double gamma = 0.0;

  // solve
  std::size_t nodes = 512;
  std::size_t points_per_panel = 8;
  // backward
  std::size_t resolution = 4096;

  // simulate
  SimulateTarget target = SimulateTarget::arl;
  McConfig mc;
  std::size_t steps = 10;  // martingale horizon n
  double level = 5.0;      // overshoot level a

  // detect
  std::string input;
  std::optional<std::size_t> cap;
};

/// Parses argv[1..]. Returns the request, or the exit status to use when
/// parsing ended the run (usage error, --help).
std::variant<CommandRequest, int> parse_command(const std::vector<std::string>& args,
                                                std::ostream& out, std::ostream& err);

/// Runs a request: the report goes to out, a structured error to err.
int dispatch(const CommandRequest& request, std::ostream& out, std::ostream& err);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace gsr::cli
