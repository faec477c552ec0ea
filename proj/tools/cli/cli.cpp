#include "cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/observations.hpp"
#include "gsr_arl/arl_exact.hpp"
#include "gsr_arl/errors.hpp"
#include "gsr_arl/exp_model.hpp"
#include "gsr_arl/fredholm_solver.hpp"
#include "gsr_arl/gsr_core.hpp"
#include "gsr_arl/mc_sim.hpp"

namespace gsr::cli {

namespace {

using Json = nlohmann::ordered_json;

Json report_header() { return Json{{"schema", kSchema}}; }

void write_json(std::ostream& out, const Json& doc) { out << doc.dump() << '\n'; }

void write_error(std::ostream& err, std::string_view kind, const std::string& message,
                 const Json& extra = Json::object()) {
  Json error{{"kind", kind}, {"message", message}};
  for (const auto& [key, value] : extra.items()) error[key] = value;
  Json doc = report_header();
  doc["error"] = std::move(error);
  write_json(err, doc);
}

double require_threshold(const CommandRequest& request) {
  if (!request.threshold) throw DomainError("--threshold is required for this subcommand");
  return *request.threshold;
}

Json arl_report(const ArlResult& result, const CommandRequest& request) {
  Json doc = report_header();
  doc["route"] = to_string(result.route);
  doc["value"] = result.value;
  doc["diagnostic"] = result.diagnostic;
  doc["theta"] = request.theta;
  if (request.threshold) doc["threshold"] = *request.threshold;
  doc["headstart"] = request.headstart;
  return doc;
}

void write_solution(std::ostream& out, const CommandRequest& request, const ArlSolution& solution) {
  if (request.format == OutputFormat::csv) {
    out << "x,arl\n";
    out.precision(17);
    for (std::size_t i = 0; i < solution.nodes().size(); ++i) {
      out << solution.nodes()[i] << ',' << solution.values()[i] << '\n';
    }
    return;
  }
  Json doc = arl_report(to_arl_result(solution, request.headstart), request);
  doc["residual_sup"] = solution.residual_sup();
  if (solution.route() == ArlRoute::nystrom) {
    doc["condition_estimate"] = solution.condition_estimate();
  } else {
    doc["richardson_change"] = solution.richardson_change();
    doc["resolution_flagged"] = solution.resolution_flagged();
  }
  doc["nodes"] = std::vector<double>(solution.nodes().begin(), solution.nodes().end());
  doc["values"] = std::vector<double>(solution.values().begin(), solution.values().end());
  write_json(out, doc);
}

std::string_view outcome_name(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::alarm: return "alarm";
    case RunOutcome::data_exhausted: return "data_exhausted";
    case RunOutcome::cap_reached: return "cap_reached";
  }
  return "unknown";
}

std::string_view target_name(SimulateTarget target) {
  switch (target) {
    case SimulateTarget::arl: return "arl";
    case SimulateTarget::martingale: return "martingale";
    case SimulateTarget::xi: return "xi";
  }
  return "unknown";
}

int run_simulate(const CommandRequest& request, const ExpShiftModel& model, std::ostream& out) {
  McEstimate est;
  Json doc = report_header();
  doc["route"] = to_string(ArlRoute::monte_carlo);
  doc["target"] = target_name(request.target);
  std::optional<std::size_t> cap = request.mc.step_cap;
  switch (request.target) {
    case SimulateTarget::arl: {
      const GsrConfig config(require_threshold(request), request.headstart);
      if (!cap) cap = default_arl_step_cap(model, config);
      est = estimate_arl(model, config, request.mc);
      break;
    }
    case SimulateTarget::martingale:
      est = verify_martingale(model, request.headstart, request.steps, request.mc);
      doc["steps"] = request.steps;
      break;
    case SimulateTarget::xi:
      est = estimate_xi(model, request.level, request.mc);
      doc["level"] = request.level;
      break;
  }
  doc["value"] = est.mean;
  doc["diagnostic"] = est.half_width;
  doc["standard_error"] = est.standard_error;
  doc["replications"] = est.replications_used;
  doc["truncated"] = est.truncated_count;
  doc["seed"] = request.mc.seed;
  doc["confidence_level"] = request.mc.confidence_level;
  if (cap) doc["step_cap"] = *cap;
  doc["theta"] = request.theta;
  if (request.threshold) doc["threshold"] = *request.threshold;
  doc["headstart"] = request.headstart;
  write_json(out, doc);
  return kExitOk;
}

int run_detect(const CommandRequest& request, const ExpShiftModel& model, std::ostream& out) {
  const GsrConfig config(require_threshold(request), request.headstart);
  const std::vector<double> observations = read_observations_file(request.input);
  const std::size_t cap = request.cap.value_or(observations.size());
  const Trajectory path = run_detection(model, config, observations, cap);
  if (request.format == OutputFormat::csv) {
    out << "n,statistic\n";
    out.precision(17);
    for (std::size_t n = 0; n < path.statistic_values.size(); ++n) {
      out << n << ',' << path.statistic_values[n] << '\n';
    }
    return kExitOk;
  }
  Json doc = report_header();
  doc["route"] = "detect";
  doc["theta"] = request.theta;
  doc["threshold"] = config.threshold();
  doc["headstart"] = config.headstart();
  doc["outcome"] = outcome_name(path.outcome);
  doc["stopping_time"] = path.stopping_time ? Json(*path.stopping_time) : Json(nullptr);
  doc["steps_taken"] = path.steps_taken;
  doc["trajectory"] = path.statistic_values;
  write_json(out, doc);
  return kExitOk;
}

int dispatch_or_throw(const CommandRequest& request, std::ostream& out) {
  if (request.subcommand == Subcommand::bound) {
    write_json(out, arl_report(arl_martingale_bound(request.headstart, require_threshold(request)),
                               request));
    return kExitOk;
  }

  const ExpShiftModel model(request.theta);
  switch (request.subcommand) {
    case Subcommand::exact:
      write_json(out, arl_report(arl_exact(model, request.headstart, require_threshold(request)),
                                 request));
      return kExitOk;
    case Subcommand::approx:
      write_json(out, arl_report(arl_approx(model, request.headstart, require_threshold(request)),
                                 request));
      return kExitOk;
    case Subcommand::solve: {
      const double threshold = require_threshold(request);
      const QuadratureGrid grid =
          default_grid(model, threshold, request.nodes, request.points_per_panel);
      write_solution(out, request, solve_arl_nystrom(model, threshold, grid));
      return kExitOk;
    }
    case Subcommand::backward:
      write_solution(out, request,
                     solve_arl_backward(model, require_threshold(request), request.resolution));
      return kExitOk;
    case Subcommand::simulate:
      return run_simulate(request, model, out);
    case Subcommand::calibrate: {
      const double threshold = calibrate_threshold(model, request.gamma, request.headstart);
      Json doc = report_header();
      doc["route"] = to_string(ArlRoute::exact);
      doc["threshold"] = threshold;
      doc["gamma"] = request.gamma;
      doc["arl"] = arl_exact(model, request.headstart, threshold).value;
      doc["theta"] = request.theta;
      doc["headstart"] = request.headstart;
      write_json(out, doc);
      return kExitOk;
    }
    case Subcommand::detect:
      return run_detect(request, model, out);
    case Subcommand::regime: {
      const GsrConfig config(require_threshold(request), request.headstart);
      const RegimeInfo info = regime(model, config);
      Json doc = report_header();
      doc["theta"] = request.theta;
      doc["threshold"] = config.threshold();
      doc["headstart"] = config.headstart();
      doc["high_threshold"] = info.high_threshold;
      doc["deterministic_cap"] =
          info.deterministic_cap ? Json(*info.deterministic_cap) : Json(nullptr);
      write_json(out, doc);
      return kExitOk;
    }
    case Subcommand::bound:
      break;
  }
  return kExitOk;
}

}  // namespace

std::variant<CommandRequest, int> parse_command(const std::vector<std::string>& args,
                                                std::ostream& out, std::ostream& err) {
  CommandRequest request;
  CLI::App app{"ARL to false alarm of the generalized Shiryaev-Roberts procedure, "
               "E(1)-to-E(1+theta) model",
               "gsr-arl"};
  app.require_subcommand(1);

  const std::map<std::string, OutputFormat> formats{{"json", OutputFormat::json},
                                                    {"csv", OutputFormat::csv}};
  const std::map<std::string, SimulateTarget> targets{{"arl", SimulateTarget::arl},
                                                      {"martingale", SimulateTarget::martingale},
                                                      {"xi", SimulateTarget::xi}};

  auto add_sub = [&](const char* name, const char* description, Subcommand which) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->callback([&request, which] { request.subcommand = which; });
    sub->add_option("--format", request.format, "Output format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    return sub;
  };
  auto add_theta = [&](CLI::App* sub) {
    sub->add_option("--theta", request.theta, "Post-change mean shift (post-change mean 1+theta)")
        ->required();
  };
  auto add_threshold = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--threshold,-A", request.threshold, "Detection threshold A");
    if (required) opt->required();
  };
  auto add_headstart = [&](CLI::App* sub) {
    sub->add_option("--headstart,-r", request.headstart, "Headstart r = R_0 (default 0)");
  };

  for (auto [name, description, which] :
       {std::tuple{"exact", "Closed-form ARL (A >= 1/theta)", Subcommand::exact},
        std::tuple{"approx", "Overshoot approximation A/xi - r", Subcommand::approx},
        std::tuple{"regime", "Threshold regime and deterministic step cap", Subcommand::regime}}) {
    CLI::App* sub = add_sub(name, description, which);
    add_theta(sub);
    add_threshold(sub, true);
    add_headstart(sub);
  }

  CLI::App* bound = add_sub("bound", "Martingale lower bound max(1, A - r)", Subcommand::bound);
  bound->add_option("--theta", request.theta, "Accepted for uniformity; unused");
  add_threshold(bound, true);
  add_headstart(bound);

  CLI::App* solve = add_sub("solve", "Nystrom solution of the renewal equation", Subcommand::solve);
  add_theta(solve);
  add_threshold(solve, true);
  add_headstart(solve);
  solve->add_option("--nodes", request.nodes, "Total quadrature nodes (default 512)");
  solve->add_option("--points-per-panel", request.points_per_panel,
                    "Gauss-Legendre points per panel (default 8)");

  CLI::App* backward =
      add_sub("backward", "Backward sweep for A < 1/theta", Subcommand::backward);
  add_theta(backward);
  add_threshold(backward, true);
  add_headstart(backward);
  backward->add_option("--resolution", request.resolution,
                       "Sweep cells per unit of 1/theta (default 4096)");

  CLI::App* simulate = add_sub("simulate", "Monte Carlo estimation", Subcommand::simulate);
  add_theta(simulate);
  add_threshold(simulate, false);
  add_headstart(simulate);
  simulate->add_option("--target", request.target, "arl (default), martingale or xi")
      ->transform(CLI::CheckedTransformer(targets, CLI::ignore_case));
  simulate->add_option("--replications,-n", request.mc.replications, "Replications (>= 100)");
  simulate->add_option("--seed", request.mc.seed, "Random seed");
  simulate->add_option("--step-cap", request.mc.step_cap, "Per-replication step cap");
  simulate->add_option("--confidence", request.mc.confidence_level,
                       "Confidence level of the half-width (default 0.99)");
  simulate->add_option("--threads", request.mc.threads, "Worker threads (0 = all cores)")
      ->envname("GSR_ARL_THREADS");
  simulate->add_option("--steps", request.steps, "Horizon n for --target martingale");
  simulate->add_option("--level", request.level, "Level a for --target xi");

  CLI::App* calibrate =
      add_sub("calibrate", "Threshold A giving a target ARL gamma", Subcommand::calibrate);
  add_theta(calibrate);
  add_headstart(calibrate);
  calibrate->add_option("--gamma", request.gamma, "Target ARL to false alarm")->required();

  CLI::App* detect = add_sub("detect", "Run the detector over an observation file",
                             Subcommand::detect);
  add_theta(detect);
  add_threshold(detect, true);
  add_headstart(detect);
  detect->add_option("--input,-i", request.input, "Observation file, one value per line")
      ->required();
  detect->add_option("--cap", request.cap, "Maximum steps (default: all observations)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    write_error(err, "UsageError", e.what());
    err << app.help();
    return kExitUsage;
  }
  return request;
}

int dispatch(const CommandRequest& request, std::ostream& out, std::ostream& err) {
  try {
    return dispatch_or_throw(request, out);
  } catch (const CalibrationOutOfRange& e) {
    write_error(err, "CalibrationOutOfRange", e.what(),
                Json{{"hint", e.hint()},
                     {"gamma_min", e.gamma_min()},
                     {"gamma_attainable", e.gamma_attainable()}});
    return kExitRegime;
  } catch (const RegimeUnsupported& e) {
    write_error(err, "RegimeUnsupported", e.what(), Json{{"hint", e.hint()}});
    return kExitRegime;
  } catch (const RegimeMismatch& e) {
    write_error(err, "RegimeMismatch", e.what(), Json{{"hint", e.hint()}});
    return kExitRegime;
  } catch (const UnreliableEstimate& e) {
    write_error(err, "UnreliableEstimate", e.what(),
                Json{{"partial_mean", e.partial().mean},
                     {"truncated", e.partial().truncated_count},
                     {"replications", e.partial().replications_used}});
    return kExitDomain;
  } catch (const SolverConditioning& e) {
    write_error(err, "SolverConditioning", e.what(),
                Json{{"condition_estimate", e.condition_estimate()}});
    return kExitDomain;
  } catch (const DomainError& e) {
    write_error(err, "DomainError", e.what());
    return kExitDomain;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto parsed = parse_command(args, out, err);
  if (const int* status = std::get_if<int>(&parsed)) return *status;
  return dispatch(std::get<CommandRequest>(parsed), out, err);
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace gsr::cli
