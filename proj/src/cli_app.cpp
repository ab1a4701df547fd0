#include "vreg/cli_app.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vreg/report.hpp"

namespace vreg {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << std::endl;
    return;
  }
  std::ofstream out(out_path);
  if (!out) {
    throw std::runtime_error("cannot write output file: " + out_path);
  }
  out << text << '\n';
}

struct CommonArgs {
  std::string network_path;
  std::string out_path;
  uint64_t seed = 0;
  RunConfig run;
  std::string enhance = "off";
  std::string leaf_fix = "off";
  std::string hot = "on";
  double loss_prob = 0.0;
};

void add_run_flags(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--max-iters", args->run.max_iters, "iteration cap")
      ->capture_default_str();
  cmd->add_option("--delta", args->run.delta, "consensus threshold")
      ->capture_default_str();
  cmd->add_option("--alpha0", args->run.alpha0, "initial step size")
      ->capture_default_str();
  cmd->add_option("--enhance-direction", args->enhance,
                  "directional flow constraints (on|off)")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--leaf-fix", args->leaf_fix,
                  "freeze settled leaves (on|off)")
      ->check(CLI::IsMember({"on", "off"}));
}

void finish_run_config(CommonArgs* args) {
  args->run.direction_enhancement = args->enhance == "on";
  args->run.leaf_fixing = args->leaf_fix == "on";
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Voltage regulation on radial feeders: exactness checks, "
               "centralized and distributed solves, and experiments"};
  app.require_subcommand(1);

  CommonArgs args;
  int oracle_grid = 2001;
  std::vector<double> p_values;
  int runs = 20;
  std::string trace_path;
  std::string table_path;
  std::string series_path;
  int synthesize = 0;
  int t_start = -1;
  int t_end = -1;
  double pv_fraction = 0.20;
  double q_flex = 1.2;

  auto add_network = [&](CLI::App* cmd) {
    cmd->add_option("--network", args.network_path, "network document")
        ->required();
    cmd->add_option("--out", args.out_path, "report destination");
    cmd->add_option("--seed", args.seed, "random seed")->capture_default_str();
  };

  CLI::App* check = app.add_subcommand(
      "check", "exactness conditions: per-line angle bounds and per-bus "
               "reactive envelopes");
  add_network(check);

  CLI::App* solve =
      app.add_subcommand("solve", "centralized relaxation solve and "
                                  "rank-based classification");
  add_network(solve);

  CLI::App* dsolve = app.add_subcommand(
      "dsolve", "distributed dual-decomposition solve");
  add_network(dsolve);
  add_run_flags(dsolve, &args);
  dsolve->add_option("--loss-prob", args.loss_prob, "message drop probability")
      ->check(CLI::Range(0.0, 0.999999));
  dsolve->add_option("--trace", trace_path, "per-round trace file");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "exhaustive grid reference (desk-size networks)");
  add_network(oracle);
  oracle->add_option("--grid", oracle_grid, "grid points per line")
      ->capture_default_str();

  CLI::App* lossexp = app.add_subcommand(
      "lossexp", "convergence statistics under message loss");
  add_network(lossexp);
  add_run_flags(lossexp, &args);
  lossexp->add_option("--loss-prob", p_values,
                      "drop probabilities (repeatable)");
  lossexp->add_option("--runs", runs, "seeds per probability")
      ->capture_default_str();
  lossexp->add_option("--table", table_path, "delimited per-run table file");

  CLI::App* scenario = app.add_subcommand(
      "scenario", "minute-by-minute replay with multiplier chaining");
  add_network(scenario);
  add_run_flags(scenario, &args);
  scenario->add_option("--series", series_path,
                       "irradiance file (minute scale per line)");
  scenario->add_option("--synthesize", synthesize,
                       "generate a synthetic series of this many minutes");
  scenario->add_option("--t-start", t_start, "first minute");
  scenario->add_option("--t-end", t_end, "last minute");
  scenario->add_option("--pv-fraction", pv_fraction,
                       "generation fraction of nominal load")
      ->capture_default_str();
  scenario->add_option("--q-flex", q_flex, "reactive flexibility factor")
      ->capture_default_str();
  scenario->add_option("--hot-start", args.hot,
                       "chain multipliers between minutes (on|off)")
      ->check(CLI::IsMember({"on", "off"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const NetworkTree net = load_network_file(args.network_path);
    finish_run_config(&args);

    if (check->parsed()) {
      const ConditionReport report = check_exactness_conditions(net);
      emit(condition_report_json(net, report).dump(2), args.out_path);
      return kExitOk;
    }

    if (solve->parsed()) {
      const Classification c = solve_and_classify(net);
      emit(classification_json(net, c).dump(2), args.out_path);
      return c.kind == Classification::Kind::optimal ? kExitOk
                                                     : kExitInfeasible;
    }

    if (dsolve->parsed()) {
      LossyChannel channel(args.loss_prob, args.seed);
      const SolveReport report = run_distributed(net, args.run, channel);
      emit(solve_report_json(net, report).dump(2), args.out_path);
      if (!trace_path.empty()) {
        emit(solve_trace_table(report), trace_path);
      }
      if (report.status == SolveReport::Status::infeasible) {
        return kExitInfeasible;
      }
      if (report.status == SolveReport::Status::failed) {
        return kExitNumerical;
      }
      return kExitOk;
    }

    if (oracle->parsed()) {
      const OracleResult result = brute_force_oracle(net, oracle_grid);
      emit(oracle_json(net, result, oracle_grid).dump(2), args.out_path);
      return result.feasible ? kExitOk : kExitInfeasible;
    }

    if (lossexp->parsed()) {
      if (p_values.empty()) {
        p_values = {0.0, 0.1, 0.3};
      }
      std::vector<uint64_t> seeds;
      for (int r = 0; r < runs; ++r) {
        seeds.push_back(args.seed + static_cast<uint64_t>(r));
      }
      const LossExperiment exp =
          run_loss_experiment(net, args.run, p_values, seeds);
      emit(loss_experiment_json(exp).dump(2), args.out_path);
      if (!table_path.empty()) {
        emit(loss_experiment_table(exp), table_path);
      }
      return kExitOk;
    }

    if (scenario->parsed()) {
      Scenario sc;
      if (!series_path.empty()) {
        std::ifstream in(series_path);
        if (!in) {
          throw std::runtime_error("cannot open series file: " + series_path);
        }
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        const auto rows = parse_irradiance(text);
        const int lo = t_start >= 0 ? t_start : rows.front().first;
        const int hi = t_end >= 0 ? t_end : rows.back().first;
        sc = scenario_from_series(rows, lo, hi);
      } else if (synthesize > 0) {
        std::vector<std::pair<int, double>> rows;
        const auto series = synthesize_irradiance(synthesize, args.seed);
        for (int t = 0; t < synthesize; ++t) {
          rows.push_back({t, series[static_cast<size_t>(t)]});
        }
        const int lo = t_start >= 0 ? t_start : 0;
        const int hi = t_end >= 0 ? t_end : synthesize - 1;
        sc = scenario_from_series(rows, lo, hi);
      } else {
        std::cerr << "scenario: provide --series or --synthesize\n";
        return kExitUsage;
      }
      sc.pv_fraction = pv_fraction;
      sc.q_flex = q_flex;
      if (args.hot == "off") {
        // Cold-start every minute: replay without chaining by running each
        // minute through a fresh horizon of length 1.
        ScenarioResult all;
        for (int minute = sc.t_start; minute <= sc.t_end; ++minute) {
          Scenario one = sc;
          one.t_start = minute;
          one.t_end = minute;
          const ScenarioResult r = run_scenario(net, one, args.run);
          all.minutes.push_back(r.minutes.front());
          all.converged_minutes += r.converged_minutes;
          all.infeasible_minutes += r.infeasible_minutes;
        }
        emit(scenario_json(all).dump(2), args.out_path);
        return kExitOk;
      }
      const ScenarioResult result = run_scenario(net, sc, args.run);
      emit(scenario_json(result).dump(2), args.out_path);
      return kExitOk;
    }
  } catch (const NetworkError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace vreg
