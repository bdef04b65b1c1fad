#include "rabic/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "rabic/config.hpp"
#include "rabic/io.hpp"
#include "rabic/verify.hpp"

namespace rabic::cli {
namespace {

namespace fs = std::filesystem;

sim::ScenarioConfig load_with_overrides(const std::string& path, const CliInvocation& inv) {
  sim::ScenarioConfig cfg = config::load_scenario(path);
  if (inv.seed) cfg.seed = *inv.seed;
  if (inv.dt) cfg.dt = *inv.dt;
  if (inv.controller) cfg.controller.kind = *inv.controller;
  cfg.validate();
  return cfg;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_run_outputs(const fs::path& dir, const std::string& stem, const sim::SimLog& log) {
  io::write_atomic(dir / (stem + ".csv"), io::log_csv(log));
}

void write_metrics(const fs::path& dir, const sim::Metrics& m) {
  const io::Report report = io::metrics_report(m);
  io::write_atomic(dir / "metrics.txt", io::report_text(report));
  io::write_atomic(dir / "metrics.json", io::report_json(report));
}

// Runs one scenario, keeping the partial log on abort.
struct RunOutcome {
  sim::SimLog log;
  std::optional<std::string> abort_reason;
};

RunOutcome run_guarded(const sim::ScenarioConfig& cfg) {
  try {
    return {sim::run_scenario(cfg), std::nullopt};
  } catch (const sim::RunAborted& e) {
    return {e.partial_log(), std::string(e.what())};
  }
}

// Maps exceptions to exit codes around a command body.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumericAbort;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("empty entry in --values");
    item = item.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ConfigError("--values entry is not a number: " + item);
    values.push_back(v);
  }
  if (values.empty()) throw ConfigError("--values must list at least one number");
  return values;
}

}  // namespace

int cmd_run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (inv.configs.size() != 1) throw ConfigError("run takes exactly one --config");
    const sim::ScenarioConfig cfg = load_with_overrides(inv.configs.front(), inv);
    ensure_dir(inv.out_dir);
    const RunOutcome outcome = run_guarded(cfg);
    write_run_outputs(inv.out_dir, "log", outcome.log);
    if (outcome.abort_reason) {
      err << "run aborted: " << *outcome.abort_reason << "\n"
          << "partial log (" << outcome.log.rows.size() << " rows) kept in "
          << (inv.out_dir / "log.csv").string() << "\n";
      return kExitNumericAbort;
    }
    write_metrics(inv.out_dir, sim::compute_metrics(outcome.log));
    out << fmt::format("{}: {} rows, {} controller -> {}\n", cfg.name, outcome.log.rows.size(),
                       sim::to_string(cfg.controller.kind), inv.out_dir.string());
    return kExitOk;
  });
}

int cmd_compare(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    sim::ScenarioConfig a, b;
    std::string label_a, label_b;
    if (inv.configs.size() == 1) {
      CliInvocation pd = inv, rabic = inv;
      pd.controller = sim::ControllerKind::kPd;
      rabic.controller = sim::ControllerKind::kRabic;
      a = load_with_overrides(inv.configs.front(), pd);
      b = load_with_overrides(inv.configs.front(), rabic);
      label_a = "pd";
      label_b = "rabic";
    } else if (inv.configs.size() == 2) {
      a = load_with_overrides(inv.configs[0], inv);
      b = load_with_overrides(inv.configs[1], inv);
      label_a = sim::to_string(a.controller.kind);
      label_b = sim::to_string(b.controller.kind);
      if (label_a == label_b) {
        label_a = "a";
        label_b = "b";
      }
    } else {
      throw ConfigError("compare takes one --config (both controllers) or two");
    }
    if (config::geometry_hash(a) != config::geometry_hash(b)) {
      throw ContractError("compare: the two scenarios have different geometry");
    }
    ensure_dir(inv.out_dir);
    const RunOutcome ra = run_guarded(a);
    write_run_outputs(inv.out_dir, "log_" + label_a, ra.log);
    const RunOutcome rb = run_guarded(b);
    write_run_outputs(inv.out_dir, "log_" + label_b, rb.log);
    for (const auto* o : {&ra, &rb}) {
      if (o->abort_reason) {
        err << "run aborted: " << *o->abort_reason << "\n";
        return kExitNumericAbort;
      }
    }
    const sim::Comparison cmp = sim::compare_runs(ra.log, rb.log, label_a, label_b);
    const io::Report report = io::comparison_report(cmp);
    io::write_atomic(inv.out_dir / "comparison.txt", io::report_text(report));
    io::write_atomic(inv.out_dir / "comparison.json", io::report_json(report));
    io::write_atomic(inv.out_dir / "force_profile.csv", io::force_profile_csv(cmp));
    out << fmt::format("terminal_force_ratio = {}\n",
                       cmp.terminal_force_ratio ? io::format_number(*cmp.terminal_force_ratio)
                                                : std::string("n/a"));
    return kExitOk;
  });
}

int cmd_sweep(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (inv.configs.size() != 1) throw ConfigError("sweep takes exactly one --config");
    if (inv.param.empty()) throw ConfigError("sweep requires --param");
    if (inv.values.empty()) throw ConfigError("sweep requires --values");
    const sim::ScenarioConfig base = load_with_overrides(inv.configs.front(), inv);
    std::vector<sim::ScenarioConfig> configs;
    for (double v : inv.values) configs.push_back(config::with_parameter(base, inv.param, v));
    ensure_dir(inv.out_dir);

    struct Result {
      std::optional<sim::Metrics> metrics;
      std::string status = "ok";
    };
    std::vector<Result> results(configs.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    auto worker = [&] {
      for (std::size_t i = next++; i < configs.size(); i = next++) {
        const fs::path dir = inv.out_dir / fmt::format("run_{:03d}", i);
        try {
          ensure_dir(dir);
          const RunOutcome o = run_guarded(configs[i]);
          write_run_outputs(dir, "log", o.log);
          if (o.abort_reason) {
            results[i].status = "aborted";
            std::lock_guard lock(err_mutex);
            err << fmt::format("run {} ({}={}) aborted: {}\n", i, inv.param, inv.values[i],
                               *o.abort_reason);
            continue;
          }
          results[i].metrics = sim::compute_metrics(o.log);
          write_metrics(dir, *results[i].metrics);
        } catch (const std::exception& e) {
          results[i].status = "error";
          std::lock_guard lock(err_mutex);
          err << fmt::format("run {} failed: {}\n", i, e.what());
        }
      }
    };
    const std::size_t workers =
        std::min<std::size_t>(configs.size(), std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::string table =
        "index,value,status,peak_contact_force,terminal_mean_contact_force,inner_rmse,outer_rmse,"
        "rms_torque_rate,max_abs_torque\n";
    bool all_ok = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
      table += fmt::format("{},{},{}", i, inv.values[i], results[i].status);
      if (const auto& m = results[i].metrics) {
        table += fmt::format(",{},{},{},{},{},{}\n", m->peak_contact_force,
                             m->terminal_mean_contact_force, m->inner_rmse, m->outer_rmse,
                             m->rms_torque_rate, m->max_abs_torque);
      } else {
        table += ",,,,,,\n";
        all_ok = false;
      }
    }
    io::write_atomic(inv.out_dir / "sweep.csv", table);
    out << fmt::format("{} runs over {} -> {}\n", results.size(), inv.param,
                       (inv.out_dir / "sweep.csv").string());
    return all_ok ? kExitOk : kExitNumericAbort;
  });
}

int cmd_check(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    verify::SuiteOptions options;
    if (inv.seed) options.seed = *inv.seed;
    options.inject_lemma1_sign_flip = inv.inject_lemma1_sign_flip;
    const auto start = std::chrono::steady_clock::now();
    const auto results = verify::run_invariant_suite(options);
    bool all = true;
    for (const auto& r : results) {
      out << fmt::format("[{}] {}: {}\n", r.passed ? "PASS" : "FAIL", r.name, r.detail);
      all = all && r.passed;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << fmt::format("{} checks, {} in {:.2f} s\n", results.size(),
                       all ? "all passed" : "FAILURES", secs);
    return all ? kExitOk : kExitNumericAbort;
  });
}

int cmd_presets(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!inv.configs.empty()) {
      for (const auto& name : inv.configs) {
        bool found = false;
        for (const auto& p : config::presets()) {
          if (p.name == name) {
            out << p.yaml;
            found = true;
          }
        }
        if (!found) throw ConfigError("no preset named " + name);
      }
      return kExitOk;
    }
    for (const auto& p : config::presets()) {
      std::string summary;
      std::istringstream lines{std::string(p.yaml)};
      std::string first;
      std::getline(lines, first);
      if (first.rfind("# ", 0) == 0) summary = first.substr(2);
      out << fmt::format("{:<16} {}\n", p.name, summary);
    }
    return kExitOk;
  });
}

int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.command == "run") return cmd_run(inv, out, err);
  if (inv.command == "compare") return cmd_compare(inv, out, err);
  if (inv.command == "sweep") return cmd_sweep(inv, out, err);
  if (inv.command == "check") return cmd_check(inv, out, err);
  if (inv.command == "presets") return cmd_presets(inv, out, err);
  err << "unknown command: " << inv.command << "\n";
  return kExitConfigError;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Robust adaptive backstepping impedance control laboratory"};
  app.require_subcommand(1);

  CliInvocation inv;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) inv.out_dir = env;
  std::string out_dir;
  std::string controller;
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::string values;

  auto add_common = [&](CLI::App* sub, bool multi_config) {
    if (multi_config) {
      sub->add_option("--config", inv.configs, "Scenario file or preset name (repeatable)");
    } else {
      sub->add_option("--config", inv.configs, "Scenario file or preset name")->expected(1);
    }
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--controller", controller, "Controller override")
        ->check(CLI::IsMember({"pd", "rabic"}));
    sub->add_option("--seed", seed, "Random seed override");
    sub->add_option("--dt", dt, "Time step override in seconds")->check(CLI::PositiveNumber);
  };

  CLI::App* run = app.add_subcommand("run", "Run one scenario");
  add_common(run, false);
  CLI::App* compare = app.add_subcommand("compare", "Run PD and RABIC on the same geometry");
  add_common(compare, true);
  CLI::App* sweep = app.add_subcommand("sweep", "Run a scenario over a list of parameter values");
  add_common(sweep, false);
  sweep->add_option("--param", inv.param, "Dotted parameter path, e.g. sim.dt")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  CLI::App* check = app.add_subcommand("check", "Run the built-in invariant suite");
  check->add_option("--seed", seed, "Random seed for the sampled checks");
  CLI::App* presets = app.add_subcommand("presets", "List presets, or print the named ones");
  presets->add_option("--config", inv.configs, "Preset name to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  for (CLI::App* sub : {run, compare, sweep, check, presets}) {
    if (sub->parsed()) {
      inv.command = sub->get_name();
      auto given = [sub](const char* name) {
        const CLI::Option* opt = sub->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
      };
      if (given("--seed")) inv.seed = seed;
      if (given("--dt")) inv.dt = dt;
      if (given("--controller")) inv.controller = sim::controller_kind_from_string(controller);
      if (given("--out")) inv.out_dir = out_dir;
    }
  }
  if (inv.command == "sweep") {
    try {
      inv.values = parse_values(values);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfigError;
    }
  }
  return dispatch(inv, std::cout, std::cerr);
}

}  // namespace rabic::cli
