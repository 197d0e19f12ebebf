#include "muskat/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

using namespace muskat;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2 };

void print_checks(const VerificationReport& report) {
  for (const Check& c : report.checks())
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << format_number(c.value) << ' ' << c.relation << ' '
              << format_number(c.threshold) << '\n';
  for (const std::string& w : report.warnings()) std::cerr << "warning: " << w << '\n';
}

int finish(const VerificationReport& report, bool strict) {
  print_checks(report);
  const bool ok = report.passed(strict);
  std::cout << (ok ? "OK" : "FAILED") << " (" << report.checks().size() << " checks, " << report.warnings().size()
            << " warnings" << (strict ? ", strict" : "") << ")\n";
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subsolution verification runner for the relaxed Muskat problem"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  bool strict = false;
  app.add_option("--config", config_path, "Scenario file (alternative to the positional argument)");
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  app.add_option("--threads", threads, "Worker threads, 0 = hardware concurrency")->capture_default_str();
  app.add_flag("--strict", strict, "Treat warnings as failures");

  std::string positional;
  auto* run = app.add_subcommand("run", "Run every enabled check of a scenario and export tables");
  run->add_option("config", positional, "Scenario file");
  auto* oracle = app.add_subcommand("oracle", "Closed-form suite only; no scenario needed");
  auto* sweep = app.add_subcommand("sweep-c", "Bisect the admissible single-speed threshold at fixed small t");
  sweep->add_option("config", positional, "Scenario file");
  for (auto* sub : {run, oracle, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }
  set_thread_count(threads);

  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(); };

  try {
    if (oracle->parsed()) {
      const VerificationReport report = oracle_suite();
      if (!out_dir.empty()) export_report(report, {}, out_dir);
      std::cerr << "oracle suite finished in " << elapsed() << " s\n";
      return finish(report, strict);
    }

    if (!positional.empty() && !config_path.empty() && positional != config_path) {
      std::cerr << "error: both a positional config and --config were given\n";
      return kUsage;
    }
    const std::string path = positional.empty() ? config_path : positional;
    if (path.empty()) {
      std::cerr << "error: a scenario file is required\n" << app.help();
      return kUsage;
    }
    const Scenario scenario = load_scenario(path);
    const std::filesystem::path dir = out_dir.empty() ? scenario.output_dir : std::filesystem::path(out_dir);

    if (sweep->parsed()) {
      const VerificationReport report = sweep_report(scenario, sweep_c(scenario));
      export_report(report, {}, dir);
      std::cout << "c_threshold = " << report.find("sweep.c_threshold").value_or("?") << '\n';
      std::cerr << "sweep finished in " << elapsed() << " s, manifest in " << dir.string() << '\n';
      return finish(report, strict);
    }

    const ScenarioResult result = run_scenario(scenario);
    export_results(result, dir);
    std::cerr << "scenario '" << scenario.name << "' finished in " << elapsed() << " s, outputs in " << dir.string()
              << '\n';
    return finish(result.report, strict);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
}
