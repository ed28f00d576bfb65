// simnet: run, sweep and validate scenario files.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simnet/experiment/network.h"
#include "simnet/experiment/scenario.h"

namespace {

namespace ex = simnet::experiment;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kScenario = 2;
constexpr int kRuntime = 3;

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void Report(const ex::RunResult& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& e : r.errors) std::cerr << "error: " << e << '\n';
  for (const auto& v : r.violations) std::cerr << "leak: " << ToString(v) << '\n';
}

bool KnownKey(std::string key) {
  if (auto dot = key.find('.'); dot != std::string::npos) key = key.substr(dot + 1);
  const auto& keys = ex::SweepableKeys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event DNS / mDNS traffic simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string trace_path;
  std::string csv_path;
  std::string queries_path;
  bool audit = false;

  auto* run = app.add_subcommand("run", "Run one scenario and print per-node statistics");
  run->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--trace", trace_path, "Write the event trace here");
  run->add_option("--csv", csv_path, "Write CSV here instead of stdout");
  run->add_option("--queries", queries_path, "Query file for every DNS client");
  run->add_flag("--audit", audit, "Capture packets and audit private names");

  std::string vary;
  std::vector<std::string> values;
  std::string seed_mode = "derived";
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run one scenario per parameter value");
  sweep->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--vary", vary, "Scenario key to vary")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--csv", csv_path, "Write CSV here instead of stdout");
  sweep->add_option("--seed", seed, "Override the master seed");
  sweep->add_option("--seed-mode", seed_mode, "derived (seed ^ index) or common")
      ->check(CLI::IsMember({"derived", "common"}));
  sweep->add_option("--jobs", jobs, "Parallel sweep points")->check(CLI::PositiveNumber);
  sweep->add_flag("--audit", audit, "Capture packets and audit private names");

  auto* validate = app.add_subcommand("validate", "Parse and check a scenario file");
  validate->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (sweep->parsed() && !KnownKey(vary)) {
    std::cerr << "unknown sweep key '" << vary << "'\n";
    return kUsage;
  }

  ex::ScenarioConfig cfg;
  try {
    cfg = ex::LoadScenario(scenario);
    if (seed) cfg.seed = *seed;
    cfg.Validate();
  } catch (const ex::ScenarioError& e) {
    std::cerr << scenario << ": " << e.what() << '\n';
    return kScenario;
  }

  try {
    if (validate->parsed()) {
      // Building resolves zones and query files too.
      auto net = ex::BuildNetwork(cfg);
      for (const auto& w : net.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << scenario << ": ok (" << net.kernel->node_count() << " nodes)\n";
      return kOk;
    }

    ex::BuildOptions options;
    options.trace = !trace_path.empty();
    options.capture = audit;
    if (!queries_path.empty()) options.query_file_override = queries_path;

    std::string csv;
    if (run->parsed()) {
      ex::RunResult r = ex::RunScenario(cfg, options);
      Report(r);
      csv = ex::CsvHeader() + ex::CsvRows("base", r);
      if (options.trace) {
        std::string text;
        for (const auto& line : r.trace) text += line + '\n';
        WriteFile(trace_path, text);
      }
      if (!r.violations.empty()) {
        if (csv_path.empty()) std::cout << csv; else WriteFile(csv_path, csv);
        return kRuntime;
      }
    } else {
      const auto mode =
          seed_mode == "common" ? ex::SeedMode::kCommon : ex::SeedMode::kDerived;
      auto points = ex::Sweep(cfg, vary, values, mode, options, jobs);
      bool leaked = false;
      for (const auto& p : points) {
        Report(p.result);
        leaked = leaked || !p.result.violations.empty();
      }
      csv = ex::SweepCsv(points);
      if (leaked) {
        if (csv_path.empty()) std::cout << csv; else WriteFile(csv_path, csv);
        return kRuntime;
      }
    }
    if (csv_path.empty()) {
      std::cout << csv;
    } else {
      WriteFile(csv_path, csv);
    }
    return kOk;
  } catch (const ex::ScenarioError& e) {
    std::cerr << scenario << ": " << e.what() << '\n';
    return kScenario;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntime;
  }
}
