#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hisac/log.hpp"
#include "hisac/runner.hpp"
#include "hisac/scenario.hpp"

namespace {

int cmd_run(const std::string& scenario_arg, const std::string& methods_arg, int trials,
            long long seed, const std::string& out_dir) {
  hisac::Scenario scenario = hisac::load_scenario(scenario_arg);
  if (trials > 0) scenario.trials = trials;
  if (seed >= 0) scenario.seed = static_cast<std::uint64_t>(seed);

  std::vector<std::string> methods;
  if (!methods_arg.empty()) {
    std::size_t pos = 0;
    while (pos <= methods_arg.size()) {
      const std::size_t comma = methods_arg.find(',', pos);
      const std::size_t end = comma == std::string::npos ? methods_arg.size() : comma;
      if (end > pos) methods.push_back(methods_arg.substr(pos, end - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }

  const hisac::RunResult result = hisac::run_scenario(scenario, methods);
  hisac::write_artifacts(result, out_dir);
  for (const auto& row : result.rows) {
    std::printf("%-14s snr %5.1f dB  rmse %10.4g m  frt %8.4g  (%ld/%ld detections)\n",
                row.method.c_str(), row.snr_db, row.rmse_m, row.frt, row.detections,
                row.fullband_detections);
  }
  std::printf("artifacts written to %s\n", out_dir.c_str());
  return 0;
}

int cmd_validate(const std::string& scenario_arg) {
  const hisac::Scenario scenario = hisac::load_scenario(scenario_arg);
  const hisac::ValidationReport report = hisac::validate_scenario(scenario);
  std::printf("effective bandwidth: %.6g MHz\n", report.effective_bandwidth_hz / 1e6);
  std::printf("virtual bandwidth:   %.6g MHz\n", report.virtual_bandwidth_hz / 1e6);
  if (report.ok()) {
    std::printf("ok\n");
    return 0;
  }
  for (const auto& v : report.violations) std::fprintf(stderr, "violation: %s\n", v.c_str());
  return 1;
}

int cmd_dump_cfr(const std::string& scenario_arg, int slot) {
  hisac::Scenario scenario = hisac::load_scenario(scenario_arg);
  const hisac::ValidationReport report = hisac::validate_scenario(scenario);
  if (!report.ok()) {
    for (const auto& v : report.violations) std::fprintf(stderr, "violation: %s\n", v.c_str());
    return 1;
  }
  if (slot < 0 || slot >= scenario.slots) {
    std::fprintf(stderr, "slot %d out of range [0, %d)\n", slot, scenario.slots);
    return 1;
  }
  const hisac::TrialData data = hisac::make_trial(scenario, 0, 0);
  std::printf("subsystem,subband,slot,subcarrier,re,im\n");
  for (const auto& slice : data.slices_per_slot[static_cast<std::size_t>(slot)]) {
    for (std::size_t s = 0; s < slice.samples.size(); ++s) {
      std::printf("%d,%d,%d,%d,%.17g,%.17g\n", slice.subsystem_id, slice.subband, slice.slot,
                  slice.start_index + static_cast<int>(s), slice.samples[s].real(),
                  slice.samples[s].imag());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiband super-resolution ranging simulator"};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::string methods_arg;
  std::string out_dir = "out";
  int trials = 0;
  long long seed = -1;
  int slot = 0;

  CLI::App* run = app.add_subcommand("run", "Run a scenario and write metric/range CSVs");
  run->add_option("scenario", scenario_arg, "Preset name or scenario JSON file")->required();
  run->add_option("--methods", methods_arg, "Comma-separated method list");
  run->add_option("--trials", trials, "Override the scenario trial count");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory");

  CLI::App* presets = app.add_subcommand("list-presets", "List built-in scenario presets");

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario against the plan rules");
  validate->add_option("scenario", scenario_arg, "Preset name or scenario JSON file")->required();

  CLI::App* dump = app.add_subcommand("dump-cfr", "Print the slices measured at one slot");
  dump->add_option("scenario", scenario_arg, "Preset name or scenario JSON file")->required();
  dump->add_option("--slot", slot, "Slot index")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_arg, methods_arg, trials, seed, out_dir);
    if (presets->parsed()) {
      for (const auto& name : hisac::preset_names()) std::printf("%s\n", name.c_str());
      return 0;
    }
    if (validate->parsed()) return cmd_validate(scenario_arg);
    if (dump->parsed()) return cmd_dump_cfr(scenario_arg, slot);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
