#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcqkd/sweep.hpp"

namespace dcqkd {

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kIo = 3, kCrosscheck = 4 };

struct FlagValues {
  std::optional<std::string> config;
  std::list<std::pair<std::string, std::optional<std::string>>> settings;  // stable addresses
  std::vector<std::string> attacks;
  bool threshold = false;
  bool crosscheck = false;
};

void add_setting(CLI::App& app, FlagValues& flags, const std::string& key,
                 const std::string& help) {
  auto& slot = flags.settings.emplace_back(key, std::nullopt).second;
  app.add_option("--" + key, slot, help);
}

template <typename Records>
void emit(const SweepSpec& spec, const Records& records, std::ostream& out) {
  if (spec.output == "-") {
    write_csv(records, out);
  } else {
    write_csv(records, std::filesystem::path(spec.output));
  }
}

int run(const SweepSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.threshold_table) {
    const auto rows = threshold_table(spec);
    if (spec.output == "-") {
      write_threshold_csv(rows, out);
      return kOk;
    }
    std::ofstream file(spec.output, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open " + spec.output + " for writing");
    write_threshold_csv(rows, file);
    file.close();
    if (!file) {
      std::error_code ec;
      std::filesystem::remove(spec.output, ec);
      throw IoError("failed writing " + spec.output);
    }
    return kOk;
  }

  emit(spec, run_sweep(spec), out);
  if (!spec.crosscheck) return kOk;

  const CrosscheckReport report = crosscheck(spec);
  print_crosscheck(report, err);
  return report.passed ? kOk : kCrosscheck;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Round-trip dense-coding CV-QKD sweeps, thresholds and Monte Carlo checks",
               "dcqkd"};
  FlagValues flags;
  app.add_option("--config", flags.config, "flat key=value file; flags override it");
  add_setting(app, flags, "gamma", "EPR correlation factor in (0,1]");
  add_setting(app, flags, "eta", "one-way channel efficiency in [0,1]");
  add_setting(app, flags, "r-tap", "monitoring tap ratio in [0,1)");
  add_setting(app, flags, "vs", "signal variance on both quadratures");
  add_setting(app, flags, "vs-x", "signal variance on x");
  add_setting(app, flags, "vs-y", "signal variance on y");
  add_setting(app, flags, "gamma-e", "Eve's EPR correlation factor (partial-mix)");
  add_setting(app, flags, "monitor-bound", "monitor variance above which Eve is detected");
  add_setting(app, flags, "sweep", "axis:start:stop:step with axis eta or gamma");
  add_setting(app, flags, "mc-samples", "Monte Carlo shots per point, 0 for analytic only");
  add_setting(app, flags, "seed", "base seed for per-point generators");
  add_setting(app, flags, "output", "CSV path, - for stdout");
  app.add_option("--attack", flags.attacks,
                 "none|single-tap|dual-tap|partial-mix|intercept-resend (repeatable)");
  app.add_flag("--threshold", flags.threshold, "emit the eta* table instead of the sweep");
  app.add_flag("--crosscheck", flags.crosscheck,
               "compare sampled statistics with the closed forms (needs mc-samples >= 1e5)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "dcqkd: " << e.what() << '\n';
    return kConfig;
  }

  try {
    SweepSpec spec;
    if (flags.config) spec = parse_config_file(*flags.config);
    for (const auto& [key, value] : flags.settings) {
      if (value) apply_setting(spec, key, *value);
    }
    if (!flags.attacks.empty()) {
      spec.attacks.clear();
      for (const auto& a : flags.attacks) apply_setting(spec, "attack", a);
    }
    if (flags.threshold) spec.threshold_table = true;
    if (flags.crosscheck) spec.crosscheck = true;
    spec.validate();
    return run(spec, out, err);
  } catch (const ConfigError& e) {
    err << "dcqkd: config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    err << "dcqkd: I/O error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace dcqkd
