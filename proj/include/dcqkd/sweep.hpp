// Parameter sweeps, CSV output, threshold tables and the Monte Carlo
// cross-check harness behind the dcqkd command-line tool.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dcqkd/attacks.hpp"
#include "dcqkd/infotheory.hpp"
#include "dcqkd/protocol.hpp"

namespace dcqkd {

/// Invalid configuration; key() names the offending setting.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Axis { eta, gamma };

inline constexpr std::size_t kMaxGridSize = 1'000'000;
inline constexpr std::size_t kMinCrosscheckSamples = 100'000;

struct SweepAxis {
  Axis axis = Axis::eta;
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
};

struct SweepSpec {
  std::optional<SweepAxis> sweep;  // empty: the single point in `fixed`
  ProtocolParams fixed;
  std::vector<Strategy> attacks{Strategy::none};
  std::size_t mc_samples = 0;
  std::uint64_t base_seed = 1;
  bool threshold_table = false;
  bool crosscheck = false;
  std::string output = "-";

  std::size_t grid_size() const;
  /// Parameters of grid point i (the swept field replaced).
  ProtocolParams point(std::size_t i) const;
  /// Throws ConfigError.
  void validate() const;
};

/// Parses "axis:start:stop:step", e.g. "eta:0.01:0.99:0.01".
SweepAxis parse_sweep_axis(std::string_view text);

/// Applies one key=value setting. Keys: gamma, eta, r-tap, vs, vs-x, vs-y,
/// gamma-e, monitor-bound, attack (comma-separated, appends), sweep,
/// mc-samples, seed, threshold, crosscheck, output. Underscores are accepted
/// in place of dashes.
void apply_setting(SweepSpec& spec, std::string_view key, std::string_view value);

/// Flat key=value text; '#' starts a comment. Does not validate ranges.
SweepSpec parse_config_text(std::string_view text, SweepSpec base = {});
SweepSpec parse_config_file(const std::filesystem::path& path, SweepSpec base = {});

/// Empirical columns attached when mc_samples > 0.
struct EmpiricalColumns {
  double snr_bx, snr_by, snr_ex, snr_ey, v_rx, v_ry;
};

struct SweepRecord {
  double gamma = 0.0;
  double eta = 0.0;
  double r_tap = 0.0;
  double vs_x = 0.0;
  double vs_y = 0.0;
  Strategy attack = Strategy::none;
  double snr_bx = 0.0;
  double snr_by = 0.0;
  double snr_ex = 0.0;
  double snr_ey = 0.0;
  double i_ab = 0.0;
  double i_ae = 0.0;
  double delta_i = 0.0;
  double v_rx = 0.0;
  double v_ry = 0.0;
  Flags flags;
  std::optional<EmpiricalColumns> empirical;
};

SweepRecord evaluate_record(Strategy s, const ProtocolParams& p);

/// Sample the strategy's mode graph; columns it does not define are NaN.
EmpiricalColumns empirical_columns(Strategy s, const ProtocolParams& p, std::size_t n,
                                   std::uint64_t seed);

/// Records ordered axis-major, attack-minor. Grid points run concurrently;
/// the result does not depend on scheduling.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec);

inline constexpr std::string_view kCsvHeader =
    "gamma,eta,r_tap,vs_x,vs_y,attack,snr_bx,snr_by,snr_ex,snr_ey,i_ab,i_ae,delta_i,v_rx,v_ry,"
    "flags";
inline constexpr std::string_view kCsvEmpiricalHeader =
    "mc_snr_bx,mc_snr_by,mc_snr_ex,mc_snr_ey,mc_v_rx,mc_v_ry";

/// 12 significant digits; NaN is written as "nan".
std::string format_number(double v);

void write_csv(const std::vector<SweepRecord>& records, std::ostream& out);
/// Throws IoError; a partially written file is removed.
void write_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path);

std::vector<SweepRecord> read_csv(std::istream& in);
std::vector<SweepRecord> read_csv(const std::filesystem::path& path);

struct ThresholdRow {
  double gamma = 0.0;
  Strategy attack = Strategy::single_tap;
  ThresholdResult result;
};

/// eta* for every gamma of the spec (the gamma grid when sweeping gamma,
/// else the fixed gamma) and every attack that defines a key rate.
std::vector<ThresholdRow> threshold_table(const SweepSpec& spec);
void write_threshold_csv(const std::vector<ThresholdRow>& rows, std::ostream& out);

struct CrosscheckEntry {
  std::size_t point = 0;
  Strategy attack = Strategy::none;
  Deviation deviation;
};

struct CrosscheckReport {
  std::vector<CrosscheckEntry> entries;
  double max_z = 0.0;
  std::size_t over_3_sigma = 0;
  bool passed = true;  // no statistic beyond 4 sigma

  /// Entries sorted by decreasing z, at most `count`.
  std::vector<CrosscheckEntry> worst(std::size_t count) const;
};

inline constexpr double kCrosscheckFailSigma = 4.0;

/// Per-point seed derive_seed(base_seed, point index). Requires
/// mc_samples >= 1e5.
CrosscheckReport crosscheck(const SweepSpec& spec);

struct CrosscheckJob {
  std::size_t point = 0;
  Strategy attack = Strategy::none;
  ObservableSet set;
  std::uint64_t seed = 0;
};

/// Samples every job with n shots and collects all deviations.
CrosscheckReport run_crosscheck(const std::vector<CrosscheckJob>& jobs, std::size_t n);

void print_crosscheck(const CrosscheckReport& report, std::ostream& out, std::size_t worst = 10);

/// Entry point of the dcqkd tool. Exit codes: 0 success, 2 configuration
/// error, 3 I/O error, 4 cross-check failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dcqkd
