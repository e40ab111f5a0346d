#include "dcqkd/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "dcqkd/seed.hpp"
#include "dcqkd/statistics.hpp"

namespace dcqkd {

namespace {

std::string normalize_key(std::string_view key) {
  std::string k(key);
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(std::string(key), "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key),
                      "expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text.empty()) return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(std::string(key), "expected true or false, got '" + std::string(text) + "'");
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  while (true) {
    const auto end = text.find(sep, begin);
    parts.push_back(text.substr(begin, end == std::string_view::npos ? end : end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return parts;
}

std::string param_key(const std::string& field) {
  std::string k = field;
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

void validate_params(const ProtocolParams& p, const char* where) {
  try {
    p.validate();
  } catch (const ParameterError& e) {
    std::string message = e.what();
    message = message.substr(message.find(": ") + 2);
    if (where != nullptr) message += std::string(" (") + where + ")";
    throw ConfigError(param_key(e.key()), message);
  }
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

std::size_t SweepSpec::grid_size() const {
  if (!sweep) return 1;
  const double span = (sweep->stop - sweep->start) / sweep->step;
  return static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
}

ProtocolParams SweepSpec::point(std::size_t i) const {
  ProtocolParams p = fixed;
  if (!sweep) return p;
  const double v = sweep->start + static_cast<double>(i) * sweep->step;
  (sweep->axis == Axis::eta ? p.eta : p.gamma) = v;
  return p;
}

void SweepSpec::validate() const {
  validate_params(fixed, nullptr);
  if (attacks.empty()) throw ConfigError("attack", "at least one attack is required");
  if (sweep) {
    if (!(sweep->step > 0.0)) throw ConfigError("sweep", "step must be > 0");
    if (!(sweep->start < sweep->stop)) throw ConfigError("sweep", "start must be < stop");
    const double span = (sweep->stop - sweep->start) / sweep->step;
    if (span + 1.0 > static_cast<double>(kMaxGridSize)) {
      throw ConfigError("sweep", "grid larger than 1e6 points");
    }
    validate_params(point(0), "sweep start");
    validate_params(point(grid_size() - 1), "sweep stop");
  }
  if (crosscheck && mc_samples < kMinCrosscheckSamples) {
    throw ConfigError("mc-samples", "crosscheck needs at least 100000 samples");
  }
}

SweepAxis parse_sweep_axis(std::string_view text) {
  const auto parts = split(trim(text), ':');
  if (parts.size() != 4) throw ConfigError("sweep", "expected axis:start:stop:step");
  SweepAxis axis;
  if (parts[0] == "eta") {
    axis.axis = Axis::eta;
  } else if (parts[0] == "gamma") {
    axis.axis = Axis::gamma;
  } else {
    throw ConfigError("sweep", "axis must be eta or gamma, got '" + std::string(parts[0]) + "'");
  }
  axis.start = parse_double("sweep", parts[1]);
  axis.stop = parse_double("sweep", parts[2]);
  axis.step = parse_double("sweep", parts[3]);
  return axis;
}

void apply_setting(SweepSpec& spec, std::string_view raw_key, std::string_view value) {
  const std::string key = normalize_key(trim(raw_key));
  value = trim(value);
  auto& p = spec.fixed;
  if (key == "gamma") {
    p.gamma = parse_double(key, value);
  } else if (key == "eta") {
    p.eta = parse_double(key, value);
  } else if (key == "r-tap") {
    p.r_tap = parse_double(key, value);
  } else if (key == "vs") {
    p.vs_x = p.vs_y = parse_double(key, value);
  } else if (key == "vs-x") {
    p.vs_x = parse_double(key, value);
  } else if (key == "vs-y") {
    p.vs_y = parse_double(key, value);
  } else if (key == "gamma-e") {
    p.gamma_e = parse_double(key, value);
  } else if (key == "monitor-bound") {
    p.monitor_bound = parse_double(key, value);
  } else if (key == "attack") {
    for (auto name : split(value, ',')) {
      const auto s = parse_strategy(trim(name));
      if (!s) throw ConfigError(key, "unknown attack '" + std::string(trim(name)) + "'");
      spec.attacks.push_back(*s);
    }
  } else if (key == "sweep") {
    spec.sweep = parse_sweep_axis(value);
  } else if (key == "mc-samples") {
    spec.mc_samples = parse_unsigned(key, value);
  } else if (key == "seed") {
    spec.base_seed = parse_unsigned(key, value);
  } else if (key == "threshold") {
    spec.threshold_table = parse_bool(key, value);
  } else if (key == "crosscheck") {
    spec.crosscheck = parse_bool(key, value);
  } else if (key == "output") {
    if (value.empty()) throw ConfigError(key, "empty path");
    spec.output = std::string(value);
  } else {
    throw ConfigError(key, "unknown setting");
  }
}

SweepSpec parse_config_text(std::string_view text, SweepSpec base) {
  SweepSpec spec = std::move(base);
  bool attacks_from_text = false;
  for (auto line : split(text, '\n')) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), "expected key=value");
    }
    const auto key = normalize_key(trim(line.substr(0, eq)));
    // The first attack line replaces the default list; later ones append.
    if (key == "attack" && !attacks_from_text) {
      spec.attacks.clear();
      attacks_from_text = true;
    }
    apply_setting(spec, key, line.substr(eq + 1));
  }
  return spec;
}

SweepSpec parse_config_file(const std::filesystem::path& path, SweepSpec base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), std::move(base));
}

SweepRecord evaluate_record(Strategy s, const ProtocolParams& p) {
  const AttackOutcome o = evaluate_attack(s, p);
  const KeyRateReport k = key_rate(s, p);
  SweepRecord r;
  r.gamma = p.gamma;
  r.eta = p.eta;
  r.r_tap = p.r_tap;
  r.vs_x = p.vs_x;
  r.vs_y = p.vs_y;
  r.attack = s;
  r.snr_bx = o.impact.bob_snr_x;
  r.snr_by = o.impact.bob_snr_y;
  r.snr_ex = o.eve.snr_ex;
  r.snr_ey = o.eve.snr_ey;
  r.i_ab = k.i_ab_x + k.i_ab_y;
  r.i_ae = k.i_ae_x + k.i_ae_y;
  r.delta_i = k.delta_i;
  r.v_rx = o.impact.monitor_vx;
  r.v_ry = o.impact.monitor_vy;
  r.flags = o.impact.flags;
  return r;
}

EmpiricalColumns empirical_columns(Strategy s, const ProtocolParams& p, std::size_t n,
                                   std::uint64_t seed) {
  const ObservableSet set = observable_set(s, p, /*include_session=*/true);
  std::vector<LinearGaussianForm> forms;
  for (const auto& o : set.observables) {
    forms.push_back(o.form);
    if (o.signal) forms.push_back(LinearGaussianForm::of(*o.signal));
  }
  const SampleMatrix draws = sample(set.registry, forms, n, seed);

  EmpiricalColumns c{nan(), nan(), nan(), nan(), nan(), nan()};
  std::size_t column = 0;
  for (const auto& o : set.observables) {
    const auto& values = draws.columns[column++];
    double snr = 0.0;
    if (o.signal) {
      snr = stats::snr_from_correlation(stats::sample_correlation(draws.columns[column++], values));
    }
    if (o.name == "bob_sum_x") c.snr_bx = snr;
    if (o.name == "bob_diff_y") c.snr_by = snr;
    if (o.name == "eve_x") c.snr_ex = snr;
    if (o.name == "eve_y") c.snr_ey = snr;
    if (o.name == "monitor_x") c.v_rx = stats::sample_variance(values);
    if (o.name == "monitor_y") c.v_ry = stats::sample_variance(values);
  }
  return c;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t points = spec.grid_size();
  const std::size_t per_point = spec.attacks.size();
  std::vector<SweepRecord> records(points * per_point);
  parallel_for(points, [&](std::size_t i) {
    const ProtocolParams p = spec.point(i);
    for (std::size_t a = 0; a < per_point; ++a) {
      SweepRecord r = evaluate_record(spec.attacks[a], p);
      if (spec.mc_samples > 0) {
        r.empirical = empirical_columns(spec.attacks[a], p, spec.mc_samples,
                                        derive_seed(spec.base_seed, i));
      }
      records[i * per_point + a] = std::move(r);
    }
  });
  return records;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(const std::vector<SweepRecord>& records, std::ostream& out) {
  const bool with_mc =
      std::any_of(records.begin(), records.end(), [](const auto& r) { return r.empirical; });
  out << kCsvHeader;
  if (with_mc) out << ',' << kCsvEmpiricalHeader;
  out << '\n';
  for (const auto& r : records) {
    for (double v : {r.gamma, r.eta, r.r_tap, r.vs_x, r.vs_y}) out << format_number(v) << ',';
    out << to_string(r.attack);
    for (double v : {r.snr_bx, r.snr_by, r.snr_ex, r.snr_ey, r.i_ab, r.i_ae, r.delta_i, r.v_rx,
                     r.v_ry}) {
      out << ',' << format_number(v);
    }
    out << ',' << r.flags.to_string();
    if (with_mc) {
      const EmpiricalColumns c = r.empirical.value_or(
          EmpiricalColumns{nan(), nan(), nan(), nan(), nan(), nan()});
      for (double v : {c.snr_bx, c.snr_by, c.snr_ex, c.snr_ey, c.v_rx, c.v_ry}) {
        out << ',' << format_number(v);
      }
    }
    out << '\n';
  }
}

void write_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(records, out);
  out.close();
  if (!out) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw IoError("failed writing " + path.string());
  }
}

std::vector<SweepRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV");
  const bool with_mc = line == std::string(kCsvHeader) + "," + std::string(kCsvEmpiricalHeader);
  if (!with_mc && line != kCsvHeader) throw IoError("unexpected CSV header");

  auto number = [](std::string_view s) {
    const std::string text(s);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) throw IoError("bad number '" + text + "'");
    return v;
  };

  std::vector<SweepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != (with_mc ? 22u : 16u)) throw IoError("wrong column count in '" + line + "'");
    SweepRecord r;
    r.gamma = number(f[0]);
    r.eta = number(f[1]);
    r.r_tap = number(f[2]);
    r.vs_x = number(f[3]);
    r.vs_y = number(f[4]);
    const auto s = parse_strategy(f[5]);
    if (!s) throw IoError("unknown attack '" + std::string(f[5]) + "'");
    r.attack = *s;
    r.snr_bx = number(f[6]);
    r.snr_by = number(f[7]);
    r.snr_ex = number(f[8]);
    r.snr_ey = number(f[9]);
    r.i_ab = number(f[10]);
    r.i_ae = number(f[11]);
    r.delta_i = number(f[12]);
    r.v_rx = number(f[13]);
    r.v_ry = number(f[14]);
    r.flags = Flags::parse(std::string(f[15]));
    if (with_mc) {
      r.empirical = EmpiricalColumns{number(f[16]), number(f[17]), number(f[18]),
                                     number(f[19]), number(f[20]), number(f[21])};
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<SweepRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return read_csv(in);
}

std::vector<ThresholdRow> threshold_table(const SweepSpec& spec) {
  spec.validate();
  std::vector<double> gammas;
  if (spec.sweep && spec.sweep->axis == Axis::gamma) {
    for (std::size_t i = 0; i < spec.grid_size(); ++i) gammas.push_back(spec.point(i).gamma);
  } else {
    gammas.push_back(spec.fixed.gamma);
  }
  std::vector<ThresholdRow> rows;
  for (double g : gammas) {
    for (Strategy s : spec.attacks) {
      if (s == Strategy::intercept_resend) continue;
      rows.push_back({g, s, security_threshold(g, s, spec.fixed)});
    }
  }
  return rows;
}

void write_threshold_csv(const std::vector<ThresholdRow>& rows, std::ostream& out) {
  out << "gamma,attack,verdict,eta_star,monotone,sign_changes\n";
  for (const auto& r : rows) {
    out << format_number(r.gamma) << ',' << to_string(r.attack) << ','
        << to_string(r.result.verdict) << ',' << format_number(r.result.value) << ','
        << (r.result.monotone ? "true" : "false") << ',' << r.result.sign_changes << '\n';
  }
}

std::vector<CrosscheckEntry> CrosscheckReport::worst(std::size_t count) const {
  std::vector<CrosscheckEntry> sorted = entries;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.deviation.z > b.deviation.z;
  });
  if (sorted.size() > count) sorted.resize(count);
  return sorted;
}

CrosscheckReport run_crosscheck(const std::vector<CrosscheckJob>& jobs, std::size_t n) {
  std::vector<std::vector<Deviation>> results(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    results[i] = compare_with_samples(jobs[i].set, n, jobs[i].seed);
  });
  CrosscheckReport report;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    for (auto& d : results[i]) {
      report.max_z = std::max(report.max_z, d.z);
      if (d.z > 3.0) ++report.over_3_sigma;
      if (!(d.z <= kCrosscheckFailSigma)) report.passed = false;
      report.entries.push_back({jobs[i].point, jobs[i].attack, std::move(d)});
    }
  }
  return report;
}

CrosscheckReport crosscheck(const SweepSpec& spec) {
  spec.validate();
  if (spec.mc_samples < kMinCrosscheckSamples) {
    throw ConfigError("mc-samples", "crosscheck needs at least 100000 samples");
  }
  std::vector<CrosscheckJob> jobs;
  for (std::size_t i = 0; i < spec.grid_size(); ++i) {
    const ProtocolParams p = spec.point(i);
    for (Strategy s : spec.attacks) {
      jobs.push_back({i, s, observable_set(s, p, /*include_session=*/true),
                      derive_seed(spec.base_seed, i)});
    }
  }
  return run_crosscheck(jobs, spec.mc_samples);
}

void print_crosscheck(const CrosscheckReport& report, std::ostream& out, std::size_t worst) {
  out << "crosscheck: " << report.entries.size() << " statistics, max deviation "
      << format_number(report.max_z) << " sigma, " << report.over_3_sigma
      << " beyond 3 sigma -> " << (report.passed ? "PASS" : "FAIL") << '\n';
  out << "point,attack,observable,statistic,expected,empirical,standard_error,z\n";
  for (const auto& e : report.worst(worst)) {
    const auto& d = e.deviation;
    out << e.point << ',' << to_string(e.attack) << ',' << d.observable << ',' << d.statistic
        << ',' << format_number(d.expected) << ',' << format_number(d.empirical) << ','
        << format_number(d.standard_error) << ',' << format_number(d.z) << '\n';
  }
}

}  // namespace dcqkd
