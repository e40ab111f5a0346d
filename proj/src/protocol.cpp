#include "dcqkd/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <sstream>

#include "dcqkd/seed.hpp"
#include "dcqkd/statistics.hpp"

namespace dcqkd {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Relative slack when comparing a computed variance with the detection bound,
// so that the honest working point (exactly 0.928) is not flagged by rounding.
constexpr double kBoundSlack = 1e-9;

void require(bool ok, const char* key, const char* message) {
  if (!ok) throw ParameterError(key, message);
}

struct FlagName {
  Flag flag;
  const char* name;
};

constexpr std::array<FlagName, 4> kFlagNames{{
    {Flag::unphysical_regime, "unphysical-regime"},
    {Flag::below_monitor_threshold, "below-monitor-threshold"},
    {Flag::monitor_blind, "monitor-blind"},
    {Flag::detected, "detected"},
}};

}  // namespace

void ProtocolParams::validate() const {
  require(gamma >= kMinGamma && gamma <= 1.0, "gamma", "must be in [1e-6, 1]");
  require(eta > 0.0 && eta <= 1.0, "eta", "must be in (0, 1]");
  require(r_tap >= 0.0 && r_tap < 1.0, "r_tap", "must be in [0, 1)");
  require(vs_x >= 0.0 && std::isfinite(vs_x), "vs_x", "must be finite and >= 0");
  require(vs_y >= 0.0 && std::isfinite(vs_y), "vs_y", "must be finite and >= 0");
  require(gamma_e >= kMinGamma && gamma_e <= 1.0, "gamma_e", "must be in [1e-6, 1]");
  require(monitor_bound > 0.0 && std::isfinite(monitor_bound), "monitor_bound",
          "must be finite and > 0");
}

std::string Flags::to_string() const {
  std::string out;
  for (const auto& [flag, name] : kFlagNames) {
    if (!has(flag)) continue;
    if (!out.empty()) out += '|';
    out += name;
  }
  return out;
}

Flags Flags::parse(const std::string& text) {
  Flags flags;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, '|')) {
    if (token.empty()) continue;
    auto it = std::find_if(kFlagNames.begin(), kFlagNames.end(),
                           [&](const FlagName& f) { return token == f.name; });
    if (it == kFlagNames.end()) throw std::invalid_argument("unknown flag '" + token + "'");
    flags.set(it->flag);
  }
  return flags;
}

Quadratures bob_variances(const ProtocolParams& p) {
  p.validate();
  const double eta2 = p.eta * p.eta;
  const double correlation = 2.0 * p.gamma;
  const double noise = (1.0 - p.r_tap) * eta2 * correlation + 2.0 * (1.0 - eta2 + p.r_tap * eta2);
  return {0.5 * (noise + p.eta * p.vs_x), 0.5 * (noise + p.eta * p.vs_y)};
}

Quadratures bob_snr(const ProtocolParams& p) {
  p.validate();
  const double eta2 = p.eta * p.eta;
  const double correlation = 2.0 * p.gamma;
  const double noise = (1.0 - p.r_tap) * eta2 * correlation + 2.0 * (1.0 - eta2 + p.r_tap * eta2);
  return {p.eta * p.vs_x / noise, p.eta * p.vs_y / noise};
}

Quadratures monitor_variances(const ProtocolParams& p) {
  p.validate();
  const double v = 0.5 * p.r_tap * p.eta * 2.0 * p.gamma + 1.0 - p.r_tap * p.eta;
  return {v, v};
}

double required_tap_ratio(double gamma, double eta, double v_target) {
  if (!(gamma >= kMinGamma && gamma < 1.0)) {
    throw std::domain_error("required_tap_ratio: no solution unless gamma < 1");
  }
  if (!(eta > 0.0 && eta <= 1.0)) throw std::domain_error("required_tap_ratio: eta outside (0, 1]");
  if (!(v_target < 1.0)) {
    throw std::domain_error("required_tap_ratio: no solution for a target at or above the SNL");
  }
  const double r = 2.0 * (v_target - 1.0) / (eta * (2.0 * gamma - 2.0));
  if (!(r >= 0.0 && r < 1.0)) {
    throw std::out_of_range("required_tap_ratio: R=" + std::to_string(r) + " outside [0, 1)");
  }
  return r;
}

double correlation_after_tap(const ProtocolParams& p) {
  p.validate();
  const double v = (1.0 - p.r_tap) * 2.0 * p.gamma + 2.0 * p.r_tap;
  return -10.0 * std::log10(v / 2.0);
}

bool monitor_detects(const ProtocolParams& p, Quadratures monitor) {
  if (p.r_tap == 0.0) return false;
  return std::max(monitor.x, monitor.y) > p.monitor_bound * (1.0 + kBoundSlack);
}

Flags configuration_flags(const ProtocolParams& p) {
  Flags flags;
  if (p.r_tap == 0.0) flags.set(Flag::monitor_blind);
  const Quadratures honest = monitor_variances(p);
  if (std::max(honest.x, honest.y) > p.monitor_bound * (1.0 + kBoundSlack)) {
    flags.set(Flag::below_monitor_threshold);
  }
  return flags;
}

SessionResult evaluate_session(const ProtocolParams& p) {
  const Quadratures v = bob_variances(p);
  const Quadratures snr = bob_snr(p);
  const Quadratures m = monitor_variances(p);
  return {v.x, v.y, snr.x, snr.y, m.x, m.y, configuration_flags(p)};
}

TapOutputs tap(const OpticalMode& in, double r, SourceRegistry& registry) {
  auto [kept, reflected] = beamsplit(in, make_vacuum_mode(registry), 1.0 - r);
  return {std::move(kept), std::move(reflected)};
}

ChannelOutputs channel(const OpticalMode& in, double eta, SourceRegistry& registry) {
  OpticalMode vacuum = make_vacuum_mode(registry);
  auto [transmitted, lost] = beamsplit(in, vacuum, eta);
  return {std::move(transmitted), std::move(lost), std::move(vacuum)};
}

BellOutputs bell_detect(const OpticalMode& a2, const OpticalMode& b1) {
  return {kInvSqrt2 * (a2.x + b1.x), kInvSqrt2 * (a2.y - b1.y)};
}

MonitorOutputs monitor_correlation(const OpticalMode& alice_tap, const OpticalMode& bob_tap,
                                   double eta, SourceRegistry& registry) {
  OpticalMode balanced = attenuate(bob_tap, eta, registry);
  LinearGaussianForm x = kInvSqrt2 * (alice_tap.x + balanced.x);
  LinearGaussianForm y = kInvSqrt2 * (alice_tap.y - balanced.y);
  return {std::move(balanced), std::move(x), std::move(y)};
}

OpticalMode balance_idler(const OpticalMode& b_kept, double eta, SourceRegistry& registry) {
  return attenuate(attenuate(b_kept, eta, registry), eta, registry);
}

HonestSession build_honest_session(const ProtocolParams& p, SourceRegistry& registry) {
  p.validate();
  HonestSession s;
  s.epr = make_epr_pair(p.gamma, registry);
  s.xs = registry.add_signal(p.vs_x);
  s.ys = registry.add_signal(p.vs_y);

  TapOutputs r1 = tap(s.epr.b, p.r_tap, registry);
  s.b_kept = std::move(r1.kept);
  s.monitor_b = std::move(r1.reflected);

  s.forward = channel(s.epr.a, p.eta, registry);
  TapOutputs r2 = tap(s.forward.transmitted, p.r_tap, registry);
  s.monitor_a = std::move(r2.reflected);
  s.a1 = modulate(r2.kept, s.xs, s.ys, registry);

  s.backward = channel(s.a1, p.eta, registry);
  s.b1 = balance_idler(s.b_kept, p.eta, registry);
  s.bell = bell_detect(s.a2(), s.b1);
  s.monitor = monitor_correlation(s.monitor_a, s.monitor_b, p.eta, registry);
  return s;
}

SessionResult evaluate_session_graph(const ProtocolParams& p) {
  SourceRegistry registry;
  const HonestSession s = build_honest_session(p, registry);
  SessionResult r;
  r.v_bx = variance(s.bell.sum_x, registry);
  r.v_by = variance(s.bell.diff_y, registry);
  r.snr_bx = signal_to_noise(s.bell.sum_x, registry);
  r.snr_by = signal_to_noise(s.bell.diff_y, registry);
  r.v_rx = variance(s.monitor.x, registry);
  r.v_ry = variance(s.monitor.y, registry);
  r.flags = configuration_flags(p);
  return r;
}

std::uint64_t SessionTranscript::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto* column : {&alice_xs, &alice_ys, &bob_sum_x, &bob_diff_y, &monitor_x, &monitor_y}) {
    for (double v : *column) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
    }
  }
  return h;
}

SessionTranscript simulate_session(const ProtocolParams& p, std::size_t n, std::uint64_t seed) {
  if (n < kMinSessionSamples) {
    throw std::invalid_argument("simulate_session: need at least 1000 shots");
  }
  SourceRegistry registry;
  const HonestSession s = build_honest_session(p, registry);
  const std::array<LinearGaussianForm, 6> forms{
      LinearGaussianForm::of(s.xs), LinearGaussianForm::of(s.ys), s.bell.sum_x,
      s.bell.diff_y,                s.monitor.x,                  s.monitor.y};
  SampleMatrix draws = sample(registry, forms, n, seed);

  SessionTranscript t;
  t.alice_xs = std::move(draws.columns[0]);
  t.alice_ys = std::move(draws.columns[1]);
  t.bob_sum_x = std::move(draws.columns[2]);
  t.bob_diff_y = std::move(draws.columns[3]);
  t.monitor_x = std::move(draws.columns[4]);
  t.monitor_y = std::move(draws.columns[5]);

  auto& e = t.empirical;
  e.v_bx = stats::sample_variance(t.bob_sum_x);
  e.v_by = stats::sample_variance(t.bob_diff_y);
  e.v_rx = stats::sample_variance(t.monitor_x);
  e.v_ry = stats::sample_variance(t.monitor_y);
  // A zero signal variance leaves the correlation undefined: no information.
  const double rho_x = p.vs_x > 0.0 ? stats::sample_correlation(t.alice_xs, t.bob_sum_x) : 0.0;
  const double rho_y = p.vs_y > 0.0 ? stats::sample_correlation(t.alice_ys, t.bob_diff_y) : 0.0;
  e.snr_bx = stats::snr_from_correlation(rho_x);
  e.snr_by = stats::snr_from_correlation(rho_y);
  e.flags = configuration_flags(p);
  t.mi_x = stats::mutual_info_from_correlation(rho_x);
  t.mi_y = stats::mutual_info_from_correlation(rho_y);
  return t;
}

MonitorBasisCheck simulate_monitor_basis_check(const ProtocolParams& p, std::size_t n,
                                               std::uint64_t seed) {
  SourceRegistry registry;
  const HonestSession s = build_honest_session(p, registry);
  const OpticalMode& alice = s.monitor_a;
  const OpticalMode& bob = s.monitor.bob_balanced;
  const std::array<LinearGaussianForm, 4> forms{alice.x, alice.y, bob.x, bob.y};
  const SampleMatrix draws = sample(registry, forms, n, seed);

  std::mt19937_64 bases(derive_seed(seed, 1));
  std::bernoulli_distribution amplitude(0.5);
  std::vector<double> matched_x, matched_y, mismatched;
  for (std::size_t i = 0; i < n; ++i) {
    const bool alice_x = amplitude(bases);
    const bool bob_x = amplitude(bases);
    const double ax = draws.columns[0][i], ay = draws.columns[1][i];
    const double bx = draws.columns[2][i], by = draws.columns[3][i];
    if (alice_x && bob_x) {
      matched_x.push_back(kInvSqrt2 * (ax + bx));
    } else if (!alice_x && !bob_x) {
      matched_y.push_back(kInvSqrt2 * (ay - by));
    } else if (alice_x) {
      mismatched.push_back(kInvSqrt2 * (ax + by));
    } else {
      mismatched.push_back(kInvSqrt2 * (ay - bx));
    }
  }
  MonitorBasisCheck check;
  check.shots = n;
  check.matched = matched_x.size() + matched_y.size();
  check.v_matched_x = stats::sample_variance(matched_x);
  check.v_matched_y = stats::sample_variance(matched_y);
  check.v_mismatched = stats::sample_variance(mismatched);
  return check;
}

}  // namespace dcqkd
