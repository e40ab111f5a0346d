// The honest round-trip dense-coding session.
//
// Bob owns the EPR source. He taps a fraction R of the idler b (R1), sends the
// signal beam a through a channel of efficiency eta to Alice, who taps a
// fraction R (R2), modulates X_s / Y_s and returns the beam through a second
// channel of efficiency eta. Bob balances the idler to the returned beam and
// reads both signals at once with a Bell-state measurement. The two taps are
// correlated to expose intercept-resend attacks.
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcqkd/epr_source.hpp"
#include "dcqkd/gaussian_core.hpp"

namespace dcqkd {

/// Default monitor detection bound: correlation variance 0.928 (0.32 dB below SNL).
inline constexpr double kDefaultMonitorBound = 0.928;

/// A parameter outside its allowed range; key() names the offending field.
class ParameterError : public std::domain_error {
 public:
  ParameterError(std::string key, const std::string& message)
      : std::domain_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ProtocolParams {
  double gamma = 0.2;
  double eta = 0.9;    // one-way channel efficiency, same in both directions
  double r_tap = 0.1;  // reflectivity of the R1 and R2 monitor taps
  double vs_x = 10.0;
  double vs_y = 10.0;
  double gamma_e = 0.05;  // Eve's own EPR pair (intercept-resend, partial mix)
  double monitor_bound = kDefaultMonitorBound;

  /// Throws ParameterError for the first field out of range.
  void validate() const;
};

struct Quadratures {
  double x = 0.0;
  double y = 0.0;
};

enum class Flag : unsigned {
  unphysical_regime = 1u << 0,
  below_monitor_threshold = 1u << 1,
  monitor_blind = 1u << 2,
  detected = 1u << 3,
};

class Flags {
 public:
  void set(Flag f) { bits_ |= static_cast<unsigned>(f); }
  bool has(Flag f) const { return (bits_ & static_cast<unsigned>(f)) != 0; }
  bool empty() const { return bits_ == 0; }
  Flags& operator|=(Flags other) {
    bits_ |= other.bits_;
    return *this;
  }
  /// '|'-separated names in declaration order, e.g. "unphysical-regime|detected".
  std::string to_string() const;
  static Flags parse(const std::string& text);

  friend bool operator==(Flags, Flags) = default;

 private:
  unsigned bits_ = 0;
};

struct SessionResult {
  double v_bx = 0.0;
  double v_by = 0.0;
  double snr_bx = 0.0;
  double snr_by = 0.0;
  double v_rx = 0.0;
  double v_ry = 0.0;
  Flags flags;
};

// ---------------------------------------------------------------------------
// Closed-form evaluation
// ---------------------------------------------------------------------------

/// Bob's Bell-measurement variances (sum amplitude, difference phase).
Quadratures bob_variances(const ProtocolParams& p);
Quadratures bob_snr(const ProtocolParams& p);

/// Correlation variances between the R1 and R2 reflected beams.
Quadratures monitor_variances(const ProtocolParams& p);

/// Tap reflectivity at which the monitor correlation variance reaches
/// v_target. Requires gamma < 1 and v_target < 1; throws std::domain_error
/// when no solution exists and std::out_of_range when R falls outside [0, 1).
double required_tap_ratio(double gamma, double eta, double v_target);

/// Two-mode correlation in dB below the SNL that survives both R taps.
double correlation_after_tap(const ProtocolParams& p);

/// True when a monitor variance exceeds the detection bound. A zero tap
/// can never detect anything.
bool monitor_detects(const ProtocolParams& p, Quadratures monitor);

/// Flags for the honest configuration: monitor-blind when R = 0,
/// below-monitor-threshold when the honest correlation is weaker than the bound.
Flags configuration_flags(const ProtocolParams& p);

SessionResult evaluate_session(const ProtocolParams& p);

// ---------------------------------------------------------------------------
// Mode graph
// ---------------------------------------------------------------------------

struct TapOutputs {
  OpticalMode kept;
  OpticalMode reflected;
};

/// Beamsplitter of reflectivity r against a fresh vacuum.
TapOutputs tap(const OpticalMode& in, double r, SourceRegistry& registry);

struct ChannelOutputs {
  OpticalMode transmitted;
  OpticalMode lost;     // the port an eavesdropper can pick up
  OpticalMode vacuum;   // the vacuum entering the channel
};

/// Lossy channel as a beamsplitter of transmittance eta against a fresh vacuum.
ChannelOutputs channel(const OpticalMode& in, double eta, SourceRegistry& registry);

struct BellOutputs {
  LinearGaussianForm sum_x;   // (a2.x + b1.x) / sqrt(2)
  LinearGaussianForm diff_y;  // (a2.y - b1.y) / sqrt(2)
};

BellOutputs bell_detect(const OpticalMode& a2, const OpticalMode& b1);

struct MonitorOutputs {
  OpticalMode bob_balanced;  // Bob's R1 tap after attenuation by eta
  LinearGaussianForm x;      // (alice.x + bob.x) / sqrt(2)
  LinearGaussianForm y;      // (alice.y - bob.y) / sqrt(2)
};

/// Bob attenuates his reflected beam by eta so that it matches Alice's,
/// which has crossed one channel, then both are correlated.
MonitorOutputs monitor_correlation(const OpticalMode& alice_tap, const OpticalMode& bob_tap,
                                   double eta, SourceRegistry& registry);

/// The idler after Bob's attenuation to the returned beam's level (eta^2).
OpticalMode balance_idler(const OpticalMode& b_kept, double eta, SourceRegistry& registry);

struct HonestSession {
  EprPair epr;
  SourceId xs;
  SourceId ys;
  OpticalMode b_kept;       // idler after R1
  OpticalMode monitor_b;    // R1 reflected port
  ChannelOutputs forward;   // Bob -> Alice
  OpticalMode monitor_a;    // R2 reflected port
  OpticalMode a1;           // modulated beam leaving Alice
  ChannelOutputs backward;  // Alice -> Bob; backward.transmitted is a2
  OpticalMode b1;
  BellOutputs bell;
  MonitorOutputs monitor;

  const OpticalMode& a2() const { return backward.transmitted; }
};

HonestSession build_honest_session(const ProtocolParams& p, SourceRegistry& registry);

/// Evaluates variances and SNRs on the mode graph rather than from closed forms.
SessionResult evaluate_session_graph(const ProtocolParams& p);

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

struct SessionTranscript {
  std::vector<double> alice_xs;
  std::vector<double> alice_ys;
  std::vector<double> bob_sum_x;
  std::vector<double> bob_diff_y;
  std::vector<double> monitor_x;
  std::vector<double> monitor_y;

  SessionResult empirical;
  double mi_x = 0.0;
  double mi_y = 0.0;

  /// FNV-1a digest of every sample, for determinism checks.
  std::uint64_t digest() const;
};

inline constexpr std::size_t kMinSessionSamples = 1000;

SessionTranscript simulate_session(const ProtocolParams& p, std::size_t n, std::uint64_t seed);

/// HD1 and HD2 pick amplitude or phase independently at random each shot;
/// only matched choices enter the correlation check.
struct MonitorBasisCheck {
  std::size_t shots = 0;
  std::size_t matched = 0;
  double v_matched_x = 0.0;
  double v_matched_y = 0.0;
  double v_mismatched = 0.0;
};

MonitorBasisCheck simulate_monitor_basis_check(const ProtocolParams& p, std::size_t n,
                                               std::uint64_t seed);

}  // namespace dcqkd
