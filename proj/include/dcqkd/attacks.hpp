// Eavesdropping strategies against the round-trip protocol.
//
// single-tap       Eve replaces the Alice -> Bob loss by a beamsplitter of
//                  transmittance eta and heterodynes the reflected beam.
// dual-tap         Eve also replaces the Bob -> Alice loss, heterodynes both
//                  taps and subtracts them to cancel the EPR noise of a.
// partial-mix      Eve mixes a fraction 1 - eta of her own EPR beam into a,
//                  reads the modulated beam against her partner beam and
//                  resends a rebuilt beam to Bob.
// intercept-resend Eve keeps a entirely and sends half of her own EPR pair.
#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "dcqkd/montecarlo.hpp"
#include "dcqkd/protocol.hpp"

namespace dcqkd {

enum class Strategy { none, single_tap, dual_tap, partial_mix, intercept_resend };

const char* to_string(Strategy s);
/// Accepts the CLI names: none, single-tap, dual-tap, partial-mix, intercept-resend.
std::optional<Strategy> parse_strategy(std::string_view name);

struct EveResult {
  double v_ex = 0.0;
  double v_ey = 0.0;
  double snr_ex = 0.0;
  double snr_ey = 0.0;
  Strategy strategy = Strategy::none;
};

struct AttackImpact {
  double bob_snr_x = 0.0;
  double bob_snr_y = 0.0;
  double monitor_vx = 0.0;
  double monitor_vy = 0.0;
  bool detected = false;
  Flags flags;
};

struct AttackOutcome {
  EveResult eve;
  AttackImpact impact;
};

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

struct SingleTapResult {
  EveResult eve;
  Quadratures bob_snr;  // unchanged from the honest session
};

SingleTapResult single_tap(const ProtocolParams& p);

/// How Eve's first tap couples the Bob -> Alice loss vacuum.
///
/// `same_sign` gives the dual-tap noise term
/// (1-R)(2 eta - 1)^2; it gives the loss vacuum the same sign in Eve's tap and
/// in the beam reaching Alice, which no lossless beamsplitter does.
/// `unitary` uses the reflected port of a proper beamsplitter, for which the
/// term is (1-R) for every eta.
enum class DualTapModel { same_sign, unitary };

EveResult dual_tap(const ProtocolParams& p, DualTapModel model = DualTapModel::same_sign);

AttackImpact full_intercept_resend_monitor(const ProtocolParams& p);

struct PartialMixResult {
  EveResult eve;
  AttackImpact impact;
  Quadratures bob_variances;
  /// Weight 1 - eta^2 (1-R) / (1-eta) of the vacuum Eve adds to the beam sent
  /// back to Bob. Negative values cannot be realized passively; the formulas
  /// are still evaluated and the impact carries unphysical-regime.
  double vacuum_weight = 0.0;
};

PartialMixResult partial_mix(const ProtocolParams& p);

/// Closed-form outcome of any strategy. Quantities the strategy does not
/// define (Eve's SNR and Bob's SNR under intercept-resend) are NaN.
AttackOutcome evaluate_attack(Strategy s, const ProtocolParams& p);

// ---------------------------------------------------------------------------
// Mode graphs
// ---------------------------------------------------------------------------

/// Simultaneous amplitude/phase measurement: split against vacuum on a 50-50
/// beamsplitter, read x on one port and y on the other.
struct HeterodyneReadout {
  LinearGaussianForm x;
  LinearGaussianForm y;
};

HeterodyneReadout heterodyne(const OpticalMode& m, SourceRegistry& registry);

struct SingleTapGraph {
  HonestSession session;
  HeterodyneReadout eve;
};

SingleTapGraph build_single_tap(const ProtocolParams& p, SourceRegistry& registry);

struct DualTapGraph {
  HonestSession session;
  HeterodyneReadout first;   // unmodulated beam, Bob -> Alice
  HeterodyneReadout second;  // modulated beam, Alice -> Bob
  LinearGaussianForm combined_x;  // sqrt(eta (1-R)) first.x - second.x
  LinearGaussianForm combined_y;
};

DualTapGraph build_dual_tap(const ProtocolParams& p, SourceRegistry& registry,
                            DualTapModel model = DualTapModel::same_sign);

struct InterceptResendGraph {
  EprPair bob_pair;
  EprPair eve_pair;
  OpticalMode monitor_b;
  OpticalMode monitor_a;
  MonitorOutputs monitor;
};

InterceptResendGraph build_intercept_resend(const ProtocolParams& p, SourceRegistry& registry);

struct PartialMixGraph {
  EprPair bob_pair;
  EprPair eve_pair;  // a = e (mixed in), b = f (kept)
  SourceId xs;
  SourceId ys;
  OpticalMode at_alice;   // sqrt(eta) a + sqrt(1-eta) e
  OpticalMode eve_kept;   // sqrt(1-eta) a - sqrt(eta) e
  OpticalMode a1;
  LinearGaussianForm eve_x;  // correlation with her attenuated partner beam
  LinearGaussianForm eve_y;
  MonitorOutputs monitor;
  /// Beam returned to Bob and his Bell outputs; only built when the vacuum
  /// weight is non-negative.
  std::optional<OpticalMode> a2;
  std::optional<BellOutputs> bell;
};

PartialMixGraph build_partial_mix(const ProtocolParams& p, SourceRegistry& registry);

/// Outcome evaluated on the mode graph. Bob's partial-mix SNR falls back to
/// the closed form where the graph cannot be built.
AttackOutcome evaluate_attack_graph(Strategy s, const ProtocolParams& p);

/// Graph observables of a strategy paired with their closed-form values, for
/// the Monte Carlo oracle. Under single-tap and dual-tap, Bob's and the
/// monitors' observables are those of the honest session; they are added only
/// when `include_session` is set.
ObservableSet observable_set(Strategy s, const ProtocolParams& p, bool include_session = false);

// ---------------------------------------------------------------------------
// Detection statistics
// ---------------------------------------------------------------------------

/// Smallest number of matched-basis monitor samples for which a one-sided
/// chi-square test on the sample variance, with false-alarm rate
/// `false_alarm` under v_honest, reaches `power` against v_attacked.
std::size_t detection_sample_size(double v_honest, double v_attacked, double false_alarm = 0.01,
                                  double power = 0.99);

/// Power of that test for a given sample count.
double detection_power(double v_honest, double v_attacked, std::size_t samples,
                       double false_alarm = 0.01);

}  // namespace dcqkd
