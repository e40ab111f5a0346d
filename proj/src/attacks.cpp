#include "dcqkd/attacks.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dcqkd {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Flags impact_flags(const ProtocolParams& p, const AttackImpact& impact) {
  Flags flags = configuration_flags(p);
  if (impact.detected) flags.set(Flag::detected);
  return flags;
}

AttackImpact honest_impact(const ProtocolParams& p) {
  AttackImpact impact;
  const Quadratures bob = bob_snr(p);
  const Quadratures monitor = monitor_variances(p);
  impact.bob_snr_x = bob.x;
  impact.bob_snr_y = bob.y;
  impact.monitor_vx = monitor.x;
  impact.monitor_vy = monitor.y;
  impact.detected = monitor_detects(p, monitor);
  impact.flags = impact_flags(p, impact);
  return impact;
}

double partial_mix_vacuum_weight(const ProtocolParams& p) {
  return 1.0 - p.eta * p.eta * (1.0 - p.r_tap) / (1.0 - p.eta);
}

bool partial_mix_realizable(const ProtocolParams& p) {
  return p.eta < 1.0 && partial_mix_vacuum_weight(p) >= 0.0;
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::single_tap: return "single-tap";
    case Strategy::dual_tap: return "dual-tap";
    case Strategy::partial_mix: return "partial-mix";
    case Strategy::intercept_resend: return "intercept-resend";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::none, Strategy::single_tap, Strategy::dual_tap,
                     Strategy::partial_mix, Strategy::intercept_resend}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

SingleTapResult single_tap(const ProtocolParams& p) {
  p.validate();
  const double eta = p.eta;
  const double keep = 1.0 - p.r_tap;
  const double va = epr_single_beam_variance(p.gamma);
  const double noise = keep * eta * (1.0 - eta) * va + 2.0 - keep * eta + keep * eta * eta;

  SingleTapResult r;
  r.eve.strategy = Strategy::single_tap;
  r.eve.v_ex = 0.5 * (noise + (1.0 - eta) * p.vs_x);
  r.eve.v_ey = 0.5 * (noise + (1.0 - eta) * p.vs_y);
  r.eve.snr_ex = (1.0 - eta) * p.vs_x / noise;
  r.eve.snr_ey = (1.0 - eta) * p.vs_y / noise;
  r.bob_snr = bob_snr(p);
  return r;
}

EveResult dual_tap(const ProtocolParams& p, DualTapModel model) {
  p.validate();
  const double eta = p.eta;
  const double r = p.r_tap;
  const double root_keep = std::sqrt(1.0 - r);
  const double bracket = eta * root_keep - (1.0 - eta) * root_keep;
  const double loss_vacuum = model == DualTapModel::same_sign ? bracket * bracket : 1.0 - r;
  const double noise = loss_vacuum + 1.0 + eta * (1.0 - r) + eta + r * (1.0 - eta);

  EveResult e;
  e.strategy = Strategy::dual_tap;
  e.v_ex = 0.5 * (noise + (1.0 - eta) * p.vs_x);
  e.v_ey = 0.5 * (noise + (1.0 - eta) * p.vs_y);
  e.snr_ex = (1.0 - eta) * p.vs_x / noise;
  e.snr_ey = (1.0 - eta) * p.vs_y / noise;
  return e;
}

AttackImpact full_intercept_resend_monitor(const ProtocolParams& p) {
  p.validate();
  const double ve = epr_single_beam_variance(p.gamma_e);
  const double vb = epr_single_beam_variance(p.gamma);
  const double v = 0.5 * p.r_tap * p.eta * (ve + vb) + 1.0 - p.r_tap * p.eta;

  AttackImpact impact;
  impact.bob_snr_x = kNaN;
  impact.bob_snr_y = kNaN;
  impact.monitor_vx = v;
  impact.monitor_vy = v;
  impact.detected = monitor_detects(p, {v, v});
  impact.flags = impact_flags(p, impact);
  return impact;
}

PartialMixResult partial_mix(const ProtocolParams& p) {
  p.validate();
  const double eta = p.eta;
  const double r = p.r_tap;
  const double keep = 1.0 - r;
  const double corr = epr_correlation_variance(p.gamma);
  const double corr_e = epr_correlation_variance(p.gamma_e);
  const double va = epr_single_beam_variance(p.gamma);
  const double ve = epr_single_beam_variance(p.gamma_e);

  PartialMixResult out;
  out.vacuum_weight = partial_mix_vacuum_weight(p);

  const double eve_noise = keep * (1.0 - eta) * corr_e + keep * eta * va + keep * eta + 2.0 * r;
  out.eve.strategy = Strategy::partial_mix;
  out.eve.v_ex = 0.5 * (eve_noise + p.vs_x);
  out.eve.v_ey = 0.5 * (eve_noise + p.vs_y);
  out.eve.snr_ex = p.vs_x / eve_noise;
  out.eve.snr_ey = p.vs_y / eve_noise;

  const double monitor = 0.5 * (r * eta * corr + r * (1.0 - eta) * ve + 2.0 - r - r * eta);

  const double eta2 = eta * eta;
  const double bob_noise = keep * eta2 * corr + eta2 * eta * keep / (1.0 - eta) * ve + 2.0 -
                           keep * eta2 - eta2 * keep / (1.0 - eta);
  out.bob_variances = {0.5 * (bob_noise + eta * p.vs_x), 0.5 * (bob_noise + eta * p.vs_y)};

  auto& impact = out.impact;
  impact.bob_snr_x = eta * p.vs_x / bob_noise;
  impact.bob_snr_y = eta * p.vs_y / bob_noise;
  impact.monitor_vx = monitor;
  impact.monitor_vy = monitor;
  impact.detected = monitor_detects(p, {monitor, monitor});
  impact.flags = impact_flags(p, impact);
  if (!partial_mix_realizable(p)) impact.flags.set(Flag::unphysical_regime);
  return out;
}

AttackOutcome evaluate_attack(Strategy s, const ProtocolParams& p) {
  switch (s) {
    case Strategy::none:
      return {EveResult{}, honest_impact(p)};
    case Strategy::single_tap:
      return {single_tap(p).eve, honest_impact(p)};
    case Strategy::dual_tap:
      return {dual_tap(p), honest_impact(p)};
    case Strategy::partial_mix: {
      PartialMixResult r = partial_mix(p);
      return {r.eve, r.impact};
    }
    case Strategy::intercept_resend: {
      EveResult eve{kNaN, kNaN, kNaN, kNaN, Strategy::intercept_resend};
      return {eve, full_intercept_resend_monitor(p)};
    }
  }
  throw std::invalid_argument("unknown strategy");
}

HeterodyneReadout heterodyne(const OpticalMode& m, SourceRegistry& registry) {
  auto [first, second] = beamsplit(m, make_vacuum_mode(registry), 0.5);
  return {std::move(first.x), std::move(second.y)};
}

SingleTapGraph build_single_tap(const ProtocolParams& p, SourceRegistry& registry) {
  SingleTapGraph g;
  g.session = build_honest_session(p, registry);
  g.eve = heterodyne(g.session.backward.lost, registry);
  return g;
}

DualTapGraph build_dual_tap(const ProtocolParams& p, SourceRegistry& registry,
                            DualTapModel model) {
  DualTapGraph g;
  g.session = build_honest_session(p, registry);
  const HonestSession& s = g.session;

  OpticalMode unmodulated = s.forward.lost;
  if (model == DualTapModel::same_sign) {
    unmodulated = std::sqrt(1.0 - p.eta) * s.epr.a + std::sqrt(p.eta) * s.forward.vacuum;
  }
  g.first = heterodyne(unmodulated, registry);
  g.second = heterodyne(s.backward.lost, registry);

  const double scale = std::sqrt(p.eta * (1.0 - p.r_tap));
  g.combined_x = scale * g.first.x - g.second.x;
  g.combined_y = scale * g.first.y - g.second.y;
  return g;
}

InterceptResendGraph build_intercept_resend(const ProtocolParams& p, SourceRegistry& registry) {
  p.validate();
  InterceptResendGraph g;
  g.bob_pair = make_epr_pair(p.gamma, registry);
  g.eve_pair = make_epr_pair(p.gamma_e, registry);

  TapOutputs r1 = tap(g.bob_pair.b, p.r_tap, registry);
  g.monitor_b = std::move(r1.reflected);
  ChannelOutputs forward = channel(g.eve_pair.a, p.eta, registry);
  TapOutputs r2 = tap(forward.transmitted, p.r_tap, registry);
  g.monitor_a = std::move(r2.reflected);
  g.monitor = monitor_correlation(g.monitor_a, g.monitor_b, p.eta, registry);
  return g;
}

PartialMixGraph build_partial_mix(const ProtocolParams& p, SourceRegistry& registry) {
  p.validate();
  PartialMixGraph g;
  g.bob_pair = make_epr_pair(p.gamma, registry);
  g.eve_pair = make_epr_pair(p.gamma_e, registry);
  g.xs = registry.add_signal(p.vs_x);
  g.ys = registry.add_signal(p.vs_y);

  TapOutputs r1 = tap(g.bob_pair.b, p.r_tap, registry);

  auto [at_alice, eve_kept] = beamsplit(g.bob_pair.a, g.eve_pair.a, p.eta);
  g.at_alice = std::move(at_alice);
  g.eve_kept = std::move(eve_kept);

  TapOutputs r2 = tap(g.at_alice, p.r_tap, registry);
  g.a1 = modulate(r2.kept, g.xs, g.ys, registry);

  const OpticalMode partner =
      attenuate(g.eve_pair.b, (1.0 - p.r_tap) * (1.0 - p.eta), registry);
  g.eve_x = kInvSqrt2 * (g.a1.x + partner.x);
  g.eve_y = kInvSqrt2 * (g.a1.y - partner.y);

  g.monitor = monitor_correlation(r2.reflected, r1.reflected, p.eta, registry);

  if (partial_mix_realizable(p)) {
    const double gain = p.eta * std::sqrt(1.0 - p.r_tap) / std::sqrt(1.0 - p.eta);
    const double vacuum = std::sqrt(partial_mix_vacuum_weight(p));
    const double signal = std::sqrt(p.eta);
    const OpticalMode v = make_vacuum_mode(registry);
    OpticalMode resent{gain * g.eve_kept.x + vacuum * v.x + LinearGaussianForm::of(g.xs, signal),
                       gain * g.eve_kept.y + vacuum * v.y + LinearGaussianForm::of(g.ys, signal)};
    const OpticalMode b1 = balance_idler(r1.kept, p.eta, registry);
    g.bell = bell_detect(resent, b1);
    g.a2 = std::move(resent);
  }
  return g;
}

AttackOutcome evaluate_attack_graph(Strategy s, const ProtocolParams& p) {
  SourceRegistry reg;
  AttackOutcome out;
  out.eve.strategy = s;

  auto set_bob = [&](const BellOutputs& bell) {
    out.impact.bob_snr_x = signal_to_noise(bell.sum_x, reg);
    out.impact.bob_snr_y = signal_to_noise(bell.diff_y, reg);
  };
  auto set_monitor = [&](const MonitorOutputs& m) {
    out.impact.monitor_vx = variance(m.x, reg);
    out.impact.monitor_vy = variance(m.y, reg);
  };
  auto set_eve = [&](const LinearGaussianForm& x, const LinearGaussianForm& y) {
    out.eve.v_ex = variance(x, reg);
    out.eve.v_ey = variance(y, reg);
    out.eve.snr_ex = signal_to_noise(x, reg);
    out.eve.snr_ey = signal_to_noise(y, reg);
  };

  switch (s) {
    case Strategy::none: {
      const HonestSession g = build_honest_session(p, reg);
      set_bob(g.bell);
      set_monitor(g.monitor);
      break;
    }
    case Strategy::single_tap: {
      const SingleTapGraph g = build_single_tap(p, reg);
      set_eve(g.eve.x, g.eve.y);
      set_bob(g.session.bell);
      set_monitor(g.session.monitor);
      break;
    }
    case Strategy::dual_tap: {
      const DualTapGraph g = build_dual_tap(p, reg);
      set_eve(g.combined_x, g.combined_y);
      set_bob(g.session.bell);
      set_monitor(g.session.monitor);
      break;
    }
    case Strategy::partial_mix: {
      const PartialMixGraph g = build_partial_mix(p, reg);
      set_eve(g.eve_x, g.eve_y);
      set_monitor(g.monitor);
      if (g.bell) {
        set_bob(*g.bell);
      } else {
        const PartialMixResult closed = partial_mix(p);
        out.impact.bob_snr_x = closed.impact.bob_snr_x;
        out.impact.bob_snr_y = closed.impact.bob_snr_y;
      }
      break;
    }
    case Strategy::intercept_resend: {
      const InterceptResendGraph g = build_intercept_resend(p, reg);
      out.eve = {kNaN, kNaN, kNaN, kNaN, Strategy::intercept_resend};
      out.impact.bob_snr_x = kNaN;
      out.impact.bob_snr_y = kNaN;
      set_monitor(g.monitor);
      break;
    }
  }
  out.impact.detected =
      monitor_detects(p, {out.impact.monitor_vx, out.impact.monitor_vy});
  out.impact.flags = impact_flags(p, out.impact);
  if (s == Strategy::partial_mix && !partial_mix_realizable(p)) {
    out.impact.flags.set(Flag::unphysical_regime);
  }
  return out;
}

ObservableSet observable_set(Strategy s, const ProtocolParams& p, bool include_session) {
  ObservableSet set;
  auto& reg = set.registry;
  auto& obs = set.observables;

  auto signal_if = [](double vs, SourceId id) -> std::optional<SourceId> {
    if (vs > 0.0) return id;
    return std::nullopt;
  };
  auto add_bob = [&](const BellOutputs& bell, SourceId xs, SourceId ys, Quadratures v,
                     Quadratures snr) {
    obs.push_back({"bob_sum_x", bell.sum_x, v.x, signal_if(p.vs_x, xs), snr.x});
    obs.push_back({"bob_diff_y", bell.diff_y, v.y, signal_if(p.vs_y, ys), snr.y});
  };
  auto add_monitor = [&](const MonitorOutputs& m, double vx, double vy) {
    obs.push_back({"monitor_x", m.x, vx, std::nullopt, 0.0});
    obs.push_back({"monitor_y", m.y, vy, std::nullopt, 0.0});
  };
  auto add_eve = [&](const LinearGaussianForm& x, const LinearGaussianForm& y, SourceId xs,
                     SourceId ys, const EveResult& e) {
    obs.push_back({"eve_x", x, e.v_ex, signal_if(p.vs_x, xs), e.snr_ex});
    obs.push_back({"eve_y", y, e.v_ey, signal_if(p.vs_y, ys), e.snr_ey});
  };

  auto add_session = [&](const HonestSession& g) {
    const Quadratures m = monitor_variances(p);
    add_bob(g.bell, g.xs, g.ys, bob_variances(p), bob_snr(p));
    add_monitor(g.monitor, m.x, m.y);
  };

  switch (s) {
    case Strategy::none: {
      const HonestSession g = build_honest_session(p, reg);
      add_session(g);
      break;
    }
    case Strategy::single_tap: {
      const SingleTapGraph g = build_single_tap(p, reg);
      const SingleTapResult closed = single_tap(p);
      add_eve(g.eve.x, g.eve.y, g.session.xs, g.session.ys, closed.eve);
      if (include_session) add_session(g.session);
      break;
    }
    case Strategy::dual_tap: {
      const DualTapGraph g = build_dual_tap(p, reg);
      add_eve(g.combined_x, g.combined_y, g.session.xs, g.session.ys, dual_tap(p));
      if (include_session) add_session(g.session);
      break;
    }
    case Strategy::partial_mix: {
      const PartialMixGraph g = build_partial_mix(p, reg);
      const PartialMixResult closed = partial_mix(p);
      add_eve(g.eve_x, g.eve_y, g.xs, g.ys, closed.eve);
      add_monitor(g.monitor, closed.impact.monitor_vx, closed.impact.monitor_vy);
      if (g.bell) {
        add_bob(*g.bell, g.xs, g.ys, closed.bob_variances,
                {closed.impact.bob_snr_x, closed.impact.bob_snr_y});
      }
      break;
    }
    case Strategy::intercept_resend: {
      const InterceptResendGraph g = build_intercept_resend(p, reg);
      const AttackImpact closed = full_intercept_resend_monitor(p);
      add_monitor(g.monitor, closed.monitor_vx, closed.monitor_vy);
      break;
    }
  }
  return set;
}

double detection_power(double v_honest, double v_attacked, std::size_t samples,
                       double false_alarm) {
  if (samples < 2) throw std::invalid_argument("detection_power: need at least 2 samples");
  const boost::math::chi_squared dist(static_cast<double>(samples - 1));
  // Reject when (n-1) S^2 / v_honest exceeds the (1 - alpha) quantile.
  const double critical = boost::math::quantile(boost::math::complement(dist, false_alarm));
  return boost::math::cdf(boost::math::complement(dist, critical * v_honest / v_attacked));
}

std::size_t detection_sample_size(double v_honest, double v_attacked, double false_alarm,
                                  double power) {
  if (!(v_honest > 0.0 && v_attacked > v_honest)) {
    throw std::domain_error("detection_sample_size: need 0 < v_honest < v_attacked");
  }
  if (!(false_alarm > 0.0 && false_alarm < 1.0 && power > 0.0 && power < 1.0)) {
    throw std::domain_error("detection_sample_size: probabilities must be in (0, 1)");
  }
  std::size_t hi = 2;
  while (detection_power(v_honest, v_attacked, hi, false_alarm) < power) {
    if (hi > (std::size_t{1} << 40)) throw std::overflow_error("detection_sample_size: too large");
    hi *= 2;
  }
  std::size_t lo = hi / 2;  // power(lo) < target unless lo < 2
  if (lo < 2) return hi;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (detection_power(v_honest, v_attacked, mid, false_alarm) >= power) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace dcqkd
