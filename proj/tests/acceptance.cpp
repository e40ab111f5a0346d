// Acceptance checks: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dcqkd/attacks.hpp"
#include "dcqkd/infotheory.hpp"
#include "dcqkd/seed.hpp"
#include "dcqkd/sweep.hpp"

using namespace dcqkd;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ProtocolParams params(double gamma, double eta, double r = 0.1) {
  ProtocolParams p;
  p.gamma = gamma;
  p.eta = eta;
  p.r_tap = r;
  return p;
}

bool near(double value, double target, double tol) { return std::abs(value - target) <= tol; }

Outcome crossing_point() {
  bool ok = true;
  std::string detail;
  for (Strategy s : {Strategy::single_tap, Strategy::dual_tap}) {
    for (double g : {1.0, 0.4, 0.05}) {
      const double d = key_rate(s, params(g, 1e-4)).delta_i;
      ok = ok && near(d, -2.58, 0.01);
      if (g == 1.0) detail += std::string(to_string(s)) + fmt(" dI=%.5f ", d);
    }
  }
  return {ok, detail + "(target -2.58 +- 0.01)"};
}

Outcome thresholds(Strategy s, const std::vector<std::pair<double, double>>& targets,
                   const std::vector<double>& tolerances) {
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto [g, expected] = targets[i];
    const ThresholdResult r = security_threshold(g, s, ProtocolParams{});
    ok = ok && r.verdict == ThresholdVerdict::root && near(r.value, expected, tolerances[i]);
    detail += fmt("eta*(g=%.2f)=", g) + fmt("%.4f ", r.value);
  }
  return {ok, detail};
}

Outcome correlation_needed() {
  auto delta = [](double g) { return key_rate(Strategy::single_tap, params(g, 0.25)).delta_i; };
  const ThresholdResult r = find_threshold(delta, 0.0, 1.0, 1e-3);
  bool ok = r.verdict == ThresholdVerdict::root && r.sign_changes == 1 && near(r.value, 0.02, 0.005);
  // delta > 0 exactly below the root on a fine grid.
  for (double g = 1e-3; g < 1.0; g += 1e-3) {
    if (std::abs(g - r.value) < 1e-9) continue;
    ok = ok && ((delta(g) > 0.0) == (g < r.value));
  }
  return {ok, fmt("secure iff gamma < %.5f (target 0.02 +- 0.005)", r.value)};
}

Outcome monitor_point() {
  const Quadratures m = monitor_variances(params(0.2, 0.9));
  const double r = required_tap_ratio(0.2, 0.9, 0.928);
  const bool ok = near(m.x, 0.928, 1e-6) && near(m.y, 0.928, 1e-6) && near(r, 0.1, 1e-6);
  return {ok, fmt("V_RX=%.9f ", m.x) + fmt("V_RY=%.9f ", m.y) + fmt("R=%.9f", r)};
}

Outcome tap_degradation() {
  const double before = correlation_after_tap(params(0.2, 0.9, 0.0));
  const double after = correlation_after_tap(params(0.2, 0.9, 0.1));
  const bool ok = near(before, 6.99, 0.05) && near(after, 5.53, 0.05);
  return {ok, fmt("%.3f dB -> ", before) + fmt("%.3f dB", after)};
}

Outcome partial_mix_point() {
  const ProtocolParams p;  // gamma 0.2, eta 0.9, R 0.1, Vs 10, gamma_E 0.05
  const PartialMixResult r = partial_mix(p);
  const double honest_db = variance_to_db(monitor_variances(p).x);
  const double mixed_db = variance_to_db(r.impact.monitor_vx);
  const double honest_snr = bob_snr(p).x;
  const bool ok = near(honest_db, 0.32, 0.01) && near(mixed_db, 0.11, 0.01) &&
                  near(r.impact.bob_snr_x, 0.15, 0.005) && near(r.impact.bob_snr_y, 0.15, 0.005) &&
                  near(honest_snr, 10.8, 0.05) && r.impact.flags.has(Flag::unphysical_regime);
  return {ok, fmt("monitor %.4f dB -> ", honest_db) + fmt("%.4f dB, Bob SNR ", mixed_db) +
                  fmt("%.4f vs honest ", r.impact.bob_snr_x) + fmt("%.3f, flags=", honest_snr) +
                  r.impact.flags.to_string()};
}

Outcome dual_tap_cancellation() {
  std::mt19937_64 rng(derive_seed(1, 8));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ProtocolParams p =
        params(0.001 + 0.999 * unit(rng), 0.001 + 0.999 * unit(rng), 0.99 * unit(rng));
    SourceRegistry reg;
    const DualTapGraph g = build_dual_tap(p, reg);
    for (const auto* q : {&g.session.epr.a.x, &g.session.epr.a.y}) {
      for (const auto& [id, c] : q->coefficients()) {
        worst = std::max({worst, std::abs(g.combined_x.coefficient(id)),
                          std::abs(g.combined_y.coefficient(id))});
      }
    }
  }
  return {worst <= 1e-12, fmt("max |coefficient| over 100 triples = %.3g", worst)};
}

Outcome oracle_equivalence() {
  constexpr std::size_t kPoints = 20;
  constexpr std::size_t kShots = 1'000'000;
  std::mt19937_64 rng(derive_seed(1, 9));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CrosscheckJob> jobs;
  std::size_t index = 0;
  for (Strategy s : {Strategy::none, Strategy::single_tap, Strategy::dual_tap,
                     Strategy::partial_mix, Strategy::intercept_resend}) {
    for (std::size_t i = 0; i < kPoints; ++i) {
      ProtocolParams p;
      p.gamma = 0.01 + 0.99 * unit(rng);
      p.eta = 0.05 + 0.9 * unit(rng);
      p.r_tap = 0.01 + 0.49 * unit(rng);
      p.vs_x = 1.0 + 19.0 * unit(rng);
      p.vs_y = 1.0 + 19.0 * unit(rng);
      p.gamma_e = 0.01 + 0.99 * unit(rng);
      jobs.push_back({i, s, observable_set(s, p), derive_seed(derive_seed(1, 10), index++)});
    }
  }
  const CrosscheckReport report = run_crosscheck(jobs, kShots);
  std::size_t mi = 0;
  for (const auto& e : report.entries) mi += e.deviation.statistic == "mutual-info";
  const auto worst = report.worst(1);
  std::string detail = std::to_string(report.entries.size()) + " statistics (" +
                       std::to_string(mi) + " mutual-info), max " +
                       fmt("%.3f sigma", report.max_z) + ", " +
                       std::to_string(report.over_3_sigma) + " beyond 3 sigma" +
                       fmt(" (%.1f expected by chance)",
                           0.0027 * static_cast<double>(report.entries.size())) +
                       ", none beyond 4 sigma: " + (report.passed ? "yes" : "no");
  if (!worst.empty()) {
    detail += "; worst " + std::string(to_string(worst[0].attack)) + " point " +
              std::to_string(worst[0].point) + " " + worst[0].deviation.observable + " " +
              worst[0].deviation.statistic;
  }
  return {report.over_3_sigma == 0, detail};
}

Outcome invariants() {
  bool ok = true;
  std::string detail;

  // Vacuum through every beamsplitter/attenuator stays at the SNL; total
  // noise power is conserved.
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    for (auto conv : {BeamsplitterConvention::real, BeamsplitterConvention::i_phase}) {
      SourceRegistry reg;
      const OpticalMode a = make_vacuum_mode(reg);
      const OpticalMode b = make_vacuum_mode(reg);
      const auto [c, d] = beamsplit(a, b, t, conv);
      for (const auto* q : {&c.x, &c.y, &d.x, &d.y}) ok = ok && near(variance(*q, reg), 1.0, 1e-12);
      ok = ok && std::abs(covariance(c.x, d.x, reg)) < 1e-12;
      const OpticalMode e = attenuate(a, t, reg);
      ok = ok && near(variance(e.x, reg), 1.0, 1e-12);

      const SourceId s = reg.add_signal(7.0);
      const OpticalMode m{LinearGaussianForm::of(s), LinearGaussianForm::of(s, -2.0)};
      const auto [f, g] = beamsplit(m, a, t, conv);
      const double in = 7.0 + 28.0 + 2.0;
      const double out = variance(f.x, reg) + variance(f.y, reg) + variance(g.x, reg) +
                         variance(g.y, reg);
      ok = ok && near(out, in, 1e-12);
    }
  }
  detail += ok ? "SNL/unitarity ok; " : "SNL/unitarity FAILED; ";

  bool epr_ok = true;
  for (double g = 0.01; g <= 1.0 + 1e-12; g += 0.01) {
    SourceRegistry reg;
    const EprPair pair = make_epr_pair(std::min(g, 1.0), reg);
    const double gg = std::min(g, 1.0);
    epr_ok = epr_ok && near(variance(pair.a.x + pair.b.x, reg), 2 * gg, 1e-12) &&
             near(variance(pair.a.y - pair.b.y, reg), 2 * gg, 1e-12) &&
             near(variance(pair.a.x, reg), (1 + gg * gg) / (2 * gg), 1e-12) &&
             near(variance(pair.b.y, reg), (1 + gg * gg) / (2 * gg), 1e-12);
  }
  detail += epr_ok ? "EPR ok; " : "EPR FAILED; ";

  bool monitor_ok = true;
  for (double g = 0.05; g <= 1.0; g += 0.05) {
    for (double eta = 0.05; eta <= 1.0; eta += 0.05) {
      for (double r = 0.05; r < 1.0; r += 0.1) {
        for (double ge : {0.01, 0.1, 0.5, 1.0}) {
          ProtocolParams p = params(g, eta, r);
          p.gamma_e = ge;
          const AttackImpact im = full_intercept_resend_monitor(p);
          monitor_ok = monitor_ok && im.monitor_vx >= 1.0 - 1e-12 && im.monitor_vy >= 1.0 - 1e-12;
        }
      }
    }
  }
  detail += monitor_ok ? "intercept-resend monitor >= SNL; " : "intercept-resend monitor FAILED; ";

  SweepSpec spec;
  spec.sweep = SweepAxis{Axis::eta, 0.1, 0.9, 0.2};
  spec.attacks = {Strategy::none, Strategy::single_tap, Strategy::dual_tap, Strategy::partial_mix,
                  Strategy::intercept_resend};
  spec.mc_samples = 5000;
  spec.base_seed = 123;
  std::ostringstream a, b;
  write_csv(run_sweep(spec), a);
  write_csv(run_sweep(spec), b);
  const bool det_ok = a.str() == b.str() && simulate_session(ProtocolParams{}, 20000, 5).digest() ==
                                                simulate_session(ProtocolParams{}, 20000, 5).digest();
  detail += det_ok ? "seeded runs deterministic" : "determinism FAILED";

  return {ok && epr_ok && monitor_ok && det_ok, detail};
}

Outcome curve_shape() {
  bool ok = true;
  std::string detail;
  for (Strategy s : {Strategy::single_tap, Strategy::dual_tap}) {
    for (double g : {1.0, 0.4, 0.05}) {
      const ThresholdResult r = find_threshold(
          [&](double eta) { return key_rate(s, params(g, eta)).delta_i; }, 0.0, 1.0, 1e-3);
      double max_jump = 0.0;
      double previous = key_rate(s, params(g, 1e-3)).delta_i;
      for (int i = 2; i < 1000; ++i) {
        const double v = key_rate(s, params(g, i * 1e-3)).delta_i;
        max_jump = std::max(max_jump, std::abs(v - previous));
        previous = v;
      }
      ok = ok && r.sign_changes == 1 && std::isfinite(previous) && max_jump < 0.05;
      detail += std::string(to_string(s)) + fmt("(g=%.2f):", g) +
                std::to_string(r.sign_changes) + " ";
    }
  }
  return {ok, detail + "sign changes, steps < 0.05 bit"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "crossing point at eta -> 0", crossing_point},
      {2, "single-tap thresholds",
       [] {
         return thresholds(Strategy::single_tap, {{1.0, 0.5}, {0.4, 0.46}, {0.05, 0.33}},
                           {0.001, 0.01, 0.01});
       }},
      {3, "dual-tap thresholds",
       [] {
         return thresholds(Strategy::dual_tap, {{1.0, 0.5}, {0.4, 0.474}, {0.05, 0.46}},
                           {0.001, 0.005, 0.01});
       }},
      {4, "correlation needed at eta 0.25", correlation_needed},
      {5, "monitor working point", monitor_point},
      {6, "correlation lost to taps", tap_degradation},
      {7, "partial mix point", partial_mix_point},
      {8, "dual-tap cancellation", dual_tap_cancellation},
      {9, "Monte Carlo oracle equivalence", oracle_equivalence},
      {10, "invariant suite", invariants},
      {11, "key-rate curve shape", curve_shape},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d: %s  %s: %s [%.1fs]\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
