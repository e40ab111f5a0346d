#include <doctest.h>

#include <cmath>

#include "dcqkd/protocol.hpp"

using namespace dcqkd;

namespace {

double oracle_bob_noise(double g, double eta, double r) {
  return (1 - r) * eta * eta * 2 * g + 2 * (1 - eta * eta + r * eta * eta);
}

double oracle_monitor(double g, double eta, double r) { return 0.5 * r * eta * 2 * g + 1 - r * eta; }

ProtocolParams at(double g, double eta, double r) {
  ProtocolParams p;
  p.gamma = g;
  p.eta = eta;
  p.r_tap = r;
  return p;
}

}  // namespace

TEST_CASE("working point") {
  const ProtocolParams p;
  const SessionResult s = evaluate_session(p);
  CHECK(s.v_bx == doctest::Approx(4.9168));
  CHECK(s.snr_bx == doctest::Approx(10.7965).epsilon(1e-5));
  CHECK(s.snr_by == doctest::Approx(s.snr_bx));
  CHECK(s.v_rx == doctest::Approx(0.928).epsilon(1e-12));
  CHECK(s.flags.empty());
}

TEST_CASE("gamma 1, lossless, no taps: Bob sees vacuum plus signal") {
  const ProtocolParams p = at(1.0, 1.0, 0.0);
  const Quadratures v = bob_variances(p);
  CHECK(v.x == doctest::Approx(1.0 + 0.5 * p.vs_x));
  CHECK(bob_snr(p).x == doctest::Approx(p.vs_x / 2.0));
  ProtocolParams quiet = p;
  quiet.vs_x = quiet.vs_y = 0.0;
  CHECK(bob_variances(quiet).x == doctest::Approx(1.0));
}

TEST_CASE("closed forms agree with an independent transcription") {
  for (double g : {0.01, 0.2, 0.7, 1.0}) {
    for (double eta : {0.05, 0.5, 0.9, 1.0}) {
      for (double r : {0.0, 0.1, 0.4}) {
        const ProtocolParams p = at(g, eta, r);
        const double noise = oracle_bob_noise(g, eta, r);
        CHECK(bob_snr(p).x == doctest::Approx(eta * p.vs_x / noise).epsilon(1e-12));
        CHECK(bob_variances(p).y == doctest::Approx(0.5 * (noise + eta * p.vs_y)).epsilon(1e-12));
        CHECK(monitor_variances(p).x == doctest::Approx(oracle_monitor(g, eta, r)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("mode graph reproduces the closed forms") {
  for (double g : {0.01, 0.2, 0.7, 1.0}) {
    for (double eta : {0.05, 0.5, 0.9, 1.0}) {
      for (double r : {0.0, 0.1, 0.4}) {
        const ProtocolParams p = at(g, eta, r);
        const SessionResult a = evaluate_session(p);
        const SessionResult b = evaluate_session_graph(p);
        CHECK(b.v_bx == doctest::Approx(a.v_bx).epsilon(1e-12));
        CHECK(b.v_by == doctest::Approx(a.v_by).epsilon(1e-12));
        CHECK(b.snr_bx == doctest::Approx(a.snr_bx).epsilon(1e-12));
        CHECK(b.snr_by == doctest::Approx(a.snr_by).epsilon(1e-12));
        CHECK(b.v_rx == doctest::Approx(a.v_rx).epsilon(1e-12));
        CHECK(b.v_ry == doctest::Approx(a.v_ry).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("lossless untapped round trip returns the signal beam untouched") {
  SourceRegistry reg;
  const HonestSession s = build_honest_session(at(0.3, 1.0, 0.0), reg);
  for (const auto& [id, c] : s.a1.x.coefficients()) {
    CHECK(s.a2().x.coefficient(id) == doctest::Approx(c));
  }
  CHECK(variance(s.bell.sum_x, reg) ==
        doctest::Approx(0.5 * (2 * 0.3 + reg.variance(s.xs))));
}

TEST_CASE("monitor variance grows with tap and falls with loss") {
  double previous = 0.0;
  for (double r = 0.0; r < 0.95; r += 0.05) {
    const double v = monitor_variances(at(0.2, 0.9, r)).x;
    if (r > 0.0) CHECK(v < previous);
    previous = v;
  }
  previous = 0.0;
  for (double eta = 0.05; eta <= 1.0; eta += 0.05) {
    const double v = monitor_variances(at(0.2, eta, 0.1)).x;
    if (eta > 0.05) CHECK(v < previous);
    previous = v;
    CHECK(v <= 1.0);
  }
}

TEST_CASE("required tap ratio inverts the monitor variance") {
  CHECK(required_tap_ratio(0.2, 0.9, 0.928) == doctest::Approx(0.1).epsilon(1e-9));
  // Stronger correlation needs a smaller tap for the same bound.
  CHECK(required_tap_ratio(0.05, 0.9, 0.928) == doctest::Approx(2 * -0.072 / (0.9 * (0.1 - 2))));
  CHECK(required_tap_ratio(0.05, 0.9, 0.928) == doctest::Approx(0.0842).epsilon(1e-3));
  CHECK(required_tap_ratio(0.2, 0.9, 1.0 - 1e-12) < 1e-10);
  for (double r : {0.05, 0.3, 0.8}) {
    const ProtocolParams p = at(0.35, 0.7, r);
    CHECK(required_tap_ratio(0.35, 0.7, monitor_variances(p).x) == doctest::Approx(r));
  }
  CHECK_THROWS_AS(required_tap_ratio(1.0, 0.9, 0.928), std::domain_error);
  CHECK_THROWS_AS(required_tap_ratio(0.2, 0.9, 1.0), std::domain_error);
  CHECK_THROWS_AS(required_tap_ratio(0.2, 0.1, 0.5), std::out_of_range);
}

TEST_CASE("correlation lost to the taps") {
  CHECK(correlation_after_tap(at(0.2, 0.9, 0.0)) == doctest::Approx(6.99).epsilon(1e-3));
  CHECK(correlation_after_tap(at(0.2, 0.9, 0.1)) == doctest::Approx(5.53).epsilon(1e-3));
  CHECK(correlation_after_tap(at(1.0, 0.9, 0.1)) == doctest::Approx(0.0));
}

TEST_CASE("parameter validation names the key") {
  ProtocolParams p;
  p.eta = 1.5;
  try {
    p.validate();
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK(e.key() == "eta");
  }
  p = ProtocolParams{};
  p.r_tap = 1.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = ProtocolParams{};
  p.gamma = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
}

TEST_CASE("configuration flags") {
  CHECK(configuration_flags(at(0.2, 0.9, 0.0)).has(Flag::monitor_blind));
  CHECK(configuration_flags(at(0.2, 0.9, 0.05)).has(Flag::below_monitor_threshold));
  CHECK_FALSE(configuration_flags(at(0.2, 0.9, 0.2)).has(Flag::below_monitor_threshold));
  Flags f;
  f.set(Flag::unphysical_regime);
  f.set(Flag::detected);
  CHECK(f.to_string() == "unphysical-regime|detected");
  CHECK(Flags::parse(f.to_string()) == f);
  CHECK(Flags::parse("").empty());
  CHECK_THROWS(Flags::parse("bogus"));
}

TEST_CASE("simulated session matches the working point") {
  const ProtocolParams p;
  const SessionTranscript t = simulate_session(p, 200000, 7);
  const double snr = bob_snr(p).x;
  // SNR standard error from the correlation estimate.
  const double rho = std::sqrt(snr / (1 + snr));
  const double se = 2 * rho / std::pow(1 - rho * rho, 2) * (1 - rho * rho) / std::sqrt(200000.0);
  CHECK(std::abs(t.empirical.snr_bx - snr) < 3 * se);
  CHECK(std::abs(t.empirical.snr_by - snr) < 3 * se);
  CHECK(t.digest() == simulate_session(p, 200000, 7).digest());
  CHECK(t.digest() != simulate_session(p, 200000, 8).digest());
  CHECK_THROWS(simulate_session(p, 999, 7));
}

TEST_CASE("quiet source at gamma 1 yields unit Bob variance in simulation") {
  ProtocolParams p = at(1.0, 1.0, 0.0);
  p.vs_x = p.vs_y = 0.0;
  const SessionTranscript t = simulate_session(p, 100000, 3);
  CHECK(t.empirical.v_bx == doctest::Approx(1.0).epsilon(0.02));
  CHECK(t.empirical.v_by == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("monitor basis check") {
  const ProtocolParams p;
  const MonitorBasisCheck c = simulate_monitor_basis_check(p, 100000, 11);
  CHECK(c.shots == 100000);
  CHECK(std::abs(static_cast<double>(c.matched) - 50000.0) < 5 * std::sqrt(25000.0));
  CHECK(c.v_matched_x == doctest::Approx(0.928).epsilon(0.03));
  CHECK(c.v_matched_y == doctest::Approx(0.928).epsilon(0.03));
  CHECK(c.v_mismatched >= 1.0);
}
