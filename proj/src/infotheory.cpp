#include "dcqkd/infotheory.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dcqkd {

double mutual_info(double snr) {
  if (!(snr >= 0.0)) throw std::domain_error("mutual_info: snr must be >= 0");
  return 0.5 * std::log2(1.0 + snr);
}

KeyRateReport secret_key_rate(Quadratures bob_snr, Quadratures eve_snr) {
  KeyRateReport r;
  r.i_ab_x = mutual_info(bob_snr.x);
  r.i_ab_y = mutual_info(bob_snr.y);
  r.i_ae_x = mutual_info(eve_snr.x);
  r.i_ae_y = mutual_info(eve_snr.y);
  r.delta_i = (r.i_ab_x - r.i_ae_x) + (r.i_ab_y - r.i_ae_y);
  r.secure = r.delta_i > 0.0;
  return r;
}

KeyRateReport key_rate(Strategy s, const ProtocolParams& p) {
  const AttackOutcome o = evaluate_attack(s, p);
  if (std::isnan(o.eve.snr_ex) || std::isnan(o.impact.bob_snr_x)) {
    const double nan = std::nan("");
    return {nan, nan, nan, nan, nan, false};
  }
  return secret_key_rate({o.impact.bob_snr_x, o.impact.bob_snr_y},
                         {o.eve.snr_ex, o.eve.snr_ey});
}

double variance_to_db(double v, double snl) {
  if (!(v > 0.0 && snl > 0.0)) throw std::domain_error("variance_to_db: inputs must be > 0");
  return -10.0 * std::log10(v / snl);
}

const char* to_string(ThresholdVerdict v) {
  switch (v) {
    case ThresholdVerdict::root: return "root";
    case ThresholdVerdict::always_secure: return "always-secure";
    case ThresholdVerdict::never_secure: return "never-secure";
  }
  return "unknown";
}

ThresholdResult find_threshold(const std::function<double(double)>& f, double lo, double hi,
                               double scan_step, double tolerance) {
  if (!(lo < hi) || !(scan_step > 0.0)) throw std::invalid_argument("find_threshold: bad bracket");
  const auto steps = static_cast<long>(std::floor((hi - lo) / scan_step + 1e-9));
  std::vector<double> xs, fs;
  for (long i = 1; i < steps; ++i) {
    xs.push_back(lo + static_cast<double>(i) * scan_step);
    fs.push_back(f(xs.back()));
  }
  if (xs.size() < 2) throw std::invalid_argument("find_threshold: scan grid too coarse");

  ThresholdResult result;
  bool increasing = true;
  bool decreasing = true;
  std::size_t first_bracket = xs.size();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (fs[i + 1] < fs[i]) increasing = false;
    if (fs[i + 1] > fs[i]) decreasing = false;
    if ((fs[i] > 0.0) != (fs[i + 1] > 0.0)) {
      ++result.sign_changes;
      if (first_bracket == xs.size()) first_bracket = i;
    }
  }
  result.monotone = increasing || decreasing;

  if (result.sign_changes == 0) {
    result.verdict = fs.front() > 0.0 ? ThresholdVerdict::always_secure
                                      : ThresholdVerdict::never_secure;
    result.value = std::nan("");
    return result;
  }

  double a = xs[first_bracket];
  double b = xs[first_bracket + 1];
  const bool positive_at_a = fs[first_bracket] > 0.0;
  while (b - a > tolerance) {
    const double mid = 0.5 * (a + b);
    if ((f(mid) > 0.0) == positive_at_a) {
      a = mid;
    } else {
      b = mid;
    }
  }
  result.verdict = ThresholdVerdict::root;
  result.value = 0.5 * (a + b);
  return result;
}

ThresholdResult security_threshold(double gamma, Strategy s, const ProtocolParams& p) {
  if (s == Strategy::intercept_resend) {
    throw std::invalid_argument("security_threshold: intercept-resend defines no key rate");
  }
  ProtocolParams q = p;
  q.gamma = gamma;
  q.validate();
  return find_threshold(
      [&](double eta) {
        ProtocolParams at = q;
        at.eta = eta;
        return key_rate(s, at).delta_i;
      },
      0.0, 1.0);
}

}  // namespace dcqkd
