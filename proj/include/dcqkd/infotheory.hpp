// Shannon rates, secret-key rate and the security threshold search.
#pragma once

#include <functional>

#include "dcqkd/attacks.hpp"
#include "dcqkd/protocol.hpp"

namespace dcqkd {

/// 1/2 log2(1 + snr) bits per symbol. Throws std::domain_error for snr < 0.
double mutual_info(double snr);

struct KeyRateReport {
  double i_ab_x = 0.0;
  double i_ab_y = 0.0;
  double i_ae_x = 0.0;
  double i_ae_y = 0.0;
  double delta_i = 0.0;  // (i_ab_x - i_ae_x) + (i_ab_y - i_ae_y)
  bool secure = false;   // delta_i > 0
};

KeyRateReport secret_key_rate(Quadratures bob_snr, Quadratures eve_snr);

/// Key rate of one strategy at one parameter point (closed forms).
/// Strategies that do not define Eve's information yield NaN.
KeyRateReport key_rate(Strategy s, const ProtocolParams& p);

/// -10 log10(v / snl): dB below the shot-noise limit (positive = below).
double variance_to_db(double v, double snl = 1.0);

enum class ThresholdVerdict { root, always_secure, never_secure };

const char* to_string(ThresholdVerdict v);

struct ThresholdResult {
  ThresholdVerdict verdict = ThresholdVerdict::root;
  double value = 0.0;      // the root, when verdict == root
  bool monotone = true;    // delta_i monotone on the scan grid
  int sign_changes = 0;    // on the scan grid
};

/// Root of f on (lo, hi): scan at `scan_step`, then bisect the first
/// bracketing interval down to `tolerance`. With no sign change the verdict
/// reports whether f stays positive (always_secure) or not (never_secure).
ThresholdResult find_threshold(const std::function<double(double)>& f, double lo, double hi,
                               double scan_step = 1e-2, double tolerance = 1e-10);

/// Channel efficiency eta* at which delta_i changes sign for the given
/// correlation factor and strategy; the other parameters come from p.
ThresholdResult security_threshold(double gamma, Strategy s, const ProtocolParams& p);

}  // namespace dcqkd
