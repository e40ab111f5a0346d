#include "dcqkd/epr_source.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dcqkd {

namespace {

void require_gamma(double gamma) {
  if (!(gamma >= kMinGamma && gamma <= 1.0)) {
    throw std::domain_error("correlation factor gamma=" + std::to_string(gamma) +
                            " outside [1e-6, 1]");
  }
}

}  // namespace

double epr_single_beam_variance(double gamma) {
  require_gamma(gamma);
  return 0.5 * (gamma + 1.0 / gamma);
}

double epr_correlation_variance(double gamma) {
  require_gamma(gamma);
  return 2.0 * gamma;
}

EprPair make_epr_pair(double gamma, SourceRegistry& registry) {
  require_gamma(gamma);
  const double s = 1.0 / std::sqrt(2.0 * gamma);
  const double t = std::sqrt(gamma / 2.0);

  const SourceId u = registry.add_epr_noise();
  const SourceId v = registry.add_epr_noise();
  const SourceId u2 = registry.add_epr_noise();
  const SourceId v2 = registry.add_epr_noise();

  using F = LinearGaussianForm;
  EprPair pair;
  pair.gamma = gamma;
  pair.a.x = F::of(u, s) + F::of(v, t);
  pair.b.x = F::of(u, -s) + F::of(v, t);
  pair.a.y = F::of(u2, s) + F::of(v2, t);
  pair.b.y = F::of(u2, s) + F::of(v2, -t);
  return pair;
}

}  // namespace dcqkd
