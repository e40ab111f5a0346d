// Bright EPR beams with anticorrelated amplitudes and correlated phases.
#pragma once

#include "dcqkd/gaussian_core.hpp"

namespace dcqkd {

/// Lower bound on the correlation factor; gamma -> 0 is the infinite-energy limit.
inline constexpr double kMinGamma = 1e-6;

struct EprPair {
  OpticalMode a;  // signal beam, sent out on the round trip
  OpticalMode b;  // idler beam, retained by the source owner
  double gamma = 1.0;
};

/// Single-beam quadrature variance (gamma + 1/gamma) / 2.
double epr_single_beam_variance(double gamma);

/// Correlation variance V(Xa + Xb) = V(Ya - Yb) = 2 gamma.
double epr_correlation_variance(double gamma);

/// Builds the pair from four fresh unit sources u, v, u', v':
///   Xa = s u + t v,   Xb = -s u + t v,
///   Ya = s u' + t v', Yb =  s u' - t v',
/// with s = 1/sqrt(2 gamma), t = sqrt(gamma / 2).
/// Throws std::domain_error unless gamma is in [kMinGamma, 1].
EprPair make_epr_pair(double gamma, SourceRegistry& registry);

}  // namespace dcqkd
