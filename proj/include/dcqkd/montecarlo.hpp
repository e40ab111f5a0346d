// Monte Carlo oracle: sample a mode graph and compare empirical statistics
// with independently computed closed-form values, in standard-error units.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcqkd/gaussian_core.hpp"

namespace dcqkd {

/// One observable of a mode graph paired with the closed-form values it
/// should reproduce.
struct CheckedObservable {
  std::string name;
  LinearGaussianForm form;
  double expected_variance = 0.0;
  /// Signal source whose draw is correlated with the observable. When set,
  /// expected_snr is checked through the sample correlation, together with
  /// the Gaussian mutual information 1/2 log2(1 + snr).
  std::optional<SourceId> signal;
  double expected_snr = 0.0;
};

struct ObservableSet {
  SourceRegistry registry;
  std::vector<CheckedObservable> observables;
};

struct Deviation {
  std::string observable;
  std::string statistic;  // "variance", "snr" or "mutual-info"
  double expected = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
  double z = 0.0;  // |empirical - expected| / standard_error
};

/// Every checked statistic of every observable, in declaration order.
std::vector<Deviation> compare_with_samples(const ObservableSet& set, std::size_t n,
                                            std::uint64_t seed);

}  // namespace dcqkd
