#include "dcqkd/montecarlo.hpp"

#include <cmath>

#include "dcqkd/statistics.hpp"

namespace dcqkd {

std::vector<Deviation> compare_with_samples(const ObservableSet& set, std::size_t n,
                                            std::uint64_t seed) {
  std::vector<LinearGaussianForm> forms;
  for (const auto& o : set.observables) {
    forms.push_back(o.form);
    if (o.signal) forms.push_back(LinearGaussianForm::of(*o.signal));
  }
  const SampleMatrix draws = sample(set.registry, forms, n, seed);

  std::vector<Deviation> out;
  std::size_t column = 0;
  for (const auto& o : set.observables) {
    const auto& values = draws.columns[column++];
    const double v = stats::sample_variance(values);
    const double se_v = stats::variance_standard_error(o.expected_variance, n);
    out.push_back({o.name, "variance", o.expected_variance, v, se_v,
                   std::abs(v - o.expected_variance) / se_v});

    if (!o.signal) continue;
    const auto& signal = draws.columns[column++];
    // The delta-method errors vanish at rho = 0; nothing to compare there.
    if (o.expected_snr <= 0.0) continue;
    const double rho_hat = stats::sample_correlation(signal, values);
    const double rho = std::sqrt(o.expected_snr / (1.0 + o.expected_snr));

    const double snr = stats::snr_from_correlation(rho_hat);
    const double se_snr = stats::snr_standard_error(rho, n);
    out.push_back({o.name, "snr", o.expected_snr, snr, se_snr,
                   std::abs(snr - o.expected_snr) / se_snr});

    const double mi_expected = 0.5 * std::log2(1.0 + o.expected_snr);
    const double mi = stats::mutual_info_from_correlation(rho_hat);
    const double se_mi = stats::mutual_info_standard_error(rho, n);
    out.push_back({o.name, "mutual-info", mi_expected, mi, se_mi,
                   std::abs(mi - mi_expected) / se_mi});
  }
  return out;
}

}  // namespace dcqkd
