#include "dcqkd/statistics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dcqkd::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_covariance(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("sample size mismatch");
  if (xs.size() < 2) throw std::invalid_argument("need at least two samples");
  const double mx = mean(xs);
  const double my = mean(ys);
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) sum += (xs[i] - mx) * (ys[i] - my);
  return sum / static_cast<double>(xs.size() - 1);
}

double sample_variance(std::span<const double> xs) { return sample_covariance(xs, xs); }

double sample_correlation(std::span<const double> xs, std::span<const double> ys) {
  return sample_covariance(xs, ys) / std::sqrt(sample_variance(xs) * sample_variance(ys));
}

double variance_standard_error(double v, std::size_t n) {
  return v * std::sqrt(2.0 / static_cast<double>(n - 1));
}

double correlation_standard_error(double rho, std::size_t n) {
  return (1.0 - rho * rho) / std::sqrt(static_cast<double>(n));
}

double snr_from_correlation(double rho) { return rho * rho / (1.0 - rho * rho); }

double snr_standard_error(double rho, std::size_t n) {
  // d/drho [rho^2 / (1 - rho^2)] = 2 rho / (1 - rho^2)^2
  const double slope = 2.0 * std::abs(rho) / ((1.0 - rho * rho) * (1.0 - rho * rho));
  return slope * correlation_standard_error(rho, n);
}

double mutual_info_from_correlation(double rho) { return -0.5 * std::log2(1.0 - rho * rho); }

double mutual_info_standard_error(double rho, std::size_t n) {
  const double slope = std::abs(rho) / ((1.0 - rho * rho) * std::numbers::ln2);
  return slope * correlation_standard_error(rho, n);
}

}  // namespace dcqkd::stats
