// Sample estimators and their large-n standard errors, used to compare
// Monte Carlo draws with closed-form Gaussian results.
#pragma once

#include <cstddef>
#include <span>

namespace dcqkd::stats {

double mean(std::span<const double> xs);

/// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> xs);

double sample_covariance(std::span<const double> xs, std::span<const double> ys);

/// Pearson correlation coefficient.
double sample_correlation(std::span<const double> xs, std::span<const double> ys);

/// Standard error of the sample variance of n Gaussian draws with variance v.
double variance_standard_error(double v, std::size_t n);

/// Standard error of the sample correlation for bivariate Gaussian data.
double correlation_standard_error(double rho, std::size_t n);

/// SNR implied by a correlation between the sent signal and the outcome:
/// rho^2 / (1 - rho^2).
double snr_from_correlation(double rho);
double snr_standard_error(double rho, std::size_t n);

/// Gaussian mutual information -1/2 log2(1 - rho^2), in bits.
double mutual_info_from_correlation(double rho);
double mutual_info_standard_error(double rho, std::size_t n);

}  // namespace dcqkd::stats
