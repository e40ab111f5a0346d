// Linear Gaussian forms over independent sources, and the linear-optical
// elements that act on them.
//
// Every quadrature observable in the protocol is an exact linear combination
// of independent zero-mean Gaussian sources (vacuum fluctuations, EPR mixing
// sources and Alice's classical signals). Variances are in shot-noise units:
// a vacuum quadrature has variance 1.
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dcqkd {

enum class SourceKind { vacuum_noise, epr_noise, signal };

const char* to_string(SourceKind kind);

struct SourceId {
  std::uint32_t value = 0;
  friend auto operator<=>(const SourceId&, const SourceId&) = default;
};

/// Thrown when a form references a source that the registry does not know.
class UnknownSourceError : public std::invalid_argument {
 public:
  explicit UnknownSourceError(SourceId id);
  SourceId id() const { return id_; }

 private:
  SourceId id_;
};

/// Owns the variance and kind of every independent source of one session.
/// Ids are dense and handed out in creation order, so two graphs built by the
/// same sequence of operations assign identical ids.
class SourceRegistry {
 public:
  SourceId add_vacuum();
  SourceId add_epr_noise();
  SourceId add_signal(double variance);

  bool contains(SourceId id) const { return id.value < entries_.size(); }
  double variance(SourceId id) const;
  SourceKind kind(SourceId id) const;
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    SourceKind kind;
    double variance;
  };
  SourceId add(SourceKind kind, double variance);

  std::vector<Entry> entries_;
};

/// Sparse linear combination sum_i c_i * source_i plus a steady-state offset.
/// The offset never enters a variance; it is kept so that bright-beam means
/// can be carried alongside the fluctuations.
class LinearGaussianForm {
 public:
  using Coefficients = std::map<SourceId, double>;

  LinearGaussianForm() = default;
  static LinearGaussianForm of(SourceId id, double coefficient = 1.0);

  double coefficient(SourceId id) const;
  const Coefficients& coefficients() const { return coefficients_; }
  double offset() const { return offset_; }
  void set_offset(double offset) { offset_ = offset; }

  /// Overwrites one coefficient; a zero value removes the entry.
  void set_coefficient(SourceId id, double coefficient);

  LinearGaussianForm& operator+=(const LinearGaussianForm& other);
  LinearGaussianForm& operator-=(const LinearGaussianForm& other);
  LinearGaussianForm& operator*=(double scale);

  friend LinearGaussianForm operator+(LinearGaussianForm lhs, const LinearGaussianForm& rhs) {
    return lhs += rhs;
  }
  friend LinearGaussianForm operator-(LinearGaussianForm lhs, const LinearGaussianForm& rhs) {
    return lhs -= rhs;
  }
  friend LinearGaussianForm operator-(LinearGaussianForm form) { return form *= -1.0; }
  friend LinearGaussianForm operator*(double scale, LinearGaussianForm form) {
    return form *= scale;
  }
  friend LinearGaussianForm operator*(LinearGaussianForm form, double scale) {
    return form *= scale;
  }

 private:
  Coefficients coefficients_;
  double offset_ = 0.0;
};

/// One optical mode: amplitude quadrature x and phase quadrature y.
struct OpticalMode {
  LinearGaussianForm x;
  LinearGaussianForm y;
};

OpticalMode operator+(const OpticalMode& a, const OpticalMode& b);
OpticalMode operator-(const OpticalMode& a, const OpticalMode& b);
OpticalMode operator*(double scale, const OpticalMode& m);

enum class BeamsplitterConvention {
  /// out1 = sqrt(T) a + sqrt(1-T) b,  out2 = sqrt(1-T) a - sqrt(T) b
  real,
  /// out1 = sqrt(T) a + i sqrt(1-T) b, out2 = sqrt(1-T) a - i sqrt(T) b
  i_phase,
};

double variance(const LinearGaussianForm& f, const SourceRegistry& registry);
double covariance(const LinearGaussianForm& f, const LinearGaussianForm& g,
                  const SourceRegistry& registry);

/// Variance contributed by sources of one kind only.
double variance_of_kind(const LinearGaussianForm& f, const SourceRegistry& registry,
                        SourceKind kind);

/// Signal power over noise power, split by source kind.
double signal_to_noise(const LinearGaussianForm& f, const SourceRegistry& registry);

OpticalMode make_vacuum_mode(SourceRegistry& registry);

std::pair<OpticalMode, OpticalMode> beamsplit(
    const OpticalMode& a, const OpticalMode& b, double transmittance,
    BeamsplitterConvention convention = BeamsplitterConvention::real);

/// Loss: beamsplit against a fresh vacuum and keep the transmitted port.
OpticalMode attenuate(const OpticalMode& m, double transmittance, SourceRegistry& registry);

/// Displaces x by the signal source xs and y by ys with unit coupling.
OpticalMode modulate(const OpticalMode& m, SourceId xs, SourceId ys,
                     const SourceRegistry& registry);

/// Phase-space rotation by angle (radians).
OpticalMode rotate(const OpticalMode& m, double angle);

/// Column-major Monte Carlo draw: column k holds n evaluations of forms[k].
struct SampleMatrix {
  std::size_t shots = 0;
  std::vector<std::vector<double>> columns;
};

/// Draws every registered source once per shot from N(0, variance) and
/// evaluates all forms on the shared draw. Offsets are not added. The output
/// depends only on (registry, forms, n, seed).
SampleMatrix sample(const SourceRegistry& registry, std::span<const LinearGaussianForm> forms,
                    std::size_t n, std::uint64_t seed);

}  // namespace dcqkd
