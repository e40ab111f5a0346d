#include "dcqkd/gaussian_core.hpp"

#include <cmath>
#include <random>
#include <string>

namespace dcqkd {

namespace {

void require_transmittance(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error(std::string(what) + ": transmittance " + std::to_string(t) +
                            " outside [0, 1]");
  }
}

void require_registered(const LinearGaussianForm& f, const SourceRegistry& registry) {
  for (const auto& [id, c] : f.coefficients()) {
    if (!registry.contains(id)) throw UnknownSourceError(id);
  }
}

}  // namespace

const char* to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::vacuum_noise: return "vacuum-noise";
    case SourceKind::epr_noise: return "epr-noise";
    case SourceKind::signal: return "signal";
  }
  return "unknown";
}

UnknownSourceError::UnknownSourceError(SourceId id)
    : std::invalid_argument("source " + std::to_string(id.value) + " is not registered"),
      id_(id) {}

SourceId SourceRegistry::add(SourceKind kind, double variance) {
  entries_.push_back({kind, variance});
  return SourceId{static_cast<std::uint32_t>(entries_.size() - 1)};
}

SourceId SourceRegistry::add_vacuum() { return add(SourceKind::vacuum_noise, 1.0); }

SourceId SourceRegistry::add_epr_noise() { return add(SourceKind::epr_noise, 1.0); }

SourceId SourceRegistry::add_signal(double variance) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw std::domain_error("signal variance must be finite and >= 0");
  }
  return add(SourceKind::signal, variance);
}

double SourceRegistry::variance(SourceId id) const {
  if (!contains(id)) throw UnknownSourceError(id);
  return entries_[id.value].variance;
}

SourceKind SourceRegistry::kind(SourceId id) const {
  if (!contains(id)) throw UnknownSourceError(id);
  return entries_[id.value].kind;
}

LinearGaussianForm LinearGaussianForm::of(SourceId id, double coefficient) {
  LinearGaussianForm f;
  f.set_coefficient(id, coefficient);
  return f;
}

double LinearGaussianForm::coefficient(SourceId id) const {
  auto it = coefficients_.find(id);
  return it == coefficients_.end() ? 0.0 : it->second;
}

void LinearGaussianForm::set_coefficient(SourceId id, double coefficient) {
  if (coefficient == 0.0) {
    coefficients_.erase(id);
  } else {
    coefficients_[id] = coefficient;
  }
}

LinearGaussianForm& LinearGaussianForm::operator+=(const LinearGaussianForm& other) {
  for (const auto& [id, c] : other.coefficients_) coefficients_[id] += c;
  offset_ += other.offset_;
  return *this;
}

LinearGaussianForm& LinearGaussianForm::operator-=(const LinearGaussianForm& other) {
  for (const auto& [id, c] : other.coefficients_) coefficients_[id] -= c;
  offset_ -= other.offset_;
  return *this;
}

LinearGaussianForm& LinearGaussianForm::operator*=(double scale) {
  if (scale == 0.0) {
    coefficients_.clear();
  } else {
    for (auto& [id, c] : coefficients_) c *= scale;
  }
  offset_ *= scale;
  return *this;
}

OpticalMode operator+(const OpticalMode& a, const OpticalMode& b) { return {a.x + b.x, a.y + b.y}; }

OpticalMode operator-(const OpticalMode& a, const OpticalMode& b) { return {a.x - b.x, a.y - b.y}; }

OpticalMode operator*(double scale, const OpticalMode& m) { return {scale * m.x, scale * m.y}; }

double covariance(const LinearGaussianForm& f, const LinearGaussianForm& g,
                  const SourceRegistry& registry) {
  require_registered(f, registry);
  require_registered(g, registry);
  double sum = 0.0;
  // Both maps are ordered by id: merge-walk them.
  auto it_f = f.coefficients().begin();
  auto it_g = g.coefficients().begin();
  while (it_f != f.coefficients().end() && it_g != g.coefficients().end()) {
    if (it_f->first < it_g->first) {
      ++it_f;
    } else if (it_g->first < it_f->first) {
      ++it_g;
    } else {
      sum += it_f->second * it_g->second * registry.variance(it_f->first);
      ++it_f;
      ++it_g;
    }
  }
  return sum;
}

double variance(const LinearGaussianForm& f, const SourceRegistry& registry) {
  require_registered(f, registry);
  double sum = 0.0;
  for (const auto& [id, c] : f.coefficients()) sum += c * c * registry.variance(id);
  return sum;
}

double variance_of_kind(const LinearGaussianForm& f, const SourceRegistry& registry,
                        SourceKind kind) {
  require_registered(f, registry);
  double sum = 0.0;
  for (const auto& [id, c] : f.coefficients()) {
    if (registry.kind(id) == kind) sum += c * c * registry.variance(id);
  }
  return sum;
}

double signal_to_noise(const LinearGaussianForm& f, const SourceRegistry& registry) {
  const double signal = variance_of_kind(f, registry, SourceKind::signal);
  const double noise = variance(f, registry) - signal;
  return signal / noise;
}

OpticalMode make_vacuum_mode(SourceRegistry& registry) {
  return {LinearGaussianForm::of(registry.add_vacuum()),
          LinearGaussianForm::of(registry.add_vacuum())};
}

std::pair<OpticalMode, OpticalMode> beamsplit(const OpticalMode& a, const OpticalMode& b,
                                              double transmittance,
                                              BeamsplitterConvention convention) {
  require_transmittance(transmittance, "beamsplit");
  const double t = std::sqrt(transmittance);
  const double r = std::sqrt(1.0 - transmittance);
  if (convention == BeamsplitterConvention::real) {
    return {t * a + r * b, r * a - t * b};
  }
  // Multiplying a mode by i maps (x, y) to (-y, x).
  OpticalMode first{t * a.x - r * b.y, t * a.y + r * b.x};
  OpticalMode second{r * a.x + t * b.y, r * a.y - t * b.x};
  return {std::move(first), std::move(second)};
}

OpticalMode attenuate(const OpticalMode& m, double transmittance, SourceRegistry& registry) {
  require_transmittance(transmittance, "attenuate");
  return beamsplit(m, make_vacuum_mode(registry), transmittance).first;
}

OpticalMode modulate(const OpticalMode& m, SourceId xs, SourceId ys,
                     const SourceRegistry& registry) {
  for (SourceId id : {xs, ys}) {
    if (!registry.contains(id)) throw UnknownSourceError(id);
    if (registry.kind(id) != SourceKind::signal) {
      throw std::invalid_argument("modulate: source " + std::to_string(id.value) +
                                  " is not a signal source");
    }
  }
  return {m.x + LinearGaussianForm::of(xs), m.y + LinearGaussianForm::of(ys)};
}

OpticalMode rotate(const OpticalMode& m, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * m.x - s * m.y, s * m.x + c * m.y};
}

SampleMatrix sample(const SourceRegistry& registry, std::span<const LinearGaussianForm> forms,
                    std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample: n must be >= 1");

  struct Term {
    std::uint32_t source;
    double coefficient;
  };
  std::vector<std::vector<Term>> compiled;
  compiled.reserve(forms.size());
  for (const auto& f : forms) {
    require_registered(f, registry);
    auto& terms = compiled.emplace_back();
    for (const auto& [id, c] : f.coefficients()) terms.push_back({id.value, c});
  }

  std::vector<double> sigma(registry.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    sigma[i] = std::sqrt(registry.variance(SourceId{static_cast<std::uint32_t>(i)}));
  }

  SampleMatrix out;
  out.shots = n;
  out.columns.assign(forms.size(), std::vector<double>(n));

  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> draw(sigma.size());
  for (std::size_t shot = 0; shot < n; ++shot) {
    for (std::size_t i = 0; i < draw.size(); ++i) draw[i] = sigma[i] * normal(engine);
    for (std::size_t k = 0; k < compiled.size(); ++k) {
      double value = 0.0;
      for (const auto& term : compiled[k]) value += term.coefficient * draw[term.source];
      out.columns[k][shot] = value;
    }
  }
  return out;
}

}  // namespace dcqkd
