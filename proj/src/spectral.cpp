#include "spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "errors.hpp"

namespace susylame {

namespace {

// FFTW's planner is not reentrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

class ComplexDft {
 public:
  ComplexDft(std::size_t n, int sign) : n_(n) {
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, sign, FFTW_ESTIMATE);
  }
  ~ComplexDft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  ComplexDft(const ComplexDft&) = delete;
  ComplexDft& operator=(const ComplexDft&) = delete;

  std::vector<std::complex<double>> run(std::span<const std::complex<double>> data) {
    for (std::size_t i = 0; i < n_; ++i) {
      in_[i][0] = data[i].real();
      in_[i][1] = data[i].imag();
    }
    fftw_execute(plan_);
    std::vector<std::complex<double>> result(n_);
    for (std::size_t i = 0; i < n_; ++i) result[i] = {out_[i][0], out_[i][1]};
    return result;
  }

 private:
  std::size_t n_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

}  // namespace

std::vector<std::complex<double>> real_fourier_coefficients(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n == 0) throw DomainError("empty sample set");
  std::vector<std::complex<double>> data(samples.begin(), samples.end());
  auto spectrum = ComplexDft(n, FFTW_FORWARD).run(data);
  spectrum.resize(n / 2 + 1);
  for (auto& c : spectrum) c /= static_cast<double>(n);
  return spectrum;
}

GridFunction spectral_derivative(const GridFunction& g, int order, bool antiperiodic) {
  const std::size_t n = g.size();
  if (n < 4) throw DomainError("spectral_derivative needs at least 4 samples");
  if (order < 0) throw DomainError("negative derivative order");
  const double omega = 2.0 * std::numbers::pi / g.period;
  // An antiperiodic function times exp(-i pi x / L) is periodic; its
  // wavenumbers are shifted by half a step.
  const double twist = antiperiodic ? 0.5 : 0.0;

  std::vector<std::complex<double>> data(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phase = -twist * omega * g.abscissa(j);
    data[j] = g.samples[j] * std::polar(1.0, phase);
  }
  auto spectrum = ComplexDft(n, FFTW_FORWARD).run(data);

  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t k = 0; k < n; ++k) {
    auto index = static_cast<std::ptrdiff_t>(k);
    if (index > half) index -= static_cast<std::ptrdiff_t>(n);
    // Drop the unpaired Nyquist mode for odd orders of periodic data.
    if (!antiperiodic && n % 2 == 0 && index == half && order % 2 == 1) {
      spectrum[k] = 0.0;
      continue;
    }
    const double wavenumber = (static_cast<double>(index) + twist) * omega;
    spectrum[k] *= std::pow(std::complex<double>(0.0, wavenumber), order) / static_cast<double>(n);
  }
  const auto back = ComplexDft(n, FFTW_BACKWARD).run(spectrum);

  GridFunction out{g.period, std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const double phase = twist * omega * g.abscissa(j);
    out.samples[j] = (back[j] * std::polar(1.0, phase)).real();
  }
  return out;
}

TrigInterpolant::TrigInterpolant(const GridFunction& g)
    : period_(g.period), omega_(2.0 * std::numbers::pi / g.period) {
  if (g.size() < 4) throw DomainError("trigonometric interpolation needs at least 4 samples");
  auto c = real_fourier_coefficients(g.samples);
  const std::size_t n = g.size();
  for (std::size_t k = 1; k < c.size(); ++k) {
    // The Nyquist mode of an even-length grid is not doubled.
    if (!(n % 2 == 0 && k == n / 2)) c[k] *= 2.0;
  }
  double largest = 0.0;
  for (const auto& v : c) largest = std::max(largest, std::abs(v));
  std::size_t keep = c.size();
  while (keep > 1 && std::abs(c[keep - 1]) <= 1e-17 * largest) --keep;
  c.resize(keep);
  coeffs_ = std::move(c);
}

double TrigInterpolant::operator()(double x) const {
  const std::complex<double> step = std::polar(1.0, omega_ * x);
  std::complex<double> rotor = 1.0;
  double sum = 0.0;
  for (const auto& c : coeffs_) {
    sum += (c * rotor).real();
    rotor *= step;
  }
  return sum;
}

double TrigInterpolant::derivative(double x) const {
  const std::complex<double> step = std::polar(1.0, omega_ * x);
  std::complex<double> rotor = step;
  double sum = 0.0;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) {
    sum += (coeffs_[k] * std::complex<double>(0.0, omega_ * static_cast<double>(k)) * rotor).real();
    rotor *= step;
  }
  return sum;
}

struct GridTransformer::Impl {
  Impl(std::size_t n_, double period) : n(n_), omega(2.0 * std::numbers::pi / period), dft(n_, FFTW_BACKWARD) {}
  std::size_t n;
  double omega;
  std::vector<std::complex<double>> half;  // one-sided coefficients, k = 0..n/2
  mutable ComplexDft dft;
  mutable std::mutex mutex;
};

GridTransformer::GridTransformer(const GridFunction& g)
    : impl_(std::make_unique<Impl>(g.size(), g.period)) {
  if (g.size() < 4) throw DomainError("grid transforms need at least 4 samples");
  impl_->half = real_fourier_coefficients(g.samples);
  const std::size_t n = g.size();
  for (std::size_t k = 1; k < impl_->half.size(); ++k) {
    if (!(n % 2 == 0 && k == n / 2)) impl_->half[k] *= 2.0;
  }
}

GridTransformer::~GridTransformer() = default;

std::vector<double> GridTransformer::operator()(double shift, bool reflected) const {
  const std::size_t n = impl_->n;
  std::vector<std::complex<double>> spectrum(n);
  for (std::size_t k = 0; k < impl_->half.size(); ++k) {
    const auto c = reflected ? std::conj(impl_->half[k]) : impl_->half[k];
    spectrum[k] = c * std::polar(1.0, -impl_->omega * static_cast<double>(k) * shift);
  }
  std::vector<std::complex<double>> values;
  {
    std::lock_guard lock(impl_->mutex);
    values = impl_->dft.run(spectrum);
  }
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = values[j].real();
  return out;
}

}  // namespace susylame
