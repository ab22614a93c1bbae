#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace susylame {

/// Samples of a real function on the uniform grid x_j = j * period / N,
/// j = 0..N-1, covering one period [0, period).
struct GridFunction {
  double period = 0.0;
  std::vector<double> samples;

  std::size_t size() const { return samples.size(); }
  double spacing() const { return period / static_cast<double>(samples.size()); }
  double abscissa(std::size_t j) const { return static_cast<double>(j) * spacing(); }
};

/// Sample f over one period on n points.
template <class F>
GridFunction sample_grid(F&& f, double period, std::size_t n) {
  GridFunction g{period, std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) g.samples[j] = f(g.abscissa(j));
  return g;
}

/// Discrete Fourier coefficients c_k = (1/N) sum_j f_j exp(-2 pi i j k / N),
/// k = 0..N/2, of real samples.
std::vector<std::complex<double>> real_fourier_coefficients(std::span<const double> samples);

/// d^order/dx^order of the band-limited interpolant of g, sampled on the same
/// grid. With antiperiodic = true, g is treated as g(x + period) = -g(x).
GridFunction spectral_derivative(const GridFunction& g, int order = 1, bool antiperiodic = false);

/// Trigonometric interpolant of a periodic GridFunction. Coefficients below
/// roundoff relative to the largest one are dropped, which keeps evaluation
/// cheap for analytic data.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const GridFunction& g);

  double period() const { return period_; }
  std::size_t terms() const { return coeffs_.size(); }

  double operator()(double x) const;
  double derivative(double x) const;

 private:
  double period_;
  double omega_;
  // c_0, 2 c_1, 2 c_2, ... so that f(x) = Re sum_k coeffs_[k] e^{i k omega x}.
  std::vector<std::complex<double>> coeffs_;
};

/// Samples g(r (x_j - shift)), r = -1 when reflected, on the grid of g,
/// where g is the trigonometric interpolant of the samples. Works by a phase
/// shift of the spectrum and one inverse transform per call.
class GridTransformer {
 public:
  explicit GridTransformer(const GridFunction& g);
  ~GridTransformer();
  GridTransformer(const GridTransformer&) = delete;
  GridTransformer& operator=(const GridTransformer&) = delete;

  std::vector<double> operator()(double shift, bool reflected) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace susylame
