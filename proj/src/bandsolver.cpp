#include "bandsolver.hpp"

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "errors.hpp"

namespace susylame {

namespace odeint = boost::numeric::odeint;

std::string to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "antiperiodic";
}

Boundary expected_boundary(int n) {
  return ((n + 1) / 2) % 2 == 0 ? Boundary::periodic : Boundary::antiperiodic;
}

PeriodicPotential::PeriodicPotential(double period, std::function<double(double)> evaluator,
                                     SmoothnessHint hint)
    : period_(period), evaluator_(std::move(evaluator)), hint_(hint) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw DomainError("potential period must be positive and finite");
  }
  if (!evaluator_) throw DomainError("potential evaluator is empty");
  for (double probe : {0.0, 0.1234567, 0.3141593, 0.5, 0.7071068, 0.9}) {
    const double x = probe * period;
    const double a = evaluator_(x);
    const double b = evaluator_(x + period);
    if (!std::isfinite(a) || std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) {
      std::ostringstream msg;
      msg << "potential is not periodic with period " << period << ": V(" << x << ")=" << a
          << " but V(x+period)=" << b;
      throw DomainError(msg.str());
    }
  }
  even_ = true;
  for (int k = 1; k < 64 && even_; ++k) {
    const double x = period * k / 128.0;
    const double a = evaluator_(x);
    even_ = std::abs(a - evaluator_(-x)) <= 1e-9 * std::max(1.0, std::abs(a));
  }
}

std::pair<double, double> PeriodicPotential::range(std::size_t probes) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t j = 0; j < probes; ++j) {
    const double value = evaluator_(period_ * static_cast<double>(j) / static_cast<double>(probes));
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  return {lo, hi};
}

namespace {

template <std::size_t N>
using State = std::array<double, N>;

// y'' = (V - E) y for two fundamental solutions, optionally with their
// energy derivatives z'' = (V - E) z - y.
template <std::size_t N>
struct HillSystem {
  const PeriodicPotential& v;
  double energy;

  void operator()(const State<N>& s, State<N>& d, double x) const {
    const double q = v(x) - energy;
    for (std::size_t i = 0; i < std::min<std::size_t>(N, 4); i += 2) {
      d[i] = s[i + 1];
      d[i + 1] = q * s[i];
    }
    if constexpr (N == 8) {
      d[4] = s[5];
      d[5] = q * s[4] - s[0];
      d[6] = s[7];
      d[7] = q * s[6] - s[2];
    }
  }
};

template <std::size_t N>
struct SingleSolution {
  const PeriodicPotential& v;
  double energy;
  void operator()(const State<N>& s, State<N>& d, double x) const {
    d[0] = s[1];
    d[1] = (v(x) - energy) * s[0];
  }
};

template <std::size_t N, class System>
void integrate_interval(const System& system, State<N>& state, double from, double to, double& dt,
                        const BandSolverOptions& opts, double energy) {
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State<N>>>(
      opts.absolute_tolerance, opts.relative_tolerance);
  const double min_step = 1e-14 * std::max(1.0, to - from);
  double x = from;
  long attempts = 0;
  while (x < to) {
    const bool last = dt >= to - x;
    double h = last ? to - x : dt;
    const double before = x;
    const auto result = stepper.try_step(system, state, x, h);
    ++attempts;
    if (result == odeint::success) {
      if (last) x = to;
      dt = h;
    } else {
      dt = h;
      if (dt < min_step) {
        std::ostringstream msg;
        msg << "integrator step underflow at x=" << before << " (E=" << energy << ", step=" << dt
            << ")";
        throw NumericalError(msg.str());
      }
    }
    if (attempts > 2'000'000) {
      std::ostringstream msg;
      msg << "integrator exceeded step budget at x=" << x << " (E=" << energy << ")";
      throw NumericalError(msg.str());
    }
  }
}

constexpr double kTouchTolerance = 1e-7;
constexpr double kDegenerateWidth = 1e-8;
constexpr double kPolishTolerance = 1e-13;
constexpr double kPolishStall = 1e-9;

struct ScanSample {
  double energy;
  double value;
  double slope;
};

struct Crossing {
  double energy;
  Boundary boundary;
  bool degenerate;
};

double level_of(Boundary b) { return b == Boundary::periodic ? 2.0 : -2.0; }

std::vector<ScanSample> scan_discriminant(const PeriodicPotential& v, double lo, double hi,
                                          int intervals, const BandSolverOptions& opts) {
  std::vector<ScanSample> samples(static_cast<std::size_t>(intervals) + 1);
  const double step = (hi - lo) / intervals;
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const double e = k + 1 == samples.size() ? hi : lo + static_cast<double>(k) * step;
      const auto d = discriminant_with_slope(v, e, opts);
      samples[k] = {e, d.value, *d.slope};
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  if (workers == 1) {
    fill(0, samples.size());
    return samples;
  }
  std::vector<std::future<void>> jobs;
  const std::size_t chunk = (samples.size() + workers - 1) / workers;
  for (std::size_t begin = 0; begin < samples.size(); begin += chunk) {
    jobs.push_back(std::async(std::launch::async, fill, begin, std::min(samples.size(), begin + chunk)));
  }
  for (auto& job : jobs) job.get();
  return samples;
}

// Root of g on [a, b] where g(a) and g(b) differ in sign (zero counts as
// nonnegative).
template <class G>
double bisect(G&& g, double a, double b, bool a_negative, double tolerance) {
  for (int i = 0; i < 200 && b - a > tolerance; ++i) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if ((g(mid) < 0.0) == a_negative) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// Newton steps on Delta - level at a tighter integrator tolerance. Near a
// narrow gap the slope of Delta is small and the integration error of the
// scan tolerance shows up magnified in the edge energy.
double polish(const PeriodicPotential& v, double root, double level, double a, double b,
              const BandSolverOptions& opts) {
  BandSolverOptions tight = opts;
  tight.relative_tolerance = std::min(opts.relative_tolerance, kPolishTolerance);
  tight.absolute_tolerance = std::min(opts.absolute_tolerance, kPolishTolerance * 1e-2);
  double e = root;
  double step = INFINITY;
  for (int i = 0; i < 8; ++i) {
    const auto d = discriminant_with_slope(v, e, tight);
    const double slope = *d.slope;
    if (!(std::abs(slope) > 0.0)) return root;
    step = (d.value - level) / slope;
    e -= step;
    if (!(e > a && e < b)) return root;
    if (std::abs(step) <= opts.energy_tolerance) return e;
  }
  // steps stalled at the integration noise floor
  return std::abs(step) < kPolishStall ? e : root;
}

// For an even potential the discriminant factors over the half period h:
// Delta - 2 = 4 y1'(h) y2(h) and Delta + 2 = 4 y1(h) y2'(h). The edges of a
// nearly closed gap are then simple roots of the two factors, which resolves
// gaps far narrower than the square root of the integration noise in Delta.
std::optional<std::array<double, 2>> split_touching(const PeriodicPotential& v, double a, double b,
                                                    Boundary boundary,
                                                    const BandSolverOptions& opts) {
  BandSolverOptions tight = opts;
  tight.relative_tolerance = std::min(opts.relative_tolerance, kPolishTolerance);
  tight.absolute_tolerance = std::min(opts.absolute_tolerance, kPolishTolerance * 1e-2);
  auto half = [&](double e) {
    State<4> s{1.0, 0.0, 0.0, 1.0};
    double dt = v.period() / 64.0;
    integrate_interval<4>(HillSystem<4>{v, e}, s, 0.0, 0.5 * v.period(), dt, tight, e);
    return s;
  };
  // periodic: y1'(h) and y2(h); antiperiodic: y1(h) and y2'(h)
  const std::array<std::size_t, 2> index = boundary == Boundary::periodic
                                               ? std::array<std::size_t, 2>{1, 2}
                                               : std::array<std::size_t, 2>{0, 3};
  const auto sa = half(a);
  const auto sb = half(b);
  std::array<double, 2> roots{};
  for (std::size_t f = 0; f < 2; ++f) {
    const std::size_t i = index[f];
    if ((sa[i] < 0.0) == (sb[i] < 0.0)) return std::nullopt;
    roots[f] = bisect([&](double e) { return half(e)[i]; }, a, b, sa[i] < 0.0,
                      opts.energy_tolerance);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<Crossing> locate_crossings(const PeriodicPotential& v,
                                       const std::vector<ScanSample>& samples,
                                       const BandSolverOptions& opts) {
  std::vector<Crossing> found;
  auto trace_at = [&](double e) { return monodromy_trace(v, e, opts); };

  // Delta is monotone between its critical points, so each monotone piece
  // crosses each of the levels +2 and -2 at most once.
  auto scan_piece = [&](double a, double fa, double b, double fb) {
    for (Boundary boundary : {Boundary::periodic, Boundary::antiperiodic}) {
      const double level = level_of(boundary);
      const bool a_negative = fa - level < 0.0;
      if (a_negative == (fb - level < 0.0)) continue;
      const double root = bisect([&](double e) { return trace_at(e) - level; }, a, b, a_negative,
                                 opts.energy_tolerance);
      found.push_back({polish(v, root, level, a, b, opts), boundary, false});
    }
  };

  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const auto& left = samples[k];
    const auto& right = samples[k + 1];
    if ((left.slope < 0.0) == (right.slope < 0.0)) {
      scan_piece(left.energy, left.value, right.energy, right.value);
      continue;
    }
    // A critical point of Delta: the interior of a gap, open or closed.
    const double critical = bisect(
        [&](double e) { return *discriminant_with_slope(v, e, opts).slope; }, left.energy,
        right.energy, left.slope < 0.0, opts.energy_tolerance);
    const double extreme = trace_at(critical);
    const double excess = std::abs(extreme) - 2.0;
    if (std::abs(excess) <= kTouchTolerance && v.even()) {
      const Boundary boundary = extreme > 0.0 ? Boundary::periodic : Boundary::antiperiodic;
      if (const auto roots = split_touching(v, left.energy, right.energy, boundary, opts)) {
        const bool closed = (*roots)[1] - (*roots)[0] <= kDegenerateWidth;
        found.push_back({(*roots)[0], boundary, closed});
        found.push_back({(*roots)[1], boundary, closed});
        continue;
      }
    }
    if (excess <= 0.0 && excess >= -kTouchTolerance) {
      const Boundary boundary = extreme > 0.0 ? Boundary::periodic : Boundary::antiperiodic;
      found.push_back({critical, boundary, true});
      found.push_back({critical, boundary, true});
      continue;
    }
    scan_piece(left.energy, left.value, critical, extreme);
    scan_piece(critical, extreme, right.energy, right.value);
  }

  std::stable_sort(found.begin(), found.end(),
                   [](const Crossing& a, const Crossing& b) { return a.energy < b.energy; });
  for (std::size_t i = 1; i < found.size(); ++i) {
    if (found[i].boundary == found[i - 1].boundary &&
        found[i].energy - found[i - 1].energy <= kDegenerateWidth) {
      found[i].degenerate = found[i - 1].degenerate = true;
    }
  }
  return found;
}

bool pattern_holds(const std::vector<Crossing>& found, std::size_t upto) {
  for (std::size_t i = 0; i < std::min(upto, found.size()); ++i) {
    if (found[i].boundary != expected_boundary(static_cast<int>(i))) return false;
  }
  return true;
}

}  // namespace

Monodromy monodromy(const PeriodicPotential& v, double energy, const BandSolverOptions& opts) {
  if (!std::isfinite(energy)) throw DomainError("non-finite energy");
  State<4> s{1.0, 0.0, 0.0, 1.0};
  double dt = v.period() / 64.0;
  integrate_interval<4>(HillSystem<4>{v, energy}, s, 0.0, v.period(), dt, opts, energy);
  return {s[0], s[1], s[2], s[3]};
}

double monodromy_trace(const PeriodicPotential& v, double energy, const BandSolverOptions& opts) {
  return monodromy(v, energy, opts).trace();
}

Discriminant discriminant_with_slope(const PeriodicPotential& v, double energy,
                                     const BandSolverOptions& opts) {
  if (!std::isfinite(energy)) throw DomainError("non-finite energy");
  State<8> s{1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
  double dt = v.period() / 64.0;
  integrate_interval<8>(HillSystem<8>{v, energy}, s, 0.0, v.period(), dt, opts, energy);
  return {energy, s[0] + s[3], s[4] + s[7]};
}

double edge_residual(const PeriodicPotential& v, const BandEdge& edge,
                     const BandSolverOptions& opts) {
  BandSolverOptions tight = opts;
  tight.relative_tolerance = std::min(opts.relative_tolerance, kPolishTolerance);
  tight.absolute_tolerance = std::min(opts.absolute_tolerance, kPolishTolerance * 1e-2);
  const Monodromy mono = monodromy(v, edge.energy, tight);
  const double scale =
      std::max({1.0, std::abs(mono.y1), std::abs(mono.dy1), std::abs(mono.y2), std::abs(mono.dy2)});
  return std::abs(mono.trace() - level_of(edge.boundary)) / scale;
}

double edge_ceiling(const PeriodicPotential& v, int count) {
  const auto [lo, hi] = v.range();
  const int harmonic = count / 2;
  const double free = std::pow(harmonic * std::numbers::pi / v.period(), 2);
  return hi + free + 1.0;
}

std::vector<BandEdge> band_edges(const PeriodicPotential& v, int count) {
  return band_edges(v, count, edge_ceiling(v, count));
}

std::vector<BandEdge> band_edges(const PeriodicPotential& v, int count, double e_max,
                                 const BandSolverOptions& opts) {
  if (count < 1) throw DomainError("band_edges: count must be >= 1");
  const auto [v_min, v_max] = v.range();
  const double e_min = v_min - 1.0;
  if (!(e_max > e_min)) throw DomainError("band_edges: e_max lies below the potential minimum");

  std::vector<Crossing> found;
  int intervals = opts.scan_intervals;
  bool consistent = false;
  for (int attempt = 0; attempt <= opts.max_refinements; ++attempt, intervals *= 2) {
    const auto samples = scan_discriminant(v, e_min, e_max, intervals, opts);
    found = locate_crossings(v, samples, opts);
    if (pattern_holds(found, static_cast<std::size_t>(count))) {
      consistent = true;
      break;
    }
  }
  if (!consistent) {
    throw NumericalError("band_edges: discriminant sign pattern inconsistent after refinement");
  }
  if (found.size() < static_cast<std::size_t>(count)) {
    std::ostringstream msg;
    msg << "found " << found.size() << " of " << count << " band edges below E=" << e_max << ":";
    for (const auto& c : found) msg << ' ' << c.energy << '(' << to_string(c.boundary) << ')';
    throw IncompleteSpectrumError(msg.str());
  }

  std::vector<BandEdge> edges;
  for (int n = 0; n < count; ++n) {
    const auto& c = found[static_cast<std::size_t>(n)];
    edges.push_back({n, c.energy, c.boundary, c.degenerate});
  }
  return edges;
}

BlochState bloch_edge_state(const PeriodicPotential& v, const BandEdge& edge, std::size_t grid_n,
                            const BandSolverOptions& opts) {
  if (grid_n < 4) throw DomainError("bloch_edge_state: grid_n must be >= 4");
  const double sigma = level_of(edge.boundary) / 2.0;
  const Monodromy mono = monodromy(v, edge.energy, opts);

  // Null vector of M - sigma I from whichever row is better conditioned.
  const std::array<double, 2> from_first{mono.y2, sigma - mono.y1};
  const std::array<double, 2> from_second{sigma - mono.dy2, mono.dy1};
  const double n1 = std::hypot(from_first[0], from_first[1]);
  const double n2 = std::hypot(from_second[0], from_second[1]);
  const double scale =
      std::max({std::abs(mono.y1), std::abs(mono.y2), std::abs(mono.dy1), std::abs(mono.dy2), 1.0});

  BlochState st;
  st.energy = edge.energy;
  st.boundary = edge.boundary;
  std::array<double, 2> start{1.0, 0.0};
  if (std::max(n1, n2) <= 1e-6 * scale) {
    // M = sigma I: both solutions are (anti)periodic.
    st.degenerate = true;
  } else {
    start = n1 >= n2 ? from_first : from_second;
  }

  st.psi = {v.period(), std::vector<double>(grid_n)};
  st.dpsi = {v.period(), std::vector<double>(grid_n)};
  State<2> s{start[0], start[1]};
  double dt = v.period() / 64.0;
  const SingleSolution<2> system{v, edge.energy};
  for (std::size_t j = 0; j < grid_n; ++j) {
    const double x = st.psi.abscissa(j);
    if (j > 0) integrate_interval<2>(system, s, st.psi.abscissa(j - 1), x, dt, opts, edge.energy);
    st.psi.samples[j] = s[0];
    st.dpsi.samples[j] = s[1];
  }

  std::size_t peak = 0;
  for (std::size_t j = 1; j < grid_n; ++j) {
    if (std::abs(st.psi.samples[j]) > std::abs(st.psi.samples[peak])) peak = j;
  }
  const double norm = st.psi.samples[peak];
  if (norm == 0.0) throw NumericalError("bloch_edge_state: solution vanished on the grid");
  for (auto& y : st.psi.samples) y /= norm;
  for (auto& y : st.dpsi.samples) y /= norm;
  return st;
}

std::vector<BandEdge> galerkin_edges(const PeriodicPotential& v, int basis_n, int count) {
  if (count < 1) throw DomainError("galerkin_edges: count must be >= 1");
  if (basis_n < 2 * count + 8) {
    throw DomainError("galerkin_edges: basis_n must be at least 2*count+8");
  }
  const int half = basis_n / 2;
  const std::size_t quadrature = 4 * static_cast<std::size_t>(basis_n);
  const GridFunction sampled = sample_grid([&](double x) { return v(x); }, v.period(), quadrature);
  const auto coeffs = real_fourier_coefficients(sampled.samples);
  auto fourier = [&](int q) -> std::complex<double> {
    const auto c = coeffs[static_cast<std::size_t>(std::abs(q))];
    return q >= 0 ? c : std::conj(c);
  };
  const double omega = 2.0 * std::numbers::pi / v.period();

  struct Level {
    double energy;
    Boundary boundary;
  };
  std::vector<Level> levels;
  auto solve_sector = [&](Boundary boundary) {
    const double shift = boundary == Boundary::periodic ? 0.0 : 0.5;
    const int lo = -half;
    const int hi = boundary == Boundary::periodic ? half : half - 1;
    const int size = hi - lo + 1;
    Eigen::MatrixXcd h(size, size);
    for (int a = 0; a < size; ++a) {
      for (int b = 0; b < size; ++b) h(a, b) = fourier(a - b);
      const double k = (lo + a + shift) * omega;
      h(a, a) += k * k;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("galerkin_edges: eigenvalue iteration did not converge");
    }
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
      levels.push_back({solver.eigenvalues()(i), boundary});
    }
  };
  solve_sector(Boundary::periodic);
  solve_sector(Boundary::antiperiodic);
  std::stable_sort(levels.begin(), levels.end(),
                   [](const Level& a, const Level& b) { return a.energy < b.energy; });

  std::vector<BandEdge> edges;
  for (int n = 0; n < count; ++n) {
    const auto& l = levels[static_cast<std::size_t>(n)];
    edges.push_back({n, l.energy, l.boundary, false});
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].energy - edges[i - 1].energy <= kDegenerateWidth &&
        edges[i].boundary == edges[i - 1].boundary) {
      edges[i].degenerate = edges[i - 1].degenerate = true;
    }
  }
  return edges;
}

PeriodicPotential numeric_partner(const PeriodicPotential& v, std::size_t grid_n,
                                  const BandSolverOptions& opts) {
  if (grid_n < 64) throw DomainError("numeric_partner: grid_n must be >= 64");
  const auto ground = band_edges(v, 1).front();

  BandSolverOptions tight = opts;
  tight.relative_tolerance = std::min(opts.relative_tolerance, 1e-12);
  tight.absolute_tolerance = std::min(opts.absolute_tolerance, 1e-14);
  const BlochState st = bloch_edge_state(v, ground, grid_n, tight);

  GridFunction w{v.period(), std::vector<double>(grid_n)};
  for (std::size_t j = 0; j < grid_n; ++j) {
    const double psi = st.psi.samples[j];
    if (!(psi > 0.0)) {
      std::ostringstream msg;
      msg << "numeric_partner: ground state has a node near x=" << st.psi.abscissa(j);
      throw NumericalError(msg.str());
    }
    w.samples[j] = -st.dpsi.samples[j] / psi;
  }
  const GridFunction dw = spectral_derivative(w, 1);

  GridFunction partner{v.period(), std::vector<double>(grid_n)};
  for (std::size_t j = 0; j < grid_n; ++j) {
    partner.samples[j] = w.samples[j] * w.samples[j] + dw.samples[j] + ground.energy;
  }
  auto interpolant = std::make_shared<TrigInterpolant>(partner);
  return PeriodicPotential(
      v.period(), [interpolant](double x) { return (*interpolant)(x); }, SmoothnessHint::sampled);
}

}  // namespace susylame
