#pragma once

// Band structure of -y'' + V(x) y = E y for smooth periodic V.
//
// Two independent routes are provided: the Floquet discriminant
// Delta(E) = tr M(E) of the monodromy matrix, obtained by integrating the
// ODE over one period, and a plane-wave Galerkin diagonalization in the
// periodic and antiperiodic sectors. Band edges are the energies where
// Delta = +2 (periodic Bloch state) or Delta = -2 (antiperiodic).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spectral.hpp"

namespace susylame {

enum class SmoothnessHint { analytic, sampled };

enum class Boundary { periodic, antiperiodic };

std::string to_string(Boundary b);

class PeriodicPotential {
 public:
  /// Probes the evaluator for periodicity (to 1e-9) and throws DomainError
  /// when the period is not positive or the probe fails.
  PeriodicPotential(double period, std::function<double(double)> evaluator,
                    SmoothnessHint hint = SmoothnessHint::analytic);

  double period() const { return period_; }
  SmoothnessHint hint() const { return hint_; }
  double operator()(double x) const { return evaluator_(x); }

  /// V(-x) = V(x) to probe accuracy.
  bool even() const { return even_; }
  /// Minimum and maximum over a uniform probe grid of one period.
  std::pair<double, double> range(std::size_t probes = 4096) const;

 private:
  double period_;
  std::function<double(double)> evaluator_;
  SmoothnessHint hint_;
  bool even_ = false;
};

struct BandEdge {
  int n = 0;
  double energy = 0.0;
  Boundary boundary = Boundary::periodic;
  /// Set when this edge coincides with its gap partner (closed gap).
  bool degenerate = false;
};

struct Monodromy {
  // Columns are the solutions with (y, y') = (1, 0) and (0, 1) at x = 0.
  double y1 = 0.0, dy1 = 0.0, y2 = 0.0, dy2 = 0.0;
  double trace() const { return y1 + dy2; }
};

struct Discriminant {
  double energy = 0.0;
  double value = 0.0;
  /// d Delta / dE, present when requested.
  std::optional<double> slope;
};

struct BandSolverOptions {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 1e-12;
  /// Initial number of energy intervals in the bracketing scan.
  int scan_intervals = 2048;
  /// Number of times the scan step may be halved when the edge sign
  /// pattern comes out inconsistent.
  int max_refinements = 5;
  /// Absolute energy tolerance of bisection.
  double energy_tolerance = 1e-12;
};

Monodromy monodromy(const PeriodicPotential& v, double energy, const BandSolverOptions& opts = {});

/// Floquet discriminant y1(L) + y2'(L).
double monodromy_trace(const PeriodicPotential& v, double energy, const BandSolverOptions& opts = {});

/// Discriminant and its energy derivative from the variational equations.
Discriminant discriminant_with_slope(const PeriodicPotential& v, double energy,
                                     const BandSolverOptions& opts = {});

/// An energy guaranteed to lie above the first `count` band edges:
/// max V plus the matching free-particle edge, plus one.
double edge_ceiling(const PeriodicPotential& v, int count);

/// Lowest `count` band edges below e_max, sorted. Throws
/// IncompleteSpectrumError if fewer are found.
std::vector<BandEdge> band_edges(const PeriodicPotential& v, int count, double e_max,
                                 const BandSolverOptions& opts = {});

/// band_edges with e_max = edge_ceiling(v, count).
std::vector<BandEdge> band_edges(const PeriodicPotential& v, int count);

/// |Delta(E) - (+-2)| at an edge relative to the largest monodromy entry,
/// integrated at the edge-polishing tolerance (1e-13).
double edge_residual(const PeriodicPotential& v, const BandEdge& edge,
                     const BandSolverOptions& opts = {});
/// Sign pattern of the discriminant at edge n: +2, -2, -2, +2, +2, -2, ...
Boundary expected_boundary(int n);

struct BlochState {
  GridFunction psi;   // normalized to max |psi| = 1, largest sample positive
  GridFunction dpsi;  // psi' on the same grid, same scale
  double energy = 0.0;
  Boundary boundary = Boundary::periodic;
  bool degenerate = false;
};

/// (Anti)periodic solution at a band edge sampled on grid_n points.
BlochState bloch_edge_state(const PeriodicPotential& v, const BandEdge& edge, std::size_t grid_n,
                            const BandSolverOptions& opts = {});

/// Plane-wave Galerkin band edges: basis_n + 1 periodic and basis_n
/// antiperiodic waves, Fourier coefficients of V by trapezoid quadrature on
/// 4 * basis_n points.
std::vector<BandEdge> galerkin_edges(const PeriodicPotential& v, int basis_n, int count);

/// SUSY partner of V built from its bottom band-edge state psi0:
/// W = -psi0'/psi0, V+ = W^2 + W' + E0, sampled on grid_n points and
/// trigonometrically interpolated. Throws NumericalError if psi0 has a node.
PeriodicPotential numeric_partner(const PeriodicPotential& v, std::size_t grid_n,
                                  const BandSolverOptions& opts = {});

}  // namespace susylame
