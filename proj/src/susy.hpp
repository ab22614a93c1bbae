#pragma once

// Lamé potentials m j(j+1) sn^2(x,m), their zero-ground-energy shifts V-,
// superpotentials W = -(log psi0)', SUSY partners V+ = W^2 + W', and the
// closed-form band-edge eigenstates for j = 2 (ground state only for j = 3).

#include <functional>
#include <vector>

#include "bandsolver.hpp"
#include "elliptic.hpp"

namespace susylame {

/// Constants shared by all closed forms at fixed (j, m).
struct LameConstants {
  LameConstants(int j, double m);

  int j;
  double m;
  double K;       // quarter period; +inf at m = 1
  double delta;   // sqrt(1 - m + m^2)
  double delta1;  // sqrt(1 - m + 4 m^2)
  double B;       // 1 + m + delta

  double period() const { return 2.0 * K; }
};

enum class Family { Vminus, Vplus, Wsuper, RawLame };

enum class Partner { minus, plus };

/// A closed-form potential (or superpotential) at fixed j and m.
class PotentialSpec {
 public:
  PotentialSpec(Family family, int j, double m);

  Family family() const { return family_; }
  const LameConstants& constants() const { return c_; }
  double period() const { return c_.period(); }
  double operator()(double x) const;

  /// As a PeriodicPotential for the band solvers.
  PeriodicPotential periodic() const;

 private:
  Family family_;
  LameConstants c_;
};

double raw_lame(int j, double m, double x);

double v_minus(const LameConstants& c, double x);
double v_minus(int j, double m, double x);

double superpotential(const LameConstants& c, double x);
double superpotential(int j, double m, double x);

/// dW/dx by the quotient rule on analytic Jacobi derivatives.
double superpotential_derivative(const LameConstants& c, double x);

double v_plus_closed(const LameConstants& c, double x);
double v_plus_closed(int j, double m, double x);

/// W^2 + W'.
double v_plus_susy(const LameConstants& c, double x);
double v_plus_susy(int j, double m, double x);

/// W^2 - W'; reproduces v_minus.
double v_minus_check(const LameConstants& c, double x);
double v_minus_check(int j, double m, double x);

/// Band-edge energy E_n of V- (and V+), n = 0..2j. j = 3 values come from
/// the band solver and are memoized per m.
double band_edge_energy(int j, double m, int n);

/// Boundary type over one period 2K of the closed-form state n.
Boundary edge_boundary(int j, int n);

/// Un-normalized band-edge eigenfunction of V-.
double psi_minus(int j, int n, double m, double x);
/// (psi, psi') of psi_minus.
std::pair<double, double> psi_minus_with_derivative(int j, int n, double m, double x);

/// Un-normalized band-edge eigenfunction of V+ for j = 2; psi_plus(0) = 1 / psi_minus(0).
double psi_plus(int j, int n, double m, double x);
/// (psi, psi') of psi_plus.
std::pair<double, double> psi_plus_with_derivative(int j, int n, double m, double x);

/// (d/dx + W) psi_minus(n), proportional to psi_plus(n) for n > 0 and
/// identically zero for n = 0.
double intertwined(int j, int n, double m, double x);

struct BandEdgeState {
  int n;
  double energy;
  Boundary boundary;
  std::function<double(double)> closed_form_minus;
  std::function<double(double)> closed_form_plus;
};

/// The five closed-form band-edge states for j = 2 at parameter m.
std::vector<BandEdgeState> band_edge_states(int j, double m);

/// Long double evaluations of the closed forms, for finite-difference checks
/// whose step would otherwise sit on the double-precision roundoff floor.
namespace extended {
long double period(int j, long double m);
long double v_minus(int j, long double m, long double x);
long double v_plus(int j, long double m, long double x);
long double psi_minus(int j, int n, long double m, long double x);
long double psi_plus(int j, int n, long double m, long double x);
}  // namespace extended

}  // namespace susylame
