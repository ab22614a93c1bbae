#pragma once

// Complete elliptic integral K(m) and the Jacobi elliptic functions sn, cn, dn
// for real argument and parameter 0 <= m <= 1.

#include <concepts>

namespace susylame {

/// Parameter m in [0,1] together with its quarter period K(m).
/// K is +inf at m = 1.
class ModulusParam {
 public:
  explicit ModulusParam(double m);

  double m() const { return m_; }
  double K() const { return K_; }
  /// Period of sn^2 (and of every potential built from it).
  double period() const { return 2.0 * K_; }

 private:
  double m_;
  double K_;
};

template <std::floating_point Real>
struct BasicJacobiTriple {
  Real sn;
  Real cn;
  Real dn;
};

using JacobiTriple = BasicJacobiTriple<double>;

struct JacobiDerivatives {
  double dsn;
  double dcn;
  double ddn;
};

/// K(m) = pi / (2 agm(1, sqrt(1-m))). Throws DomainError for m outside [0,1).
/// Instantiated for double and long double.
template <std::floating_point Real>
Real basic_complete_K(Real m);

/// sn, cn, dn at (x, m) by descending Landen transformation on the AGM
/// sequence; m = 1 is evaluated exactly through tanh and sech.
/// Instantiated for double and long double.
template <std::floating_point Real>
BasicJacobiTriple<Real> basic_jacobi(Real x, Real m);

inline double complete_K(double m) { return basic_complete_K(m); }

inline JacobiTriple jacobi(double x, double m) { return basic_jacobi(x, m); }

/// (cn dn, -sn dn, -m sn cn).
JacobiDerivatives jacobi_derivatives(double x, double m);

}  // namespace susylame
