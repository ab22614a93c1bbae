#include "elliptic.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace susylame {

namespace {

constexpr int kMaxAgmIterations = 40;

// Agreement to two ulps; asking for less can cycle on the last bit.
template <class Real>
constexpr Real agm_tolerance() {
  return Real(2) * std::numeric_limits<Real>::epsilon();
}

template <class Real>
void check_parameter(Real m) {
  if (!std::isfinite(m) || m < Real(0) || m > Real(1)) {
    throw DomainError("m out of range [0,1]: " + std::to_string(static_cast<double>(m)));
  }
}

}  // namespace

ModulusParam::ModulusParam(double m) : m_(m), K_(0.0) {
  check_parameter(m);
  K_ = m < 1.0 ? complete_K(m) : std::numeric_limits<double>::infinity();
}

template <std::floating_point Real>
Real basic_complete_K(Real m) {
  if (!std::isfinite(m) || m < Real(0)) {
    throw DomainError("m out of range [0,1]: " + std::to_string(static_cast<double>(m)));
  }
  if (m >= Real(1)) throw DomainError("K diverges at m=1");

  Real a = 1;
  Real b = std::sqrt(Real(1) - m);
  for (int i = 0; i < kMaxAgmIterations; ++i) {
    if (std::abs(a - b) <= agm_tolerance<Real>() * a) {
      return std::numbers::pi_v<Real> / (a + b);
    }
    const Real next = (a + b) / 2;
    b = std::sqrt(a * b);
    a = next;
  }
  throw NumericalError("AGM did not converge for m=" + std::to_string(static_cast<double>(m)));
}

template <std::floating_point Real>
BasicJacobiTriple<Real> basic_jacobi(Real x, Real m) {
  if (!std::isfinite(x)) throw DomainError("non-finite argument x");
  check_parameter(m);

  if (m == Real(1)) {
    const Real sech = Real(1) / std::cosh(x);
    return {std::tanh(x), sech, sech};
  }

  // Descending Landen (Bulirsch): record the AGM ladder, evaluate the
  // trigonometric limit, then climb back up.
  std::array<Real, kMaxAgmIterations> as{};
  std::array<Real, kMaxAgmIterations> bs{};
  Real mc = Real(1) - m;
  Real c = 1;
  int levels = 0;
  bool converged = false;
  for (Real a = 1; levels < kMaxAgmIterations;) {
    as[levels] = a;
    bs[levels] = mc = std::sqrt(mc);
    c = (a + mc) / 2;
    ++levels;
    if (std::abs(a - mc) <= agm_tolerance<Real>() * a) {
      converged = true;
      break;
    }
    mc *= a;
    a = c;
  }
  if (!converged) {
    throw NumericalError("Landen ladder did not converge for m=" +
                         std::to_string(static_cast<double>(m)));
  }

  // The ladder's limit is agm(1, sqrt(1-m)) = pi / (2K). sn and cn have
  // period 4K, so reduce x before scaling.
  const Real quarter_period = std::numbers::pi_v<Real> / (2 * c);
  const Real u = std::remainder(x, 4 * quarter_period) * c;
  Real sn = std::sin(u);
  Real cn = std::cos(u);
  Real dn = 1;
  if (sn != Real(0)) {
    Real a = cn / sn;
    c *= a;
    while (levels-- > 0) {
      const Real b = as[levels];
      a *= c;
      c *= dn;
      dn = (bs[levels] + a) / (b + a);
      a = c / b;
    }
    a = Real(1) / std::sqrt(c * c + Real(1));
    sn = sn < Real(0) ? -a : a;
    cn = c * sn;
  }
  return {sn, cn, dn};
}

template double basic_complete_K<double>(double);
template long double basic_complete_K<long double>(long double);
template BasicJacobiTriple<double> basic_jacobi<double>(double, double);
template BasicJacobiTriple<long double> basic_jacobi<long double>(long double, long double);

JacobiDerivatives jacobi_derivatives(double x, double m) {
  const auto [sn, cn, dn] = jacobi(x, m);
  return {cn * dn, -sn * dn, -m * sn * cn};
}

}  // namespace susylame
