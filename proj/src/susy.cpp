#include "susy.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "errors.hpp"

namespace susylame {

namespace {

// Value and first derivative, propagated through arithmetic.
template <class Real>
struct Dual {
  Real v;
  Real d;
};

template <class R> Dual<R> operator*(Dual<R> a, Dual<R> b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class R> Dual<R> operator/(Dual<R> a, Dual<R> b) {
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
template <class R> Dual<R> operator+(R a, Dual<R> b) { return {a + b.v, b.d}; }
template <class R> Dual<R> operator-(R a, Dual<R> b) { return {a - b.v, -b.d}; }
template <class R> Dual<R> operator*(R a, Dual<R> b) { return {a * b.v, a * b.d}; }

template <class Real>
struct Constants {
  int j;
  Real m;
  Real delta;
  Real delta1;
  Real B;
};

template <class Real>
Constants<Real> constants_for(int j, Real m) {
  const Real delta = std::sqrt(Real(1) - m + m * m);
  return {j, m, delta, std::sqrt(Real(1) - m + 4 * m * m), Real(1) + m + delta};
}

Constants<double> constants_for(const LameConstants& c) {
  return {c.j, c.m, c.delta, c.delta1, c.B};
}

template <class Real>
struct DualJacobi {
  Dual<Real> sn;
  Dual<Real> cn;
  Dual<Real> dn;
};

template <class Real>
DualJacobi<Real> jacobi_dual(Real x, Real m) {
  const auto [sn, cn, dn] = basic_jacobi(x, m);
  return {{sn, cn * dn}, {cn, -sn * dn}, {dn, -m * sn * cn}};
}

void require_closed_form(int j) {
  if (j < 1) throw DomainError("Lamé index j must be >= 1, got " + std::to_string(j));
  if (j > 3) {
    throw UnsupportedError("closed forms exist for j = 1, 2, 3 only; use the numerical partner "
                           "pipeline for j = " +
                           std::to_string(j));
  }
}

template <class Real>
Dual<Real> superpotential_dual(const Constants<Real>& c, Real x) {
  const Real m = c.m;
  const auto [sn, cn, dn] = jacobi_dual(x, m);
  const Dual<Real> sn2 = sn * sn;
  switch (c.j) {
    case 1:
      return m * (sn * cn / dn);
    case 2:
      return Real(6) * m * (sn * cn * dn) / (c.B - Real(3) * m * sn2);
    case 3:
      return m * (sn * cn / dn) * ((2 * m + c.delta1 + 11) - Real(15) * m * sn2) /
             ((2 * m + c.delta1 + 1) - Real(5) * m * sn2);
    default:
      require_closed_form(c.j);
      return {};
  }
}

template <class Real>
Real v_minus_kernel(const Constants<Real>& c, Real x) {
  const Real m = c.m;
  const Real sn = basic_jacobi(x, m).sn;
  const Real sn2 = sn * sn;
  switch (c.j) {
    case 1: return 2 * m * sn2 - m;
    case 2: return -2 - 2 * m + 2 * c.delta + 6 * m * sn2;
    case 3: return -2 - 5 * m + 2 * c.delta1 + 12 * m * sn2;
    default: require_closed_form(c.j);
  }
  return 0;
}

template <class Real>
Real v_plus_kernel(const Constants<Real>& c, Real x) {
  const Real m = c.m;
  const auto [sn, cn, dn] = basic_jacobi(x, m);
  const Real sn2 = sn * sn;
  if (c.j == 2) {
    const Real den = c.B - 3 * m * sn2;
    const Real num = sn * cn * dn;
    return -v_minus_kernel(c, x) + 72 * m * m * num * num / (den * den);
  }
  if (c.j == 3) {
    const Real ratio = ((2 * m + c.delta1 + 11) - 15 * m * sn2) / ((2 * m + c.delta1 + 1) - 5 * m * sn2);
    return -v_minus_kernel(c, x) + 2 * m * m * sn2 * cn * cn / (dn * dn) * ratio * ratio;
  }
  throw UnsupportedError("closed-form V+ is available for j = 2 and 3; use v_plus_susy for j = 1 "
                         "or the numerical pipeline for j >= 4");
}

template <class Real>
Dual<Real> psi_minus_dual(const Constants<Real>& c, int n, Real x) {
  const Real m = c.m;
  const auto [sn, cn, dn] = jacobi_dual(x, m);
  const Dual<Real> sn2 = sn * sn;
  if (c.j == 2) {
    switch (n) {
      case 0: return c.B - Real(3) * m * sn2;
      case 1: return cn * dn;
      case 2: return sn * dn;
      case 3: return sn * cn;
      // 1 + m - delta = 3m / B without cancellation at small m.
      case 4: return Real(3) * m / c.B - Real(3) * m * sn2;
      default: break;
    }
    throw DomainError("band-edge index out of range 0..4 for j=2: " + std::to_string(n));
  }
  if (c.j == 3) {
    if (n == 0) return dn * ((1 + 2 * m + c.delta1) - Real(5) * m * sn2);
    if (n > 0 && n <= 6) {
      throw UnsupportedError("j=3 excited band-edge states have no closed form here; use "
                             "bloch_edge_state");
    }
    throw DomainError("band-edge index out of range 0..6 for j=3: " + std::to_string(n));
  }
  throw UnsupportedError("closed-form band-edge states are available for j = 2 and 3");
}

template <class Real>
Dual<Real> psi_plus_dual(const Constants<Real>& c, int n, Real x) {
  if (c.j == 3 && n == 0) {
    return Dual<Real>{1, 0} / psi_minus_dual(c, 0, x);
  }
  if (c.j != 2) {
    throw UnsupportedError("closed-form partner states are available for j = 2 (and the j = 3 "
                           "ground state)");
  }
  const Real m = c.m;
  const Real B = c.B;
  const auto [sn, cn, dn] = jacobi_dual(x, m);
  const Dual<Real> sn2 = sn * sn;
  const Dual<Real> weight = B - Real(3) * m * sn2;
  Dual<Real> numerator{};
  switch (n) {
    case 0: numerator = {1, 0}; break;
    case 1: numerator = sn * ((6 * m - (m + 1) * B) + m * (2 * B - 3 - 3 * m) * sn2); break;
    case 2: numerator = cn * (B + m * (3 - 2 * B) * sn2); break;
    case 3: numerator = dn * (B + (3 * m - 2 * B) * sn2); break;
    case 4: numerator = sn * cn * dn; break;
    default:
      throw DomainError("band-edge index out of range 0..4 for j=2: " + std::to_string(n));
  }
  return numerator / weight;
}

// j = 3 edges are not available in closed form; compute once per m.
class EdgeCache {
 public:
  std::vector<double> get(double m) {
    const auto key = std::bit_cast<std::uint64_t>(m);
    {
      std::shared_lock lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    std::vector<double> energies;
    for (const auto& e : band_edges(PotentialSpec(Family::Vminus, 3, m).periodic(), 7)) {
      energies.push_back(e.energy);
    }
    return cache_.emplace(key, std::move(energies)).first->second;
  }

 private:
  std::shared_mutex mutex_;
  std::map<std::uint64_t, std::vector<double>> cache_;
};

EdgeCache& j3_edges() {
  static EdgeCache cache;
  return cache;
}

}  // namespace

LameConstants::LameConstants(int j_, double m_)
    : j(j_), m(m_), K(ModulusParam(m_).K()),
      delta(std::sqrt(1.0 - m_ + m_ * m_)),
      delta1(std::sqrt(1.0 - m_ + 4.0 * m_ * m_)),
      B(1.0 + m_ + delta) {
  if (j < 1) throw DomainError("Lamé index j must be >= 1, got " + std::to_string(j));
}

PotentialSpec::PotentialSpec(Family family, int j, double m) : family_(family), c_(j, m) {
  if (family != Family::RawLame) require_closed_form(j);
}

double PotentialSpec::operator()(double x) const {
  switch (family_) {
    case Family::RawLame: return raw_lame(c_.j, c_.m, x);
    case Family::Vminus: return v_minus(c_, x);
    case Family::Wsuper: return superpotential(c_, x);
    case Family::Vplus: return c_.j == 1 ? v_plus_susy(c_, x) : v_plus_closed(c_, x);
  }
  return 0.0;
}

PeriodicPotential PotentialSpec::periodic() const {
  if (!std::isfinite(c_.K)) throw DomainError("potential is not periodic at m=1");
  const PotentialSpec self = *this;
  return PeriodicPotential(period(), [self](double x) { return self(x); }, SmoothnessHint::analytic);
}

double raw_lame(int j, double m, double x) {
  if (j < 1) throw DomainError("Lamé index j must be >= 1, got " + std::to_string(j));
  const double sn = jacobi(x, m).sn;
  return m * j * (j + 1) * sn * sn;
}

double v_minus(const LameConstants& c, double x) { return v_minus_kernel(constants_for(c), x); }

double v_minus(int j, double m, double x) {
  require_closed_form(j);
  return v_minus(LameConstants(j, m), x);
}

double superpotential(const LameConstants& c, double x) {
  return superpotential_dual(constants_for(c), x).v;
}

double superpotential(int j, double m, double x) {
  require_closed_form(j);
  return superpotential(LameConstants(j, m), x);
}

double superpotential_derivative(const LameConstants& c, double x) {
  return superpotential_dual(constants_for(c), x).d;
}

double v_plus_closed(const LameConstants& c, double x) { return v_plus_kernel(constants_for(c), x); }

double v_plus_closed(int j, double m, double x) { return v_plus_closed(LameConstants(j, m), x); }

double v_plus_susy(const LameConstants& c, double x) {
  const auto w = superpotential_dual(constants_for(c), x);
  return w.v * w.v + w.d;
}

double v_plus_susy(int j, double m, double x) {
  require_closed_form(j);
  return v_plus_susy(LameConstants(j, m), x);
}

double v_minus_check(const LameConstants& c, double x) {
  const auto w = superpotential_dual(constants_for(c), x);
  return w.v * w.v - w.d;
}

double v_minus_check(int j, double m, double x) {
  require_closed_form(j);
  return v_minus_check(LameConstants(j, m), x);
}

double band_edge_energy(int j, double m, int n) {
  require_closed_form(j);
  const LameConstants c(j, m);
  if (n < 0 || n > 2 * j) {
    throw DomainError("band-edge index " + std::to_string(n) + " out of range 0.." +
                      std::to_string(2 * j));
  }
  const double d = c.delta;
  switch (j) {
    case 1: {
      const double e[] = {0.0, 1.0 - m, 1.0};
      return e[n];
    }
    case 2: {
      const double e[] = {0.0, 2.0 * d - 1.0 - m, 2.0 * d - 1.0 + 2.0 * m, 2.0 * d + 2.0 - m,
                          4.0 * d};
      return e[n];
    }
    default:
      return j3_edges().get(m)[static_cast<std::size_t>(n)];
  }
}

Boundary edge_boundary(int j, int n) {
  if (n < 0 || n > 2 * j) throw DomainError("band-edge index out of range");
  return expected_boundary(n);
}

double psi_minus(int j, int n, double m, double x) {
  return psi_minus_dual(constants_for(LameConstants(j, m)), n, x).v;
}

std::pair<double, double> psi_minus_with_derivative(int j, int n, double m, double x) {
  const auto p = psi_minus_dual(constants_for(LameConstants(j, m)), n, x);
  return {p.v, p.d};
}

double psi_plus(int j, int n, double m, double x) {
  return psi_plus_dual(constants_for(LameConstants(j, m)), n, x).v;
}

std::pair<double, double> psi_plus_with_derivative(int j, int n, double m, double x) {
  const auto p = psi_plus_dual(constants_for(LameConstants(j, m)), n, x);
  return {p.v, p.d};
}

double intertwined(int j, int n, double m, double x) {
  const auto c = constants_for(LameConstants(j, m));
  const auto p = psi_minus_dual(c, n, x);
  return p.d + superpotential_dual(c, x).v * p.v;
}

std::vector<BandEdgeState> band_edge_states(int j, double m) {
  if (j != 2) throw UnsupportedError("full closed-form band-edge tables exist for j = 2 only");
  std::vector<BandEdgeState> states;
  for (int n = 0; n <= 4; ++n) {
    states.push_back({n, band_edge_energy(2, m, n), edge_boundary(2, n),
                      [m, n](double x) { return psi_minus(2, n, m, x); },
                      [m, n](double x) { return psi_plus(2, n, m, x); }});
  }
  return states;
}

namespace extended {

namespace {
Constants<long double> checked(int j, long double m) {
  require_closed_form(j);
  (void)LameConstants(j, static_cast<double>(m));
  return constants_for(j, m);
}
}  // namespace

long double period(int j, long double m) {
  (void)checked(j, m);
  return 2 * basic_complete_K(m);
}

long double v_minus(int j, long double m, long double x) { return v_minus_kernel(checked(j, m), x); }

long double v_plus(int j, long double m, long double x) {
  const auto c = checked(j, m);
  if (j == 1) {
    const auto w = superpotential_dual(c, x);
    return w.v * w.v + w.d;
  }
  return v_plus_kernel(c, x);
}

long double psi_minus(int j, int n, long double m, long double x) {
  return psi_minus_dual(checked(j, m), n, x).v;
}

long double psi_plus(int j, int n, long double m, long double x) {
  return psi_plus_dual(checked(j, m), n, x).v;
}

}  // namespace extended

}  // namespace susylame
