#pragma once
// Reference values computed without touching the library under test.

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace oracle {

inline double complete_K(double m) { return boost::math::ellint_1(std::sqrt(m)); }

struct Jacobi {
  double sn, cn, dn;
};

inline Jacobi jacobi(double x, double m) {
  double cn = 0, dn = 0;
  const double sn = boost::math::jacobi_elliptic(std::sqrt(m), x, &cn, &dn);
  return {sn, cn, dn};
}

// Band edges of -y'' + 6 m sn^2 y shifted to a zero ground state.
inline std::array<double, 5> lame2_edges(double m) {
  const double d = std::sqrt(1 - m + m * m);
  return {0.0, 2 * d - 1 - m, 2 * d - 1 + 2 * m, 2 * d + 2 - m, 4 * d};
}

// Algebraic eigenvalues of -y'' + 12 m sn^2 y, sorted and shifted the same way.
inline std::array<double, 7> lame3_edges(double m) {
  const double a = std::sqrt(1 - m + 4 * m * m);
  const double b = std::sqrt(4 - m + m * m);
  const double c = std::sqrt(4 - 7 * m + 4 * m * m);
  std::array<double, 7> e{2 + 5 * m - 2 * a, 2 + 5 * m + 2 * a, 5 + 2 * m - 2 * b,
                          5 + 2 * m + 2 * b, 5 + 5 * m - 2 * c, 5 + 5 * m + 2 * c,
                          4 * (1 + m)};
  std::sort(e.begin(), e.end());
  const double e0 = e[0];
  for (auto& v : e) v -= e0;
  return e;
}

// Direct transcription of V- and V+ for j = 2, 3.
inline double v_minus(int j, double m, double x) {
  const auto t = jacobi(x, m);
  const double s2 = t.sn * t.sn;
  if (j == 2) return -2 - 2 * m + 2 * std::sqrt(1 - m + m * m) + 6 * m * s2;
  return -2 - 5 * m + 2 * std::sqrt(1 - m + 4 * m * m) + 12 * m * s2;
}

inline double v_plus(int j, double m, double x) {
  const auto t = jacobi(x, m);
  const double s2 = t.sn * t.sn;
  if (j == 2) {
    const double den = 1 + m + std::sqrt(1 - m + m * m) - 3 * m * s2;
    return -v_minus(2, m, x) + 72 * m * m * s2 * t.cn * t.cn * t.dn * t.dn / (den * den);
  }
  const double d1 = std::sqrt(1 - m + 4 * m * m);
  const double ratio = (2 * m + d1 + 11 - 15 * m * s2) / (2 * m + d1 + 1 - 5 * m * s2);
  return -v_minus(3, m, x) + 2 * m * m * s2 * t.cn * t.cn / (t.dn * t.dn) * ratio * ratio;
}

// min over a grid of shifts and both orientations of max_x |V+(x) - V-(r(x - a))|.
inline double brute_selfiso(int j, double m, int grid_n) {
  const double L = 2 * complete_K(m);
  std::vector<double> vp(grid_n), vm(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    vp[i] = v_plus(j, m, L * i / grid_n);
    vm[i] = v_minus(j, m, L * i / grid_n);
  }
  double best = INFINITY;
  for (int reflect = 0; reflect < 2; ++reflect) {
    for (int s = 0; s < grid_n; ++s) {
      double worst = 0;
      for (int i = 0; i < grid_n; ++i) {
        int k = reflect ? -(i - s) : i - s;
        k = ((k % grid_n) + grid_n) % grid_n;
        worst = std::max(worst, std::abs(vp[i] - vm[k]));
      }
      best = std::min(best, worst);
    }
  }
  return best;
}

}  // namespace oracle
