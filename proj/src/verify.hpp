#pragma once

// Executable checks of the SUSY partner construction: closed-form residuals,
// isospectrality of partner pairs, the translation/reflection distance that
// separates self-isospectral partners from genuinely new ones, and the
// m -> 0, 1 limits. Every check yields a ClaimReport.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "spectral.hpp"

namespace susylame {

/// Distances at or below this (sup norm) count as self-isospectral.
inline constexpr double kSelfIsoTolerance = 1e-6;

struct ClaimReport {
  std::string claim_id;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  nlohmann::ordered_json context = nlohmann::ordered_json::object();
};

/// passed = measured <= tolerance; NaN fails.
ClaimReport make_claim(std::string id, double measured, double tolerance,
                       nlohmann::ordered_json context = nlohmann::ordered_json::object());

enum class Verdict { self_isospectral, distinct };

std::string to_string(Verdict v);

struct SelfIsoResult {
  double best_shift = 0.0;  // in [0, period)
  bool reflected = false;
  double distance = 0.0;
  Verdict verdict = Verdict::distinct;
};

/// min over a and r = +-1 of sup_j |vp(x_j) - vm(r (x_j - a))|, with vm
/// trigonometrically interpolated. Scans shift_samples translations per
/// reflection, then refines the best by golden section to |da| <= 1e-8.
SelfIsoResult selfiso_distance(const GridFunction& vp, const GridFunction& vm, int shift_samples);

/// sup_j |vp(x_j) - vm(r (x_j - a))| for one transform.
double transform_distance(const GridFunction& vp, const GridFunction& vm, double shift,
                          bool reflected);

/// selfiso_distance between the closed-form partners V+ and V- at (j, m).
SelfIsoResult selfiso_closed_form(int j, double m, std::size_t grid_n, int shift_samples = 4096);

/// max over the grid of |-psi'' + (V - E) psi| / max |psi|, psi'' by
/// second-order central differences with step h. Arithmetic is carried out
/// in the precision psi returns.
template <class Psi, class Pot>
double schrodinger_residual(Psi&& psi, Pot&& v, double energy, double period, std::size_t grid_n,
                            double h = 1e-4);

std::vector<ClaimReport> run_table1_suite(double m, std::size_t grid_n = 1024);

std::vector<ClaimReport> run_limit_suite();

std::vector<ClaimReport> run_isospectrality_suite(const std::vector<int>& j_list,
                                                  const std::vector<double>& m_list,
                                                  std::size_t partner_grid = 512);

/// Self-isospectrality verdicts for j in j_list: j = 1 must be
/// self-isospectral with shift K, j >= 2 distinct by a factor >= 100.
std::vector<ClaimReport> run_selfiso_suite(const std::vector<int>& j_list,
                                           const std::vector<double>& m_list,
                                           std::size_t grid_n = 512);

enum class Scope { all, table1, limits, iso, selfiso };

Scope parse_scope(const std::string& name);

std::vector<ClaimReport> run_verification(Scope scope, const std::vector<double>& m_list);

nlohmann::ordered_json to_json(const ClaimReport& r);
std::string reports_to_json(const std::vector<ClaimReport>& reports, int indent = 2);

// --- implementation ---------------------------------------------------------

template <class Psi, class Pot>
double schrodinger_residual(Psi&& psi, Pot&& v, double energy, double period, std::size_t grid_n,
                            double h) {
  // Evaluate in whatever precision psi returns.
  using Real = std::common_type_t<decltype(psi(period)), double>;
  const Real step = h;
  Real worst = 0;
  Real scale = 0;
  for (std::size_t j = 0; j < grid_n; ++j) {
    const Real x = Real(period) * static_cast<Real>(j) / static_cast<Real>(grid_n);
    const Real p = psi(x);
    const Real second = (psi(x + step) - 2 * p + psi(x - step)) / (step * step);
    worst = std::max(worst, std::abs(-second + (Real(v(x)) - Real(energy)) * p));
    scale = std::max(scale, std::abs(p));
  }
  return scale > 0 ? static_cast<double>(worst / scale) : std::numeric_limits<double>::infinity();
}

}  // namespace susylame
