#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "bandsolver.hpp"
#include "errors.hpp"
#include "susy.hpp"

namespace susylame {

using nlohmann::ordered_json;

namespace {

constexpr double kResidualTolerance = 1e-7;
constexpr double kEnergyTolerance = 1e-6;
constexpr double kRatioTolerance = 1e-8;
constexpr double kIdentityTolerance = 1e-9;
constexpr double kLimitTolerance = 1e-4;
constexpr double kLimitModulus = 1.0 - 1e-8;
constexpr double kNumericIsoTolerance = 1e-5;
constexpr double kShiftTolerance = 1e-4;
// A distinct partner must sit at least this factor above kSelfIsoTolerance.
constexpr double kSeparationFactor = 100.0;
constexpr int kGalerkinBasis = 64;

bool degenerate_regime(double m) { return m <= 1e-6 || m >= 1.0 - 1e-6; }

std::string partner_name(Partner p) { return p == Partner::minus ? "minus" : "plus"; }

double max_abs_diff(const std::vector<BandEdge>& a, const std::vector<BandEdge>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    worst = std::max(worst, std::abs(a[i].energy - b[i].energy));
  }
  if (a.size() != b.size()) worst = std::numeric_limits<double>::infinity();
  return worst;
}

// Spread of f/g over points where |g| is not small, relative to the mean ratio.
template <class F, class G>
double ratio_spread(F&& f, G&& g, double period, std::size_t grid_n) {
  double g_max = 0.0;
  for (std::size_t j = 0; j < grid_n; ++j) {
    g_max = std::max(g_max, std::abs(g(period * static_cast<double>(j) / grid_n)));
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t j = 0; j < grid_n; ++j) {
    const double x = period * static_cast<double>(j) / grid_n;
    const double gx = g(x);
    if (std::abs(gx) < 0.1 * g_max) continue;
    const double r = f(x) / gx;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double mean = 0.5 * (lo + hi);
  return mean != 0.0 ? (hi - lo) / std::abs(mean) : std::numeric_limits<double>::infinity();
}

double golden_minimize(const std::function<double(double)>& f, double a, double b, double tol,
                       double& best_value) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = fc <= fd ? c : d;
  best_value = std::min(fc, fd);
  return x;
}

double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  return r;
}

double transform_distance_with(const GridFunction& vp, const TrigInterpolant& vm, double shift,
                               bool reflected) {
  const double r = reflected ? -1.0 : 1.0;
  double worst = 0.0;
  for (std::size_t j = 0; j < vp.size(); ++j) {
    const double x = vp.abscissa(j);
    worst = std::max(worst, std::abs(vp.samples[j] - vm(r * (x - shift))));
  }
  return worst;
}

void check_compatible(const GridFunction& vp, const GridFunction& vm) {
  if (std::abs(vp.period - vm.period) > 1e-12 * std::max(1.0, vp.period)) {
    throw DomainError("selfiso_distance: mismatched periods");
  }
  if (vp.size() != vm.size()) throw DomainError("selfiso_distance: mismatched sample counts");
  if (vp.size() < 64) throw DomainError("selfiso_distance: at least 64 samples required");
}

}  // namespace

ClaimReport make_claim(std::string id, double measured, double tolerance, ordered_json context) {
  ClaimReport r;
  r.claim_id = std::move(id);
  r.measured = measured;
  r.tolerance = tolerance;
  r.passed = measured <= tolerance;
  r.context = std::move(context);
  return r;
}

std::string to_string(Verdict v) {
  return v == Verdict::self_isospectral ? "self_isospectral" : "distinct";
}

double transform_distance(const GridFunction& vp, const GridFunction& vm, double shift,
                          bool reflected) {
  check_compatible(vp, vm);
  return transform_distance_with(vp, TrigInterpolant(vm), shift, reflected);
}

SelfIsoResult selfiso_distance(const GridFunction& vp, const GridFunction& vm, int shift_samples) {
  check_compatible(vp, vm);
  if (shift_samples < 256) throw DomainError("selfiso_distance: shift_samples must be >= 256");
  const GridTransformer transform(vm);
  const double period = vp.period;
  const double step = period / shift_samples;
  auto scan_distance = [&](double a, bool reflected) {
    const auto moved = transform(a, reflected);
    double worst = 0.0;
    for (std::size_t j = 0; j < vp.size(); ++j) {
      worst = std::max(worst, std::abs(vp.samples[j] - moved[j]));
    }
    return worst;
  };

  SelfIsoResult best;
  best.distance = std::numeric_limits<double>::infinity();
  for (bool reflected : {false, true}) {
    for (int i = 0; i < shift_samples; ++i) {
      const double a = step * i;
      const double d = scan_distance(a, reflected);
      if (d < best.distance) {
        best.distance = d;
        best.best_shift = a;
        best.reflected = reflected;
      }
    }
  }

  double refined = 0.0;
  const auto objective = [&](double a) { return scan_distance(a, best.reflected); };
  const double a = golden_minimize(objective, best.best_shift - step, best.best_shift + step,
                                   1e-8, refined);
  if (refined < best.distance) {
    best.distance = refined;
    best.best_shift = a;
  }
  best.best_shift = wrap(best.best_shift, period);
  best.verdict = best.distance <= kSelfIsoTolerance ? Verdict::self_isospectral : Verdict::distinct;
  return best;
}

SelfIsoResult selfiso_closed_form(int j, double m, std::size_t grid_n, int shift_samples) {
  const PotentialSpec plus(Family::Vplus, j, m);
  const PotentialSpec minus(Family::Vminus, j, m);
  return selfiso_distance(sample_grid(plus, plus.period(), grid_n),
                          sample_grid(minus, minus.period(), grid_n), shift_samples);
}

std::vector<ClaimReport> run_table1_suite(double m, std::size_t grid_n) {
  if (!(m > 0.0 && m < 1.0)) throw DomainError("run_table1_suite: m must lie in (0,1)");
  if (grid_n < 256) throw DomainError("run_table1_suite: grid_n must be >= 256");
  const LameConstants c(2, m);
  const double period = c.period();
  const PotentialSpec vm(Family::Vminus, 2, m);
  const PotentialSpec vp(Family::Vplus, 2, m);
  const bool regime = degenerate_regime(m);

  std::vector<ClaimReport> out;
  auto context = [&](int n, Partner p) {
    return ordered_json{{"j", 2}, {"m", m}, {"grid", grid_n}, {"n", n},
                        {"partner", partner_name(p)}, {"degenerate_regime", regime}};
  };

  // Residuals are evaluated in long double: at h = 1e-4 the second difference
  // of a double-precision evaluation is dominated by roundoff.
  const long double m_ext = m;
  const long double period_ext = extended::period(2, m_ext);
  for (Partner p : {Partner::minus, Partner::plus}) {
    for (int n = 0; n <= 4; ++n) {
      const double e = band_edge_energy(2, m, n);
      double residual = 0.0;
      if (p == Partner::minus) {
        residual = schrodinger_residual(
            [&](long double x) { return extended::psi_minus(2, n, m_ext, x); },
            [&](long double x) { return extended::v_minus(2, m_ext, x); }, e,
            static_cast<double>(period_ext), grid_n);
      } else {
        residual = schrodinger_residual(
            [&](long double x) { return extended::psi_plus(2, n, m_ext, x); },
            [&](long double x) { return extended::v_plus(2, m_ext, x); }, e,
            static_cast<double>(period_ext), grid_n);
      }
      out.push_back(make_claim("table1.residual." + partner_name(p) + ".n" + std::to_string(n),
                               residual, kResidualTolerance, context(n, p)));
    }
  }

  for (Partner p : {Partner::minus, Partner::plus}) {
    const auto edges = band_edges((p == Partner::minus ? vm : vp).periodic(), 5);
    for (int n = 0; n <= 4; ++n) {
      const auto& edge = edges[static_cast<std::size_t>(n)];
      auto ctx = context(n, p);
      ctx["closed_form"] = band_edge_energy(2, m, n);
      ctx["numerical"] = edge.energy;
      ctx["boundary"] = to_string(edge.boundary);
      ctx["degenerate"] = edge.degenerate;
      const double diff = std::abs(edge.energy - band_edge_energy(2, m, n));
      out.push_back(make_claim("table1.energy." + partner_name(p) + ".n" + std::to_string(n), diff,
                               kEnergyTolerance, ctx));
      out.push_back(make_claim("table1.boundary." + partner_name(p) + ".n" + std::to_string(n),
                               edge.boundary == edge_boundary(2, n) ? 0.0 : 1.0, 0.0, ctx));
    }
  }

  for (int n = 0; n <= 4; ++n) {
    double spread = 0.0;
    if (n == 0) {
      // (d/dx + W) psi0 = 0; the partner ground state is 1/psi0.
      for (std::size_t i = 0; i < grid_n; ++i) {
        const double x = period * static_cast<double>(i) / grid_n;
        spread = std::max(spread, std::abs(psi_plus(2, 0, m, x) * psi_minus(2, 0, m, x) - 1.0));
        spread = std::max(spread, std::abs(intertwined(2, 0, m, x)));
      }
    } else {
      spread = ratio_spread([&](double x) { return intertwined(2, n, m, x); },
                            [&](double x) { return psi_plus(2, n, m, x); }, period, grid_n);
    }
    out.push_back(make_claim("table1.intertwining.n" + std::to_string(n), spread, kRatioTolerance,
                             context(n, Partner::plus)));
  }
  return out;
}

std::vector<ClaimReport> run_limit_suite() {
  std::vector<ClaimReport> out;
  const double m = kLimitModulus;
  double minus_gap = 0.0;
  double plus_gap = 0.0;
  for (int i = 0; i <= 600; ++i) {
    const double x = -3.0 + 0.01 * i;
    const double sech2 = 1.0 / (std::cosh(x) * std::cosh(x));
    minus_gap = std::max(minus_gap, std::abs(v_minus(2, m, x) - (4.0 - 6.0 * sech2)));
    plus_gap = std::max(plus_gap, std::abs(v_plus_closed(2, m, x) - (4.0 - 2.0 * sech2)));
  }
  const ordered_json ctx{{"j", 2}, {"m", m}, {"x_range", {-3.0, 3.0}}, {"points", 601}};
  out.push_back(make_claim("limit.m1.vminus_sech2", minus_gap, kLimitTolerance, ctx));
  out.push_back(make_claim("limit.m1.vplus_sech2", plus_gap, kLimitTolerance, ctx));

  // At m = 0 the elliptic structure vanishes: every potential is constant.
  const std::vector<std::pair<Family, std::string>> families{
      {Family::Vminus, "vminus"}, {Family::Vplus, "vplus"}, {Family::Wsuper, "w"}};
  for (int j = 1; j <= 3; ++j) {
    for (const auto& [family, name] : families) {
      const PotentialSpec spec(family, j, 0.0);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (int i = 0; i < 256; ++i) {
        const double value = spec(spec.period() * i / 256.0);
        lo = std::min(lo, value);
        hi = std::max(hi, value);
      }
      out.push_back(make_claim("limit.m0.constant." + name + ".j" + std::to_string(j), hi - lo,
                               1e-12, {{"j", j}, {"m", 0.0}, {"value", lo}}));
    }
  }
  return out;
}

namespace {

struct PartnerPair {
  PeriodicPotential minus;
  PeriodicPotential plus;
  bool numeric;
  double shift;  // energy offset applied to the raw Lamé potential (numeric pairs)
};

PartnerPair make_pair(int j, double m, std::size_t partner_grid) {
  if (j <= 3) {
    return {PotentialSpec(Family::Vminus, j, m).periodic(),
            PotentialSpec(Family::Vplus, j, m).periodic(), false, 0.0};
  }
  const PotentialSpec raw(Family::RawLame, j, m);
  const double e0 = band_edges(raw.periodic(), 1).front().energy;
  PeriodicPotential minus(
      raw.period(), [raw, e0](double x) { return raw(x) - e0; }, SmoothnessHint::analytic);
  PeriodicPotential plus = numeric_partner(minus, partner_grid);
  return {std::move(minus), std::move(plus), true, e0};
}

std::vector<ClaimReport> iso_cell(int j, double m, std::size_t partner_grid) {
  const int count = 2 * j + 1;
  const PartnerPair pair = make_pair(j, m, partner_grid);
  const ordered_json base{{"j", j}, {"m", m}, {"method", pair.numeric ? "numeric" : "closed"},
                          {"edges", count}};
  std::vector<ClaimReport> out;

  const auto minus_edges = band_edges(pair.minus, count);
  const auto plus_edges = band_edges(pair.plus, count);
  auto ctx = base;
  ordered_json listing = ordered_json::array();
  for (std::size_t i = 0; i < minus_edges.size(); ++i) {
    listing.push_back({{"n", i}, {"minus", minus_edges[i].energy}, {"plus", plus_edges[i].energy},
                       {"boundary", to_string(minus_edges[i].boundary)}});
  }
  ctx["listing"] = listing;
  out.push_back(make_claim("iso.edges", max_abs_diff(minus_edges, plus_edges),
                           pair.numeric ? kNumericIsoTolerance : kEnergyTolerance, ctx));

  const auto minus_galerkin = galerkin_edges(pair.minus, kGalerkinBasis, count + 2);
  const auto plus_galerkin = galerkin_edges(pair.plus, kGalerkinBasis, count + 2);
  auto head = [count](std::vector<BandEdge> e) {
    e.resize(static_cast<std::size_t>(count));
    return e;
  };
  const double solver_gap = std::max(max_abs_diff(minus_edges, head(minus_galerkin)),
                                     max_abs_diff(plus_edges, head(plus_galerkin)));
  auto solver_ctx = base;
  solver_ctx["basis_n"] = kGalerkinBasis;
  out.push_back(make_claim("iso.solvers_agree", solver_gap, kEnergyTolerance, solver_ctx));

  // j bound bands, then a continuum: the next gap above the top edge is closed.
  const auto idx = static_cast<std::size_t>(count);
  const double next_gap = std::max(minus_galerkin[idx + 1].energy - minus_galerkin[idx].energy,
                                   plus_galerkin[idx + 1].energy - plus_galerkin[idx].energy);
  out.push_back(make_claim("iso.continuum_above_top_edge", next_gap, kEnergyTolerance, base));

  double pattern = 0.0;
  for (const auto* edges : {&minus_edges, &plus_edges}) {
    const auto& v = edges == &minus_edges ? pair.minus : pair.plus;
    for (const auto& e : *edges) {
      if (e.boundary != expected_boundary(e.n)) pattern = std::numeric_limits<double>::infinity();
      pattern = std::max(pattern, edge_residual(v, e));
    }
  }
  out.push_back(make_claim("iso.discriminant_pattern", pattern, kEnergyTolerance, base));
  return out;
}

std::vector<ClaimReport> selfiso_cell(int j, double m, std::size_t grid_n) {
  std::vector<ClaimReport> out;
  SelfIsoResult r;
  double period = 0.0;
  if (j <= 3) {
    r = selfiso_closed_form(j, m, grid_n);
    period = LameConstants(j, m).period();
  } else {
    const PartnerPair pair = make_pair(j, m, grid_n);
    period = pair.minus.period();
    r = selfiso_distance(sample_grid(pair.plus, period, grid_n),
                         sample_grid(pair.minus, period, grid_n), 4096);
  }
  ordered_json ctx{{"j", j},
                   {"m", m},
                   {"grid", grid_n},
                   {"distance", r.distance},
                   {"best_shift", r.best_shift},
                   {"reflected", r.reflected},
                   {"verdict", to_string(r.verdict)}};
  if (j == 1) {
    out.push_back(make_claim("selfiso.self_isospectral", r.distance, kSelfIsoTolerance, ctx));
    const double d = wrap(r.best_shift - 0.5 * period, period);
    const double offset = std::min(d, period - d);
    out.push_back(make_claim("selfiso.half_period_shift", offset, kShiftTolerance, ctx));
  } else {
    out.push_back(make_claim("selfiso.distinct", kSelfIsoTolerance / r.distance,
                             1.0 / kSeparationFactor, ctx));
  }
  return out;
}

// Runs independent cells concurrently and concatenates in input order.
template <class Cell>
std::vector<ClaimReport> fan_out(const std::vector<int>& j_list, const std::vector<double>& m_list,
                                 Cell cell) {
  std::vector<std::future<std::vector<ClaimReport>>> jobs;
  for (int j : j_list) {
    for (double m : m_list) {
      jobs.push_back(std::async(std::thread::hardware_concurrency() > 1 ? std::launch::async
                                                                        : std::launch::deferred,
                                cell, j, m));
    }
  }
  std::vector<ClaimReport> out;
  for (auto& job : jobs) {
    auto part = job.get();
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

void check_j_list(const std::vector<int>& j_list) {
  for (int j : j_list) {
    if (j < 1 || j > 5) throw DomainError("verification supports j = 1..5, got " + std::to_string(j));
  }
}

}  // namespace

std::vector<ClaimReport> run_isospectrality_suite(const std::vector<int>& j_list,
                                                  const std::vector<double>& m_list,
                                                  std::size_t partner_grid) {
  check_j_list(j_list);
  auto reports = fan_out(j_list, m_list,
                         [partner_grid](int j, double m) { return iso_cell(j, m, partner_grid); });
  auto selfiso = run_selfiso_suite(j_list, m_list, partner_grid);
  reports.insert(reports.end(), selfiso.begin(), selfiso.end());
  return reports;
}

std::vector<ClaimReport> run_selfiso_suite(const std::vector<int>& j_list,
                                           const std::vector<double>& m_list, std::size_t grid_n) {
  check_j_list(j_list);
  return fan_out(j_list, m_list, [grid_n](int j, double m) { return selfiso_cell(j, m, grid_n); });
}

Scope parse_scope(const std::string& name) {
  if (name == "all") return Scope::all;
  if (name == "table1") return Scope::table1;
  if (name == "limits") return Scope::limits;
  if (name == "iso") return Scope::iso;
  if (name == "selfiso") return Scope::selfiso;
  throw DomainError("unknown verification scope: " + name);
}

std::vector<ClaimReport> run_verification(Scope scope, const std::vector<double>& m_list) {
  for (double m : m_list) {
    if (!(m > 0.0 && m < 1.0)) throw DomainError("verification moduli must lie in (0,1)");
  }
  std::vector<ClaimReport> out;
  auto append = [&out](std::vector<ClaimReport> part) {
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  };
  if (scope == Scope::all || scope == Scope::table1) {
    for (double m : m_list) append(run_table1_suite(m));
  }
  if (scope == Scope::all || scope == Scope::limits) append(run_limit_suite());
  if (scope == Scope::all || scope == Scope::iso) {
    append(run_isospectrality_suite({1, 2, 3, 4, 5}, m_list));
  }
  if (scope == Scope::selfiso) append(run_selfiso_suite({1, 2, 3}, m_list));
  if (scope == Scope::all || scope == Scope::table1 || scope == Scope::iso) {
    // Partner identities W^2 -+ W' for the closed forms.
    for (int j : {2, 3}) {
      for (double m : m_list) {
        const LameConstants c(j, m);
        double plus = 0.0;
        double minus = 0.0;
        for (int i = 0; i < 512; ++i) {
          const double x = c.period() * i / 512.0;
          plus = std::max(plus, std::abs(v_plus_susy(c, x) - v_plus_closed(c, x)));
          minus = std::max(minus, std::abs(v_minus_check(c, x) - v_minus(c, x)));
        }
        const ordered_json ctx{{"j", j}, {"m", m}, {"grid", 512}};
        append({make_claim("partner.vplus_identity", plus, kIdentityTolerance, ctx),
                make_claim("partner.vminus_identity", minus, kIdentityTolerance, ctx)});
      }
    }
  }
  return out;
}

ordered_json to_json(const ClaimReport& r) {
  ordered_json j;
  j["claim_id"] = r.claim_id;
  j["measured"] = std::isfinite(r.measured) ? ordered_json(r.measured) : ordered_json(nullptr);
  j["tolerance"] = r.tolerance;
  j["passed"] = r.passed;
  j["context"] = r.context;
  return j;
}

std::string reports_to_json(const std::vector<ClaimReport>& reports, int indent) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(indent);
}

}  // namespace susylame
