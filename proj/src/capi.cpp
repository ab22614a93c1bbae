#include "susylame/susylame.h"

#include <cmath>
#include <exception>
#include <string>
#include <vector>

#include "bandsolver.hpp"
#include "elliptic.hpp"
#include "errors.hpp"
#include "susy.hpp"
#include "verify.hpp"

struct sl_potential {
  susylame::PeriodicPotential v;
};

struct sl_report {
  std::vector<susylame::ClaimReport> claims;
  std::vector<std::string> contexts;
  std::string json;
};

namespace {

thread_local std::string last_error;

sl_status fail(sl_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs body, translating exceptions into status codes.
template <class Body>
sl_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return SL_OK;
  } catch (const susylame::DomainError& e) {
    return fail(SL_ERR_DOMAIN, e.what());
  } catch (const susylame::UnsupportedError& e) {
    return fail(SL_ERR_UNSUPPORTED, e.what());
  } catch (const susylame::IncompleteSpectrumError& e) {
    return fail(SL_ERR_INCOMPLETE_SPECTRUM, e.what());
  } catch (const susylame::NumericalError& e) {
    return fail(SL_ERR_NUMERICAL, e.what());
  } catch (const std::exception& e) {
    return fail(SL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SL_ERR_INTERNAL, "unknown error");
  }
}

#define SL_REQUIRE(cond, what) \
  if (!(cond)) return fail(SL_ERR_INVALID_ARGUMENT, what)

susylame::BandSolverOptions to_options(const sl_solver_options* o) {
  susylame::BandSolverOptions opts;
  if (o != nullptr) {
    opts.relative_tolerance = o->relative_tolerance;
    opts.absolute_tolerance = o->absolute_tolerance;
    opts.energy_tolerance = o->energy_tolerance;
  }
  return opts;
}

sl_band_edge to_c(const susylame::BandEdge& e) {
  return {e.n, e.energy,
          e.boundary == susylame::Boundary::periodic ? SL_PERIODIC : SL_ANTIPERIODIC,
          e.degenerate ? 1 : 0};
}

bool valid_options(const sl_solver_options* o) {
  return o == nullptr || (o->relative_tolerance > 0.0 && o->absolute_tolerance > 0.0 &&
                          o->energy_tolerance > 0.0);
}

}  // namespace

extern "C" {

const char* sl_version(void) { return "1.0.0"; }

const char* sl_last_error(void) { return last_error.c_str(); }

sl_solver_options sl_solver_options_default(void) {
  const susylame::BandSolverOptions d;
  return {d.relative_tolerance, d.absolute_tolerance, d.energy_tolerance};
}

sl_status sl_complete_k(double m, double* k) {
  SL_REQUIRE(k, "null output pointer");
  return guarded([&] { *k = susylame::complete_K(m); });
}

sl_status sl_jacobi(double x, double m, double* sn, double* cn, double* dn) {
  SL_REQUIRE(sn && cn && dn, "null output pointer");
  return guarded([&] {
    const auto t = susylame::jacobi(x, m);
    *sn = t.sn;
    *cn = t.cn;
    *dn = t.dn;
  });
}

sl_status sl_jacobi_derivatives(double x, double m, double* dsn, double* dcn, double* ddn) {
  SL_REQUIRE(dsn && dcn && ddn, "null output pointer");
  return guarded([&] {
    const auto d = susylame::jacobi_derivatives(x, m);
    *dsn = d.dsn;
    *dcn = d.dcn;
    *ddn = d.ddn;
  });
}

sl_status sl_band_edge_energy(int j, double m, int n, double* energy) {
  SL_REQUIRE(energy, "null output pointer");
  return guarded([&] { *energy = susylame::band_edge_energy(j, m, n); });
}

sl_status sl_psi(sl_partner partner, int j, int n, double m, double x, double* value) {
  SL_REQUIRE(value, "null output pointer");
  SL_REQUIRE(partner == SL_PARTNER_MINUS || partner == SL_PARTNER_PLUS, "unknown partner");
  return guarded([&] {
    *value = partner == SL_PARTNER_MINUS ? susylame::psi_minus(j, n, m, x)
                                         : susylame::psi_plus(j, n, m, x);
  });
}

sl_status sl_potential_closed(sl_family family, int j, double m, sl_potential** out) {
  SL_REQUIRE(out, "null output pointer");
  using susylame::Family;
  Family f;
  switch (family) {
    case SL_FAMILY_VMINUS: f = Family::Vminus; break;
    case SL_FAMILY_VPLUS: f = Family::Vplus; break;
    case SL_FAMILY_W: f = Family::Wsuper; break;
    case SL_FAMILY_RAW_LAME: f = Family::RawLame; break;
    default: return fail(SL_ERR_INVALID_ARGUMENT, "unknown family");
  }
  return guarded([&] { *out = new sl_potential{susylame::PotentialSpec(f, j, m).periodic()}; });
}

sl_status sl_potential_lame_shifted(int j, double m, sl_potential** out) {
  SL_REQUIRE(out, "null output pointer");
  return guarded([&] {
    const susylame::PotentialSpec raw(susylame::Family::RawLame, j, m);
    susylame::BandSolverOptions tight;
    tight.relative_tolerance = 1e-13;
    tight.absolute_tolerance = 1e-15;
    tight.energy_tolerance = 1e-14;
    const auto v = raw.periodic();
    const double e0 = susylame::band_edges(v, 1, susylame::edge_ceiling(v, 1), tight).front().energy;
    *out = new sl_potential{susylame::PeriodicPotential(
        raw.period(), [raw, e0](double x) { return raw(x) - e0; })};
  });
}

sl_status sl_potential_numeric_partner(const sl_potential* v, size_t grid_n, sl_potential** out) {
  SL_REQUIRE(v && out, "null pointer");
  return guarded([&] { *out = new sl_potential{susylame::numeric_partner(v->v, grid_n)}; });
}

void sl_potential_destroy(sl_potential* v) { delete v; }

sl_status sl_potential_period(const sl_potential* v, double* period) {
  SL_REQUIRE(v && period, "null pointer");
  *period = v->v.period();
  return SL_OK;
}

sl_status sl_potential_eval(const sl_potential* v, double x, double* value) {
  SL_REQUIRE(v && value, "null pointer");
  return guarded([&] {
    if (!std::isfinite(x)) throw susylame::DomainError("non-finite argument x");
    *value = v->v(x);
  });
}

sl_status sl_monodromy_trace(const sl_potential* v, double energy, const sl_solver_options* options,
                             double* trace) {
  SL_REQUIRE(v && trace, "null pointer");
  SL_REQUIRE(valid_options(options), "tolerances must be positive");
  return guarded([&] { *trace = susylame::monodromy_trace(v->v, energy, to_options(options)); });
}

sl_status sl_band_edges(const sl_potential* v, int count, double e_max,
                        const sl_solver_options* options, sl_band_edge* out) {
  SL_REQUIRE(v && out, "null pointer");
  SL_REQUIRE(valid_options(options), "tolerances must be positive");
  return guarded([&] {
    const double ceiling = std::isnan(e_max) ? susylame::edge_ceiling(v->v, count) : e_max;
    const auto edges = susylame::band_edges(v->v, count, ceiling, to_options(options));
    for (std::size_t i = 0; i < edges.size(); ++i) out[i] = to_c(edges[i]);
  });
}

sl_status sl_galerkin_edges(const sl_potential* v, int basis_n, int count, sl_band_edge* out) {
  SL_REQUIRE(v && out, "null pointer");
  return guarded([&] {
    const auto edges = susylame::galerkin_edges(v->v, basis_n, count);
    for (std::size_t i = 0; i < edges.size(); ++i) out[i] = to_c(edges[i]);
  });
}

sl_status sl_bloch_edge_state(const sl_potential* v, const sl_band_edge* edge, size_t grid_n,
                              const sl_solver_options* options, double* psi, int* degenerate) {
  SL_REQUIRE(v && edge && psi, "null pointer");
  SL_REQUIRE(valid_options(options), "tolerances must be positive");
  return guarded([&] {
    const susylame::BandEdge e{edge->n, edge->energy,
                               edge->boundary == SL_PERIODIC ? susylame::Boundary::periodic
                                                             : susylame::Boundary::antiperiodic,
                               edge->degenerate != 0};
    const auto st = susylame::bloch_edge_state(v->v, e, grid_n, to_options(options));
    std::copy(st.psi.samples.begin(), st.psi.samples.end(), psi);
    if (degenerate) *degenerate = st.degenerate ? 1 : 0;
  });
}

sl_status sl_selfiso_distance(const sl_potential* plus, const sl_potential* minus, size_t grid_n,
                              int shift_samples, sl_selfiso_result* out) {
  SL_REQUIRE(plus && minus && out, "null pointer");
  return guarded([&] {
    const auto vp = susylame::sample_grid(plus->v, plus->v.period(), grid_n);
    const auto vm = susylame::sample_grid(minus->v, minus->v.period(), grid_n);
    const auto r = susylame::selfiso_distance(vp, vm, shift_samples);
    *out = {r.best_shift, r.reflected ? 1 : 0, r.distance,
            r.verdict == susylame::Verdict::self_isospectral ? 1 : 0};
  });
}

sl_status sl_verify(sl_scope scope, const double* m_list, size_t m_count, sl_report** out) {
  SL_REQUIRE(out, "null output pointer");
  SL_REQUIRE(m_list != nullptr || m_count == 0, "null m_list with nonzero count");
  using susylame::Scope;
  Scope s;
  switch (scope) {
    case SL_SCOPE_ALL: s = Scope::all; break;
    case SL_SCOPE_TABLE1: s = Scope::table1; break;
    case SL_SCOPE_LIMITS: s = Scope::limits; break;
    case SL_SCOPE_ISO: s = Scope::iso; break;
    case SL_SCOPE_SELFISO: s = Scope::selfiso; break;
    default: return fail(SL_ERR_INVALID_ARGUMENT, "unknown scope");
  }
  std::vector<double> moduli = m_count == 0 ? std::vector<double>{0.1, 0.5, 0.9}
                                            : std::vector<double>(m_list, m_list + m_count);
  return guarded([&] {
    auto report = std::make_unique<sl_report>();
    report->claims = susylame::run_verification(s, moduli);
    for (const auto& c : report->claims) report->contexts.push_back(c.context.dump());
    report->json = susylame::reports_to_json(report->claims);
    *out = report.release();
  });
}

size_t sl_report_size(const sl_report* r) { return r ? r->claims.size() : 0; }

sl_status sl_report_claim(const sl_report* r, size_t index, sl_claim* out) {
  SL_REQUIRE(r && out, "null pointer");
  if (index >= r->claims.size()) return fail(SL_ERR_DOMAIN, "claim index out of range");
  const auto& c = r->claims[index];
  *out = {c.claim_id.c_str(), c.measured, c.tolerance, c.passed ? 1 : 0,
          r->contexts[index].c_str()};
  return SL_OK;
}

int sl_report_all_passed(const sl_report* r) {
  if (!r) return 0;
  for (const auto& c : r->claims) {
    if (!c.passed) return 0;
  }
  return 1;
}

const char* sl_report_json(const sl_report* r) { return r ? r->json.c_str() : ""; }

void sl_report_destroy(sl_report* r) { delete r; }

}  // extern "C"
