// Acceptance criteria, one line each. Exit status is nonzero if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bandsolver.hpp"
#include "elliptic.hpp"
#include "oracles.hpp"
#include "susy.hpp"
#include "verify.hpp"

using namespace susylame;

namespace {

const std::vector<double> kModuli{0.1, 0.5, 0.9};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s | %s | %.1f s\n", o.pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

PeriodicPotential closed(Family f, int j, double m) { return PotentialSpec(f, j, m).periodic(); }

PeriodicPotential lame_shifted(int j, double m) {
  const PotentialSpec raw(Family::RawLame, j, m);
  const double e0 = band_edges(raw.periodic(), 1).front().energy;
  return PeriodicPotential(raw.period(), [raw, e0](double x) { return raw(x) - e0; });
}

double max_edge_gap(const std::vector<BandEdge>& a, const std::vector<BandEdge>& b) {
  double worst = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    worst = std::max(worst, std::abs(a[i].energy - b[i].energy));
  return worst;
}

// Boundary labels follow +2 -2 -2 +2 +2 ... and the trace sits on the label.
bool pattern_ok(const PeriodicPotential& v, const std::vector<BandEdge>& edges) {
  for (const auto& e : edges) {
    if (e.boundary != expected_boundary(e.n)) return false;
    const double target = e.boundary == Boundary::periodic ? 2.0 : -2.0;
    if (monodromy_trace(v, e.energy) * target < 0.0) return false;
    if (edge_residual(v, e) > 1e-6) return false;
  }
  return true;
}

int pattern_checks = 0;
int pattern_failures = 0;

void note_pattern(const PeriodicPotential& v, const std::vector<BandEdge>& edges) {
  ++pattern_checks;
  if (!pattern_ok(v, edges)) ++pattern_failures;
}

}  // namespace

int main() {
  report(1, "band-edge energies of V- (j=2)", [] {
    double worst = 0, slowest = 0;
    for (double m : kModuli) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto v = closed(Family::Vminus, 2, m);
      const auto edges = band_edges(v, 5);
      slowest = std::max(slowest, seconds_since(t0));
      const auto ref = oracle::lame2_edges(m);
      for (int n = 0; n < 5; ++n) worst = std::max(worst, std::abs(edges[n].energy - ref[n]));
      note_pattern(v, edges);
    }
    return Outcome{worst <= 1e-6 && slowest <= 10.0,
                   fmt("max|dE|=%.2e (tol 1e-6)", worst) + fmt(", slowest m %.2f s (limit 10)", slowest)};
  });

  report(2, "band-edge states of V- and V+ (j=2) solve the Schrodinger equation", [] {
    double worst = 0;
    int count = 0;
    for (double m : kModuli) {
      for (const auto& c : run_table1_suite(m, 1024)) {
        if (c.claim_id.rfind("table1.residual.", 0) != 0) continue;
        worst = std::max(worst, c.measured);
        ++count;
      }
    }
    return Outcome{count == 30 && worst <= 1e-7,
                   fmt("%g residuals", count) + fmt(", max relative residual=%.2e (tol 1e-7)", worst)};
  });

  report(3, "partner identities W^2 +- W'", [] {
    double worst = 0;
    for (int j : {2, 3}) {
      for (double m : kModuli) {
        const LameConstants c(j, m);
        for (int i = 0; i < 1024; ++i) {
          const double x = c.period() * i / 1024;
          worst = std::max({worst, std::abs(v_plus_susy(c, x) - v_plus_closed(c, x)),
                            std::abs(v_minus_check(c, x) - v_minus(c, x))});
        }
      }
    }
    return Outcome{worst <= 1e-9, fmt("max gap=%.2e (tol 1e-9)", worst)};
  });

  report(4, "isospectrality of V- and V+ (j=2,3), two solvers", [] {
    double iso = 0, solvers = 0, continuum = 0;
    bool counts = true;
    for (int j : {2, 3}) {
      const int count = 2 * j + 1;
      for (double m : kModuli) {
        std::vector<BandEdge> lists[2];
        int k = 0;
        for (auto f : {Family::Vminus, Family::Vplus}) {
          const auto v = closed(f, j, m);
          lists[k] = band_edges(v, count);
          note_pattern(v, lists[k]);
          const auto gal = galerkin_edges(v, 64, count + 2);
          const std::vector<BandEdge> head(gal.begin(), gal.begin() + count);
          solvers = std::max(solvers, max_edge_gap(lists[k], head));
          // above the last edge the next gap is closed
          continuum = std::max(continuum, gal[count + 1].energy - gal[count].energy);
          counts = counts && static_cast<int>(lists[k].size()) == count;
          ++k;
        }
        iso = std::max(iso, max_edge_gap(lists[0], lists[1]));
      }
    }
    return Outcome{counts && iso <= 1e-6 && solvers <= 1e-6 && continuum <= 1e-6,
                   fmt("max|E- - E+|=%.2e", iso) + fmt(", max solver gap=%.2e", solvers) +
                       fmt(", next gap=%.2e (tol 1e-6), counts 5/7", continuum)};
  });

  report(5, "self-isospectral for j=1, distinct for j=2,3", [] {
    struct Frozen {
      int j;
      double m, distance;
    };
    const Frozen frozen[] = {{2, 0.1, 0.0157620288398}, {2, 0.5, 0.469939422588},
                             {2, 0.9, 1.70619848265},   {3, 0.1, 0.0782468352007},
                             {3, 0.5, 1.96732864728},   {3, 0.9, 5.6097753486}};
    double j1 = 0, shift = 0, smallest = INFINITY, regression = 0;
    for (double m : kModuli) {
      const auto r = selfiso_closed_form(1, m, 512);
      j1 = std::max(j1, r.distance);
      shift = std::max(shift, std::abs(r.best_shift - complete_K(m)));
    }
    for (const auto& f : frozen) {
      const auto r = selfiso_closed_form(f.j, f.m, 512);
      smallest = std::min(smallest, r.distance);
      regression = std::max(regression, std::abs(r.distance - f.distance) / f.distance);
    }
    return Outcome{j1 <= 1e-6 && shift <= 1e-4 && smallest > 1e-4 && regression <= 1e-6,
                   fmt("j=1 distance=%.2e", j1) + fmt(", |shift-K|=%.2e", shift) +
                       fmt(", min j>=2 distance=%.4g", smallest) +
                       fmt(", max rel. deviation from frozen=%.1e", regression)};
  });

  report(6, "m -> 1 limit to the sech^2 pair", [] {
    const double m = 1 - 1e-8;
    double minus = 0, plus = 0;
    for (int i = 0; i <= 6000; ++i) {
      const double x = -3 + 6.0 * i / 6000;
      const double s2 = 1 / (std::cosh(x) * std::cosh(x));
      minus = std::max(minus, std::abs(v_minus(2, m, x) - (4 - 6 * s2)));
      plus = std::max(plus, std::abs(v_plus_closed(2, m, x) - (4 - 2 * s2)));
    }
    return Outcome{minus <= 1e-4 && plus <= 1e-4,
                   fmt("V- gap=%.2e", minus) + fmt(", V+ gap=%.2e (tol 1e-4)", plus)};
  });

  report(7, "numerical SUSY partner pipeline", [] {
    double closed_gap = 0, iso = 0, slowest = 0;
    for (int j : {2, 3}) {
      for (double m : kModuli) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto vp = numeric_partner(closed(Family::Vminus, j, m), 512);
        const PotentialSpec ref(Family::Vplus, j, m);
        for (int i = 0; i < 1000; ++i) {
          const double x = vp.period() * (i + 0.37) / 1000;
          closed_gap = std::max(closed_gap, std::abs(vp(x) - ref(x)));
        }
        slowest = std::max(slowest, seconds_since(t0));
      }
    }
    for (int j : {4, 5}) {
      for (double m : kModuli) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto vm = lame_shifted(j, m);
        const auto vp = numeric_partner(vm, 512);
        const auto a = band_edges(vm, 2 * j + 1);
        const auto b = band_edges(vp, 2 * j + 1);
        note_pattern(vm, a);
        note_pattern(vp, b);
        iso = std::max(iso, max_edge_gap(a, b));
        slowest = std::max(slowest, seconds_since(t0));
      }
    }
    return Outcome{closed_gap <= 1e-6 && iso <= 1e-5 && slowest <= 60,
                   fmt("j=2,3 max|V+num - V+|=%.2e (tol 1e-6)", closed_gap) +
                       fmt(", j=4,5 max|dE|=%.2e (tol 1e-5)", iso) +
                       fmt(", slowest case %.1f s (limit 60)", slowest)};
  });

  report(8, "properties and full verification run", [] {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> xs(-30.0, 30.0), ms(0.0, 1.0);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
      const double x = xs(rng), m = ms(rng);
      const double K = complete_K(m);
      const auto t = jacobi(x, m);
      const auto p = jacobi(x + 4 * K, m);
      const auto r = jacobi(-x, m);
      worst = std::max({worst, std::abs(t.sn * t.sn + t.cn * t.cn - 1),
                        std::abs(t.dn * t.dn + m * t.sn * t.sn - 1), std::abs(p.sn - t.sn),
                        std::abs(p.cn - t.cn), std::abs(jacobi(x + 2 * K, m).dn - t.dn),
                        std::abs(r.sn + t.sn), std::abs(r.cn - t.cn), std::abs(r.dn - t.dn)});
    }
    const auto t0 = std::chrono::steady_clock::now();
    const int raw = std::system(SUSYLAME_CLI " verify --scope all --format json > acceptance_verify.json");
    const double elapsed = seconds_since(t0);
    const int status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    const bool ok = worst <= 1e-12 && pattern_failures == 0 && pattern_checks > 0 && status == 0 &&
                    elapsed <= 300;
    std::ostringstream d;
    d << fmt("identity/periodicity/parity max err=%.1e on 1e4 points", worst) << ", sign pattern "
      << pattern_checks - pattern_failures << "/" << pattern_checks << " edge lists"
      << ", verify --scope all exit " << status << fmt(" in %.1f s (limit 300)", elapsed);
    return Outcome{ok, d.str()};
  });

  std::printf("%s\n", failures == 0 ? "all criteria passed" : "some criteria FAILED");
  return failures == 0 ? 0 : 1;
}
