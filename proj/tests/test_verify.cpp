#include <doctest.h>

#include <cmath>
#include <numbers>

#include "elliptic.hpp"
#include "errors.hpp"
#include "oracles.hpp"
#include "susy.hpp"
#include "verify.hpp"

using namespace susylame;

namespace {

// Brute-force scan on a 512-point grid.
struct Frozen {
  int j;
  double m;
  double distance;
};
constexpr Frozen kFrozen[] = {
    {2, 0.1, 0.0157620288398}, {2, 0.5, 0.469939422588}, {2, 0.9, 1.70619848265},
    {3, 0.1, 0.0782468352007}, {3, 0.5, 1.96732864728},  {3, 0.9, 5.6097753486},
};

bool all_passed(const std::vector<ClaimReport>& r) {
  for (const auto& c : r) {
    if (!c.passed) {
      MESSAGE(c.claim_id << " " << c.context.dump() << " measured " << c.measured);
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("claims compare measured against tolerance") {
    CHECK(make_claim("a", 1e-7, 1e-6).passed);
    CHECK_FALSE(make_claim("a", 1e-5, 1e-6).passed);
    CHECK_FALSE(make_claim("a", NAN, 1e-6).passed);
    const auto j = to_json(make_claim("a", 0.5, 1.0, {{"j", 2}}));
    CHECK(j["claim_id"] == "a");
    CHECK(j["context"]["j"] == 2);
    CHECK(parse_scope("limits") == Scope::limits);
    CHECK_THROWS_AS(parse_scope("everything"), DomainError);
  }

  TEST_CASE("Schrödinger residual vanishes for an exact solution") {
    const double r = schrodinger_residual([](double x) { return std::cos(3 * x); },
                                          [](double) { return 0.0; }, 9.0, 2 * std::numbers::pi,
                                          512);
    CHECK(r < 1e-6);
    const double wrong = schrodinger_residual([](double x) { return std::cos(3 * x); },
                                              [](double) { return 0.0; }, 8.0,
                                              2 * std::numbers::pi, 512);
    CHECK(wrong > 0.5);
  }

  TEST_CASE("j = 1 is self-isospectral under the half-period shift") {
    for (double m : {0.1, 0.5, 0.9}) {
      const auto r = selfiso_closed_form(1, m, 512);
      CHECK(r.distance < 1e-6);
      CHECK(r.verdict == Verdict::self_isospectral);
      const double K = complete_K(m);
      CHECK(std::abs(r.best_shift - K) < 1e-4);
    }
  }

  TEST_CASE("frozen self-isospectrality distances for j = 2, 3") {
    for (const auto& f : kFrozen) {
      CAPTURE(f.j);
      CAPTURE(f.m);
      const auto r = selfiso_closed_form(f.j, f.m, 512);
      CHECK(r.verdict == Verdict::distinct);
      CHECK(r.distance > 1e-4);
      CHECK(std::abs(r.distance - f.distance) < 1e-9 * f.distance);
      CHECK(std::abs(r.best_shift - complete_K(f.m)) < 1e-6);
    }
  }

  TEST_CASE("frozen constants agree with an in-test brute-force scan") {
    for (const auto& f : kFrozen) {
      if (f.m != 0.5) continue;
      CHECK(std::abs(oracle::brute_selfiso(f.j, f.m, 512) - f.distance) < 1e-9 * f.distance);
    }
  }

  TEST_CASE("distance behaves as a pseudometric under transforms") {
    const double m = 0.5;
    const double L = 2 * complete_K(m);
    const auto vm = sample_grid([&](double x) { return v_minus(2, m, x); }, L, 512);
    const auto vp = sample_grid([&](double x) { return v_plus_closed(2, m, x); }, L, 512);
    CHECK(selfiso_distance(vm, vm, 1024).distance < 1e-12);
    const auto shifted = sample_grid([&](double x) { return v_minus(2, m, x - 0.3); }, L, 512);
    CHECK(selfiso_distance(shifted, vm, 1024).distance < 1e-8);
    const double ab = selfiso_distance(vp, vm, 1024).distance;
    const double ba = selfiso_distance(vm, vp, 1024).distance;
    CHECK(std::abs(ab - ba) < 1e-8);
    CHECK(transform_distance(vp, vm, 0.0, false) >= ab);
    // same translation applied to both inputs; off-grid shifts move the
    // sampled sup by O(h^2)
    const auto vp_moved = sample_grid([&](double x) { return v_plus_closed(2, m, x - 0.7); }, L, 512);
    const auto vm_moved = sample_grid([&](double x) { return v_minus(2, m, x - 0.7); }, L, 512);
    CHECK(std::abs(selfiso_distance(vp_moved, vm_moved, 1024).distance - ab) < 1e-4 * ab);
  }

  TEST_CASE("grid refinement leaves the distance stable") {
    const auto a = selfiso_closed_form(2, 0.5, 256);
    const auto b = selfiso_closed_form(2, 0.5, 1024);
    CHECK(std::abs(a.distance - b.distance) < 1e-6 * b.distance);
  }

  TEST_CASE("j = 2 band-edge state suite passes at interior moduli") {
    for (double m : {0.1, 0.5, 0.9}) {
      const auto r = run_table1_suite(m);
      CHECK(r.size() >= 35);
      CHECK(all_passed(r));
    }
    CHECK_THROWS_AS(run_table1_suite(1.0), DomainError);
  }

  TEST_CASE("band-edge state suite at the edges of the modulus range") {
    const auto small = run_table1_suite(1e-9);
    CHECK(all_passed(small));
    CHECK(small.front().context["degenerate_regime"] == true);
    CHECK(all_passed(run_table1_suite(0.99)));
  }

  TEST_CASE("limit suite passes") {
    const auto r = run_limit_suite();
    CHECK(r.size() == 11);
    CHECK(all_passed(r));
  }

  TEST_CASE("report JSON lists every claim in order") {
    const auto r = run_limit_suite();
    const auto j = nlohmann::json::parse(reports_to_json(r));
    REQUIRE(j.size() == r.size());
    CHECK(j[0]["claim_id"] == r[0].claim_id);
  }
}
