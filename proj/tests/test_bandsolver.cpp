#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bandsolver.hpp"
#include "errors.hpp"
#include "oracles.hpp"
#include "susy.hpp"

using namespace susylame;

namespace {

PeriodicPotential closed(Family f, int j, double m) { return PotentialSpec(f, j, m).periodic(); }

}  // namespace

TEST_SUITE("bandsolver") {
  TEST_CASE("free particle: closed gaps at (pi k / L)^2") {
    const PeriodicPotential v(std::numbers::pi, [](double) { return 0.0; });
    const auto edges = band_edges(v, 5);
    REQUIRE(edges.size() == 5);
    const double ref[] = {0, 1, 1, 4, 4};
    for (int n = 0; n < 5; ++n) CHECK(std::abs(edges[n].energy - ref[n]) < 1e-9);
    CHECK_FALSE(edges[0].degenerate);
    CHECK(edges[1].degenerate);
    CHECK(edges[2].degenerate);
    CHECK(edges[1].boundary == Boundary::antiperiodic);
    CHECK(edges[3].boundary == Boundary::periodic);
  }

  TEST_CASE("Mathieu characteristic values at q = 1") {
    // -y'' + 2 cos(2x) y = a y; tabulated a0, b1, a1, b2, a2
    const PeriodicPotential v(std::numbers::pi, [](double x) { return 2 * std::cos(2 * x); });
    const double ref[] = {-0.4551386041, -0.1102488170, 1.8591080725, 3.9170247729, 4.3713009827};
    const auto edges = band_edges(v, 5);
    const auto gal = galerkin_edges(v, 32, 5);
    for (int n = 0; n < 5; ++n) {
      CHECK(std::abs(edges[n].energy - ref[n]) < 1e-9);
      CHECK(std::abs(gal[n].energy - ref[n]) < 1e-9);
    }
  }

  TEST_CASE("j = 2 Lamé edges and boundaries") {
    for (double m : {0.1, 0.5, 0.9}) {
      const auto ref = oracle::lame2_edges(m);
      const auto edges = band_edges(closed(Family::Vminus, 2, m), 5);
      for (int n = 0; n < 5; ++n) {
        CHECK(std::abs(edges[n].energy - ref[n]) < 1e-8);
        CHECK(edges[n].boundary == expected_boundary(n));
      }
    }
  }

  TEST_CASE("j = 3 Lamé edges against the algebraic eigenvalues") {
    const auto ref = oracle::lame3_edges(0.5);
    const auto edges = band_edges(closed(Family::Vminus, 3, 0.5), 7);
    for (int n = 0; n < 7; ++n) CHECK(std::abs(edges[n].energy - ref[n]) < 1e-8);
  }

  TEST_CASE("Galerkin and monodromy agree") {
    for (auto f : {Family::Vminus, Family::Vplus}) {
      const auto v = closed(f, 3, 0.7);
      const auto a = band_edges(v, 7);
      const auto b = galerkin_edges(v, 64, 7);
      for (int n = 0; n < 7; ++n) {
        CHECK(std::abs(a[n].energy - b[n].energy) < 1e-8);
        CHECK(a[n].boundary == b[n].boundary);
      }
    }
    CHECK_THROWS_AS(galerkin_edges(closed(Family::Vminus, 2, 0.5), 8, 5), DomainError);
  }

  TEST_CASE("discriminant alternates +2 -2 -2 +2 +2 at the edges and is unimodular") {
    const auto v = closed(Family::Vplus, 2, 0.5);
    const auto edges = band_edges(v, 5);
    for (const auto& e : edges) {
      const double target = e.boundary == Boundary::periodic ? 2.0 : -2.0;
      CHECK(std::abs(monodromy_trace(v, e.energy) - target) < 1e-7);
    }
    // inside a band |Delta| < 2, inside a gap |Delta| > 2
    CHECK(std::abs(monodromy_trace(v, 0.5 * (edges[0].energy + edges[1].energy))) < 2);
    CHECK(std::abs(monodromy_trace(v, 0.5 * (edges[1].energy + edges[2].energy))) > 2);
    CHECK(std::abs(monodromy_trace(v, 0.5 * (edges[2].energy + edges[3].energy))) < 2);
    CHECK(std::abs(monodromy_trace(v, 0.5 * (edges[3].energy + edges[4].energy))) > 2);
    CHECK(monodromy_trace(v, -1.0) > 2);
    const auto M = monodromy(v, 0.77);
    CHECK(std::abs(M.y1 * M.dy2 - M.y2 * M.dy1 - 1) < 1e-9);
    const auto d = discriminant_with_slope(v, 0.77);
    REQUIRE(d.slope.has_value());
    const double h = 1e-5;
    CHECK(std::abs(*d.slope - (monodromy_trace(v, 0.77 + h) - monodromy_trace(v, 0.77 - h)) /
                                  (2 * h)) < 1e-5);
  }

  TEST_CASE("Bloch edge states are proportional to the closed forms") {
    const double m = 0.5;
    const auto v = closed(Family::Vminus, 2, m);
    const auto edges = band_edges(v, 5);
    for (int n = 0; n < 5; ++n) {
      const auto st = bloch_edge_state(v, edges[n], 256);
      double num = 0, den = 0;
      for (std::size_t i = 0; i < st.psi.size(); ++i) {
        const double c = psi_minus(2, n, m, st.psi.abscissa(i));
        num += c * st.psi.samples[i];
        den += c * c;
      }
      const double scale = num / den;
      double worst = 0;
      for (std::size_t i = 0; i < st.psi.size(); ++i)
        worst = std::max(worst, std::abs(st.psi.samples[i] -
                                         scale * psi_minus(2, n, m, st.psi.abscissa(i))));
      CHECK(worst < 1e-6);
    }
  }

  TEST_CASE("numeric partner reproduces the closed-form V+") {
    for (int j : {2, 3}) {
      const double m = 0.5;
      const auto vp = numeric_partner(closed(Family::Vminus, j, m), 512);
      const PotentialSpec ref(Family::Vplus, j, m);
      double worst = 0;
      for (int i = 0; i < 999; ++i) {
        const double x = vp.period() * i / 999.0;
        worst = std::max(worst, std::abs(vp(x) - ref(x)));
      }
      CHECK(worst < 1e-6);
    }
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(PeriodicPotential(1.0, [](double x) { return x; }), DomainError);
    CHECK_THROWS_AS(PeriodicPotential(-1.0, [](double) { return 0.0; }), DomainError);
    const auto v = closed(Family::Vminus, 2, 0.5);
    CHECK_THROWS_AS(band_edges(v, 5, 1.0), IncompleteSpectrumError);
    CHECK_THROWS_AS(numeric_partner(v, 16), DomainError);
  }
}
