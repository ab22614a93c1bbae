#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "elliptic.hpp"
#include "errors.hpp"
#include "oracles.hpp"

using namespace susylame;

TEST_SUITE("elliptic") {
  TEST_CASE("trivial arguments") {
    const auto t = jacobi(0.0, 0.5);
    CHECK(t.sn == 0.0);
    CHECK(t.cn == 1.0);
    CHECK(t.dn == 1.0);
    CHECK(complete_K(0.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    CHECK(jacobi(1.2, 0.0).sn == doctest::Approx(std::sin(1.2)).epsilon(1e-15));
  }

  TEST_CASE("K against an independent elliptic integral") {
    CHECK(std::abs(complete_K(0.5) - 1.8540746773013719) < 1e-14);
    for (double m : {1e-12, 1e-3, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
      const double ref = oracle::complete_K(m);
      CHECK(std::abs(complete_K(m) - ref) <= 4e-15 * ref);
    }
    // near m = 1 the reference loses 1 - m to rounding in k^2; use the
    // logarithmic expansion instead
    for (double q : {1e-10, 1e-12, 1e-14}) {
      const double m = 1 - q;
      const double k1 = std::sqrt(1 - m);
      const double L = std::log(4 / k1);
      const double ref = L + (1 - m) / 4 * (L - 1);
      CHECK(std::abs(complete_K(m) - ref) <= 1e-14 * ref);
    }
  }

  TEST_CASE("hyperbolic and circular limits") {
    for (double x : {-3.0, -0.7, 0.0, 0.4, 2.5}) {
      const auto t = jacobi(x, 1.0);
      CHECK(t.sn == doctest::Approx(std::tanh(x)).epsilon(1e-15));
      CHECK(t.cn == doctest::Approx(1 / std::cosh(x)).epsilon(1e-15));
      CHECK(t.dn == doctest::Approx(1 / std::cosh(x)).epsilon(1e-15));
      const auto c = jacobi(x, 0.0);
      CHECK(std::abs(c.sn - std::sin(x)) < 1e-15);
      CHECK(std::abs(c.cn - std::cos(x)) < 1e-15);
      CHECK(c.dn == 1.0);
    }
  }

  TEST_CASE("near-degenerate moduli") {
    double circ = 0, hyp = 0;
    for (int i = 0; i <= 1000; ++i) {
      const double x = -5 + 10.0 * i / 1000;
      circ = std::max(circ, std::abs(jacobi(x, 1e-12).sn - std::sin(x)));
      hyp = std::max(hyp, std::abs(jacobi(x, 1 - 1e-12).sn - std::tanh(x)));
    }
    CHECK(circ <= 1e-9);
    CHECK(hyp <= 1e-6);
  }

  TEST_CASE("domain errors") {
    CHECK_THROWS_AS(jacobi(1.0, 1.5), DomainError);
    CHECK_THROWS_AS(jacobi(1.0, -0.1), DomainError);
    CHECK_THROWS_AS(jacobi(1.0, NAN), DomainError);
    CHECK_THROWS_AS(complete_K(1.0), DomainError);
    CHECK_THROWS_WITH_AS(ModulusParam(2.0), doctest::Contains("m out of range"), DomainError);
    CHECK(std::isinf(ModulusParam(1.0).K()));
  }

  TEST_CASE("identities, periodicity and parity on 10^4 random points") {
    std::mt19937_64 rng(20261015);
    std::uniform_real_distribution<double> xs(-40.0, 40.0), ms(0.0, 1.0);
    double worst_id = 0, worst_period = 0, worst_parity = 0, worst_ref = 0;
    for (int i = 0; i < 10000; ++i) {
      const double x = xs(rng), m = i == 0 ? 0.0 : ms(rng);
      const double K = complete_K(m);
      const auto t = jacobi(x, m);
      worst_id = std::max({worst_id, std::abs(t.sn * t.sn + t.cn * t.cn - 1),
                           std::abs(t.dn * t.dn + m * t.sn * t.sn - 1)});
      const auto p4 = jacobi(x + 4 * K, m);
      const auto p2 = jacobi(x + 2 * K, m);
      worst_period = std::max({worst_period, std::abs(p4.sn - t.sn), std::abs(p4.cn - t.cn),
                               std::abs(p2.dn - t.dn), std::abs(p2.sn + t.sn),
                               std::abs(p2.cn + t.cn)});
      const auto r = jacobi(-x, m);
      worst_parity = std::max({worst_parity, std::abs(r.sn + t.sn), std::abs(r.cn - t.cn),
                               std::abs(r.dn - t.dn)});
      const auto ref = oracle::jacobi(x, m);
      worst_ref = std::max({worst_ref, std::abs(ref.sn - t.sn), std::abs(ref.cn - t.cn),
                            std::abs(ref.dn - t.dn)});
    }
    CHECK(worst_id < 1e-12);
    CHECK(worst_period < 1e-12);
    CHECK(worst_parity < 1e-15);
    CHECK(worst_ref < 1e-12);
  }

  TEST_CASE("derivatives match central differences") {
    for (double m : {0.0, 0.3, 0.8, 1.0}) {
      for (double x : {-1.3, 0.2, 0.9, 2.7}) {
        const double h = 1e-5;
        const auto d = jacobi_derivatives(x, m);
        const auto a = jacobi(x + h, m), b = jacobi(x - h, m);
        CHECK(std::abs(d.dsn - (a.sn - b.sn) / (2 * h)) < 1e-9);
        CHECK(std::abs(d.dcn - (a.cn - b.cn) / (2 * h)) < 1e-9);
        CHECK(std::abs(d.ddn - (a.dn - b.dn) / (2 * h)) < 1e-9);
      }
    }
  }

  TEST_CASE("extended precision agrees with double") {
    for (double m : {0.1, 0.5, 0.9}) {
      const auto d = jacobi(1.1, m);
      const auto l = basic_jacobi<long double>(1.1L, m);
      CHECK(std::abs(static_cast<double>(l.sn) - d.sn) < 1e-15);
      CHECK(std::abs(static_cast<double>(basic_complete_K<long double>(m)) - complete_K(m)) <
            1e-15);
    }
  }
}
