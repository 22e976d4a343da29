#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "vortex/model.hpp"
#include "vortex/specfun.hpp"

using namespace vortex;

namespace {

// int_0^inf f(q) q dq on a fixed long Gauss grid, independent of the library
// adaptive integrator.
template <class F> double moment(F f, double extent) {
  double sum = 0.0;
  const int panels = 200;
  for (int i = 0; i < panels; ++i) {
    const auto r = gauss_rule(20, extent * i / panels, extent * (i + 1) / panels);
    sum += r.apply([&](double q) { return f(q) * q; });
  }
  return sum;
}

} // namespace

TEST_CASE("ground state normalization constant") {
  const AtomicState g(0, 0, 1.0);
  CHECK(radial_u(g, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(g.normalization() == doctest::Approx(2.0).epsilon(1e-14));
  // 2 e^{-q}
  for (double q : {0.3, 1.0, 4.0})
    CHECK(radial_u(g, q) == doctest::Approx(2.0 * std::exp(-q)).epsilon(1e-14));
  // scale a: 2 e^{-q/a} / a
  const AtomicState g2(0, 0, 2.5);
  CHECK(radial_u(g2, 1.0) == doctest::Approx(2.0 * std::exp(-0.4) / 2.5).epsilon(1e-14));
}

TEST_CASE("family normalization and orthogonality by independent quadrature") {
  for (double a : {0.7, 1.0, 1.8})
    for (int m = 0; m <= 3; ++m)
      for (int n = 0; n <= 3; ++n) {
        const AtomicState s(m, n, a);
        const double extent = 40.0 * (2 * n + 2 * m + 7) * a;
        CAPTURE(a);
        CAPTURE(m);
        CAPTURE(n);
        CHECK(moment([&](double q) { return radial_u(s, q) * radial_u(s, q); }, extent) ==
              doctest::Approx(1.0).epsilon(1e-10));
        for (int n2 = n + 1; n2 <= 3; ++n2) {
          const AtomicState s2(m, n2, a);
          CHECK(std::abs(moment([&](double q) { return radial_u(s, q) * radial_u(s2, q); },
                                extent)) < 1e-10);
        }
      }
  CHECK(std::abs(radial_overlap(AtomicState(0, 0), AtomicState(0, 1))) < 1e-10);
  CHECK(radial_overlap(AtomicState(1, 2), AtomicState(1, 2)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("profiles decay") {
  for (int m = 0; m <= 2; ++m)
    for (int n = 0; n <= 2; ++n)
      CHECK(std::abs(radial_u(AtomicState(m, n), 1000.0)) < 1e-30);
}

TEST_CASE("pair density tail beyond 40 a") {
  for (int alpha : {1, -1}) {
    const auto t = default_transition(alpha);
    auto f = [&](double q) { return radial_pair_density(t, q) * q; };
    double total = 0, tail = 0;
    for (int i = 0; i < 100; ++i) {
      const auto r = gauss_rule(20, 0.4 * i, 0.4 * (i + 1));
      total += r.apply(f);
    }
    for (int i = 0; i < 50; ++i) {
      const auto r = gauss_rule(20, 40.0 + 4.0 * i, 44.0 + 4.0 * i);
      tail += r.apply(f);
    }
    CHECK(std::abs(total) > 0.1);
    CHECK(std::abs(tail) < 1e-12 * std::abs(total + tail));
  }
}

TEST_CASE("profile sign and m symmetry") {
  const AtomicState p(1, 0, 1.0, 1), pm(-1, 0, 1.0, 1), neg(1, 0, 1.0, -1);
  for (double q : {0.1, 1.0, 3.0}) {
    CHECK(radial_u(p, q) == radial_u(pm, q));
    CHECK(radial_u(neg, q) == -radial_u(p, q));
  }
}

TEST_CASE("state validation") {
  CHECK_THROWS_AS(AtomicState(0, -1), ValidationError);
  CHECK_THROWS_AS(AtomicState(0, 0, 0.0), ValidationError);
  CHECK_THROWS_AS(AtomicState(0, 0, 1.0, 2), ValidationError);
  CHECK_THROWS_AS(BesselBeam(1, 0.0), ValidationError);
  CHECK_THROWS_AS(Displacement(-0.1), ValidationError);
  CHECK_THROWS_AS(DipoleTransition(AtomicState(0, 0), AtomicState(0, 0)), ValidationError);
  CHECK_NOTHROW(DipoleTransition(AtomicState(0, 0), AtomicState(0, 1)));
}

TEST_CASE("default transition") {
  for (int alpha : {1, -1}) {
    const auto t = default_transition(alpha);
    CHECK(t.alpha() == alpha);
    CHECK(t.is_dipole());
    CHECK(t.initial().m == 0);
    CHECK(t.final_state().m == -alpha);
    CHECK(radial_pair_density(t, 0.0) == 0.0);
    CHECK(std::abs(radial_pair_density(t, 300.0)) < 1e-100);
    CHECK(t.pair_density(1.3) == doctest::Approx(radial_u(t.initial(), 1.3) *
                                                 radial_u(t.final_state(), 1.3)));
  }
}

TEST_CASE("pair density peak by scan") {
  // u_00 u_01 ~ q e^{-4q/3}: peak at 3/4
  const auto t = default_transition(1);
  double best_q = 0, best = -1;
  for (int i = 1; i < 200000; ++i) {
    const double q = 1e-5 * i;
    const double v = radial_pair_density(t, q);
    if (v > best) {
      best = v;
      best_q = q;
    }
  }
  CHECK(best_q == doctest::Approx(0.75).epsilon(1e-4));
}

TEST_CASE("density cutoff bounds the pair density") {
  for (int alpha : {1, -1})
    for (double a : {0.5, 1.0, 2.0}) {
      const auto t = default_transition(alpha, a);
      const double qc = t.density_cutoff();
      double peak = 0;
      for (int i = 1; i < 2000; ++i)
        peak = std::max(peak, std::abs(t.pair_density(qc * i / 2000.0) * qc * i / 2000.0));
      CHECK(std::abs(t.pair_density(qc) * qc) < 1e-16 * peak);
    }
}
