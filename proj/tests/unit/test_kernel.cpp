#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "vortex/errors.hpp"
#include "vortex/kernel.hpp"

using namespace vortex;
using std::numbers::pi;

namespace {

// (2 / sqrt(r q)) Q_{lambda - 1/2}(chi), chi = (r^2 + q^2) / (2 r q), with the
// toroidal functions from complete elliptic integrals and upward recurrence.
double legendre_oracle(int lambda, double r, double q) {
  const double chi = (r * r + q * q) / (2 * r * q);
  const double k = std::sqrt(2.0 / (chi + 1.0));
  const double K = std::comp_ellint_1(k), E = std::comp_ellint_2(k);
  double qm = k * K;                                          // Q_{-1/2}
  double q0 = chi * k * K - std::sqrt(2.0 * (chi + 1.0)) * E; // Q_{1/2}
  lambda = std::abs(lambda);
  if (lambda == 0)
    return 2.0 / std::sqrt(r * q) * qm;
  for (int n = 1; n < lambda; ++n) {
    const double nu = n - 0.5;
    const double next = ((2 * nu + 1) * chi * q0 - nu * qm) / (nu + 1);
    qm = q0;
    q0 = next;
  }
  return 2.0 / std::sqrt(r * q) * q0;
}

// (2 pi / max) t^l (1/2)_l / l! 2F1(1/2, l + 1/2; l + 1; t^2), t = min / max.
double hypergeometric_oracle(int lambda, double r, double q) {
  const int l = std::abs(lambda);
  const double mx = std::max(r, q), t = std::min(r, q) / mx;
  long double pre = 2.0L * pi / mx * std::pow(static_cast<long double>(t), l);
  for (int j = 0; j < l; ++j)
    pre *= (0.5L + j) / (j + 1.0L);
  long double term = 1, sum = 1;
  const long double z = static_cast<long double>(t) * t;
  for (int n = 0; n < 200000; ++n) {
    term *= (0.5L + n) * (l + 0.5L + n) / ((l + 1.0L + n) * (n + 1.0L)) * z;
    sum += term;
    if (term < 1e-20L * sum)
      break;
  }
  return static_cast<double>(pre * sum);
}

} // namespace

TEST_CASE("kernel_F geometry") {
  CHECK(kernel_F(2.0, 0.0, 1.234) == doctest::Approx(0.5));
  CHECK(kernel_F(1.0, 1.0, pi) == doctest::Approx(0.5));
  CHECK(kernel_F(3.0, 4.0, pi / 2) == doctest::Approx(0.2));
  CHECK_THROWS_AS(kernel_F(1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("kernel_fourier trivial cases") {
  CHECK(kernel_fourier(0, 2.0, 0.0, 1e-12) == doctest::Approx(pi).epsilon(1e-12));
  CHECK(std::abs(kernel_fourier(1, 2.0, 0.0, 1e-12)) < 1e-14);
  CHECK_THROWS_AS(kernel_fourier(0, 1.0, 1.0, 1e-10), DomainError);
}

TEST_CASE("oracles agree with each other") {
  for (int lam : {0, 1, 2, 3})
    for (auto [r, q] : {std::pair{1.0, 0.5}, {0.3, 2.0}, {4.0, 3.1}}) {
      CHECK(legendre_oracle(lam, r, q) ==
            doctest::Approx(hypergeometric_oracle(lam, r, q)).epsilon(1e-11));
    }
  // lambda = 0 is 4 K(k) / (r + q), k^2 = 4 r q / (r + q)^2
  const double r = 1.3, q = 0.4;
  CHECK(hypergeometric_oracle(0, r, q) ==
        doctest::Approx(4.0 / (r + q) * std::comp_ellint_1(2 * std::sqrt(r * q) / (r + q)))
            .epsilon(1e-13));
}

TEST_CASE("kernel_fourier against the Legendre closed form") {
  CHECK(kernel_fourier(1, 1.0, 0.5, 1e-12) ==
        doctest::Approx(legendre_oracle(1, 1.0, 0.5)).epsilon(1e-10));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.05, 6.0);
  for (int lam : {0, 1, 2}) {
    int n = 0;
    while (n < 20) {
      const double r = u(rng), q = u(rng);
      if (std::abs(r - q) < 0.05 * std::max(r, q))
        continue;
      ++n;
      CAPTURE(lam);
      CAPTURE(r);
      CAPTURE(q);
      const double got = kernel_fourier(lam, r, q, 1e-12);
      CHECK(got == doctest::Approx(legendre_oracle(lam, r, q)).epsilon(1e-8));
      CHECK(got == doctest::Approx(hypergeometric_oracle(lam, r, q)).epsilon(1e-8));
    }
  }
}

TEST_CASE("kernel_fourier symmetries") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  for (int i = 0; i < 30; ++i) {
    const double a = u(rng), b = u(rng);
    if (std::abs(a - b) < 1e-3)
      continue;
    const int lam = static_cast<int>(rng() % 5);
    const double kab = kernel_fourier(lam, a, b, 1e-11);
    CHECK(kab == doctest::Approx(kernel_fourier(lam, b, a, 1e-11)).epsilon(1e-10));
    CHECK(kab == doctest::Approx(kernel_fourier(-lam, a, b, 1e-11)).epsilon(1e-10));
    CHECK(kab > 0.0);
  }
}

TEST_CASE("kernel_fourier decays with order") {
  double prev = kernel_fourier(0, 1.0, 0.6, 1e-12);
  for (int lam = 1; lam < 8; ++lam) {
    const double v = kernel_fourier(lam, 1.0, 0.6, 1e-12);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("azimuthal selection") {
  CHECK(azimuthal_selection(-1, 1) == 2 * pi);
  CHECK(azimuthal_selection(0, 1) == 0.0);
  CHECK(azimuthal_selection(2, -2) == 2 * pi);
  for (int lam = -5; lam <= 5; ++lam)
    for (int al = -5; al <= 5; ++al)
      CHECK(azimuthal_selection(lam, al) == (lam == -al ? 2 * pi : 0.0));
}

TEST_CASE("selection tamper hook") {
  testing::set_selection_tamper(true);
  CHECK(testing::selection_tampered());
  CHECK(azimuthal_selection(1, 1) == 2 * pi);
  CHECK(azimuthal_selection(-1, 1) == 0.0);
  testing::set_selection_tamper(false);
  CHECK(azimuthal_selection(-1, 1) == 2 * pi);
}

TEST_CASE("kernel table build, lookup and persistence") {
  const GridSpec rg{21, 0.1, 4.1}, qg{17, 0.05, 3.25};
  const auto t = KernelCoefficientTable::build(1, rg, qg, 1e-10, 2);
  CHECK(t.lambda() == 1);
  for (int i = 0; i < rg.points; i += 5)
    for (int j = 0; j < qg.points; j += 4) {
      const double r = rg.at(i), q = qg.at(j);
      if (std::abs(r - q) < 1e-12) {
        CHECK(std::isnan(t.value(i, j)));
        continue;
      }
      CHECK(t.value(i, j) == doctest::Approx(legendre_oracle(1, r, q)).epsilon(1e-9));
    }
  // far from the diagonal bilinear interpolation is accurate to the grid scale
  CHECK(t.interpolate(3.9, 0.3) == doctest::Approx(legendre_oracle(1, 3.9, 0.3)).epsilon(1e-2));
  // near the diagonal the lookup falls back to direct quadrature
  CHECK(t.interpolate(1.0, 1.02) == doctest::Approx(legendre_oracle(1, 1.0, 1.02)).epsilon(1e-8));

  std::stringstream ss;
  t.save(ss);
  const auto back = KernelCoefficientTable::load(ss);
  CHECK(back.checksum() == t.checksum());
  CHECK(back.r_grid() == rg);
  CHECK(back.q_grid() == qg);
  CHECK(back.value(3, 7) == t.value(3, 7));

  std::stringstream again;
  t.save(again);
  std::string text = again.str();
  const auto pos = text.rfind('\n', text.size() - 2);
  text[pos + 1] = text[pos + 1] == '1' ? '2' : '1';
  std::stringstream corrupt(text);
  CHECK_THROWS_AS(KernelCoefficientTable::load(corrupt), ValidationError);

  std::stringstream bad_version("vortex-kernel-table 9\n");
  CHECK_THROWS_AS(KernelCoefficientTable::load(bad_version), ValidationError);
}
