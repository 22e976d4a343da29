#include "vortex/specfun.hpp"

#include <cstdlib>
#include <limits>

namespace vortex {

namespace {

constexpr double kPi = std::numbers::pi;

bool use_asymptotic(int n, double x) {
  return x >= 25.0 && static_cast<double>(n) * n <= x;
}

BesselAmplitude amplitude_series(int n, double x) {
  const double mu = 4.0 * static_cast<double>(n) * n;
  BesselAmplitude out;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double last = std::numeric_limits<double>::infinity();
  bool shrinking = false;
  for (int k = 1; k < 400; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::abs(term);
    if (mag > last && shrinking)
      break; // asymptotic series turned around
    if (mag < last)
      shrinking = true;
    last = mag;
    switch (k % 4) {
    case 1: q += term; break;
    case 2: p -= term; break;
    case 3: q -= term; break;
    default: p += term; break;
    }
    if (mag < 1e-17 * (std::abs(p) + std::abs(q)))
      break;
  }
  out.p = p;
  out.q = q;
  out.truncation = last / (std::abs(p) + std::abs(q));
  return out;
}

// Hankel expansion, n >= 0.
double bessel_j_asymptotic(int n, double x) {
  const auto [p, q, trunc] = amplitude_series(n, x);
  (void)trunc;
  // chi = x - (n/2 + 1/4) pi, reduced with n mod 4 to keep the phase exact.
  const double shift = (0.5 * (n % 4) + 0.25) * kPi;
  const double c = std::cos(x) * std::cos(shift) + std::sin(x) * std::sin(shift);
  const double s = std::sin(x) * std::cos(shift) - std::cos(x) * std::sin(shift);
  return std::sqrt(2.0 / (kPi * x)) * (p * c - q * s);
}

int miller_start(int n_max, double x) {
  const double top = std::max(static_cast<double>(n_max), x);
  int start = static_cast<int>(std::ceil(top + 30.0 + 8.0 * std::cbrt(top)));
  if (start % 2)
    ++start;
  return start;
}

// Backward recurrence from the Miller start. When `store` is non-null the
// normalized J_0..J_{n_max} are written to it; the return value is J_{n_max}.
double miller(int n_max, double x, std::vector<double> *store) {
  const int start = miller_start(n_max, x);
  constexpr double kBig = 1e250, kSmall = 1e-250;
  double above = 0.0, cur = 1e-30;
  double norm = 0.0; // J_0 + 2 sum J_2k, accumulated unnormalized
  double wanted = 0.0;
  if (store)
    store->assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  const double two_over_x = 2.0 / x;
  for (int k = start; k >= 0; --k) {
    // cur holds J_k (unnormalized), above holds J_{k+1}.
    if (k <= n_max) {
      if (store)
        (*store)[static_cast<std::size_t>(k)] = cur;
      if (k == n_max)
        wanted = cur;
    }
    if (k == 0)
      norm += cur;
    else if (k % 2 == 0)
      norm += 2.0 * cur;
    if (k == 0)
      break;
    const double below = k * two_over_x * cur - above;
    above = cur;
    cur = below;
    if (std::abs(cur) > kBig) {
      cur *= kSmall;
      above *= kSmall;
      norm *= kSmall;
      wanted *= kSmall;
      if (store)
        for (int j = k; j <= n_max; ++j)
          (*store)[static_cast<std::size_t>(j)] *= kSmall;
    }
  }
  if (store)
    for (auto &v : *store)
      v /= norm;
  return wanted / norm;
}

} // namespace

double bessel_j(int n, double x) {
  if (!(x >= 0.0))
    throw DomainError("bessel_j: argument must be non-negative");
  if (n < 0) {
    const double v = bessel_j(-n, x);
    return (n % 2 == 0) ? v : -v;
  }
  if (x == 0.0)
    return n == 0 ? 1.0 : 0.0;
  if (use_asymptotic(n, x))
    return bessel_j_asymptotic(n, x);
  return miller(n, x, nullptr);
}

BesselAmplitude bessel_amplitude(int n, double x) {
  if (!(x > 0.0))
    throw DomainError("bessel_amplitude: argument must be positive");
  return amplitude_series(std::abs(n), x);
}

std::vector<double> bessel_j_orders(int n_max, double x) {
  if (!(x >= 0.0))
    throw DomainError("bessel_j_orders: argument must be non-negative");
  if (n_max < 0)
    throw DomainError("bessel_j_orders: n_max must be non-negative");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (use_asymptotic(std::max(n_max, 1), x)) {
    // Forward recurrence is stable below the turning point.
    out[0] = bessel_j_asymptotic(0, x);
    if (n_max >= 1)
      out[1] = bessel_j_asymptotic(1, x);
    for (int k = 1; k < n_max; ++k)
      out[static_cast<std::size_t>(k) + 1] =
          (2.0 * k / x) * out[static_cast<std::size_t>(k)] -
          out[static_cast<std::size_t>(k) - 1];
    return out;
  }
  miller(n_max, x, &out);
  return out;
}

QuadratureRule gauss_rule(int order, double a, double b) {
  if (order < 1)
    throw DomainError("gauss_rule: order must be >= 1");
  if (!(a < b))
    throw DomainError("gauss_rule: invalid interval, a must be < b");
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const double center = 0.5 * (a + b), half = 0.5 * (b - a);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = order * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= order; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = order * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // z is the i-th largest root; fill symmetric pair in increasing order.
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    rule.nodes[lo] = center - half * z;
    rule.nodes[hi] = center + half * z;
    rule.weights[lo] = rule.weights[hi] = half * w;
  }
  if (order % 2 == 1)
    rule.nodes[static_cast<std::size_t>(order / 2)] = center;
  return rule;
}

int graf_truncation(double k_rho_R0) {
  if (!(k_rho_R0 >= 0.0))
    throw DomainError("graf_truncation: argument must be non-negative");
  if (k_rho_R0 == 0.0)
    return 0;
  return static_cast<int>(
      std::ceil(k_rho_R0 + 8.0 + 4.0 * std::cbrt(k_rho_R0)));
}

double graf_tail_bound(int P, double x) {
  if (x == 0.0)
    return 0.0;
  // Explicit terms up to the turning point, then a geometric bound from the
  // continued-fraction ratio J_{p+1}/J_p <= x / (2(p+1) - x) for p + 1 >= x.
  const int explicit_top = std::max(P + 1, static_cast<int>(std::ceil(x)) + 1);
  double sum = 0.0;
  for (int p = P + 1; p < explicit_top; ++p)
    sum += std::abs(bessel_j(p, x));
  const double ratio = x / (2.0 * (explicit_top + 1) - x);
  sum += std::abs(bessel_j(explicit_top, x)) / (1.0 - ratio);
  return 2.0 * sum;
}

double GrafCoefficients::sum_of_squares() const {
  double s = 0.0;
  // Smallest terms first.
  for (int k = truncation; k >= 1; --k) {
    const double a = coefficient(k), b = coefficient(-k);
    s += a * a + b * b;
  }
  const double c0 = coefficient(0);
  return s + c0 * c0;
}

GrafCoefficients graf_coefficients(int l, double k_rho_R0, double tail_tol) {
  if (!(tail_tol > 0.0))
    throw DomainError("graf_coefficients: tail_tol must be positive");
  if (!(k_rho_R0 >= 0.0))
    throw DomainError("graf_coefficients: k_rho*R0 must be non-negative");
  GrafCoefficients g;
  g.center_order = l;
  g.argument = k_rho_R0;
  int P = graf_truncation(k_rho_R0);
  double tail = graf_tail_bound(P, k_rho_R0);
  while (tail >= tail_tol) {
    ++P;
    tail = graf_tail_bound(P, k_rho_R0);
  }
  g.truncation = P;
  g.tail_bound = tail;
  const auto orders = bessel_j_orders(P, k_rho_R0);
  g.values.resize(static_cast<std::size_t>(2 * P + 1));
  for (int p = -P; p <= P; ++p) {
    const double v = orders[static_cast<std::size_t>(std::abs(p))];
    g.values[static_cast<std::size_t>(p + P)] =
        (p < 0 && (p % 2 != 0)) ? -v : v;
  }
  return g;
}

std::complex<double> beam_reconstruct(int l, double k_rho, double R0,
                                      double r_prime, double phi_prime, int P) {
  if (!(r_prime >= 0.0))
    throw DomainError("beam_reconstruct: r' must be non-negative");
  if (P < 0)
    throw DomainError("beam_reconstruct: truncation must be non-negative");
  const auto shift = bessel_j_orders(P, k_rho * R0);
  const int top = std::abs(l) + P;
  const auto local = bessel_j_orders(top, k_rho * r_prime);
  auto signed_j = [](const std::vector<double> &tab, int n) {
    const double v = tab[static_cast<std::size_t>(std::abs(n))];
    return (n < 0 && (n % 2 != 0)) ? -v : v;
  };
  std::complex<double> sum{};
  for (int p = P; p >= -P; --p) {
    const double coeff = ((p % 2 == 0) ? 1.0 : -1.0) * signed_j(shift, p);
    if (coeff == 0.0)
      continue;
    const int order = l + p;
    sum += coeff * signed_j(local, order) *
           std::polar(1.0, order * phi_prime);
  }
  return sum;
}

std::complex<double> beam_direct(int l, double k_rho, double R0,
                                 double r_prime, double phi_prime) {
  if (!(r_prime >= 0.0))
    throw DomainError("beam_direct: r' must be non-negative");
  const double x = r_prime * std::cos(phi_prime) + R0;
  const double y = r_prime * std::sin(phi_prime);
  const double r = std::hypot(x, y);
  if (r == 0.0)
    return l == 0 ? 1.0 : 0.0;
  return bessel_j(l, k_rho * r) * std::polar(1.0, l * std::atan2(y, x));
}

} // namespace vortex
