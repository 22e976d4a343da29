#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "vortex/errors.hpp"

namespace vortex {

//==============================================================================
// Bessel functions of the first kind, integer order, real argument >= 0.
//
// Moderate arguments use Miller's backward recurrence normalized with the sum
// rule J_0 + 2 sum J_2k = 1. Arguments well inside the oscillatory regime
// (x >> n^2) use the Hankel asymptotic expansion.
//==============================================================================

double bessel_j(int n, double x);

// J_0(x) ... J_{n_max}(x) from a single backward-recurrence pass.
std::vector<double> bessel_j_orders(int n_max, double x);

// Amplitude series of the large-argument expansion
//   J_n(x) = sqrt(2 / (pi x)) (P cos chi - Q sin chi),  chi = x - (n/2 + 1/4) pi,
// i.e. H_n(x) = sqrt(2 / (pi x)) (P + i Q) e^{i chi}. Used to split products
// of Bessel functions into slowly varying and oscillating parts.
struct BesselAmplitude {
  double p = 1.0;
  double q = 0.0;
  // Smallest retained term relative to |P| + |Q|.
  double truncation = 0.0;
};
BesselAmplitude bessel_amplitude(int n, double x);

//==============================================================================
// Quadrature
//==============================================================================

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;

  template <class F> auto apply(F &&f) const {
    using T = decltype(f(0.0));
    T sum{};
    for (std::size_t i = 0; i < nodes.size(); ++i)
      sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

// Gauss-Legendre rule with `order` nodes mapped onto [a, b].
QuadratureRule gauss_rule(int order, double a, double b);

struct IntegrationOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  // Accept when the error is below l1_rel_tol * integral of |f|. Useful for
  // integrals that cancel to (near) zero.
  double l1_rel_tol = 0.0;
  int max_subdivisions = 4000;
  // Interior points where the integrand is singular or has a kink. Points
  // outside (a, b) are ignored.
  std::vector<double> split_points;
};

template <class T> struct IntegrationResult {
  T value{};
  double error = 0.0;
  double l1 = 0.0; // estimate of the integral of |f|
  bool converged = true;
  long evaluations = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double> &v) { return std::abs(v); }
inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const std::complex<double> &v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

template <class T> struct Panel {
  double a, b;
  T value;
  double error;
  double l1;
};

template <class T> struct PanelOrder {
  bool operator()(const Panel<T> &x, const Panel<T> &y) const {
    if (x.error != y.error)
      return x.error < y.error;
    return x.a > y.a;
  }
};

template <class F>
auto kronrod15(F &f, double a, double b, long &evals) {
  using T = decltype(f(0.5 * (a + b)));
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  T fv[15];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    fv[2 * j] = f(center - dx);
    fv[2 * j + 1] = f(center + dx);
  }
  fv[14] = f(center);
  evals += 15;
  for (const auto &v : fv)
    if (!finite(v))
      throw NumericalError("non-finite integrand value on [" +
                           std::to_string(a) + ", " + std::to_string(b) + "]");

  T kronrod = kKronrodWeights[7] * fv[14];
  T gauss = kGaussWeights[3] * fv[14];
  double abs_sum = kKronrodWeights[7] * magnitude(fv[14]);
  for (int j = 0; j < 7; ++j) {
    const T pair = fv[2 * j] + fv[2 * j + 1];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] *
               (magnitude(fv[2 * j]) + magnitude(fv[2 * j + 1]));
    if (j % 2 == 1)
      gauss += kGaussWeights[j / 2] * pair;
  }
  const T mean = kronrod * 0.5;
  double asc = kKronrodWeights[7] * magnitude(fv[14] - mean);
  for (int j = 0; j < 7; ++j)
    asc += kKronrodWeights[j] *
           (magnitude(fv[2 * j] - mean) + magnitude(fv[2 * j + 1] - mean));

  const double scale = std::abs(half);
  double err = magnitude(kronrod - gauss) * scale;
  asc *= scale;
  if (asc != 0.0 && err != 0.0)
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  const double l1 = abs_sum * scale;
  const double roundoff = 50.0 * 2.220446049250313e-16 * l1;
  err = std::max(err, roundoff);
  return Panel<T>{a, b, kronrod * half, err, l1};
}

} // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) quadrature. Bisects the panel with the
// largest error estimate until the total estimate meets the tolerance or the
// subdivision budget is spent (converged = false, best estimate kept). A
// non-finite integrand value throws NumericalError.
template <class F>
auto integrate(F &&f, double a, double b, const IntegrationOptions &opt = {}) {
  using T = decltype(f(0.5 * (a + b)));
  using Panel = detail::Panel<T>;
  IntegrationResult<T> out;
  if (!(a < b)) {
    if (a == b)
      return out;
    throw DomainError("integrate: invalid interval, a must be < b");
  }

  std::vector<double> edges{a};
  {
    std::vector<double> splits;
    for (double s : opt.split_points)
      if (s > a && s < b)
        splits.push_back(s);
    std::sort(splits.begin(), splits.end());
    for (double s : splits)
      if (s - edges.back() > 1e-15 * std::max(1.0, std::abs(s)))
        edges.push_back(s);
    if (b - edges.back() <= 1e-15 * std::max(1.0, std::abs(b)) &&
        edges.size() > 1)
      edges.back() = b;
    else
      edges.push_back(b);
  }

  std::priority_queue<Panel, std::vector<Panel>, detail::PanelOrder<T>> heap;
  T total{};
  double total_err = 0.0, total_l1 = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto p = detail::kronrod15(f, edges[i], edges[i + 1], out.evaluations);
    total += p.value;
    total_err += p.error;
    total_l1 += p.l1;
    heap.push(p);
  }

  auto threshold = [&] {
    return std::max({opt.abs_tol, opt.rel_tol * detail::magnitude(total),
                     opt.l1_rel_tol * total_l1});
  };

  int panels = static_cast<int>(heap.size());
  while (total_err > threshold()) {
    if (panels >= opt.max_subdivisions) {
      out.converged = false;
      break;
    }
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 4e-16 * std::max(std::abs(worst.a), 1e-300)) {
      out.converged = false;
      break;
    }
    heap.pop();
    auto left = detail::kronrod15(f, worst.a, mid, out.evaluations);
    auto right = detail::kronrod15(f, mid, worst.b, out.evaluations);
    total += (left.value + right.value) - worst.value;
    total_err += (left.error + right.error) - worst.error;
    total_l1 += (left.l1 + right.l1) - worst.l1;
    heap.push(left);
    heap.push(right);
    ++panels;
  }

  // Re-sum from scratch so the result does not carry update round-off.
  T sum{};
  double err = 0.0, l1 = 0.0;
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(),
            [](const Panel &x, const Panel &y) { return x.a < y.a; });
  for (const auto &p : all) {
    sum += p.value;
    err += p.error;
    l1 += p.l1;
  }
  out.value = sum;
  out.error = err;
  out.l1 = l1;
  if (out.converged)
    out.converged = err <= std::max({opt.abs_tol, opt.rel_tol * detail::magnitude(sum),
                                     opt.l1_rel_tol * l1}) * (1.0 + 1e-12);
  return out;
}

// Shanks transformation via Wynn's epsilon algorithm. Returns the best
// extrapolated limit of `partial_sums` and an error estimate taken from the
// spread of the last few extrapolants.
template <class T>
std::pair<T, double> wynn_epsilon(std::span<const T> partial_sums) {
  const std::size_t n = partial_sums.size();
  if (n == 0)
    return {T{}, 0.0};
  if (n < 3)
    return {partial_sums[n - 1],
            n == 2 ? detail::magnitude(partial_sums[1] - partial_sums[0])
                   : detail::magnitude(partial_sums[0])};

  // Each row index m holds the estimate using the first m+1 sums.
  auto limit_of = [&](std::size_t m) {
    // Long tables amplify round-off; only the latest sums are used.
    const std::size_t first = m >= 40 ? m - 39 : 0;
    std::vector<T> prev(m - first + 2, T{}),
        cur(partial_sums.begin() + first, partial_sums.begin() + m + 1);
    T best = cur.back();
    for (std::size_t k = 1; cur.size() > 1; ++k) {
      std::vector<T> next(cur.size() - 1);
      bool broke = false;
      for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
        const T diff = cur[i + 1] - cur[i];
        if (detail::magnitude(diff) == 0.0) {
          broke = true;
          break;
        }
        next[i] = prev[i + 1] + T(1.0) / diff;
      }
      if (broke)
        break;
      prev = std::move(cur);
      cur = std::move(next);
      if (k % 2 == 0)
        best = cur.back();
    }
    return best;
  };

  const T e0 = limit_of(n - 1);
  const T e1 = limit_of(n - 2);
  const T e2 = limit_of(n - 3);
  const double err = detail::magnitude(e0 - e1) + detail::magnitude(e0 - e2);
  return {e0, err};
}

struct TailOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int min_segments = 6;
  int max_segments = 120;
};

// Integral of an oscillatory integrand over [a, inf), summed over consecutive
// segments of width `segment` (ideally the half period of the dominant
// oscillation) and accelerated with the epsilon algorithm.
template <class F>
auto integrate_tail(F &&f, double a, double segment,
                    const TailOptions &topt = {},
                    const IntegrationOptions &segment_opt = {}) {
  using T = decltype(f(a));
  IntegrationResult<T> out;
  if (!(segment > 0.0))
    throw DomainError("integrate_tail: segment width must be positive");

  std::vector<T> sums;
  T running{};
  double quad_err = 0.0;
  for (int j = 0; j < topt.max_segments; ++j) {
    auto seg = integrate(f, a + j * segment, a + (j + 1) * segment,
                         segment_opt);
    out.evaluations += seg.evaluations;
    out.l1 += seg.l1;
    quad_err += seg.error;
    if (!seg.converged)
      out.converged = false;
    running += seg.value;
    sums.push_back(running);
    if (static_cast<int>(sums.size()) >= topt.min_segments) {
      auto [lim, err] = wynn_epsilon<T>(sums);
      out.value = lim;
      out.error = err + quad_err;
      if (out.error <=
          std::max(topt.abs_tol, topt.rel_tol * detail::magnitude(lim)))
        return out;
    }
  }
  if (sums.size() < static_cast<std::size_t>(topt.min_segments)) {
    out.value = running;
    out.error = quad_err;
  }
  out.converged = false;
  return out;
}

//==============================================================================
// Graf shift coefficients for displaced Bessel beams
//==============================================================================

// Truncation order ceil(x + 8 + 4 x^(1/3)) for the displacement sum; 0 at x=0.
int graf_truncation(double k_rho_R0);

struct GrafCoefficients {
  int center_order = 0;
  double argument = 0.0;  // k_rho * R0
  int truncation = 0;     // P
  std::vector<double> values; // J_p(argument), p = -P .. P
  double tail_bound = 0.0;    // bound on sum_{|p|>P} |J_p(argument)|

  double coefficient(int p) const {
    if (p < -truncation || p > truncation)
      return 0.0;
    return values[static_cast<std::size_t>(p + truncation)];
  }
  double sum_of_squares() const;
};

GrafCoefficients graf_coefficients(int l, double k_rho_R0, double tail_tol);

// Bound on sum_{|p| > P} |J_p(x)| from the super-exponential decay above the
// turning point.
double graf_tail_bound(int P, double x);

// Displaced beam J_l(k|r' + R0 x|) e^{i l Phi} rebuilt from beams centred on
// the displaced origin: sum_p (-1)^p J_p(k R0) J_{l+p}(k r') e^{i(l+p) phi'}.
std::complex<double> beam_reconstruct(int l, double k_rho, double R0,
                                      double r_prime, double phi_prime, int P);

// The same quantity by direct geometry (lab radius and azimuth).
std::complex<double> beam_direct(int l, double k_rho, double R0,
                                 double r_prime, double phi_prime);

} // namespace vortex
