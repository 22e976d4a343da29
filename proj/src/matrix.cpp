#include "vortex/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "vortex/kernel.hpp"
#include "vortex/parallel.hpp"
#include "vortex/specfun.hpp"

namespace vortex {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double signed_order(const std::vector<double> &orders, int n) {
  const double v = orders[static_cast<std::size_t>(std::abs(n))];
  return (n < 0 && (n % 2 != 0)) ? -v : v;
}

// Start of the asymptotic tail: past the turning points, where the amplitude
// series of both Bessel factors is accurate.
double tail_start(int a, int b, double k_in, double k_out, double r_max) {
  const double n = std::max(std::abs(a), std::abs(b));
  return std::max(r_max, (40.0 + 0.5 * n * n) / std::min(k_in, k_out));
}

// Slowly varying part of J_a(k_in r) J_b(k_out r):
//   Re[H_a(k_in r) conj(H_b(k_out r))] / 2,
// non-oscillatory for k_in = k_out, beating at |k_in - k_out| otherwise.
double beat_part(int a, int b, double k_in, double k_out, double r) {
  const auto pa = bessel_amplitude(a, k_in * r);
  const auto pb = bessel_amplitude(b, k_out * r);
  const double sign = ((a < 0 && (a % 2 != 0)) != (b < 0 && (b % 2 != 0))) ? -1.0 : 1.0;
  const std::complex<double> amp = std::complex<double>(pa.p, pa.q) *
                                   std::complex<double>(pb.p, -pb.q);
  // chi_a - chi_b with the order offsets reduced mod 4.
  const int quarter = ((std::abs(b) - std::abs(a)) % 4 + 4) % 4;
  const double phase = (k_in - k_out) * r + 0.5 * kPi * quarter;
  return sign * (amp * std::polar(1.0, phase)).real() /
         (kPi * std::sqrt(k_in * k_out) * r);
}

// int_R^inf h(r) J_a(k_in r) J_b(k_out r) dr for a smooth, algebraically
// decaying envelope h. The product is split into its beat part and the fast
// remainder (frequency k_in + k_out). The fast part and a beating slow part go
// through epsilon-accelerated half-period sums; a non-oscillating slow part is
// integrated after r = R / u.
template <class H>
auto bessel_product_tail(H &&h, int a, int b, double k_in, double k_out,
                         double R, double tol, double abs_tol) {
  using T = decltype(h(R));
  auto slow = [&](double r) -> T {
    const T env = h(r);
    if (env == T{})
      return T{};
    return env * beat_part(a, b, k_in, k_out, r);
  };
  auto fast = [&](double r) -> T {
    const T env = h(r);
    if (env == T{})
      return T{};
    const double jj = bessel_j(a, k_in * r) * bessel_j(b, k_out * r);
    return env * (jj - beat_part(a, b, k_in, k_out, r));
  };

  TailOptions topt;
  topt.rel_tol = tol;
  topt.abs_tol = abs_tol;
  IntegrationOptions seg;
  seg.rel_tol = 0.1 * tol;
  seg.abs_tol = 0.01 * abs_tol;

  IntegrationResult<T> out =
      integrate_tail(fast, R, kPi / (k_in + k_out), topt, seg);

  const double diff = std::abs(k_in - k_out);
  IntegrationResult<T> s;
  if (diff <= 1e-9 * std::max(k_in, k_out)) {
    auto mapped = [&](double u) -> T {
      if (u <= 0.0)
        return T{};
      const double r = R / u;
      return slow(r) * (R / (u * u));
    };
    IntegrationOptions o;
    o.rel_tol = tol;
    o.abs_tol = 0.1 * abs_tol;
    s = integrate(mapped, 0.0, 1.0, o);
  } else {
    s = integrate_tail(slow, R, kPi / diff, topt, seg);
  }
  out.value += s.value;
  out.error += s.error;
  out.l1 += s.l1;
  out.evaluations += s.evaluations;
  out.converged = out.converged && s.converged;
  return out;
}

std::vector<double> periodic_splits(double from, double to, double step) {
  std::vector<double> out;
  for (double s = from + step; s < to; s += step)
    out.push_back(s);
  return out;
}

} // namespace

double default_r_max(double k_in, double k_out, double a) {
  return 40.0 * a * std::max(1.0, 2.0 / std::min(k_in, k_out));
}

//------------------------------------------------------------------------------

TransitionPotential::TransitionPotential(const DipoleTransition &t, int lambda,
                                         double tol)
    : transition_(t), lambda_(lambda), extent_(t.density_cutoff()), tol_(tol) {
  if (!(tol > 0.0))
    throw ValidationError("TransitionPotential: tol must be positive");
}

TransitionPotential::TransitionPotential(std::function<double(double)> fn,
                                         int lambda, double extent)
    : custom_(std::move(fn)), lambda_(lambda), extent_(extent) {}

std::size_t TransitionPotential::cached_points() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

double TransitionPotential::operator()(double r_prime) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(r_prime); it != cache_.end())
      return it->second;
  }
  const double v = compute(r_prime);
  std::lock_guard lock(mutex_);
  cache_.emplace(r_prime, v);
  return v;
}

double TransitionPotential::compute(double r) const {
  if (custom_)
    return custom_(r);
  const DipoleTransition &t = *transition_;
  const double kernel_tol = std::min(1e-10, 1e-2 * tol_);
  auto kernel = [&](double q) {
    if (q == 0.0 || r == 0.0) {
      const double big = std::max(q, r);
      return lambda_ == 0 ? kTwoPi / big : 0.0;
    }
    double qq = q;
    if (std::abs(q - r) < 1e-13 * r)
      qq = q < r ? r * (1.0 - 1e-13) : r * (1.0 + 1e-13);
    return kernel_fourier(lambda_, r, qq, kernel_tol);
  };
  auto f = [&](double q) {
    const double rho = t.pair_density(q);
    if (rho == 0.0)
      return 0.0;
    return q * rho * kernel(q);
  };
  IntegrationOptions opt;
  opt.rel_tol = tol_;
  opt.l1_rel_tol = tol_;
  if (r <= 0.0 || r >= extent_)
    return integrate(f, 0.0, extent_, opt).value;
  // K has a logarithmic singularity at q = r'; q = r' -+ w u^3 flattens it.
  auto below = [&](double u) {
    const double w = r;
    return 3.0 * w * u * u * f(r - w * u * u * u);
  };
  auto above = [&](double u) {
    const double w = extent_ - r;
    return 3.0 * w * u * u * f(r + w * u * u * u);
  };
  return integrate(below, 0.0, 1.0, opt).value +
         integrate(above, 0.0, 1.0, opt).value;
}

//------------------------------------------------------------------------------

RadialIntegral radial_integral(int order_r, int order_out, double k_in,
                               double k_out, const TransitionPotential &G,
                               double tol, std::optional<double> r_max) {
  if (!(tol > 0.0))
    throw ValidationError("radial_integral: tol must be positive");
  if (!(k_in > 0.0) || !(k_out > 0.0))
    throw ValidationError("radial_integral: wavenumbers must be positive");
  RadialIntegral out;
  out.r_max = tail_start(order_r, order_out, k_in, k_out,
                         r_max.value_or(default_r_max(k_in, k_out)));

  auto f = [&](double r) {
    const double jj = bessel_j(order_r, k_in * r) * bessel_j(order_out, k_out * r);
    if (jj == 0.0)
      return 0.0;
    return r * jj * G(r);
  };

  IntegrationOptions opt;
  opt.rel_tol = tol;
  opt.l1_rel_tol = tol;
  opt.split_points = periodic_splits(0.0, out.r_max, 4.0);
  auto main = integrate(f, 0.0, out.r_max, opt);

  auto envelope = [&](double r) { return r * G(r); };
  auto tail = bessel_product_tail(envelope, order_r, order_out, k_in, k_out,
                                  out.r_max, tol, tol * main.l1);

  out.value = main.value + tail.value;
  out.error = main.error + tail.error;
  out.converged = main.converged && tail.converged;
  return out;
}

std::pair<double, ConvergenceReport>
radial_double_integral(int order_r, int order_out, double k_in, double k_out,
                       const DipoleTransition &t, int lambda, double tol) {
  TransitionPotential G(t, lambda, 0.01 * tol);
  const auto ri = radial_integral(order_r, order_out, k_in, k_out, G, tol);
  ConvergenceReport rep;
  rep.quad_tol = tol;
  rep.tail_estimate = ri.error;
  rep.r_max = ri.r_max;
  rep.terms_used = 1;
  rep.converged = ri.converged;
  return {ri.value, rep};
}

//------------------------------------------------------------------------------

ExpansionEngine::ExpansionEngine(double k_in, double k_out,
                                 const DipoleTransition &t, MatrixOptions opt)
    : k_in_(k_in), k_out_(k_out),
      alpha_(effective_alpha(t.alpha(), opt.selection_sign)), opt_(opt) {
  if (!(k_in > 0.0) || !(k_out > 0.0))
    throw ValidationError("ExpansionEngine: wavenumbers must be positive");
  if (!(opt.tol > 0.0))
    throw ValidationError("ExpansionEngine: tol must be positive");
  const double a = std::max(t.initial().a, t.final_state().a);
  r_max_ = opt.r_max_override.value_or(default_r_max(k_in, k_out, a));
  // The phi_q integral forces lambda = -alpha; K is even in lambda.
  potential_ = std::make_shared<TransitionPotential>(t, -alpha_, 1e-3 * opt.tol);
}

int ExpansionEngine::truncation_for(double R0) const {
  if (opt_.p_override)
    return *opt_.p_override;
  const double x = std::max(k_in_, k_out_) * R0;
  return graf_coefficients(0, x, opt_.graf_tail_tol).truncation;
}

RadialIntegral ExpansionEngine::radial(int order_r) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = radial_cache_.find(order_r); it != radial_cache_.end())
      return it->second;
  }
  const auto ri = radial_integral(order_r, order_r + alpha_, k_in_, k_out_,
                                  *potential_, 0.1 * opt_.tol, r_max_);
  std::lock_guard lock(mutex_);
  radial_cache_.emplace(order_r, ri);
  return ri;
}

ChannelAmplitude ExpansionEngine::amplitude(int l_in, int l_out,
                                            double R0) const {
  if (!(R0 >= 0.0))
    throw ValidationError("amplitude: R0 must be non-negative");
  ChannelAmplitude out;
  out.l_out = l_out;
  const int P = truncation_for(R0);
  const int shift = l_in + alpha_ - l_out; // p' - p
  const double x_in = k_in_ * R0, x_out = k_out_ * R0;
  const auto j_in = bessel_j_orders(P, x_in);
  const auto j_out = bessel_j_orders(P + std::abs(shift), x_out);

  std::complex<double> sum{};
  double abs_sum = 0.0, err = 0.0, max_radial = 0.0;
  bool converged = true;
  int terms = 0;
  for (int p = -P; p <= P; ++p) {
    const int p_out = p + shift;
    const int lambda = (l_in + p) - (l_out + p_out);
    const double selection = azimuthal_selection(lambda, alpha_);
    const double coeff = signed_order(j_in, p) * signed_order(j_out, p_out);
    if (coeff == 0.0 || selection == 0.0)
      continue;
    const double phase = ((p + p_out) % 2 == 0) ? 1.0 : -1.0;
    const auto ri = radial(l_in + p);
    const double term = phase * coeff * selection * ri.value;
    sum += term;
    abs_sum += std::abs(term);
    err += std::abs(coeff) * selection * ri.error;
    max_radial = std::max(max_radial, std::abs(ri.value));
    converged = converged && ri.converged;
    ++terms;
  }
  // Discarded |p| > P: |J_p'| <= 1 and |I| bounded by twice the largest
  // retained radial integral.
  const double discarded =
      (x_in > 0.0 ? graf_tail_bound(P, x_in) : 0.0) * kTwoPi * 2.0 * max_radial;

  out.value = sum;
  auto &rep = out.convergence;
  rep.p_truncation = P;
  rep.terms_used = terms;
  rep.quad_tol = opt_.tol;
  rep.tail_estimate = err + discarded;
  rep.r_max = r_max_;
  rep.converged =
      converged && rep.tail_estimate <= opt_.tol * std::max(abs_sum, 1e-300);
  if (terms == 0)
    rep.converged = converged;
  return out;
}

ChannelAmplitude matrix_element_expansion(const BesselBeam &beam_in,
                                          const BesselBeam &beam_out,
                                          const DipoleTransition &t,
                                          const Displacement &d,
                                          const MatrixOptions &opt) {
  ExpansionEngine engine(beam_in.k_rho, beam_out.k_rho, t, opt);
  return engine.amplitude(beam_in.l, beam_out.l, d.R0);
}

//------------------------------------------------------------------------------
// Direct route

std::complex<double> direct_transition_potential(const DipoleTransition &t,
                                                 int alpha, double sx,
                                                 double sy, double tol) {
  const double qc = t.density_cutoff();
  const double s = std::hypot(sx, sy);
  // Angles are measured from the direction pointing at the atom centre so the
  // node set rotates with s.
  const double theta0 = s > 0.0 ? std::atan2(-sy, -sx) : 0.0;
  const double a = std::max(t.initial().a, t.final_state().a);

  if (s >= 2.0 * qc) {
    // Far from the source: polar coordinates centred on the atom. The ring
    // integrand is smooth and periodic, so the trapezoidal sum converges
    // geometrically and resolves the cancellation of the low multipoles.
    const double phi_s = std::atan2(sy, sx);
    auto ring = [&](double q) -> std::complex<double> {
      std::complex<double> prev{};
      for (int n = 16; n <= (1 << 14); n *= 2) {
        std::complex<double> sum{};
        double l1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double phi = kTwoPi * j / n;
          const double d2 = s * s + q * q - 2.0 * s * q * std::cos(phi - phi_s);
          const double w = 1.0 / std::sqrt(d2);
          sum += w * std::polar(1.0, alpha * phi);
          l1 += w;
        }
        sum *= kTwoPi / n;
        l1 *= kTwoPi / n;
        if (n > 16 && std::abs(sum - prev) <= std::max(1e-3 * tol * std::abs(sum),
                                                       1e-16 * l1))
          return sum;
        prev = sum;
      }
      return prev;
    };
    IntegrationOptions o;
    o.rel_tol = 0.1 * tol;
    o.split_points = {a, 5.0 * a, 20.0 * a};
    auto f = [&](double q) -> std::complex<double> {
      const double rho = t.pair_density(q);
      if (rho == 0.0)
        return 0.0;
      return q * rho * ring(q);
    };
    return integrate(f, 0.0, qc, o).value;
  }

  auto source = [&](double qx, double qy) -> std::complex<double> {
    const double q = std::hypot(qx, qy);
    if (q >= qc)
      return 0.0;
    const double rho = t.pair_density(q);
    if (alpha == 0)
      return rho;
    if (q == 0.0)
      return 0.0;
    return rho * std::polar(1.0, alpha * std::atan2(qy, qx));
  };

  IntegrationOptions ray_opt;
  ray_opt.rel_tol = 0.1 * tol;
  ray_opt.l1_rel_tol = 0.1 * tol;

  // Polar coordinates centred on s: d^2q / |s - q| = d rho d theta.
  auto ray = [&](double theta) -> std::complex<double> {
    const double ex = std::cos(theta), ey = std::sin(theta);
    const double along = sx * ex + sy * ey;
    const double disc = along * along - s * s + qc * qc;
    if (disc <= 0.0)
      return 0.0;
    const double root = std::sqrt(disc);
    const double lo = std::max(0.0, -along - root);
    const double hi = -along + root;
    if (hi <= lo)
      return 0.0;
    IntegrationOptions o = ray_opt;
    const double closest = -along;
    o.split_points = {closest, closest - a, closest + a};
    auto f = [&](double rho) { return source(sx + rho * ex, sy + rho * ey); };
    return integrate(f, lo, hi, o).value;
  };

  IntegrationOptions ang_opt;
  ang_opt.rel_tol = tol;
  ang_opt.l1_rel_tol = tol;
  double half_width = kPi;
  if (s > qc)
    half_width = std::asin(qc / s);
  ang_opt.split_points = {theta0};
  if (s > 0.0) {
    const double w = std::min(half_width, 0.5 * kPi);
    const double narrow = std::min(w, std::atan2(a, s));
    ang_opt.split_points.push_back(theta0 - narrow);
    ang_opt.split_points.push_back(theta0 + narrow);
  }
  return integrate(ray, theta0 - half_width, theta0 + half_width, ang_opt).value;
}

namespace detail {

// v(s) = V(s, 0) on adaptive Chebyshev panels. The source density is
// u u' e^{i alpha phi_q}, so V(s) = e^{i alpha phi_s} v(|s|) and v is real.
// Past s_far the table holds v s^(|alpha|+1) as a function of 1/s.
class RadialPotentialTable {
public:
  RadialPotentialTable(const DipoleTransition &t, int alpha, double tol,
                       int threads)
      : alpha_(alpha), power_(std::abs(alpha) + 1) {
    const double a = std::max(t.initial().a, t.final_state().a);
    s_far_ = 2.0 * t.density_cutoff();
    auto sample = [&](double s) {
      return direct_transition_potential(t, alpha, s, 0.0, 1e-3 * tol).real();
    };
    // Scale for the panel acceptance test.
    scale_ = 0.0;
    for (double s : {0.5 * a, a, 2.0 * a, 4.0 * a})
      scale_ = std::max(scale_, std::abs(sample(s)));
    if (scale_ == 0.0)
      scale_ = 1.0;

    std::vector<Panel> work;
    for (double lo = 0.0, w = 0.25 * a; lo < s_far_; lo += w, w *= 1.5)
      work.push_back({lo, std::min(s_far_, lo + w), false, {}});
    work.push_back({0.0, 1.0 / s_far_, true, {}});

    while (!work.empty()) {
      // Fill all pending panels in parallel, then split the rejected ones.
      std::vector<std::vector<double>> values(work.size());
      for (std::size_t pi = 0; pi < work.size(); ++pi)
        values[pi].resize(kNodes);
      parallel_for(work.size() * kNodes, threads, [&](std::size_t idx) {
        const std::size_t pi = idx / kNodes, j = idx % kNodes;
        const auto &pan = work[pi];
        const double x = node(pan, static_cast<int>(j));
        values[pi][j] = pan.inverse ? (x > 0.0 ? sample(1.0 / x) *
                                                     std::pow(1.0 / x, power_)
                                               : 0.0)
                                    : sample(x);
      });
      std::vector<Panel> next;
      for (std::size_t pi = 0; pi < work.size(); ++pi) {
        Panel pan = work[pi];
        pan.coeffs = chebyshev_coefficients(values[pi]);
        double tail = 0.0;
        for (int k = kNodes - 3; k < kNodes; ++k)
          tail = std::max(tail, std::abs(pan.coeffs[static_cast<std::size_t>(k)]));
        // Far panels are compared against the far-field size.
        const double ref = pan.inverse ? std::pow(1.0 / s_far_, power_) : 1.0;
        const bool ok = tail <= 0.03 * tol * scale_ * ref ||
                        pan.hi - pan.lo < 1e-3 * (pan.inverse ? 1.0 / s_far_ : a);
        if (ok) {
          panels_.push_back(std::move(pan));
        } else {
          const double mid = 0.5 * (pan.lo + pan.hi);
          next.push_back({pan.lo, mid, pan.inverse, {}});
          next.push_back({mid, pan.hi, pan.inverse, {}});
        }
      }
      work = std::move(next);
    }
    std::sort(panels_.begin(), panels_.end(), [](const Panel &x, const Panel &y) {
      return x.inverse != y.inverse ? !x.inverse : x.lo < y.lo;
    });
  }

  std::complex<double> operator()(double sx, double sy) const {
    const double s = std::hypot(sx, sy);
    const double v = radial(s);
    if (alpha_ == 0)
      return v;
    if (s == 0.0)
      return 0.0;
    return v * std::polar(1.0, alpha_ * std::atan2(sy, sx));
  }

  double radial(double s) const {
    const bool inverse = s >= s_far_;
    const double x = inverse ? 1.0 / s : s;
    // Panels within one family tile their range in increasing order.
    const Panel *hit = nullptr;
    for (const auto &pan : panels_)
      if (pan.inverse == inverse && x >= pan.lo && x <= pan.hi) {
        hit = &pan;
        break;
      }
    if (!hit)
      throw NumericalError("direct potential table: radius outside table");
    const double v = clenshaw(*hit, x);
    return inverse ? v * std::pow(x, power_) : v;
  }

  std::size_t panels() const { return panels_.size(); }

private:
  static constexpr int kNodes = 24;
  struct Panel {
    double lo, hi;
    bool inverse;
    std::vector<double> coeffs;
  };

  static double node(const Panel &p, int j) {
    const double c = std::cos(kPi * (j + 0.5) / kNodes);
    return 0.5 * (p.lo + p.hi) + 0.5 * (p.hi - p.lo) * c;
  }

  static std::vector<double> chebyshev_coefficients(const std::vector<double> &f) {
    std::vector<double> c(kNodes, 0.0);
    for (int k = 0; k < kNodes; ++k) {
      double sum = 0.0;
      for (int j = 0; j < kNodes; ++j)
        sum += f[static_cast<std::size_t>(j)] * std::cos(kPi * k * (j + 0.5) / kNodes);
      c[static_cast<std::size_t>(k)] = 2.0 * sum / kNodes;
    }
    c[0] *= 0.5;
    return c;
  }

  static double clenshaw(const Panel &p, double x) {
    const double y = (2.0 * x - p.lo - p.hi) / (p.hi - p.lo);
    double b1 = 0.0, b2 = 0.0;
    for (int k = kNodes - 1; k >= 1; --k) {
      const double b0 = 2.0 * y * b1 - b2 + p.coeffs[static_cast<std::size_t>(k)];
      b2 = b1;
      b1 = b0;
    }
    return y * b1 - b2 + p.coeffs[0];
  }

  int alpha_;
  int power_;
  double s_far_ = 0.0;
  double scale_ = 1.0;
  std::vector<Panel> panels_;
};

} // namespace detail

namespace {

using detail::RadialPotentialTable;

struct AzimuthalSum {
  std::complex<double> value;
  double l1;
  bool converged;
};

// int_0^2pi e^{i harmonic Phi} V(r cos Phi - R0, r sin Phi) dPhi by the
// periodic trapezoidal rule with node doubling.
AzimuthalSum azimuthal_sum(const RadialPotentialTable &V, int alpha,
                           int harmonic, double r, double R0, double tol) {
  int n = 32;
  while (n < 4 * (std::abs(harmonic) + std::abs(alpha)) + 16)
    n *= 2;
  constexpr int kMaxNodes = 1 << 16;
  auto trapezoid = [&](int count, int stride, int offset) {
    std::complex<double> sum{};
    double l1 = 0.0;
    for (int j = 0; j < count; ++j) {
      const double phi = kTwoPi * (offset + stride * static_cast<double>(j)) /
                         (static_cast<double>(stride) * count);
      const auto v = V(r * std::cos(phi) - R0, r * std::sin(phi));
      sum += std::polar(1.0, harmonic * phi) * v;
      l1 += std::abs(v);
    }
    return std::pair{sum, l1};
  };
  auto [sum, l1] = trapezoid(n, 1, 0);
  std::complex<double> prev = sum * (kTwoPi / n);
  while (n < kMaxNodes) {
    // New nodes sit halfway between the existing ones.
    auto [odd, odd_l1] = trapezoid(n, 2, 1);
    sum += odd;
    l1 += odd_l1;
    n *= 2;
    const std::complex<double> cur = sum * (kTwoPi / n);
    if (std::abs(cur - prev) <= tol * std::max(l1 * (kTwoPi / n), 1e-300))
      return {cur, l1 * (kTwoPi / n), true};
    prev = cur;
  }
  return {prev, l1 * (kTwoPi / n), false};
}

} // namespace

DirectEngine::DirectEngine(double k_in, double k_out, const DipoleTransition &t,
                           MatrixOptions opt)
    : k_in_(k_in), k_out_(k_out),
      alpha_(effective_alpha(t.alpha(), opt.selection_sign)), opt_(opt) {
  if (!(k_in > 0.0) || !(k_out > 0.0))
    throw ValidationError("DirectEngine: wavenumbers must be positive");
  if (opt.tol < 1e-6)
    throw ValidationError(
        "DirectEngine: tol below 1e-6 is too expensive for the direct "
        "quadrature; use the expansion engine");
  const double a = std::max(t.initial().a, t.final_state().a);
  r_max_ = opt.r_max_override.value_or(default_r_max(k_in, k_out, a));
  table_ = std::make_shared<const RadialPotentialTable>(t, alpha_, opt.tol,
                                                        opt.threads);
}

ChannelAmplitude DirectEngine::amplitude(int l_in, int l_out, double R0) const {
  if (!(R0 >= 0.0))
    throw ValidationError("amplitude: R0 must be non-negative");
  const double tol = opt_.tol;
  const int alpha = alpha_;
  const int harmonic = l_in - l_out;
  const double k_in = k_in_, k_out = k_out_;
  const double r_max = tail_start(l_in, l_out, k_in, k_out, r_max_);
  const RadialPotentialTable &V = *table_;

  ChannelAmplitude out;
  out.l_out = l_out;
  bool converged = true;

  auto beams = [&](double r) {
    return bessel_j(l_in, k_in * r) * bessel_j(l_out, k_out * r);
  };
  auto envelope = [&](double r) -> std::complex<double> {
    if (r == 0.0)
      return 0.0;
    const auto az = azimuthal_sum(V, alpha, harmonic, r, R0, 0.1 * tol);
    converged = converged && az.converged;
    return r * az.value;
  };
  auto integrand = [&](double r) -> std::complex<double> {
    const double jj = beams(r);
    if (jj == 0.0)
      return 0.0;
    return jj * envelope(r);
  };

  // Absolute scale for channels that cancel: the integral of
  // r |J J| 2 pi max|V| along the x axis, on a coarse fixed rule.
  double scale = 0.0;
  {
    const auto rule = gauss_rule(64, 0.0, r_max);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double r = rule.nodes[i];
      const double v =
          std::max(std::abs(V.radial(std::abs(r - R0))), std::abs(V.radial(r + R0)));
      scale += rule.weights[i] * r * std::abs(beams(r)) * kTwoPi * v;
    }
  }

  IntegrationOptions main_opt;
  main_opt.rel_tol = tol;
  main_opt.abs_tol = 0.1 * tol * scale;
  main_opt.split_points = periodic_splits(0.0, r_max, 4.0);
  main_opt.split_points.push_back(R0);
  auto main = integrate(integrand, 0.0, r_max, main_opt);

  auto tail = bessel_product_tail(envelope, l_in, l_out, k_in, k_out,
                                  r_max, tol, 0.1 * tol * scale);

  out.value = main.value + tail.value;
  auto &rep = out.convergence;
  rep.quad_tol = tol;
  rep.tail_estimate = main.error + tail.error;
  rep.r_max = r_max;
  rep.terms_used = 1;
  rep.converged = converged && main.converged && tail.converged;
  return out;
}

ChannelAmplitude matrix_element_direct(const BesselBeam &beam_in,
                                       const BesselBeam &beam_out,
                                       const DipoleTransition &t,
                                       const Displacement &d,
                                       const MatrixOptions &opt) {
  DirectEngine engine(beam_in.k_rho, beam_out.k_rho, t, opt);
  return engine.amplitude(beam_in.l, beam_out.l, d.R0);
}

} // namespace vortex
