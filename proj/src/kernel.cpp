#include "vortex/kernel.hpp"

#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "vortex/errors.hpp"
#include "vortex/parallel.hpp"
#include "vortex/specfun.hpp"
#include "vortex/version.hpp"

namespace vortex {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
std::atomic<bool> g_selection_tamper{false};

// Squared distance written to stay accurate when r' ~ q and phi ~ 0.
double distance_sq(double r, double q, double phi) {
  const double d = r - q;
  const double s = std::sin(0.5 * phi);
  return d * d + 4.0 * r * q * s * s;
}

std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

double kernel_F(double r_prime, double q, double phi) {
  if (!(r_prime >= 0.0) || !(q >= 0.0))
    throw DomainError("kernel_F: radii must be non-negative");
  const double d2 = distance_sq(r_prime, q, phi);
  if (!(d2 > 0.0))
    throw DomainError("kernel_F: coincident points (r' = q, phi = 0)");
  return 1.0 / std::sqrt(d2);
}

double kernel_fourier(int lambda, double r_prime, double q, double tol) {
  if (!(r_prime >= 0.0) || !(q >= 0.0))
    throw DomainError("kernel_fourier: radii must be non-negative");
  if (!(tol > 0.0))
    throw DomainError("kernel_fourier: tolerance must be positive");
  const double big = std::max(r_prime, q);
  if (big == 0.0 || std::abs(r_prime - q) < 1e-14 * big)
    throw DomainError("kernel_fourier: on the r' = q diagonal the coefficient "
                      "diverges; integrate across it instead");
  if (std::min(r_prime, q) == 0.0)
    return lambda == 0 ? kTwoPi / big : 0.0;

  IntegrationOptions opt;
  opt.rel_tol = tol;
  opt.abs_tol = 1e-16 * kTwoPi / big;

  // phi in [0, pi/2]: sin(phi/2) = c sinh(t) with c = |r' - q| / (2 sqrt(r' q))
  // turns the peak of width ~c at phi = 0 into a smooth integrand in t.
  const double root = std::sqrt(r_prime * q);
  const double c = std::abs(r_prime - q) / (2.0 * root);
  const double t_max = std::asinh(std::sin(0.25 * std::numbers::pi) / c);
  auto near = [&](double t) {
    const double half = std::asin(std::min(1.0, c * std::sinh(t)));
    return std::cos(2.0 * lambda * half) / (root * std::cos(half));
  };
  auto far = [&](double phi) {
    return std::cos(lambda * phi) / std::sqrt(distance_sq(r_prime, q, phi));
  };
  const double near_part = integrate(near, 0.0, t_max, opt).value;
  const double far_part =
      integrate(far, 0.5 * std::numbers::pi, std::numbers::pi, opt).value;
  return 2.0 * (near_part + far_part);
}

double azimuthal_selection(int lambda, int alpha) {
  const int target = g_selection_tamper.load() ? alpha : -alpha;
  return lambda == target ? kTwoPi : 0.0;
}

namespace testing {
void set_selection_tamper(bool on) { g_selection_tamper.store(on); }
bool selection_tampered() { return g_selection_tamper.load(); }
} // namespace testing

KernelCoefficientTable KernelCoefficientTable::build(int lambda, GridSpec r_grid,
                                                     GridSpec q_grid, double tol,
                                                     int threads) {
  for (const auto *g : {&r_grid, &q_grid})
    if (g->points < 2 || !(g->min >= 0.0) || !(g->max > g->min))
      throw ValidationError("KernelCoefficientTable: invalid grid");
  if (!(tol > 0.0))
    throw ValidationError("KernelCoefficientTable: tol must be positive");
  KernelCoefficientTable t;
  t.lambda_ = lambda;
  t.tol_ = tol;
  t.r_grid_ = r_grid;
  t.q_grid_ = q_grid;
  t.values_.assign(static_cast<std::size_t>(r_grid.points) *
                       static_cast<std::size_t>(q_grid.points),
                   std::numeric_limits<double>::quiet_NaN());
  // Each row writes only its own slots.
  parallel_for(static_cast<std::size_t>(r_grid.points), threads,
               [&](std::size_t i) {
                 const double r = r_grid.at(static_cast<int>(i));
                 for (int j = 0; j < q_grid.points; ++j) {
                   const double q = q_grid.at(j);
                   const double big = std::max(r, q);
                   if (big == 0.0 || std::abs(r - q) < 1e-14 * big)
                     continue;
                   t.values_[i * static_cast<std::size_t>(q_grid.points) +
                             static_cast<std::size_t>(j)] =
                       kernel_fourier(lambda, r, q, tol);
                 }
               });
  return t;
}

double KernelCoefficientTable::interpolate(double r_prime, double q) const {
  const double hr = r_grid_.step(), hq = q_grid_.step();
  const bool inside = r_prime >= r_grid_.min && r_prime <= r_grid_.max &&
                      q >= q_grid_.min && q <= q_grid_.max;
  if (!inside || std::abs(r_prime - q) <= 2.0 * std::max(hr, hq))
    return kernel_fourier(lambda_, r_prime, q, tol_);
  int i = std::min(static_cast<int>((r_prime - r_grid_.min) / hr),
                   r_grid_.points - 2);
  int j = std::min(static_cast<int>((q - q_grid_.min) / hq), q_grid_.points - 2);
  const double u = (r_prime - r_grid_.at(i)) / hr;
  const double v = (q - q_grid_.at(j)) / hq;
  return (1 - u) * (1 - v) * value(i, j) + u * (1 - v) * value(i + 1, j) +
         (1 - u) * v * value(i, j + 1) + u * v * value(i + 1, j + 1);
}

std::string KernelCoefficientTable::values_block() const {
  std::string out;
  for (int i = 0; i < r_grid_.points; ++i) {
    for (int j = 0; j < q_grid_.points; ++j) {
      if (j)
        out += ' ';
      out += format_double(value(i, j));
    }
    out += '\n';
  }
  return out;
}

std::uint64_t KernelCoefficientTable::checksum() const {
  return fnv1a64(values_block());
}

void KernelCoefficientTable::save(std::ostream &os) const {
  const std::string block = values_block();
  os << "vortex-kernel-table 1\n"
     << "code_version " << kVersion << '\n'
     << "lambda " << lambda_ << '\n'
     << "tol " << format_double(tol_) << '\n'
     << "r_grid " << r_grid_.points << ' ' << format_double(r_grid_.min) << ' '
     << format_double(r_grid_.max) << '\n'
     << "q_grid " << q_grid_.points << ' ' << format_double(q_grid_.min) << ' '
     << format_double(q_grid_.max) << '\n'
     << "checksum " << hex64(fnv1a64(block)) << '\n'
     << "values\n"
     << block;
}

KernelCoefficientTable KernelCoefficientTable::load(std::istream &is) {
  auto expect = [&](const std::string &key) {
    std::string k;
    if (!(is >> k) || k != key)
      throw ValidationError("kernel table: expected '" + key + "'");
  };
  KernelCoefficientTable t;
  int version = 0;
  expect("vortex-kernel-table");
  if (!(is >> version) || version != 1)
    throw ValidationError("kernel table: unsupported format version");
  std::string code_version, checksum;
  expect("code_version");
  is >> code_version;
  expect("lambda");
  is >> t.lambda_;
  expect("tol");
  is >> t.tol_;
  expect("r_grid");
  is >> t.r_grid_.points >> t.r_grid_.min >> t.r_grid_.max;
  expect("q_grid");
  is >> t.q_grid_.points >> t.q_grid_.min >> t.q_grid_.max;
  expect("checksum");
  is >> checksum;
  expect("values");
  if (!is || t.r_grid_.points < 2 || t.q_grid_.points < 2)
    throw ValidationError("kernel table: malformed header");
  const std::size_t count = static_cast<std::size_t>(t.r_grid_.points) *
                            static_cast<std::size_t>(t.q_grid_.points);
  t.values_.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::string tok;
    if (!(is >> tok))
      throw ValidationError("kernel table: truncated values block");
    t.values_[k] = tok == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                : std::stod(tok);
  }
  if (hex64(t.checksum()) != checksum)
    throw ValidationError("kernel table: checksum mismatch");
  return t;
}

} // namespace vortex
