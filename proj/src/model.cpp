#include "vortex/model.hpp"

#include <algorithm>
#include <cmath>

#include "vortex/specfun.hpp"

namespace vortex {

namespace {

double laguerre(int n, double alpha, double x) {
  if (n == 0)
    return 1.0;
  double prev = 1.0, cur = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) /
                        (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

} // namespace

namespace {

// Radial length of the state: rho = q / shell_scale.
double shell_scale(const AtomicState &s) {
  return 0.5 * (2.0 * s.n + 2.0 * std::abs(s.m) + 1.0) * s.a;
}

} // namespace

double AtomicState::normalization() const {
  // int_0^inf x^(2|m|+1) e^-x [L_n^(2|m|)]^2 dx = (2n + 2|m| + 1) Gamma(n + 2|m| + 1) / n!
  const int am = std::abs(m);
  const double log_int = std::log(2.0 * n + 2.0 * am + 1.0) +
                         std::lgamma(n + 2.0 * am + 1.0) - std::lgamma(n + 1.0);
  return std::exp(-0.5 * log_int) / shell_scale(*this);
}

namespace {

double unnormalized_u(const AtomicState &state, double q) {
  const int am = std::abs(state.m);
  const double rho = q / shell_scale(state);
  double power = 1.0;
  for (int k = 0; k < am; ++k)
    power *= rho;
  return state.sign * power * laguerre(state.n, 2.0 * am, rho) *
         std::exp(-0.5 * rho);
}

} // namespace

double radial_u(const AtomicState &state, double q) {
  if (!(q >= 0.0))
    throw DomainError("radial_u: q must be non-negative");
  return state.normalization() * unnormalized_u(state, q);
}

double radial_overlap(const AtomicState &x, const AtomicState &y) {
  const double scale = std::max(x.a, y.a);
  IntegrationOptions opt;
  opt.rel_tol = 1e-13;
  opt.abs_tol = 1e-15;
  auto f = [&](double q) { return radial_u(x, q) * radial_u(y, q) * q; };
  const double rate = 0.5 / shell_scale(x) + 0.5 / shell_scale(y);
  const double cut = (60.0 + 10.0 * (x.n + y.n + std::abs(x.m) + std::abs(y.m))) / rate;
  opt.split_points = {scale, 5.0 * scale, 20.0 * scale};
  return integrate(f, 0.0, cut, opt).value;
}

DipoleTransition::DipoleTransition(const AtomicState &initial,
                                   const AtomicState &final_state)
    : initial_(initial), final_(final_state),
      norm_initial_(initial.normalization()),
      norm_final_(final_state.normalization()) {
  // Distinct m are orthogonal through the azimuthal factor.
  if (initial_.m == final_.m) {
    const double overlap = radial_overlap(initial_, final_);
    if (std::abs(overlap) > 1e-10)
      throw ValidationError(
          "DipoleTransition: initial and final states are not orthogonal "
          "(overlap " + std::to_string(overlap) + ")");
  }
}

double DipoleTransition::density_cutoff() const {
  // Polynomial degree and decay rate of u u' q.
  const double degree = 1.0 + initial_.n + final_.n + std::abs(initial_.m) +
                        std::abs(final_.m);
  const double rate = 0.5 / shell_scale(initial_) + 0.5 / shell_scale(final_);
  return (40.0 + 10.0 * degree) / rate;
}

double DipoleTransition::pair_density(double q) const {
  return norm_initial_ * norm_final_ * unnormalized_u(initial_, q) *
         unnormalized_u(final_, q);
}

DipoleTransition default_transition(int alpha, double a) {
  return DipoleTransition(AtomicState(0, 0, a), AtomicState(-alpha, 0, a));
}

double radial_pair_density(const DipoleTransition &t, double q) {
  if (!(q >= 0.0))
    throw DomainError("radial_pair_density: q must be non-negative");
  return t.pair_density(q);
}

} // namespace vortex
