#pragma once

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "vortex/model.hpp"

namespace vortex {

// Which on-axis rule the engines implement: plus -> l' = l + alpha (the rule
// that follows from lambda = -alpha), minus -> l' = l - alpha.
enum class SelectionSign { plus, minus };

inline int effective_alpha(int alpha, SelectionSign sign) {
  return sign == SelectionSign::plus ? alpha : -alpha;
}

struct ConvergenceReport {
  int p_truncation = 0;
  int terms_used = 0;
  double quad_tol = 0.0;
  // Bound on the discarded displacement-sum terms plus the radial tail and
  // quadrature error of the retained terms (absolute, natural units).
  double tail_estimate = 0.0;
  double r_max = 0.0;
  bool converged = true;
};

struct ChannelAmplitude {
  int l_out = 0;
  std::complex<double> value{};
  ConvergenceReport convergence;
};

struct MatrixOptions {
  double tol = 1e-6;
  SelectionSign selection_sign = SelectionSign::plus;
  std::optional<int> p_override;
  std::optional<double> r_max_override;
  // Tail tolerance for the displacement (Graf) sum.
  double graf_tail_tol = 1e-12;
  // Worker threads for the direct oracle's azimuthal sums.
  int threads = 1;
};

// 40 a, stretched for soft beams: 40 a max(1, 2 / min(k_in, k_out)).
double default_r_max(double k_in, double k_out, double a = 1.0);

// G(r') = int_0^inf q dq u(q) u'(q) K_lambda(r', q): the transition density
// seen through one azimuthal order of the Coulomb kernel. Values are memoized;
// every entry is a pure function of r', so sharing across threads and sweep
// points never changes results.
class TransitionPotential {
public:
  TransitionPotential(const DipoleTransition &t, int lambda, double tol);
  // Arbitrary radial potential; used for degenerate-kernel checks.
  TransitionPotential(std::function<double(double)> fn, int lambda,
                      double extent);

  double operator()(double r_prime) const;
  int lambda() const { return lambda_; }
  // Radius beyond which the source density vanishes.
  double extent() const { return extent_; }
  std::size_t cached_points() const;

private:
  double compute(double r_prime) const;

  std::optional<DipoleTransition> transition_;
  std::function<double(double)> custom_;
  int lambda_ = 0;
  double extent_ = 0.0;
  double tol_ = 1e-8;
  mutable std::mutex mutex_;
  mutable std::unordered_map<double, double> cache_;
};

struct RadialIntegral {
  double value = 0.0;
  double error = 0.0; // quadrature + extrapolated tail
  double r_max = 0.0;
  bool converged = true;
};

// int_0^inf r' dr' J_{order_r}(k_in r') J_{order_out}(k_out r') G(r').
// [0, r_max] by adaptive quadrature. Beyond r_max the Bessel product is split
// through its Hankel amplitudes into a slowly beating part and a fast
// remainder, each summed over its own half-periods.
RadialIntegral radial_integral(int order_r, int order_out, double k_in,
                               double k_out, const TransitionPotential &G,
                               double tol,
                               std::optional<double> r_max = std::nullopt);

// Same, with G built from the transition for azimuthal order lambda.
std::pair<double, ConvergenceReport>
radial_double_integral(int order_r, int order_out, double k_in, double k_out,
                       const DipoleTransition &t, int lambda, double tol);

// Transition amplitude through the displacement expansion. Holds the cached
// potential and the per-order radial integrals, so one engine serves whole
// sweeps over R0 and l'. Thread-safe.
class ExpansionEngine {
public:
  ExpansionEngine(double k_in, double k_out, const DipoleTransition &t,
                  MatrixOptions opt = {});

  ChannelAmplitude amplitude(int l_in, int l_out, double R0) const;

  const TransitionPotential &potential() const { return *potential_; }
  const MatrixOptions &options() const { return opt_; }
  int alpha() const { return alpha_; }
  double k_in() const { return k_in_; }
  double k_out() const { return k_out_; }
  int truncation_for(double R0) const;

private:
  RadialIntegral radial(int order_r) const;

  double k_in_, k_out_;
  int alpha_;
  MatrixOptions opt_;
  double r_max_;
  std::shared_ptr<TransitionPotential> potential_;
  mutable std::mutex mutex_;
  mutable std::map<int, RadialIntegral> radial_cache_;
};

ChannelAmplitude matrix_element_expansion(const BesselBeam &beam_in,
                                          const BesselBeam &beam_out,
                                          const DipoleTransition &t,
                                          const Displacement &d,
                                          const MatrixOptions &opt = {});

namespace detail {
class RadialPotentialTable;
}

// Brute-force route in lab coordinates: the transition potential is evaluated
// by direct two-dimensional quadrature of the Coulomb integral (tabulated once
// per engine in |s|), then integrated against the undisplaced beams over the
// full plane. No addition theorem, no kernel Fourier analysis.
class DirectEngine {
public:
  DirectEngine(double k_in, double k_out, const DipoleTransition &t,
               MatrixOptions opt = {});
  ChannelAmplitude amplitude(int l_in, int l_out, double R0) const;

private:
  double k_in_, k_out_;
  int alpha_;
  MatrixOptions opt_;
  double r_max_;
  std::shared_ptr<const detail::RadialPotentialTable> table_;
};

// Brute-force quadrature of the full four-dimensional integrand in lab
// coordinates, with no addition theorem and no kernel Fourier analysis. Slow;
// tol below 1e-6 is rejected.
ChannelAmplitude matrix_element_direct(const BesselBeam &beam_in,
                                       const BesselBeam &beam_out,
                                       const DipoleTransition &t,
                                       const Displacement &d,
                                       const MatrixOptions &opt = {});

// Transition potential of the direct route: int d^2q u u' e^{i alpha phi_q} / |s - q|
// at the atom-centred point s, by polar quadrature centred on s.
std::complex<double> direct_transition_potential(const DipoleTransition &t,
                                                 int alpha, double sx,
                                                 double sy, double tol);

} // namespace vortex
