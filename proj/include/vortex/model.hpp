#pragma once

#include <cstdlib>

#include "vortex/errors.hpp"

namespace vortex {

// Incident or outgoing probe state J_l(k_rho r) e^{i l Phi}. Lengths are in
// units of the atomic radial scale a, wavenumbers in 1/a.
struct BesselBeam {
  int l = 0;
  double k_rho = 1.0;

  BesselBeam() = default;
  BesselBeam(int l_, double k_rho_) : l(l_), k_rho(k_rho_) {
    if (!(k_rho > 0.0))
      throw ValidationError("BesselBeam: k_rho must be positive");
  }
};

// Two-dimensional hydrogen eigenstate u_{n,|m|}(q) e^{i m phi_q} / sqrt(2 pi):
//   u_{n,|m|}(q) = N rho^|m| L_n^(2|m|)(rho) e^{-rho/2},
//   rho = 2q / ((2n + 2|m| + 1) a),
// normalized so that int_0^inf u^2 q dq = 1. The ground state is 2 e^{-q/a} / a.
// States sharing m and a are orthogonal in n.
struct AtomicState {
  int m = 0;
  int n = 0;
  double a = 1.0;
  // Overall sign of the radial profile.
  int sign = 1;

  AtomicState() = default;
  AtomicState(int m_, int n_ = 0, double a_ = 1.0, int sign_ = 1)
      : m(m_), n(n_), a(a_), sign(sign_) {
    if (n < 0)
      throw ValidationError("AtomicState: radial index n must be >= 0");
    if (!(a > 0.0))
      throw ValidationError("AtomicState: radial scale a must be positive");
    if (sign != 1 && sign != -1)
      throw ValidationError("AtomicState: sign must be +1 or -1");
  }

  double normalization() const;

  friend bool operator==(const AtomicState &, const AtomicState &) = default;
};

double radial_u(const AtomicState &state, double q);

// Initial -> final internal transition with alpha = m - m'.
class DipoleTransition {
public:
  // Throws ValidationError if the two internal states are not orthogonal.
  DipoleTransition(const AtomicState &initial, const AtomicState &final_state);

  const AtomicState &initial() const { return initial_; }
  const AtomicState &final_state() const { return final_; }
  int alpha() const { return initial_.m - final_.m; }
  bool is_dipole() const { return std::abs(alpha()) == 1; }

  // Radius beyond which the pair density u u' q is negligible (well below
  // 1e-16 of its peak for the built-in family).
  double density_cutoff() const;

  // u(q) u'(q) with the normalizations precomputed.
  double pair_density(double q) const;

private:
  AtomicState initial_;
  AtomicState final_;
  double norm_initial_ = 1.0;
  double norm_final_ = 1.0;
};

// s-like (n=0, m=0) -> p-like (n=0, m' = -alpha) on the common scale a.
DipoleTransition default_transition(int alpha, double a = 1.0);

double radial_pair_density(const DipoleTransition &t, double q);

// Overlap int u u' q dq between the radial profiles.
double radial_overlap(const AtomicState &x, const AtomicState &y);

// Atom position R0 on the +x axis.
struct Displacement {
  double R0 = 0.0;

  Displacement() = default;
  explicit Displacement(double r0) : R0(r0) {
    if (!(R0 >= 0.0))
      throw ValidationError("Displacement: R0 must be non-negative");
  }
};

} // namespace vortex
