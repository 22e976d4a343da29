#pragma once

#include <map>
#include <utility>
#include <vector>

#include "vortex/matrix.hpp"

namespace vortex {

// Inclusive l' range.
struct Window {
  int l_min = -6;
  int l_max = 8;

  bool contains(int l) const { return l >= l_min && l <= l_max; }
  int size() const { return l_max - l_min + 1; }
  friend bool operator==(const Window &, const Window &) = default;
};

struct ChannelPath {
  int l_out = 0;
  std::vector<std::pair<int, int>> pairs; // (p, p')
};

// Every l' = l + alpha + p - p' with |p|, |p'| <= P, in increasing order.
std::vector<ChannelPath> enumerate_channels(int l, int alpha, int P);

struct OamSpectrum {
  int l_in = 0;
  int alpha = 0;
  double R0 = 0.0;
  Window window;
  std::map<int, double> weights;
  std::map<int, ChannelAmplitude> raw;
  double total = 0.0; // sum of |M|^2 over the window
  double boundary_weight = 0.0;
  bool window_too_narrow = false;
  bool converged = true;
};

struct SpectrumOptions {
  Window window;
  double window_tail_tol = 1e-3;
  int threads = 1;
};

OamSpectrum oam_spectrum(const ExpansionEngine &engine, int l_in, double R0,
                         const SpectrumOptions &opt = {});
OamSpectrum oam_spectrum(const BesselBeam &beam_in, double k_out,
                         const DipoleTransition &t, const Displacement &d,
                         const Window &window, double tol);

// Standard deviation of l' under the weights.
double spectral_spread(const OamSpectrum &s);
double mean_l_out(const OamSpectrum &s);

// Transitions with alpha = +1 and alpha = -1 on shared radial profiles.
struct ChiralPair {
  DipoleTransition plus;
  DipoleTransition minus;

  // Throws ValidationError unless the two differ only in the sign of alpha.
  ChiralPair(DipoleTransition p, DipoleTransition m);
};

// Mirror partner: same initial state, final m' chosen so that alpha flips.
ChiralPair chiral_pair(const DipoleTransition &plus);

struct DichroismPoint {
  double radius = 0.0; // R0, or the cluster radius for averages
  double D = 0.0;
  double total_plus = 0.0;
  double total_minus = 0.0;
  int n_samples = 1;
  bool converged = true;
};

// Engines for the two members of a chiral pair with common beams and options.
class DichroismEngines {
public:
  DichroismEngines(double k_in, double k_out, const ChiralPair &pair,
                   MatrixOptions opt = {});
  const ExpansionEngine &plus() const { return plus_; }
  const ExpansionEngine &minus() const { return minus_; }

private:
  ExpansionEngine plus_;
  ExpansionEngine minus_;
};

// D = (S+ - S-) / (S+ + S-), S = sum over the window of |M|^2.
DichroismPoint dichroic_signal(const DichroismEngines &engines, int l_in,
                               double R0, const SpectrumOptions &opt = {});
DichroismPoint dichroic_signal(const BesselBeam &beam_in, double k_out,
                               const ChiralPair &pair, const Displacement &d,
                               const Window &window, double tol);

// Incoherent average of S+ and S- over atom positions in a disk of radius
// R_c (weight 2 pi R0 dR0, Gauss-Legendre in R0), then D.
DichroismPoint cluster_average(const DichroismEngines &engines, int l_in,
                               double cluster_radius, int n_samples,
                               const SpectrumOptions &opt = {});

struct LimitRow {
  double R0 = 0.0;
  double off_weight = 0.0;
  bool converged = true;
};

// Weight outside l' = l + alpha along a strictly decreasing R0 sequence that
// ends at 0.
std::vector<LimitRow> onaxis_limit_study(const ExpansionEngine &engine, int l_in,
                                         const std::vector<double> &R0_sequence,
                                         const SpectrumOptions &opt = {});

} // namespace vortex
