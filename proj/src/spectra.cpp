#include "vortex/spectra.hpp"

#include <cmath>
#include <string>

#include "vortex/parallel.hpp"
#include "vortex/specfun.hpp"

namespace vortex {

std::vector<ChannelPath> enumerate_channels(int l, int alpha, int P) {
  if (P < 0)
    throw ValidationError("enumerate_channels: P must be >= 0");
  std::map<int, ChannelPath> by_l;
  for (int p = -P; p <= P; ++p)
    for (int pp = -P; pp <= P; ++pp) {
      const int l_out = l + alpha + p - pp;
      auto &c = by_l[l_out];
      c.l_out = l_out;
      c.pairs.emplace_back(p, pp);
    }
  std::vector<ChannelPath> out;
  out.reserve(by_l.size());
  for (auto &[k, v] : by_l)
    out.push_back(std::move(v));
  return out;
}

namespace {

void check_window(const Window &w, int l_in, int alpha) {
  if (w.l_min > w.l_max)
    throw ValidationError("window: l_min must not exceed l_max");
  if (!w.contains(l_in + alpha))
    throw ValidationError("window [" + std::to_string(w.l_min) + ", " +
                          std::to_string(w.l_max) +
                          "] must contain l + alpha = " +
                          std::to_string(l_in + alpha));
}

// |M|^2 per channel over the window, in window order.
std::vector<ChannelAmplitude> window_amplitudes(const ExpansionEngine &engine,
                                                int l_in, double R0,
                                                const Window &w, int threads) {
  std::vector<ChannelAmplitude> amps(static_cast<std::size_t>(w.size()));
  parallel_for(amps.size(), threads, [&](std::size_t i) {
    amps[i] = engine.amplitude(l_in, w.l_min + static_cast<int>(i), R0);
  });
  return amps;
}

struct Totals {
  double sum = 0.0;
  bool converged = true;
};

Totals window_total(const ExpansionEngine &engine, int l_in, double R0,
                    const Window &w, int threads) {
  Totals t;
  for (const auto &a : window_amplitudes(engine, l_in, R0, w, threads)) {
    t.sum += std::norm(a.value);
    t.converged = t.converged && a.convergence.converged;
  }
  return t;
}

double asymmetry(double plus, double minus) {
  const double sum = plus + minus;
  if (plus < 1e-30 && minus < 1e-30)
    throw NumericalError("dichroic signal: both channel totals vanish");
  return (plus - minus) / sum;
}

} // namespace

OamSpectrum oam_spectrum(const ExpansionEngine &engine, int l_in, double R0,
                         const SpectrumOptions &opt) {
  if (!(R0 >= 0.0))
    throw ValidationError("oam_spectrum: R0 must be non-negative");
  if (!(opt.window_tail_tol > 0.0))
    throw ValidationError("oam_spectrum: window_tail_tol must be positive");
  check_window(opt.window, l_in, engine.alpha());

  OamSpectrum s;
  s.l_in = l_in;
  s.alpha = engine.alpha();
  s.R0 = R0;
  s.window = opt.window;
  const auto amps = window_amplitudes(engine, l_in, R0, opt.window, opt.threads);
  for (const auto &a : amps) {
    s.total += std::norm(a.value);
    s.converged = s.converged && a.convergence.converged;
  }
  if (!(s.total > 0.0))
    throw NumericalError("oam_spectrum: all channels in the window vanish");
  for (const auto &a : amps) {
    s.raw[a.l_out] = a;
    s.weights[a.l_out] = std::norm(a.value) / s.total;
  }
  s.boundary_weight = std::max(s.weights[opt.window.l_min],
                               s.weights[opt.window.l_max]);
  s.window_too_narrow = s.boundary_weight > opt.window_tail_tol;
  return s;
}

OamSpectrum oam_spectrum(const BesselBeam &beam_in, double k_out,
                         const DipoleTransition &t, const Displacement &d,
                         const Window &window, double tol) {
  MatrixOptions mo;
  mo.tol = tol;
  ExpansionEngine engine(beam_in.k_rho, k_out, t, mo);
  SpectrumOptions so;
  so.window = window;
  return oam_spectrum(engine, beam_in.l, d.R0, so);
}

double mean_l_out(const OamSpectrum &s) {
  double m = 0.0;
  for (const auto &[l, w] : s.weights)
    m += l * w;
  return m;
}

double spectral_spread(const OamSpectrum &s) {
  const double m = mean_l_out(s);
  double v = 0.0;
  for (const auto &[l, w] : s.weights)
    v += (l - m) * (l - m) * w;
  return std::sqrt(v);
}

ChiralPair::ChiralPair(DipoleTransition p, DipoleTransition m)
    : plus(std::move(p)), minus(std::move(m)) {
  const auto &pi = plus.initial(), &mi = minus.initial();
  const auto &pf = plus.final_state(), &mf = minus.final_state();
  if (plus.alpha() != 1 || minus.alpha() != -1)
    throw ValidationError("chiral pair: need alpha = +1 and alpha = -1");
  const bool same_profiles =
      pi.n == mi.n && pi.a == mi.a && pi.sign == mi.sign &&
      std::abs(pi.m) == std::abs(mi.m) && pf.n == mf.n && pf.a == mf.a &&
      pf.sign == mf.sign && std::abs(pf.m) == std::abs(mf.m);
  if (!same_profiles)
    throw ValidationError(
        "chiral pair: transitions must share radial profiles and differ only "
        "in the sign of alpha");
}

ChiralPair chiral_pair(const DipoleTransition &plus) {
  const auto &i = plus.initial();
  const auto &f = plus.final_state();
  // Mirror image: every m flips sign.
  return ChiralPair(plus, DipoleTransition(AtomicState(-i.m, i.n, i.a, i.sign),
                                           AtomicState(-f.m, f.n, f.a, f.sign)));
}

DichroismEngines::DichroismEngines(double k_in, double k_out,
                                   const ChiralPair &pair, MatrixOptions opt)
    : plus_(k_in, k_out, pair.plus, opt), minus_(k_in, k_out, pair.minus, opt) {}

DichroismPoint dichroic_signal(const DichroismEngines &engines, int l_in,
                               double R0, const SpectrumOptions &opt) {
  if (!(R0 >= 0.0))
    throw ValidationError("dichroic_signal: R0 must be non-negative");
  check_window(opt.window, l_in, engines.plus().alpha());
  check_window(opt.window, l_in, engines.minus().alpha());
  const auto p = window_total(engines.plus(), l_in, R0, opt.window, opt.threads);
  const auto m = window_total(engines.minus(), l_in, R0, opt.window, opt.threads);
  DichroismPoint out;
  out.radius = R0;
  out.total_plus = p.sum;
  out.total_minus = m.sum;
  out.D = asymmetry(p.sum, m.sum);
  out.converged = p.converged && m.converged;
  return out;
}

DichroismPoint dichroic_signal(const BesselBeam &beam_in, double k_out,
                               const ChiralPair &pair, const Displacement &d,
                               const Window &window, double tol) {
  MatrixOptions mo;
  mo.tol = tol;
  DichroismEngines engines(beam_in.k_rho, k_out, pair, mo);
  SpectrumOptions so;
  so.window = window;
  return dichroic_signal(engines, beam_in.l, d.R0, so);
}

DichroismPoint cluster_average(const DichroismEngines &engines, int l_in,
                               double cluster_radius, int n_samples,
                               const SpectrumOptions &opt) {
  if (!(cluster_radius >= 0.0))
    throw ValidationError("cluster_average: cluster radius must be >= 0");
  if (n_samples < 1)
    throw ValidationError("cluster_average: n_samples must be >= 1");
  if (cluster_radius == 0.0) {
    auto p = dichroic_signal(engines, l_in, 0.0, opt);
    p.n_samples = n_samples;
    return p;
  }
  check_window(opt.window, l_in, engines.plus().alpha());
  check_window(opt.window, l_in, engines.minus().alpha());

  const auto rule = gauss_rule(n_samples, 0.0, cluster_radius);
  const double area = std::numbers::pi * cluster_radius * cluster_radius;
  std::vector<Totals> plus(rule.nodes.size()), minus(rule.nodes.size());
  parallel_for(rule.nodes.size(), opt.threads, [&](std::size_t i) {
    plus[i] = window_total(engines.plus(), l_in, rule.nodes[i], opt.window, 1);
    minus[i] = window_total(engines.minus(), l_in, rule.nodes[i], opt.window, 1);
  });

  DichroismPoint out;
  out.radius = cluster_radius;
  out.n_samples = n_samples;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double w = rule.weights[i] * 2.0 * std::numbers::pi * rule.nodes[i] / area;
    out.total_plus += w * plus[i].sum;
    out.total_minus += w * minus[i].sum;
    out.converged = out.converged && plus[i].converged && minus[i].converged;
  }
  out.D = asymmetry(out.total_plus, out.total_minus);
  return out;
}

std::vector<LimitRow> onaxis_limit_study(const ExpansionEngine &engine, int l_in,
                                         const std::vector<double> &R0_sequence,
                                         const SpectrumOptions &opt) {
  if (R0_sequence.empty() || R0_sequence.back() != 0.0)
    throw ValidationError("limit study: R0 sequence must end at 0");
  for (std::size_t i = 1; i < R0_sequence.size(); ++i)
    if (!(R0_sequence[i] < R0_sequence[i - 1]))
      throw ValidationError("limit study: R0 sequence must be strictly decreasing");
  std::vector<LimitRow> rows;
  const int allowed = l_in + engine.alpha();
  for (double R0 : R0_sequence) {
    const auto s = oam_spectrum(engine, l_in, R0, opt);
    LimitRow row;
    row.R0 = R0;
    // Sum the forbidden channels directly so small values keep full precision.
    for (const auto &[l, w] : s.weights)
      if (l != allowed)
        row.off_weight += w;
    row.converged = s.converged;
    rows.push_back(row);
  }
  return rows;
}

} // namespace vortex
