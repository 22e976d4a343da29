#include "vortex/run.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "json.hpp"

#include "vortex/kernel.hpp"
#include "vortex/parallel.hpp"
#include "vortex/specfun.hpp"
#include "vortex/version.hpp"

namespace vortex {

namespace {

constexpr double kPi = std::numbers::pi;

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

long long as_int(int v) { return static_cast<long long>(v); }

} // namespace

RunResult run_spectrum(const RunConfig &cfg, int threads) {
  validate(cfg);
  if (cfg.R0.empty())
    throw ValidationError("spectrum: geometry.R0 list is empty");
  RunResult r;
  r.command = "spectrum";
  r.table.columns = {"R0",          "l_out",     "weight",       "abs_M",
                     "phase",       "re_M",      "im_M",         "p_truncation",
                     "terms_used",  "tail_estimate", "r_max",    "converged",
                     "window_flag"};
  ExpansionEngine engine(cfg.k_rho, cfg.k_out(), cfg.transition(),
                         cfg.matrix_options());
  const auto so = cfg.spectrum_options(threads);
  for (double R0 : cfg.R0) {
    const auto s = oam_spectrum(engine, cfg.l, R0, so);
    r.converged = r.converged && s.converged;
    double check = 0.0;
    for (const auto &[l_out, w] : s.weights) {
      const auto &a = s.raw.at(l_out);
      const auto &c = a.convergence;
      r.table.rows.push_back({R0, as_int(l_out), w, std::abs(a.value),
                              std::arg(a.value), a.value.real(), a.value.imag(),
                              as_int(c.p_truncation), as_int(c.terms_used),
                              c.tail_estimate, c.r_max, c.converged,
                              s.window_too_narrow});
      check += w;
    }
    r.summary.push_back("R0 = " + short_num(R0) + ": spread " +
                        short_num(spectral_spread(s)) + ", weight sum " +
                        short_num(check) + ", boundary weight " +
                        short_num(s.boundary_weight) +
                        (s.window_too_narrow ? " (window too narrow)" : ""));
  }
  return r;
}

RunResult run_dichroism(const RunConfig &cfg, int threads) {
  validate(cfg);
  if (cfg.cluster_radii.empty())
    throw ValidationError("dichroism: geometry.cluster_radii list is empty");
  RunResult r;
  r.command = "dichroism";
  r.table.columns = {"cluster_radius", "D",         "total_plus",
                     "total_minus",    "n_samples", "converged"};
  DichroismEngines engines(cfg.k_rho, cfg.k_out(), cfg.pair(),
                           cfg.matrix_options());
  const auto so = cfg.spectrum_options(threads);
  std::vector<double> magnitudes;
  for (double Rc : cfg.cluster_radii) {
    const auto p = cluster_average(engines, cfg.l, Rc, cfg.n_samples, so);
    r.converged = r.converged && p.converged;
    r.table.rows.push_back({Rc, p.D, p.total_plus, p.total_minus,
                            as_int(p.n_samples), p.converged});
    magnitudes.push_back(std::abs(p.D));
  }
  bool non_increasing = true;
  for (std::size_t i = 1; i < magnitudes.size(); ++i)
    non_increasing = non_increasing && magnitudes[i] <= magnitudes[i - 1];
  r.summary.push_back(std::string("|D| non-increasing over the listed radii: ") +
                      (non_increasing ? "yes" : "no"));
  return r;
}

RunResult run_limit_study(const RunConfig &cfg, int threads) {
  validate(cfg);
  RunResult r;
  r.command = "limit-study";
  r.table.columns = {"R0", "off_weight", "converged"};
  ExpansionEngine engine(cfg.k_rho, cfg.k_out(), cfg.transition(),
                         cfg.matrix_options());
  const auto rows =
      onaxis_limit_study(engine, cfg.l, cfg.limit_R0, cfg.spectrum_options(threads));
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    r.converged = r.converged && rows[i].converged;
    r.table.rows.push_back({rows[i].R0, rows[i].off_weight, rows[i].converged});
    if (i > 0)
      decreasing = decreasing && rows[i].off_weight < rows[i - 1].off_weight;
  }
  r.summary.push_back(std::string("off-channel weight strictly decreasing: ") +
                      (decreasing ? "yes" : "no"));
  // Log-log slope over the last two nonzero radii.
  std::vector<const LimitRow *> nonzero;
  for (const auto &row : rows)
    if (row.R0 > 0.0 && row.off_weight > 0.0)
      nonzero.push_back(&row);
  if (nonzero.size() >= 2) {
    const auto *x = nonzero[nonzero.size() - 2];
    const auto *y = nonzero.back();
    const double slope = std::log(y->off_weight / x->off_weight) / std::log(y->R0 / x->R0);
    r.summary.push_back("log-log slope over the last two nonzero R0: " +
                        short_num(slope));
  }
  r.summary.push_back("off-channel weight at R0 = " + short_num(rows.back().R0) +
                      ": " + short_num(rows.back().off_weight));
  return r;
}

std::string format_output(const RunResult &r, const RunConfig &cfg,
                          OutputFormat f) {
  const std::string hash = hex64(config_hash(cfg));
  if (f == OutputFormat::csv) {
    std::string out = "# vortex-oam " + std::string(kVersion) +
                      " config_hash=" + hash + " command=" + r.command + "\n";
    for (std::size_t i = 0; i < r.table.columns.size(); ++i)
      out += (i ? "," : "") + r.table.columns[i];
    out += "\n";
    for (const auto &row : r.table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i)
          out += ",";
        std::visit(
            [&out](const auto &v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>)
                out += sci(v);
              else if constexpr (std::is_same_v<T, bool>)
                out += v ? "true" : "false";
              else if constexpr (std::is_same_v<T, long long>)
                out += std::to_string(v);
              else
                out += v;
            },
            row[i]);
      }
      out += "\n";
    }
    return out;
  }
  nlohmann::ordered_json j;
  j["tool"] = "vortex-oam";
  j["version"] = kVersion;
  j["config_hash"] = hash;
  j["command"] = r.command;
  j["columns"] = r.table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto &row : r.table.rows) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < row.size(); ++i)
      std::visit([&](const auto &v) { o[r.table.columns[i]] = v; }, row[i]);
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

//------------------------------------------------------------------------------
// verify

namespace {

// (2 pi / max) t^l (1/2)_l / l! 2F1(1/2, l + 1/2; l + 1; t^2), t = min / max.
double kernel_series(int lambda, double r, double q) {
  const int l = std::abs(lambda);
  const double big = std::max(r, q), t = std::min(r, q) / big;
  double pre = 2.0 * kPi / big;
  for (int k = 0; k < l; ++k)
    pre *= t * (0.5 + k) / (k + 1.0);
  double term = 1.0, sum = 1.0;
  const double z = t * t;
  for (int n = 0; n < 100000; ++n) {
    term *= (0.5 + n) * (l + 0.5 + n) / ((l + 1.0 + n) * (n + 1.0)) * z;
    sum += term;
    if (term < 1e-17 * sum)
      break;
  }
  return pre * sum;
}

VerifyCheck check(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

} // namespace

std::vector<VerifyCheck> run_verify(VerifyLevel level, int threads) {
  std::vector<VerifyCheck> out;
  auto guarded = [&out](const std::string &name, auto &&fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception &e) {
      out.push_back(check(name, false, std::string("exception: ") + e.what()));
    }
  };

  guarded("selection identity lambda = -alpha", [] {
    int bad = 0;
    for (int lam = -5; lam <= 5; ++lam)
      for (int al = -5; al <= 5; ++al) {
        const double v = azimuthal_selection(lam, al);
        const double want = lam == -al ? 2.0 * kPi : 0.0;
        if (v != want)
          ++bad;
      }
    return check("selection identity lambda = -alpha", bad == 0,
                 std::to_string(bad) + " of 121 pairs wrong");
  });

  guarded("shift-theorem reconstruction", [] {
    double worst = 0.0;
    for (double x : {0.5, 2.0, 5.0}) {
      const int P = graf_truncation(x) + 10;
      for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
          const double rp = 0.1 + 0.4 * i, phi = 2.0 * kPi * j / 10.0;
          worst = std::max(worst, std::abs(beam_reconstruct(1, 1.0, x, rp, phi, P) -
                                           beam_direct(1, 1.0, x, rp, phi)));
        }
    }
    return check("shift-theorem reconstruction", worst < 1e-10,
                 "max error " + short_num(worst));
  });

  guarded("kernel closed form", [] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.05, 5.0);
    double worst = 0.0;
    for (int lam : {0, 1, 2})
      for (int i = 0; i < 8; ++i) {
        double r = u(rng), q = u(rng);
        if (std::min(r, q) / std::max(r, q) > 0.9)
          q = 0.5 * r;
        const double want = kernel_series(lam, r, q);
        worst = std::max(worst, std::abs(kernel_fourier(lam, r, q, 1e-12) - want) /
                                    std::abs(want));
      }
    return check("kernel closed form", worst < 1e-8,
                 "max relative error " + short_num(worst));
  });

  guarded("radial integral closed form", [] {
    // int_0^inf J_n(r) J_{n+1}(r) dr / r = 2 / (pi (2n + 1))
    TransitionPotential G([](double r) { return r > 0.0 ? 1.0 / (r * r) : 0.0; },
                          0, 0.0);
    double worst = 0.0;
    for (int n : {0, 3, 9}) {
      const auto ri = radial_integral(n, n + 1, 1.0, 1.0, G, 1e-9);
      const double want = 2.0 / (kPi * (2 * n + 1));
      worst = std::max(worst, std::abs(ri.value - want) / want);
    }
    return check("radial integral closed form", worst < 1e-7,
                 "max relative error " + short_num(worst));
  });

  guarded("state normalization and orthogonality", [] {
    double worst = 0.0;
    for (int m : {0, 1})
      for (int n = 0; n < 3; ++n)
        for (int n2 = n; n2 < 3; ++n2) {
          const double o = radial_overlap(AtomicState(m, n), AtomicState(m, n2));
          worst = std::max(worst, std::abs(o - (n == n2 ? 1.0 : 0.0)));
        }
    return check("state normalization and orthogonality", worst < 1e-10,
                 "max deviation " + short_num(worst));
  });

  for (int alpha : {1, -1}) {
    const std::string name = "on-axis collapse alpha = " + std::to_string(alpha);
    guarded(name, [&] {
      ExpansionEngine engine(1.0, 1.0, default_transition(alpha), {});
      SpectrumOptions so;
      so.threads = threads;
      const auto s = oam_spectrum(engine, 1, 0.0, so);
      double off = 0.0;
      for (const auto &[l, w] : s.weights)
        if (l != 1 + alpha)
          off += w;
      const double on = s.weights.at(1 + alpha);
      return check(name, off < 1e-12 && std::abs(on - 1.0) < 1e-12,
                   "allowed weight " + sci(on) + ", off-channel " + sci(off));
    });
  }

  if (level == VerifyLevel::full) {
    for (int alpha : {1, -1}) {
      const std::string name =
          "direct vs expansion grid alpha = " + std::to_string(alpha);
      guarded(name, [&] {
        const auto t = default_transition(alpha);
        MatrixOptions exp_opt;
        exp_opt.tol = 1e-6;
        MatrixOptions dir_opt;
        dir_opt.tol = 1e-4;
        dir_opt.threads = threads;
        ExpansionEngine e(1.0, 1.0, t, exp_opt);
        DirectEngine d(1.0, 1.0, t, dir_opt);
        const double bound = 2.0 * (exp_opt.tol + dir_opt.tol);
        double worst = 0.0;
        for (double R0 : {0.0, 0.5, 2.0}) {
          const int allowed = 1 + alpha;
          const auto ea = e.amplitude(1, allowed, R0);
          const auto eb = e.amplitude(1, allowed - 1, R0);
          const auto da = d.amplitude(1, allowed, R0);
          const auto db = d.amplitude(1, allowed - 1, R0);
          const double scale = std::max(std::abs(ea.value), std::abs(eb.value));
          worst = std::max(worst, std::abs(ea.value - da.value) / scale);
          worst = std::max(worst, std::abs(eb.value - db.value) / scale);
        }
        return check(name, worst <= bound,
                     "max relative discrepancy " + short_num(worst) + " (bound " +
                         short_num(bound) + ")");
      });
    }
  }
  return out;
}

std::string format_verify(const std::vector<VerifyCheck> &checks) {
  std::string out;
  int failed = 0;
  for (const auto &c : checks) {
    out += (c.passed ? "PASS  " : "FAIL  ") + c.name + "  [" + c.detail + "]\n";
    failed += c.passed ? 0 : 1;
  }
  out += std::to_string(checks.size() - static_cast<std::size_t>(failed)) + "/" +
         std::to_string(checks.size()) + " checks passed\n";
  return out;
}

} // namespace vortex
