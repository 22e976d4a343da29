#include "vortex/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "vortex/version.hpp"

namespace vortex {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int to_int(std::string_view v, int line, std::string_view key) {
  int out = 0;
  const auto *end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end)
    throw ValidationError("'" + std::string(key) + "' expects an integer, got '" +
                              std::string(v) + "'",
                          line);
  return out;
}

double to_double(std::string_view v, int line, std::string_view key) {
  double out = 0.0;
  const auto *end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out))
    throw ValidationError("'" + std::string(key) + "' expects a number, got '" +
                              std::string(v) + "'",
                          line);
  return out;
}

std::vector<double> to_list(std::string_view v, int line, std::string_view key) {
  std::vector<double> out;
  v = trim(v);
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']')
    v = trim(v.substr(1, v.size() - 2));
  if (v.empty())
    return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    const auto item = trim(v.substr(start, comma == std::string_view::npos
                                               ? std::string_view::npos
                                               : comma - start));
    out.push_back(to_double(item, line, key));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return out;
}

std::string list_text(const std::vector<double> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      out += ", ";
    out += fmt(v[i]);
  }
  return out;
}

using Setter = std::function<void(RunConfig &, std::string_view, int)>;

const std::map<std::string, Setter> &setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto integer = [&t](const std::string &key, int RunConfig::*field) {
      t[key] = [field, key](RunConfig &c, std::string_view v, int line) {
        c.*field = to_int(v, line, key);
      };
    };
    auto real = [&t](const std::string &key, double RunConfig::*field) {
      t[key] = [field, key](RunConfig &c, std::string_view v, int line) {
        c.*field = to_double(v, line, key);
      };
    };
    auto list = [&t](const std::string &key, std::vector<double> RunConfig::*field) {
      t[key] = [field, key](RunConfig &c, std::string_view v, int line) {
        c.*field = to_list(v, line, key);
      };
    };
    integer("beam.l", &RunConfig::l);
    real("beam.k_rho", &RunConfig::k_rho);
    t["beam.k_rho_out"] = [](RunConfig &c, std::string_view v, int line) {
      c.k_rho_out = to_double(v, line, "beam.k_rho_out");
    };
    integer("transition.n_initial", &RunConfig::n_initial);
    integer("transition.m_initial", &RunConfig::m_initial);
    integer("transition.n_final", &RunConfig::n_final);
    real("transition.a", &RunConfig::a);
    integer("transition.alpha", &RunConfig::alpha);
    list("geometry.R0", &RunConfig::R0);
    list("geometry.cluster_radii", &RunConfig::cluster_radii);
    integer("geometry.n_samples", &RunConfig::n_samples);
    list("geometry.limit_R0", &RunConfig::limit_R0);
    t["window.l_min"] = [](RunConfig &c, std::string_view v, int line) {
      c.window.l_min = to_int(v, line, "window.l_min");
    };
    t["window.l_max"] = [](RunConfig &c, std::string_view v, int line) {
      c.window.l_max = to_int(v, line, "window.l_max");
    };
    real("tolerances.quad_tol", &RunConfig::quad_tol);
    real("tolerances.tail_tol", &RunConfig::tail_tol);
    real("tolerances.window_tail_tol", &RunConfig::window_tail_tol);
    t["selection.sign"] = [](RunConfig &c, std::string_view v, int line) {
      if (v == "plus")
        c.selection = SelectionSign::plus;
      else if (v == "minus")
        c.selection = SelectionSign::minus;
      else
        throw ValidationError("'selection.sign' must be plus or minus", line);
    };
    t["output.path"] = [](RunConfig &c, std::string_view v, int) {
      c.out_path = std::string(v);
    };
    t["output.format"] = [](RunConfig &c, std::string_view v, int line) {
      if (v == "csv")
        c.format = OutputFormat::csv;
      else if (v == "json")
        c.format = OutputFormat::json;
      else
        throw ValidationError("'output.format' must be csv or json", line);
    };
    t["truncation.P"] = [](RunConfig &c, std::string_view v, int line) {
      c.P = to_int(v, line, "truncation.P");
    };
    t["truncation.r_max"] = [](RunConfig &c, std::string_view v, int line) {
      c.r_max = to_double(v, line, "truncation.r_max");
    };
    return t;
  }();
  return table;
}

std::string physics_text(const RunConfig &c) {
  std::string s;
  auto line = [&s](const std::string &k, const std::string &v) {
    s += k + " = " + v + "\n";
  };
  s += "[beam]\n";
  line("l", std::to_string(c.l));
  line("k_rho", fmt(c.k_rho));
  if (c.k_rho_out)
    line("k_rho_out", fmt(*c.k_rho_out));
  s += "\n[transition]\n";
  line("n_initial", std::to_string(c.n_initial));
  line("m_initial", std::to_string(c.m_initial));
  line("n_final", std::to_string(c.n_final));
  line("a", fmt(c.a));
  line("alpha", std::to_string(c.alpha));
  s += "\n[geometry]\n";
  line("R0", list_text(c.R0));
  line("cluster_radii", list_text(c.cluster_radii));
  line("n_samples", std::to_string(c.n_samples));
  line("limit_R0", list_text(c.limit_R0));
  s += "\n[window]\n";
  line("l_min", std::to_string(c.window.l_min));
  line("l_max", std::to_string(c.window.l_max));
  s += "\n[tolerances]\n";
  line("quad_tol", fmt(c.quad_tol));
  line("tail_tol", fmt(c.tail_tol));
  line("window_tail_tol", fmt(c.window_tail_tol));
  s += "\n[selection]\n";
  line("sign", to_string(c.selection));
  if (c.P || c.r_max) {
    s += "\n[truncation]\n";
    if (c.P)
      line("P", std::to_string(*c.P));
    if (c.r_max)
      line("r_max", fmt(*c.r_max));
  }
  return s;
}

} // namespace

std::string to_string(SelectionSign s) {
  return s == SelectionSign::plus ? "plus" : "minus";
}

std::string to_string(OutputFormat f) {
  return f == OutputFormat::csv ? "csv" : "json";
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find_first_of("#;"); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ValidationError("unterminated section header", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> known{"beam",      "transition",
                                               "geometry",  "window",
                                               "tolerances", "selection",
                                               "output",    "truncation"};
      if (!known.count(section))
        throw ValidationError("unknown section [" + section + "]", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError("expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ValidationError("missing key before '='", line_no);
    const std::string full =
        key.find('.') != std::string::npos || section.empty() ? key
                                                              : section + "." + key;
    if (key.find('.') != std::string::npos && !section.empty())
      throw ValidationError("dotted key '" + key + "' inside section [" + section +
                                "]",
                            line_no);
    const auto it = setters().find(full);
    if (it == setters().end())
      throw ValidationError("unknown key '" + full + "'", line_no);
    if (!seen.insert(full).second)
      throw ValidationError("duplicate key '" + full + "'", line_no);
    it->second(cfg, value, line_no);
  }
  validate(cfg);
  return cfg;
}

void validate(const RunConfig &c) {
  auto fail = [](const std::string &msg) { throw ValidationError(msg); };
  if (!(c.k_rho > 0.0))
    fail("beam.k_rho must be positive");
  if (c.k_rho_out && !(*c.k_rho_out > 0.0))
    fail("beam.k_rho_out must be positive");
  if (c.n_initial < 0 || c.n_final < 0)
    fail("transition radial indices must be >= 0");
  if (!(c.a > 0.0))
    fail("transition.a must be positive");
  for (double r : c.R0)
    if (!(r >= 0.0))
      fail("geometry.R0 values must be >= 0");
  for (double r : c.cluster_radii)
    if (!(r >= 0.0))
      fail("geometry.cluster_radii values must be >= 0");
  if (c.n_samples < 1)
    fail("geometry.n_samples must be >= 1");
  for (double r : c.limit_R0)
    if (!(r >= 0.0))
      fail("geometry.limit_R0 values must be >= 0");
  if (!(c.quad_tol > 0.0))
    fail("tolerances.quad_tol must be positive");
  if (!(c.tail_tol > 0.0))
    fail("tolerances.tail_tol must be positive");
  if (!(c.window_tail_tol > 0.0))
    fail("tolerances.window_tail_tol must be positive");
  if (c.window.l_min > c.window.l_max)
    fail("window.l_min must not exceed window.l_max");
  const int target = c.l + effective_alpha(c.alpha, c.selection);
  if (!c.window.contains(target))
    fail("window [" + std::to_string(c.window.l_min) + ", " +
         std::to_string(c.window.l_max) + "] must contain l + alpha = " +
         std::to_string(target));
  if (c.P && *c.P < 0)
    fail("truncation.P must be >= 0");
  if (c.r_max && !(*c.r_max > 0.0))
    fail("truncation.r_max must be positive");
  // Orthogonality and state ranges.
  (void)c.transition();
}

std::string render(const RunConfig &c) {
  std::string s = physics_text(c);
  s += "\n[output]\n";
  if (!c.out_path.empty())
    s += "path = " + c.out_path + "\n";
  s += "format = " + to_string(c.format) + "\n";
  return s;
}

std::uint64_t config_hash(const RunConfig &c) { return fnv1a64(physics_text(c)); }

DipoleTransition RunConfig::transition() const {
  return DipoleTransition(AtomicState(m_initial, n_initial, a),
                          AtomicState(m_final(), n_final, a));
}

ChiralPair RunConfig::pair() const {
  if (std::abs(alpha) != 1)
    throw ValidationError("dichroism needs a dipole transition (|alpha| = 1)");
  const auto t = transition();
  if (alpha == 1)
    return chiral_pair(t);
  const auto &i = t.initial();
  const auto &f = t.final_state();
  return chiral_pair(DipoleTransition(AtomicState(-i.m, i.n, i.a),
                                      AtomicState(-f.m, f.n, f.a)));
}

MatrixOptions RunConfig::matrix_options() const {
  MatrixOptions o;
  o.tol = quad_tol;
  o.selection_sign = selection;
  o.p_override = P;
  o.r_max_override = r_max;
  o.graf_tail_tol = tail_tol;
  return o;
}

SpectrumOptions RunConfig::spectrum_options(int threads) const {
  SpectrumOptions o;
  o.window = window;
  o.window_tail_tol = window_tail_tol;
  o.threads = threads;
  return o;
}

} // namespace vortex
