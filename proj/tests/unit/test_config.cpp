#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "vortex/config.hpp"

using namespace vortex;

namespace {

int error_line(std::string_view text) {
  try {
    (void)parse_config(text);
  } catch (const ValidationError &e) {
    return e.line();
  }
  return -1;
}

std::string error_text(std::string_view text) {
  try {
    (void)parse_config(text);
  } catch (const ValidationError &e) {
    return e.what();
  }
  return {};
}

RunConfig random_config(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1));
  };
  RunConfig c;
  c.l = pick(-4, 4);
  c.k_rho = 0.1 + 3 * u(rng);
  if (rng() % 2)
    c.k_rho_out = 0.1 + 3 * u(rng);
  c.n_initial = pick(0, 2);
  c.m_initial = pick(-2, 2);
  c.alpha = rng() % 2 ? 1 : -1;
  c.n_final = pick(0, 2);
  c.a = 0.2 + 2 * u(rng);
  c.R0.clear();
  for (int i = pick(0, 4); i > 0; --i)
    c.R0.push_back(5 * u(rng));
  c.cluster_radii = {0.0, 4 * u(rng)};
  c.n_samples = pick(1, 40);
  c.limit_R0 = {1 + u(rng), u(rng) / 2, 0.0};
  c.window = Window{c.l - pick(1, 6), c.l + pick(1, 6)};
  c.quad_tol = std::pow(10.0, -pick(4, 10)) * (1 + u(rng));
  c.tail_tol = 1e-12 * (1 + u(rng));
  c.window_tail_tol = u(rng) / 100 + 1e-9;
  c.selection = rng() % 2 ? SelectionSign::plus : SelectionSign::minus;
  if (rng() % 2)
    c.out_path = "runs/out_" + std::to_string(pick(0, 99)) + ".csv";
  c.format = rng() % 2 ? OutputFormat::csv : OutputFormat::json;
  if (rng() % 2)
    c.P = pick(0, 30);
  if (rng() % 2)
    c.r_max = 10 + 100 * u(rng);
  return c;
}

} // namespace

TEST_CASE("minimal config gets the documented defaults") {
  const auto c = parse_config("[beam]\nl = 1\n");
  CHECK(c == RunConfig{});
  CHECK(c.l == 1);
  CHECK(c.k_rho == 1.0);
  CHECK(c.k_out() == 1.0);
  CHECK(c.alpha == 1);
  CHECK(c.m_final() == -1);
  CHECK(c.window.l_min == -6);
  CHECK(c.window.l_max == 8);
  CHECK(c.quad_tol == 1e-6);
  CHECK(c.selection == SelectionSign::plus);
  CHECK(c.format == OutputFormat::csv);
  CHECK(c.cluster_radii == std::vector<double>{0, 1, 2, 4});
  CHECK(parse_config("beam.l = 1\n") == c);
  CHECK(parse_config("") == c);
}

TEST_CASE("syntax accepted") {
  const auto c = parse_config("# comment\n[beam]\n  l = -2   ; trailing\nk_rho_out = 0.5\n"
                              "[geometry]\nR0 = [0, 0.5, 1]\ncluster_radii = 0, 3\n"
                              "[window]\nl_min = -9\n[selection]\nsign = minus\n"
                              "[output]\nformat = json\npath = x.json\n");
  CHECK(c.l == -2);
  CHECK(c.k_out() == 0.5);
  CHECK(c.R0 == std::vector<double>{0, 0.5, 1});
  CHECK(c.cluster_radii == std::vector<double>{0, 3});
  CHECK(c.selection == SelectionSign::minus);
  CHECK(c.format == OutputFormat::json);
  CHECK(c.out_path == "x.json");
}

TEST_CASE("errors carry line numbers") {
  CHECK(error_line("[beam]\nl = 1\nbogus = 2\n") == 3);
  CHECK(error_line("[beam]\nl = 1\nl = 2\n") == 3);
  CHECK(error_line("\n\n[nope]\n") == 3);
  CHECK(error_line("[beam\n") == 1);
  CHECK(error_line("[beam]\nk_rho = fast\n") == 2);
  CHECK(error_line("[beam]\nl = 1.5\n") == 2);
  CHECK(error_line("[beam]\njust text\n") == 2);
  CHECK(error_line("[beam]\nbeam.l = 1\n") == 2);
  CHECK(error_line("[selection]\nsign = sideways\n") == 2);
  CHECK(error_line("[output]\nformat = xml\n") == 2);
  CHECK(error_line("[geometry]\nR0 = 1, , 2\n") == 2);
  CHECK(error_text("[beam]\nbogus = 2\n").find("line 2") == 0);
}

TEST_CASE("cross-field validation") {
  CHECK(error_text("[window]\nl_min = 3\n").find("must contain l + alpha = 2") !=
        std::string::npos);
  CHECK(error_text("[tolerances]\nquad_tol = -1e-6\n").find("quad_tol must be positive") !=
        std::string::npos);
  CHECK_THROWS_AS(parse_config("[tolerances]\ntail_tol = 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[geometry]\nR0 = 1, -2\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[geometry]\nn_samples = 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[beam]\nk_rho = 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[window]\nl_min = 5\nl_max = 4\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[transition]\nalpha = 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[transition]\na = -1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[truncation]\nr_max = 0\n"), ValidationError);
  // minus selection moves the target channel
  CHECK_NOTHROW(parse_config("[window]\nl_min = -1\nl_max = 0\n[selection]\nsign = minus\n"));
  CHECK_THROWS_AS(parse_config("[window]\nl_min = -1\nl_max = 0\n"), ValidationError);
}

TEST_CASE("render round trip on random configs") {
  std::mt19937_64 rng(314);
  int done = 0;
  for (int i = 0; i < 300; ++i) {
    const auto c = random_config(rng);
    try {
      validate(c);
    } catch (const ValidationError &) {
      continue;
    }
    ++done;
    const auto text = render(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(render(back) == text);
    CHECK(config_hash(back) == config_hash(c));
  }
  CHECK(done > 100);
}

TEST_CASE("hash tracks the physics, not the output destination") {
  const auto base = parse_config("");
  auto other = base;
  other.out_path = "elsewhere.csv";
  other.format = OutputFormat::json;
  CHECK(config_hash(other) == config_hash(base));
  auto changed = base;
  changed.R0 = {0.0, 0.5};
  CHECK(config_hash(changed) != config_hash(base));
  changed = base;
  changed.quad_tol = 2e-6;
  CHECK(config_hash(changed) != config_hash(base));
  changed = base;
  changed.selection = SelectionSign::minus;
  changed.window = Window{-6, 8};
  CHECK(config_hash(changed) != config_hash(base));
}

TEST_CASE("derived objects") {
  auto c = parse_config("[transition]\nalpha = -1\n[truncation]\nP = 7\nr_max = 55\n");
  CHECK(c.transition().alpha() == -1);
  const auto pair = c.pair();
  CHECK(pair.plus.alpha() == 1);
  CHECK(pair.minus.alpha() == -1);
  const auto mo = c.matrix_options();
  CHECK(mo.tol == c.quad_tol);
  CHECK(mo.p_override == 7);
  CHECK(mo.r_max_override == 55.0);
  CHECK(c.spectrum_options(3).threads == 3);
  c.alpha = 2;
  c.window = Window{-6, 8};
  CHECK_THROWS_AS((void)c.pair(), ValidationError);
}
