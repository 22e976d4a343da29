#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vortex/spectra.hpp"

namespace vortex {

enum class OutputFormat { csv, json };

// Flat sectioned key = value run description. Every field has a default; see
// render() for the canonical text form.
struct RunConfig {
  // [beam]
  int l = 1;
  double k_rho = 1.0;
  std::optional<double> k_rho_out; // defaults to k_rho
  // [transition]
  int n_initial = 0;
  int m_initial = 0;
  int n_final = 0;
  double a = 1.0;
  int alpha = 1;
  // [geometry]
  std::vector<double> R0{0.0};
  std::vector<double> cluster_radii{0.0, 1.0, 2.0, 4.0};
  int n_samples = 16;
  std::vector<double> limit_R0{2.0, 1.0, 0.5, 0.25, 0.0};
  // [window]
  Window window;
  // [tolerances]
  double quad_tol = 1e-6;
  double tail_tol = 1e-12;
  double window_tail_tol = 1e-3;
  // [selection]
  SelectionSign selection = SelectionSign::plus;
  // [output]
  std::string out_path;
  OutputFormat format = OutputFormat::csv;
  // [truncation]
  std::optional<int> P;
  std::optional<double> r_max;

  double k_out() const { return k_rho_out.value_or(k_rho); }
  int m_final() const { return m_initial - alpha; }
  DipoleTransition transition() const;
  // Pair with alpha = +1 and -1 built from the configured transition.
  ChiralPair pair() const;
  MatrixOptions matrix_options() const;
  SpectrumOptions spectrum_options(int threads) const;

  friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

// Throws ValidationError with "line N: " prefixes for syntax errors, unknown
// sections or keys, duplicates and bad values; cross-field checks follow.
RunConfig parse_config(std::string_view text);

// Cross-field validation (window contains l + alpha, tolerances positive...).
void validate(const RunConfig &cfg);

// Canonical text; parse_config(render(cfg)) == cfg.
std::string render(const RunConfig &cfg);

// FNV-1a of the canonical text.
std::uint64_t config_hash(const RunConfig &cfg);

std::string to_string(SelectionSign s);
std::string to_string(OutputFormat f);

} // namespace vortex
