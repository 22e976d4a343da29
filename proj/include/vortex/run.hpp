#pragma once

#include <string>
#include <variant>
#include <vector>

#include "vortex/config.hpp"

namespace vortex {

using Cell = std::variant<long long, double, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct RunResult {
  std::string command;
  Table table;
  bool converged = true;
  // Human-readable trend and diagnostic lines (stdout, not the data file).
  std::vector<std::string> summary;
};

RunResult run_spectrum(const RunConfig &cfg, int threads = 1);
RunResult run_dichroism(const RunConfig &cfg, int threads = 1);
RunResult run_limit_study(const RunConfig &cfg, int threads = 1);

// CSV: a "# vortex-oam <version> config_hash=<hex> command=<name>" line, one
// column header, rows with doubles in %.17e. JSON mirrors the same content.
std::string format_output(const RunResult &r, const RunConfig &cfg,
                          OutputFormat f);

enum class VerifyLevel { quick, full };

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<VerifyCheck> run_verify(VerifyLevel level, int threads = 1);
std::string format_verify(const std::vector<VerifyCheck> &checks);

} // namespace vortex
