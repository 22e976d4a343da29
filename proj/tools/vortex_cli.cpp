// vortex-oam: OAM spectra, dichroism and oracle checks for displaced atoms in
// Bessel vortex beams.
//
// Exit codes: 0 ok, 1 validation or usage error, 2 unconverged result,
// 3 internal error (including a failed verify check).

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "vortex/kernel.hpp"
#include "vortex/version.hpp"
#include "vortex/run.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 1, kUnconverged = 2, kInternal = 3 };

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw vortex::ValidationError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw vortex::ValidationError("cannot write output file '" + path + "'");
  out << text;
  if (!out)
    throw std::runtime_error("write failed for '" + path + "'");
}

struct Common {
  std::string config;
  std::string out;
  std::string format;
  int threads = 1;
  bool allow_unconverged = false;
};

void add_common(CLI::App *sub, Common &c, bool needs_config) {
  auto *opt = sub->add_option("--config", c.config, "Run configuration file");
  if (needs_config)
    opt->required();
  sub->add_option("--out", c.out, "Output file (default: config output.path, else stdout)");
  sub->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--allow-unconverged", c.allow_unconverged,
                "Exit 0 even when some amplitude did not converge");
}

int run_table(const Common &c,
              vortex::RunResult (*fn)(const vortex::RunConfig &, int)) {
  auto cfg = vortex::parse_config(read_file(c.config));
  if (!c.format.empty())
    cfg.format = c.format == "json" ? vortex::OutputFormat::json
                                    : vortex::OutputFormat::csv;
  const std::string path = c.out.empty() ? cfg.out_path : c.out;
  const auto result = fn(cfg, c.threads);
  write_text(path, vortex::format_output(result, cfg, cfg.format));
  auto &log = (path.empty() || path == "-") ? std::cerr : std::cout;
  for (const auto &line : result.summary)
    log << line << '\n';
  if (!result.converged) {
    log << "warning: some amplitudes did not reach the requested tolerance\n";
    return c.allow_unconverged ? kOk : kUnconverged;
  }
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Outgoing-OAM spectra and dichroism for an off-axis atom in a "
               "Bessel vortex beam"};
  app.require_subcommand(1);
  app.set_version_flag("--version", vortex::kVersion);

  Common spectrum, dichroism, limit, verify;
  auto *s = app.add_subcommand("spectrum", "Normalized |M(l')|^2 over the window per R0");
  add_common(s, spectrum, true);
  auto *d = app.add_subcommand("dichroism", "Cluster-averaged dichroic signal D(R_c)");
  add_common(d, dichroism, true);
  auto *l = app.add_subcommand("limit-study", "Off-channel weight along R0 -> 0");
  add_common(l, limit, true);
  auto *v = app.add_subcommand("verify", "Analytic identities and oracle checks");
  add_common(v, verify, false);
  std::string level = "quick";
  bool tamper = false;
  v->add_option("--level", level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  v->add_flag("--tamper-selection", tamper)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (s->parsed())
      return run_table(spectrum, vortex::run_spectrum);
    if (d->parsed())
      return run_table(dichroism, vortex::run_dichroism);
    if (l->parsed())
      return run_table(limit, vortex::run_limit_study);
    if (v->parsed()) {
      if (!verify.config.empty())
        (void)vortex::parse_config(read_file(verify.config));
      vortex::testing::set_selection_tamper(tamper);
      const auto checks = vortex::run_verify(
          level == "full" ? vortex::VerifyLevel::full : vortex::VerifyLevel::quick,
          verify.threads);
      const std::string text = vortex::format_verify(checks);
      write_text(verify.out, text);
      if (!verify.out.empty() && verify.out != "-")
        std::cout << text;
      for (const auto &c : checks)
        if (!c.passed)
          return kInternal;
      return kOk;
    }
  } catch (const vortex::ValidationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const vortex::NumericalError &e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kUnconverged;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
