// tlskick: Floquet analysis and kicked-ensemble experiments for driven
// two-level tunneling systems.
//
// Exit status: 0 success, 2 configuration or usage error, 3 runtime error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tlskick/config.hpp"
#include "tlskick/experiments.hpp"

namespace {

using namespace tlskick;

constexpr const char* kWorkersEnv = "TLSKICK_WORKERS";

struct Overrides {
  std::string config_path;
  std::optional<double> sigma;
  std::optional<std::size_t> n_traj;
  std::optional<std::size_t> periods;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<double> ratio_min;
  std::optional<double> ratio_max;
  std::optional<std::size_t> samples;
  std::vector<double> sigmas;
  bool random_seed{false};
  bool json{false};
};

class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig resolve_config(const Overrides& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.sigma) c.noise.sigma = *o.sigma;
  if (o.n_traj) c.run.n_traj = *o.n_traj;
  if (o.periods) c.run.n_periods = *o.periods;
  if (o.seed) c.noise.master_seed = *o.seed;
  if (o.random_seed) c.noise.master_seed = (std::uint64_t{std::random_device{}()} << 32) | std::random_device{}();
  if (o.out) c.output.path = *o.out;
  if (o.ratio_min) c.scan.ratio_min = *o.ratio_min;
  if (o.ratio_max) c.scan.ratio_max = *o.ratio_max;
  if (o.samples) c.scan.samples = *o.samples;
  c.validate();
  return c;
}

unsigned resolve_workers(const Overrides& o) {
  if (o.workers) return std::max(1u, *o.workers);
  if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) {
      throw ConfigError(std::string(kWorkersEnv) + " must be a positive integer, got '" + env + "'");
    }
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot open output file '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw RuntimeFailure("failed writing output file '" + path + "'");
}

int cmd_quasienergy(const Overrides& o) {
  const ExperimentConfig c = resolve_config(o);
  const QuasienergyReport report = make_quasienergy_report(c);
  if (o.json) {
    std::cout << to_json(report).dump(2) << '\n';
  } else {
    write_quasienergy_text(std::cout, report);
  }
  return 0;
}

void warn_if_invalid(const SimulationResult& r) {
  if (!r.model.valid) {
    std::cerr << "warning: T2 = " << format_number(r.model.t2 / r.model.tau_d)
              << " tau_d < tau_d; the phase-diffusion curve is outside its validity range\n";
  }
}

int cmd_simulate(const Overrides& o) {
  const ExperimentConfig c = resolve_config(o);
  const SimulationResult r = run_simulation(c, resolve_workers(o));
  warn_if_invalid(r);
  std::ostringstream csv;
  write_simulation_csv(csv, r);
  write_file(c.output.path, csv.str());
  if (o.json) std::cout << to_json(summarize_comparison(r)).dump(2) << '\n';
  return 0;
}

int cmd_compare(const Overrides& o) {
  const ExperimentConfig c = resolve_config(o);
  const SimulationResult r = run_simulation(c, resolve_workers(o));
  warn_if_invalid(r);
  std::ostringstream csv;
  write_comparison_csv(csv, r);
  write_file(c.output.path, csv.str());
  const ComparisonSummary s = summarize_comparison(r);
  if (o.json) {
    std::cout << to_json(s).dump(2) << '\n';
  } else {
    std::cout << "points              " << s.points << '\n'
              << "agreement fraction  " << format_number(s.agreement_fraction) << "  (|dev| <= 3 stderr)\n"
              << "max |deviation|     " << format_number(s.max_abs_deviation) << '\n'
              << "T2/tau_d            " << format_number(s.t2_over_tau) << "  regime=" << to_string(s.regime)
              << '\n'
              << "model valid         " << (s.valid ? "yes" : "no (T2 < tau_d)") << '\n';
  }
  return 0;
}

int cmd_scan(const Overrides& o) {
  const ExperimentConfig c = resolve_config(o);
  const SuppressionScan scan =
      suppression_scan(c.drive, c.scan.ratio_min, c.scan.ratio_max, c.scan.samples, resolve_workers(o));
  std::ostringstream csv;
  write_scan_csv(csv, c.drive, scan);
  write_file(c.output.path, csv.str());
  if (o.json) {
    std::cout << to_json(scan).dump(2) << '\n';
  } else {
    for (const auto& m : scan.minima) {
      std::cout << (m.is_zero ? "zero     " : "minimum  ") << "A_z/omega_d=" << format_number(m.a_z_over_omega)
                << "  sqrt(A_x^2+A_z^2)/omega_d=" << format_number(m.omega_ratio)
                << "  delta_epsilon=" << format_number(m.delta_epsilon) << '\n';
    }
  }
  return 0;
}

int cmd_fig1(const Overrides& o) {
  const ExperimentConfig c = resolve_config(o);
  std::vector<double> sigmas(kFig1Sigmas.begin(), kFig1Sigmas.end());
  if (!o.sigmas.empty()) sigmas = o.sigmas;
  const Fig1Result r = run_fig1(c, sigmas, resolve_workers(o));
  std::ostringstream csv;
  write_fig1_csv(csv, r);
  write_file(c.output.path, csv.str());
  if (o.json) {
    std::cout << to_json(r).dump(2) << '\n';
  } else {
    for (const auto& curve : r.curves) {
      const auto show = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "none"; };
      std::cout << "sigma=" << format_number(curve.sigma)
                << "  first |2P_L-1|<1/e at l=" << show(curve.first_delocalization)
                << "  envelope below 1/e from l=" << show(curve.envelope_delocalization) << '\n';
    }
  }
  return 0;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Experiment config file (defaults built in when omitted)");
  cmd->add_flag("--json", o.json, "Print summary as JSON");
}

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--sigma", o.sigma, "Kick root variance (radians)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--n-traj", o.n_traj, "Number of trajectories")->check(CLI::PositiveNumber);
  cmd->add_option("--periods", o.periods, "Number of drive periods");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_flag("--random-seed", o.random_seed, "Draw a fresh master seed (recorded in the output header)");
  cmd->add_option("--workers", o.workers, "Worker thread cap (overrides TLSKICK_WORKERS)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output CSV path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet and kicked-ensemble simulator for driven two-level tunneling systems"};
  app.require_subcommand(1);
  Overrides o;

  auto* quasi = app.add_subcommand("quasienergy", "Quasienergy splitting, effective field and damping regimes");
  add_common(quasi, o);
  quasi->add_option("--sigma", o.sigma, "Kick root variance used for the regime line")->check(CLI::NonNegativeNumber);

  auto* simulate = app.add_subcommand("simulate", "Kicked ensemble with the phase-diffusion curve alongside");
  add_common(simulate, o);
  add_run_options(simulate, o);

  auto* compare = app.add_subcommand("compare", "Ensemble vs. phase-diffusion curve with agreement statistics");
  add_common(compare, o);
  add_run_options(compare, o);

  auto* scan = app.add_subcommand("scan", "Sweep A_z/omega_d and locate quasienergy degeneracies");
  add_common(scan, o);
  scan->add_option("--from", o.ratio_min, "Lowest A_z/omega_d");
  scan->add_option("--to", o.ratio_max, "Highest A_z/omega_d");
  scan->add_option("--samples", o.samples, "Grid points");
  scan->add_option("--workers", o.workers, "Worker thread cap")->check(CLI::PositiveNumber);
  scan->add_option("--out", o.out, "Output CSV path");

  auto* fig1 = app.add_subcommand("fig1", "Localization vs. noise strength: three ensembles sharing one drive");
  add_common(fig1, o);
  add_run_options(fig1, o);
  fig1->add_option("--sigmas", o.sigmas, "Kick strengths (default 0 0.25 2.5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*quasi) return cmd_quasienergy(o);
    if (*simulate) return cmd_simulate(o);
    if (*compare) return cmd_compare(o);
    if (*scan) return cmd_scan(o);
    if (*fig1) return cmd_fig1(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitConfigError;
}
