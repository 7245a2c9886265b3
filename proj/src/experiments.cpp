#include "tlskick/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tlskick {

namespace {

constexpr double kInPlaneTolerance = 1e-9;
constexpr std::array<double, 4> kReferenceSigmas{0.20, 0.68, 1.41, 2.5};

BlochVector left_well() { return kUnitZ; }

void write_drive_comment(std::ostream& out, const DriveSpec& d) {
  out << "# drive: shape=" << to_string(d.shape) << " a_x=" << format_number(d.a_x)
      << " a_z=" << format_number(d.a_z) << " omega_d=" << format_number(d.omega_d) << '\n';
}

void write_noise_comment(std::ostream& out, const NoiseSpec& n, std::size_t n_traj) {
  out << "# noise: distribution=" << to_string(n.distribution) << " mean=" << format_number(n.mean)
      << " sigma=" << format_number(n.sigma) << " seed=" << n.master_seed << " trajectories=" << n_traj << '\n';
}

void write_model_comment(std::ostream& out, const AnalyticModel& m) {
  out << "# delta_epsilon=" << format_number(m.floquet.delta_epsilon)
      << " t2_over_tau_d=" << format_number(m.t2 / m.tau_d) << " regime=" << to_string(m.params.regime)
      << " analytic=" << (m.closed_form ? "closed-form" : "ode") << '\n';
  if (!m.valid) out << "# warning: T2 < tau_d, phase-diffusion model outside its validity range\n";
}

std::string sigma_label(double sigma) {
  std::string s = format_number(sigma);
  std::replace(s.begin(), s.end(), '.', '_');
  return s;
}

nlohmann::json optional_json(const std::optional<std::size_t>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string format_number(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

AnalyticModel make_analytic_model(const DriveSpec& drive, const NoiseSpec& noise) {
  AnalyticModel m;
  m.tau_d = drive.period();
  const MeanRemoved centred = remove_mean(noise, period_propagator(drive));
  m.floquet = floquet_decompose(centred.propagator, m.tau_d);
  m.t2 = t2_from_sigma(noise.sigma, m.tau_d);
  m.valid = phase_diffusion_valid(m.t2, m.tau_d);
  m.closed_form = m.floquet.degenerate || std::abs(m.floquet.axis.z) < kInPlaneTolerance;
  m.params = DampingParams::make(m.floquet.delta_epsilon, m.t2);
  return m;
}

std::vector<double> analytic_p_l(const AnalyticModel& model, std::size_t n_periods) {
  std::vector<double> p(n_periods + 1);
  if (model.closed_form) {
    for (std::size_t l = 0; l <= n_periods; ++l) {
      p[l] = pl_from_sz(sz_closed_form(static_cast<double>(l) * model.tau_d, model.params));
    }
    return p;
  }
  std::vector<double> grid(n_periods + 1);
  for (std::size_t l = 0; l <= n_periods; ++l) grid[l] = static_cast<double>(l) * model.tau_d;
  const Vec3 field = model.floquet.delta_epsilon * model.floquet.axis;
  const auto states = bloch_ode_integrate(field, model.t2, left_well(), grid);
  for (std::size_t l = 0; l <= n_periods; ++l) p[l] = pl_from_sz(states[l].z);
  return p;
}

SimulationResult run_simulation(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  SimulationResult r;
  r.config = config;
  r.model = make_analytic_model(config.drive, config.noise);
  r.mc = run_ensemble(left_well(), config.drive, config.noise, config.run.n_periods, config.run.n_traj, workers);
  r.p_l_analytic = analytic_p_l(r.model, config.run.n_periods);
  return r;
}

ComparisonSummary summarize_comparison(const SimulationResult& r) {
  ComparisonSummary s;
  s.points = r.mc.size();
  std::size_t agree = 0;
  for (std::size_t l = 0; l < s.points; ++l) {
    const double dev = std::abs(r.mc.p_l[l] - r.p_l_analytic[l]);
    s.max_abs_deviation = std::max(s.max_abs_deviation, dev);
    if (dev <= kAgreementSigmas * r.mc.stderr_p_l[l] + kAgreementFloor) ++agree;
  }
  s.agreement_fraction = s.points ? static_cast<double>(agree) / static_cast<double>(s.points) : 0.0;
  s.valid = r.model.valid;
  s.t2_over_tau = r.model.t2 / r.model.tau_d;
  s.regime = r.model.params.regime;
  return s;
}

void write_simulation_csv(std::ostream& out, const SimulationResult& r) {
  write_drive_comment(out, r.config.drive);
  write_noise_comment(out, r.config.noise, r.config.run.n_traj);
  write_model_comment(out, r.model);
  out << "t_over_tau_d,p_l_mc,p_l_analytic,stderr,valid\n";
  const char* valid = r.model.valid ? "1" : "0";
  for (std::size_t l = 0; l < r.mc.size(); ++l) {
    out << format_number(r.mc.t_over_tau(l)) << ',' << format_number(r.mc.p_l[l]) << ','
        << format_number(r.p_l_analytic[l]) << ',' << format_number(r.mc.stderr_p_l[l]) << ',' << valid << '\n';
  }
}

void write_comparison_csv(std::ostream& out, const SimulationResult& r) {
  const ComparisonSummary s = summarize_comparison(r);
  write_drive_comment(out, r.config.drive);
  write_noise_comment(out, r.config.noise, r.config.run.n_traj);
  write_model_comment(out, r.model);
  out << "# agreement_fraction=" << format_number(s.agreement_fraction)
      << " max_abs_deviation=" << format_number(s.max_abs_deviation) << '\n';
  out << "t_over_tau_d,p_l_mc,p_l_analytic,stderr,deviation,within_3se,valid\n";
  const char* valid = r.model.valid ? "1" : "0";
  for (std::size_t l = 0; l < r.mc.size(); ++l) {
    const double dev = r.mc.p_l[l] - r.p_l_analytic[l];
    const bool within = std::abs(dev) <= kAgreementSigmas * r.mc.stderr_p_l[l] + kAgreementFloor;
    out << format_number(r.mc.t_over_tau(l)) << ',' << format_number(r.mc.p_l[l]) << ','
        << format_number(r.p_l_analytic[l]) << ',' << format_number(r.mc.stderr_p_l[l]) << ','
        << format_number(dev) << ',' << (within ? '1' : '0') << ',' << valid << '\n';
  }
}

std::optional<std::size_t> first_delocalization(std::span<const double> p_l, double threshold) {
  for (std::size_t l = 0; l < p_l.size(); ++l) {
    if (std::abs(2.0 * p_l[l] - 1.0) < threshold) return l;
  }
  return std::nullopt;
}

std::optional<std::size_t> envelope_delocalization(std::span<const double> p_l, double threshold) {
  std::optional<std::size_t> since;
  for (std::size_t l = p_l.size(); l-- > 0;) {
    if (std::abs(2.0 * p_l[l] - 1.0) >= threshold) break;
    since = l;
  }
  return since;
}

QuasienergyReport make_quasienergy_report(const ExperimentConfig& config) {
  config.validate();
  QuasienergyReport r;
  r.drive = config.drive;
  r.tau_d = config.drive.period();
  r.floquet = floquet_decompose(remove_mean(config.noise, period_propagator(config.drive)).propagator, r.tau_d);
  if (config.drive.shape == DriveShape::square) r.delta_epsilon_as_printed = quasienergy_closed_form_as_printed(config.drive);
  r.sigma = config.noise.sigma;
  const double t2 = t2_from_sigma(r.sigma, r.tau_d);
  r.t2_over_tau = t2 / r.tau_d;
  r.regime = classify_regime(r.floquet.delta_epsilon, t2);
  r.critical_sigma = critical_sigma(r.floquet.delta_epsilon, r.tau_d);
  for (double sigma : kReferenceSigmas) {
    const double ref_t2 = t2_from_sigma(sigma, r.tau_d);
    r.reference_sigmas.push_back({sigma, ref_t2 / r.tau_d, classify_regime(r.floquet.delta_epsilon, ref_t2)});
  }
  return r;
}

void write_quasienergy_text(std::ostream& out, const QuasienergyReport& r) {
  const auto& f = r.floquet;
  out << "drive            " << to_string(r.drive.shape) << "  A_x=" << format_number(r.drive.a_x)
      << "  A_z=" << format_number(r.drive.a_z) << "  omega_d=" << format_number(r.drive.omega_d) << '\n'
      << "tau_d            " << format_number(r.tau_d) << '\n'
      << "delta_epsilon    " << format_number(f.delta_epsilon) << "  (single-period propagator)\n"
      << "angle/period     " << format_number(f.rotation_angle_per_period) << '\n'
      << "axis             (" << format_number(f.axis.x) << ", " << format_number(f.axis.y) << ", "
      << format_number(f.axis.z) << ")\n"
      << "degenerate       " << (f.degenerate ? "yes" : "no") << '\n';
  if (r.delta_epsilon_as_printed) {
    out << "as-printed form  " << format_number(*r.delta_epsilon_as_printed)
        << "  (phi/2, sin(theta) coefficient convention; not used downstream)\n";
  }
  out << "sigma            " << format_number(r.sigma) << "  T2/tau_d=" << format_number(r.t2_over_tau)
      << "  regime=" << to_string(r.regime) << '\n'
      << "critical sigma   " << format_number(r.critical_sigma) << "  (beta = delta_epsilon)\n";
  for (const auto& c : r.reference_sigmas) {
    out << "  sigma=" << format_number(c.sigma) << "  T2/tau_d=" << format_number(c.t2_over_tau)
        << "  regime=" << to_string(c.regime) << '\n';
  }
}

Fig1Result run_fig1(const ExperimentConfig& config, std::span<const double> sigmas, unsigned workers) {
  config.validate();
  Fig1Result r;
  r.config = config;
  const Unitary2 u = period_propagator(config.drive);
  r.floquet = floquet_decompose(u, config.drive.period());
  const double threshold = std::exp(-1.0);
  for (double sigma : sigmas) {
    NoiseSpec noise = config.noise;
    noise.sigma = sigma;
    noise.validate();
    Fig1Curve curve;
    curve.sigma = sigma;
    curve.series = run_ensemble(left_well(), u, config.drive.period(), noise, config.run.n_periods,
                                config.run.n_traj, workers);
    curve.first_delocalization = first_delocalization(curve.series.p_l, threshold);
    curve.envelope_delocalization = envelope_delocalization(curve.series.p_l, threshold);
    r.curves.push_back(std::move(curve));
  }
  return r;
}

void write_fig1_csv(std::ostream& out, const Fig1Result& r) {
  write_drive_comment(out, r.config.drive);
  out << "# assumption: drive parameters default to the comparison set (A_x=0.1, A_z=1.1, omega_d=1) "
         "unless configured\n";
  write_noise_comment(out, r.config.noise, r.config.run.n_traj);
  out << "# delta_epsilon=" << format_number(r.floquet.delta_epsilon) << '\n';
  for (const auto& c : r.curves) {
    out << "# sigma=" << format_number(c.sigma) << " first_below_inv_e="
        << (c.first_delocalization ? std::to_string(*c.first_delocalization) : "none")
        << " envelope_below_inv_e="
        << (c.envelope_delocalization ? std::to_string(*c.envelope_delocalization) : "none") << '\n';
  }
  out << "t_over_tau_d";
  for (const auto& c : r.curves) {
    out << ",p_l_sigma_" << sigma_label(c.sigma) << ",stderr_sigma_" << sigma_label(c.sigma);
  }
  out << '\n';
  const std::size_t rows = r.curves.empty() ? 0 : r.curves.front().series.size();
  for (std::size_t l = 0; l < rows; ++l) {
    out << format_number(static_cast<double>(l));
    for (const auto& c : r.curves) {
      out << ',' << format_number(c.series.p_l[l]) << ',' << format_number(c.series.stderr_p_l[l]);
    }
    out << '\n';
  }
}

void write_scan_csv(std::ostream& out, const DriveSpec& drive, const SuppressionScan& scan) {
  write_drive_comment(out, drive);
  out << "# a_z is swept; refined minima of delta_epsilon follow (zero means < " << format_number(kScanZeroThreshold)
      << ")\n";
  for (const auto& m : scan.minima) {
    out << "# minimum: a_z_over_omega=" << format_number(m.a_z_over_omega)
        << " omega_ratio=" << format_number(m.omega_ratio) << " delta_epsilon=" << format_number(m.delta_epsilon)
        << " zero=" << (m.is_zero ? 1 : 0) << '\n';
  }
  out << "a_z_over_omega,omega_ratio,delta_epsilon,continuous_delta_epsilon,degenerate\n";
  for (const auto& p : scan.points) {
    out << format_number(p.a_z_over_omega) << ',' << format_number(p.omega_ratio) << ','
        << format_number(p.delta_epsilon) << ',' << format_number(p.continuous_delta_epsilon) << ','
        << (p.degenerate ? '1' : '0') << '\n';
  }
}

nlohmann::json to_json(const QuasienergyReport& r) {
  nlohmann::json refs = nlohmann::json::array();
  for (const auto& c : r.reference_sigmas) {
    refs.push_back({{"sigma", c.sigma}, {"t2_over_tau_d", c.t2_over_tau}, {"regime", to_string(c.regime)}});
  }
  return {
      {"drive",
       {{"shape", to_string(r.drive.shape)},
        {"a_x", r.drive.a_x},
        {"a_z", r.drive.a_z},
        {"omega_d", r.drive.omega_d}}},
      {"tau_d", r.tau_d},
      {"delta_epsilon", r.floquet.delta_epsilon},
      {"rotation_angle_per_period", r.floquet.rotation_angle_per_period},
      {"axis", {r.floquet.axis.x, r.floquet.axis.y, r.floquet.axis.z}},
      {"degenerate", r.floquet.degenerate},
      {"delta_epsilon_as_printed",
       r.delta_epsilon_as_printed ? nlohmann::json(*r.delta_epsilon_as_printed) : nlohmann::json(nullptr)},
      {"sigma", r.sigma},
      {"t2_over_tau_d", std::isinf(r.t2_over_tau) ? nlohmann::json(nullptr) : nlohmann::json(r.t2_over_tau)},
      {"regime", to_string(r.regime)},
      {"critical_sigma", r.critical_sigma},
      {"reference_sigmas", refs},
  };
}

nlohmann::json to_json(const ComparisonSummary& s) {
  return {
      {"points", s.points},
      {"agreement_fraction", s.agreement_fraction},
      {"max_abs_deviation", s.max_abs_deviation},
      {"valid", s.valid},
      {"t2_over_tau_d", std::isinf(s.t2_over_tau) ? nlohmann::json(nullptr) : nlohmann::json(s.t2_over_tau)},
      {"regime", to_string(s.regime)},
  };
}

nlohmann::json to_json(const Fig1Result& r) {
  nlohmann::json curves = nlohmann::json::array();
  for (const auto& c : r.curves) {
    curves.push_back({{"sigma", c.sigma},
                      {"first_below_inv_e", optional_json(c.first_delocalization)},
                      {"envelope_below_inv_e", optional_json(c.envelope_delocalization)}});
  }
  return {{"delta_epsilon", r.floquet.delta_epsilon}, {"curves", curves}};
}

nlohmann::json to_json(const SuppressionScan& scan) {
  nlohmann::json minima = nlohmann::json::array();
  for (const auto& m : scan.minima) {
    minima.push_back({{"a_z_over_omega", m.a_z_over_omega},
                      {"omega_ratio", m.omega_ratio},
                      {"delta_epsilon", m.delta_epsilon},
                      {"zero", m.is_zero}});
  }
  return {{"points", scan.points.size()}, {"minima", minima}};
}

}  // namespace tlskick
