#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlskick/config.hpp"
#include "tlskick/damping.hpp"
#include "tlskick/floquet.hpp"
#include "tlskick/noise.hpp"

namespace tlskick {

inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

/// Fixed 17-significant-digit text form ("%.17g"), round-trips every double.
std::string format_number(double x);

/// |p_mc - p_analytic| <= 3 stderr + kAgreementFloor counts as agreement.
/// The floor only absorbs roundoff where the ensemble spread is exactly zero.
inline constexpr double kAgreementFloor = 1e-9;
inline constexpr double kAgreementSigmas = 3.0;

/// Phase-diffusion prediction for the configured drive and noise: splitting
/// of the mean-removed period propagator plus T2 = 2 tau_d / sigma^2.
struct AnalyticModel {
  double tau_d{0.0};
  FloquetDecomposition floquet;
  double t2{0.0};
  bool valid{true};  // T2 >= tau_d
  /// True when the effective field lies in the x-y plane and the three-regime
  /// closed form applies; otherwise the Bloch ODE is integrated.
  bool closed_form{true};
  DampingParams params;
};

AnalyticModel make_analytic_model(const DriveSpec& drive, const NoiseSpec& noise);

/// P_L(l tau_d) for l = 0..n_periods from the analytic model, starting in |L>.
std::vector<double> analytic_p_l(const AnalyticModel& model, std::size_t n_periods);

struct SimulationResult {
  ExperimentConfig config;
  AnalyticModel model;
  EnsembleSeries mc;
  std::vector<double> p_l_analytic;
};

/// Ensemble from |L> plus the analytic curve on the same stroboscopic grid.
SimulationResult run_simulation(const ExperimentConfig& config, unsigned workers);

struct ComparisonSummary {
  std::size_t points{0};
  double agreement_fraction{0.0};
  double max_abs_deviation{0.0};
  bool valid{true};
  double t2_over_tau{0.0};
  DampingRegime regime{DampingRegime::underdamped};
};

ComparisonSummary summarize_comparison(const SimulationResult& result);

/// Columns: t_over_tau_d, p_l_mc, p_l_analytic, stderr, valid
void write_simulation_csv(std::ostream& out, const SimulationResult& result);

/// Columns: t_over_tau_d, p_l_mc, p_l_analytic, stderr, deviation, within_3se, valid
void write_comparison_csv(std::ostream& out, const SimulationResult& result);

/// First period l with |2 P_L - 1| < threshold.
std::optional<std::size_t> first_delocalization(std::span<const double> p_l, double threshold);

/// First period l from which |2 P_L - 1| stays below threshold for the rest
/// of the series (decay time of the oscillation envelope).
std::optional<std::size_t> envelope_delocalization(std::span<const double> p_l, double threshold);

struct ReferenceRegime {
  double sigma{0.0};
  double t2_over_tau{0.0};
  DampingRegime regime{DampingRegime::underdamped};
};

struct QuasienergyReport {
  DriveSpec drive;
  double tau_d{0.0};
  FloquetDecomposition floquet;
  std::optional<double> delta_epsilon_as_printed;  // square drives only
  double sigma{0.0};
  double t2_over_tau{0.0};  // +inf for sigma = 0
  DampingRegime regime{DampingRegime::underdamped};
  double critical_sigma{0.0};
  std::vector<ReferenceRegime> reference_sigmas;  // 0.20, 0.68, 1.41, 2.5
};

QuasienergyReport make_quasienergy_report(const ExperimentConfig& config);
void write_quasienergy_text(std::ostream& out, const QuasienergyReport& report);

struct Fig1Curve {
  double sigma{0.0};
  EnsembleSeries series;
  std::optional<std::size_t> first_delocalization;
  std::optional<std::size_t> envelope_delocalization;
};

struct Fig1Result {
  ExperimentConfig config;
  FloquetDecomposition floquet;
  std::vector<Fig1Curve> curves;
};

inline constexpr std::array<double, 3> kFig1Sigmas{0.0, 0.25, 2.5};

/// Ensembles from |L> with a shared drive, one per sigma.
Fig1Result run_fig1(const ExperimentConfig& config, std::span<const double> sigmas, unsigned workers);

/// Columns: t_over_tau_d, then p_l_sigma_<k>, stderr_sigma_<k> per curve.
void write_fig1_csv(std::ostream& out, const Fig1Result& result);

/// Columns: a_z_over_omega, omega_ratio, delta_epsilon, continuous_delta_epsilon, degenerate.
/// Refined minima are listed in '#' comment lines ahead of the header.
void write_scan_csv(std::ostream& out, const DriveSpec& drive, const SuppressionScan& scan);

nlohmann::json to_json(const QuasienergyReport& report);
nlohmann::json to_json(const ComparisonSummary& summary);
nlohmann::json to_json(const Fig1Result& result);
nlohmann::json to_json(const SuppressionScan& scan);

}  // namespace tlskick
