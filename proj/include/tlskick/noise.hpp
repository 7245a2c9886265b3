#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "tlskick/floquet.hpp"
#include "tlskick/su2.hpp"

namespace tlskick {

enum class NoiseDistribution { gaussian, uniform, two_point };

std::string_view to_string(NoiseDistribution distribution);
std::optional<NoiseDistribution> parse_noise_distribution(std::string_view text);

/// Seed used when none is configured.
inline constexpr std::uint64_t kDefaultSeed = 20011015;

/// Distribution of the kick angle xi (radians) applied about z once per period.
struct NoiseSpec {
  NoiseDistribution distribution{NoiseDistribution::gaussian};
  double mean{0.0};
  double sigma{0.0};  // root variance
  std::uint64_t master_seed{kDefaultSeed};

  /// Throws std::invalid_argument unless mean is finite and sigma is finite and >= 0.
  void validate() const;
};

/// Random stream of one trajectory. Seeded from (master_seed, index) by a
/// SplitMix64 mix, so every trajectory draws the same numbers no matter which
/// thread runs it.
class KickStream {
 public:
  KickStream(std::uint64_t master_seed, std::uint64_t index);

  double standard_normal() { return normal_(engine_); }
  double unit_uniform() { return uniform_(engine_); }
  bool fair_coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Zero-mean part of a kick: variance sigma^2 for every distribution.
double sample_deviation(const NoiseSpec& noise, KickStream& stream);

/// mean + sample_deviation(); exactly the mean when sigma = 0 (no draw is consumed).
double sample_kick(const NoiseSpec& noise, KickStream& stream);

struct MeanRemoved {
  NoiseSpec noise;
  Unitary2 propagator;
};

/// Folds the kick mean into the period propagator: U -> R_z(mean) U and mean -> 0.
MeanRemoved remove_mean(const NoiseSpec& noise, const Unitary2& u_period);

/// One period followed by one kick: s -> R_z(xi) R(U) s.
BlochVector kicked_step(const BlochVector& s, const Unitary2& u_period, double xi);

struct Trajectory {
  std::vector<BlochVector> states;  // states[l] at t = l tau_d, states[0] is the initial vector
};

Trajectory run_trajectory(const BlochVector& s0, const Unitary2& u_period, const NoiseSpec& noise,
                          std::size_t n_periods, KickStream& stream);
Trajectory run_trajectory(const BlochVector& s0, const DriveSpec& drive, const NoiseSpec& noise,
                          std::size_t n_periods, KickStream& stream);

/// Stroboscopic ensemble averages, indexed by period number l.
struct EnsembleSeries {
  double period{0.0};  // tau_d
  std::size_t n_traj{0};
  std::vector<double> mean_sx;
  std::vector<double> mean_sy;
  std::vector<double> mean_sz;
  std::vector<double> stderr_sx;
  std::vector<double> stderr_sy;
  std::vector<double> stderr_sz;
  std::vector<double> p_l;         // (1 + mean_sz) / 2
  std::vector<double> stderr_p_l;  // stderr_sz / 2

  [[nodiscard]] std::size_t size() const { return p_l.size(); }
  [[nodiscard]] double t_over_tau(std::size_t l) const { return static_cast<double>(l); }
};

/// Trajectory blocks are the unit of parallel work and of reduction order.
inline constexpr std::size_t kEnsembleBlock = 64;

/// Runs n_traj independent trajectories with streams KickStream(seed, j).
/// The result is bit-identical for any `workers`: each fixed block of
/// kEnsembleBlock trajectories is reduced in index order, then blocks are
/// merged in block order. Throws std::invalid_argument when n_traj = 0.
EnsembleSeries run_ensemble(const BlochVector& s0, const Unitary2& u_period, double tau_d, const NoiseSpec& noise,
                            std::size_t n_periods, std::size_t n_traj, unsigned workers = 1);
EnsembleSeries run_ensemble(const BlochVector& s0, const DriveSpec& drive, const NoiseSpec& noise,
                            std::size_t n_periods, std::size_t n_traj, unsigned workers = 1);

}  // namespace tlskick
