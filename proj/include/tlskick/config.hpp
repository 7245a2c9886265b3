#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tlskick/floquet.hpp"
#include "tlskick/noise.hpp"

namespace tlskick {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  std::size_t n_periods{100};
  std::size_t n_traj{500};
};

enum class OutputFormat { csv };

struct OutputSpec {
  std::string path{"tlskick.csv"};
  OutputFormat format{OutputFormat::csv};
};

struct ScanSpec {
  double ratio_min{0.5};
  double ratio_max{4.5};
  std::size_t samples{801};
};

/// Everything an experiment needs. Defaults reproduce the A_x = 0.1,
/// A_z = 1.1, omega_d = 1, sigma = 0.2, 500 x 100 comparison run.
struct ExperimentConfig {
  DriveSpec drive{};
  NoiseSpec noise{NoiseDistribution::gaussian, 0.0, 0.2, kDefaultSeed};
  RunSpec run{};
  OutputSpec output{};
  ScanSpec scan{};

  /// Throws ConfigError on any physical or structural violation.
  void validate() const;
};

/// Parses the line-oriented format:
///
///     # comment
///     [drive]
///     shape = square        # square | cosine | none
///     a_x = 0.1
///     a_z = 1.1
///     omega_d = 1
///     [noise]
///     distribution = gaussian   # gaussian | uniform | two-point
///     mean = 0
///     sigma = 0.2
///     seed = 20011015
///     [run]
///     periods = 100
///     trajectories = 500
///     [output]
///     path = out.csv
///     format = csv
///     [scan]
///     ratio_min = 0.5
///     ratio_max = 4.5
///     samples = 801
///
/// Keys left out keep their defaults. Unknown sections or keys, duplicate
/// keys and malformed values throw ConfigError with the line number.
ExperimentConfig parse_config(std::string_view text);

/// Reads and parses a file; I/O failures are reported as ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace tlskick
