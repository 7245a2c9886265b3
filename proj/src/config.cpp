#include "tlskick/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "tlskick/experiments.hpp"

namespace tlskick {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view value, std::size_t line, std::string_view key) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    fail(line, "'" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
  }
  return out;
}

template <typename Int>
Int parse_integer(std::string_view value, std::size_t line, std::string_view key) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    fail(line, "'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(value) + "'");
  }
  return out;
}

void assign(ExperimentConfig& c, std::string_view section, std::string_view key, std::string_view value,
            std::size_t line) {
  const auto unknown = [&] { fail(line, "unknown key '" + std::string(key) + "' in [" + std::string(section) + "]"); };
  if (section == "drive") {
    if (key == "shape") {
      const auto shape = parse_drive_shape(value);
      if (!shape) fail(line, "unknown drive shape '" + std::string(value) + "'");
      c.drive.shape = *shape;
    } else if (key == "a_x") {
      c.drive.a_x = parse_double(value, line, key);
    } else if (key == "a_z") {
      c.drive.a_z = parse_double(value, line, key);
    } else if (key == "omega_d") {
      c.drive.omega_d = parse_double(value, line, key);
    } else {
      unknown();
    }
  } else if (section == "noise") {
    if (key == "distribution") {
      const auto dist = parse_noise_distribution(value);
      if (!dist) fail(line, "unknown noise distribution '" + std::string(value) + "'");
      c.noise.distribution = *dist;
    } else if (key == "mean") {
      c.noise.mean = parse_double(value, line, key);
    } else if (key == "sigma") {
      c.noise.sigma = parse_double(value, line, key);
    } else if (key == "seed") {
      c.noise.master_seed = parse_integer<std::uint64_t>(value, line, key);
    } else {
      unknown();
    }
  } else if (section == "run") {
    if (key == "periods") {
      c.run.n_periods = parse_integer<std::size_t>(value, line, key);
    } else if (key == "trajectories") {
      c.run.n_traj = parse_integer<std::size_t>(value, line, key);
    } else {
      unknown();
    }
  } else if (section == "output") {
    if (key == "path") {
      if (value.empty()) fail(line, "output path is empty");
      c.output.path = std::string(value);
    } else if (key == "format") {
      if (value != "csv") fail(line, "unsupported output format '" + std::string(value) + "'");
      c.output.format = OutputFormat::csv;
    } else {
      unknown();
    }
  } else if (section == "scan") {
    if (key == "ratio_min") {
      c.scan.ratio_min = parse_double(value, line, key);
    } else if (key == "ratio_max") {
      c.scan.ratio_max = parse_double(value, line, key);
    } else if (key == "samples") {
      c.scan.samples = parse_integer<std::size_t>(value, line, key);
    } else {
      unknown();
    }
  } else {
    unknown();
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    drive.validate();
    noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (run.n_traj == 0) throw ConfigError("run: trajectories must be >= 1");
  if (output.path.empty()) throw ConfigError("output: path is empty");
  if (!(scan.ratio_min >= 0.0 && scan.ratio_max > scan.ratio_min && std::isfinite(scan.ratio_max))) {
    throw ConfigError("scan: need 0 <= ratio_min < ratio_max");
  }
  if (scan.samples < 2) throw ConfigError("scan: samples must be >= 2");
}

ExperimentConfig parse_config(std::string_view text) {
  static const std::set<std::string_view> kSections{"drive", "noise", "run", "output", "scan"};
  ExperimentConfig config;
  std::string section;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!kSections.contains(name)) fail(line_no, "unknown section [" + std::string(name) + "]");
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    if (section.empty()) fail(line_no, "key outside of a section");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (!seen.emplace(section, std::string(key)).second) {
      fail(line_no, "duplicate key '" + std::string(key) + "' in [" + section + "]");
    }
    assign(config, section, key, value, line_no);
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[drive]\n"
      << "shape = " << to_string(c.drive.shape) << '\n'
      << "a_x = " << format_number(c.drive.a_x) << '\n'
      << "a_z = " << format_number(c.drive.a_z) << '\n'
      << "omega_d = " << format_number(c.drive.omega_d) << '\n'
      << "\n[noise]\n"
      << "distribution = " << to_string(c.noise.distribution) << '\n'
      << "mean = " << format_number(c.noise.mean) << '\n'
      << "sigma = " << format_number(c.noise.sigma) << '\n'
      << "seed = " << c.noise.master_seed << '\n'
      << "\n[run]\n"
      << "periods = " << c.run.n_periods << '\n'
      << "trajectories = " << c.run.n_traj << '\n'
      << "\n[output]\n"
      << "path = " << c.output.path << '\n'
      << "format = csv\n"
      << "\n[scan]\n"
      << "ratio_min = " << format_number(c.scan.ratio_min) << '\n'
      << "ratio_max = " << format_number(c.scan.ratio_max) << '\n'
      << "samples = " << c.scan.samples << '\n';
  return out.str();
}

}  // namespace tlskick
