#include "tlskick/noise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace tlskick {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t key = master_seed;
  const std::uint64_t mixed_seed = splitmix64(key);
  std::uint64_t index_state = index;
  std::uint64_t state = mixed_seed ^ splitmix64(index_state);
  std::array<std::uint32_t, 8> words{};
  for (std::size_t i = 0; i < words.size(); i += 2) {
    const std::uint64_t w = splitmix64(state);
    words[i] = static_cast<std::uint32_t>(w);
    words[i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

// Welford accumulator for one scalar per period.
struct Moments {
  std::vector<double> mean;
  std::vector<double> m2;

  explicit Moments(std::size_t n) : mean(n, 0.0), m2(n, 0.0) {}

  void push(std::size_t l, double x, double count) {
    const double delta = x - mean[l];
    mean[l] += delta / count;
    m2[l] += delta * (x - mean[l]);
  }

  // Chan et al. pairwise merge; `this` holds na samples, other holds nb.
  void merge(const Moments& other, double na, double nb) {
    const double n = na + nb;
    for (std::size_t l = 0; l < mean.size(); ++l) {
      const double delta = other.mean[l] - mean[l];
      mean[l] += delta * (nb / n);
      m2[l] += other.m2[l] + delta * delta * (na * nb / n);
    }
  }
};

struct BlockStats {
  std::size_t count{0};
  Moments sx;
  Moments sy;
  Moments sz;
  explicit BlockStats(std::size_t n) : sx(n), sy(n), sz(n) {}
};

}  // namespace

std::string_view to_string(NoiseDistribution distribution) {
  switch (distribution) {
    case NoiseDistribution::gaussian: return "gaussian";
    case NoiseDistribution::uniform: return "uniform";
    case NoiseDistribution::two_point: return "two-point";
  }
  return "unknown";
}

std::optional<NoiseDistribution> parse_noise_distribution(std::string_view text) {
  if (text == "gaussian") return NoiseDistribution::gaussian;
  if (text == "uniform") return NoiseDistribution::uniform;
  if (text == "two-point" || text == "two_point") return NoiseDistribution::two_point;
  return std::nullopt;
}

void NoiseSpec::validate() const {
  if (!std::isfinite(mean)) throw std::invalid_argument("noise: mean must be finite");
  if (!(std::isfinite(sigma) && sigma >= 0.0)) throw std::invalid_argument("noise: sigma must be finite and >= 0");
}

KickStream::KickStream(std::uint64_t master_seed, std::uint64_t index) : engine_(seeded_engine(master_seed, index)) {}

double sample_deviation(const NoiseSpec& noise, KickStream& stream) {
  if (noise.sigma == 0.0) return 0.0;
  switch (noise.distribution) {
    case NoiseDistribution::gaussian: return noise.sigma * stream.standard_normal();
    case NoiseDistribution::uniform: {
      // U(-a, a) has variance a^2 / 3
      const double half_width = std::sqrt(3.0) * noise.sigma;
      return half_width * (2.0 * stream.unit_uniform() - 1.0);
    }
    case NoiseDistribution::two_point: return stream.fair_coin() ? noise.sigma : -noise.sigma;
  }
  return 0.0;
}

double sample_kick(const NoiseSpec& noise, KickStream& stream) {
  if (noise.sigma == 0.0) return noise.mean;
  return noise.mean + sample_deviation(noise, stream);
}

MeanRemoved remove_mean(const NoiseSpec& noise, const Unitary2& u_period) {
  if (noise.mean == 0.0) return {noise, u_period};
  NoiseSpec centred = noise;
  centred.mean = 0.0;
  return {centred, compose(rotation_z(noise.mean), u_period)};
}

BlochVector kicked_step(const BlochVector& s, const Unitary2& u_period, double xi) {
  return apply_to_bloch(compose(rotation_z(xi), u_period), s);
}

Trajectory run_trajectory(const BlochVector& s0, const Unitary2& u_period, const NoiseSpec& noise,
                          std::size_t n_periods, KickStream& stream) {
  noise.validate();
  Trajectory traj;
  traj.states.reserve(n_periods + 1);
  traj.states.push_back(s0);
  BlochVector s = s0;
  for (std::size_t l = 0; l < n_periods; ++l) {
    s = kicked_step(s, u_period, sample_kick(noise, stream));
    traj.states.push_back(s);
  }
  return traj;
}

Trajectory run_trajectory(const BlochVector& s0, const DriveSpec& drive, const NoiseSpec& noise,
                          std::size_t n_periods, KickStream& stream) {
  return run_trajectory(s0, period_propagator(drive), noise, n_periods, stream);
}

EnsembleSeries run_ensemble(const BlochVector& s0, const Unitary2& u_period, double tau_d, const NoiseSpec& noise,
                            std::size_t n_periods, std::size_t n_traj, unsigned workers) {
  if (n_traj == 0) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
  noise.validate();
  const std::size_t n_points = n_periods + 1;
  const std::size_t n_blocks = (n_traj + kEnsembleBlock - 1) / kEnsembleBlock;

  std::vector<BlockStats> blocks(n_blocks, BlockStats(n_points));
  detail::parallel_for(n_blocks, workers, [&](std::size_t b) {
    BlockStats& block = blocks[b];
    const std::size_t first = b * kEnsembleBlock;
    const std::size_t last = std::min(n_traj, first + kEnsembleBlock);
    for (std::size_t j = first; j < last; ++j) {
      const double count = static_cast<double>(++block.count);
      KickStream stream(noise.master_seed, j);
      BlochVector s = s0;
      for (std::size_t l = 0; l < n_points; ++l) {
        if (l > 0) s = kicked_step(s, u_period, sample_kick(noise, stream));
        block.sx.push(l, s.x, count);
        block.sy.push(l, s.y, count);
        block.sz.push(l, s.z, count);
      }
    }
  });

  BlockStats total = std::move(blocks.front());
  for (std::size_t b = 1; b < n_blocks; ++b) {
    const auto na = static_cast<double>(total.count);
    const auto nb = static_cast<double>(blocks[b].count);
    total.sx.merge(blocks[b].sx, na, nb);
    total.sy.merge(blocks[b].sy, na, nb);
    total.sz.merge(blocks[b].sz, na, nb);
    total.count += blocks[b].count;
  }

  EnsembleSeries out;
  out.period = tau_d;
  out.n_traj = n_traj;
  out.mean_sx = std::move(total.sx.mean);
  out.mean_sy = std::move(total.sy.mean);
  out.mean_sz = std::move(total.sz.mean);
  const auto n = static_cast<double>(n_traj);
  auto standard_error = [n](const std::vector<double>& m2) {
    std::vector<double> se(m2.size(), 0.0);
    if (n < 2.0) return se;
    for (std::size_t l = 0; l < m2.size(); ++l) se[l] = std::sqrt(std::max(0.0, m2[l]) / (n - 1.0) / n);
    return se;
  };
  out.stderr_sx = standard_error(total.sx.m2);
  out.stderr_sy = standard_error(total.sy.m2);
  out.stderr_sz = standard_error(total.sz.m2);
  out.p_l.resize(n_points);
  out.stderr_p_l.resize(n_points);
  for (std::size_t l = 0; l < n_points; ++l) {
    out.p_l[l] = std::clamp(0.5 * (1.0 + out.mean_sz[l]), 0.0, 1.0);
    out.stderr_p_l[l] = 0.5 * out.stderr_sz[l];
  }
  return out;
}

EnsembleSeries run_ensemble(const BlochVector& s0, const DriveSpec& drive, const NoiseSpec& noise,
                            std::size_t n_periods, std::size_t n_traj, unsigned workers) {
  return run_ensemble(s0, period_propagator(drive), drive.period(), noise, n_periods, n_traj, workers);
}

}  // namespace tlskick
