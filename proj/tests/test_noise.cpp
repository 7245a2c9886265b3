#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "oracles.hpp"
#include "tlskick/floquet.hpp"
#include "tlskick/noise.hpp"

using namespace tlskick;
using std::numbers::pi;

namespace {

const DriveSpec kReference{DriveShape::square, 0.1, 1.1, 1.0};

NoiseSpec gaussian(double sigma, std::uint64_t seed = kDefaultSeed) {
  return {NoiseDistribution::gaussian, 0.0, sigma, seed};
}

struct Moments {
  double mean{0.0};
  double variance{0.0};
};

Moments sample_moments(const NoiseSpec& noise, int n) {
  KickStream stream(noise.master_seed, 0);
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_kick(noise, stream);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  return {mean, sum2 / n - mean * mean};
}

}  // namespace

TEST_CASE("noise spec validation and parsing") {
  CHECK_THROWS_AS((NoiseSpec{NoiseDistribution::gaussian, 0.0, -0.1, 1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((NoiseSpec{NoiseDistribution::gaussian, INFINITY, 0.1, 1}.validate()), std::invalid_argument);
  CHECK(parse_noise_distribution("two-point") == NoiseDistribution::two_point);
  CHECK(parse_noise_distribution("two_point") == NoiseDistribution::two_point);
  CHECK(parse_noise_distribution("uniform") == NoiseDistribution::uniform);
  CHECK_FALSE(parse_noise_distribution("cauchy").has_value());
}

TEST_CASE("sample_kick: sigma = 0 returns the mean without drawing") {
  const NoiseSpec n{NoiseDistribution::gaussian, 0.3, 0.0, 5};
  KickStream a(5, 0);
  KickStream b(5, 0);
  for (int i = 0; i < 10; ++i) CHECK(sample_kick(n, a) == 0.3);
  CHECK(a.unit_uniform() == b.unit_uniform());
}

TEST_CASE("sample_kick: first two moments for every distribution") {
  for (const auto dist : {NoiseDistribution::gaussian, NoiseDistribution::uniform, NoiseDistribution::two_point}) {
    const Moments m = sample_moments({dist, 0.0, 0.2, 99}, 1'000'000);
    // stderr of the mean is 2e-4, of the variance below 6e-5
    CHECK(std::abs(m.mean) < 1e-3);
    CHECK(std::abs(m.variance - 0.04) < 4e-4);
  }
}

TEST_CASE("sample_kick: supports of uniform and two-point") {
  KickStream s(7, 3);
  const NoiseSpec two{NoiseDistribution::two_point, 0.1, 0.2, 7};
  std::set<double> values;
  for (int i = 0; i < 1000; ++i) values.insert(sample_kick(two, s));
  CHECK(values == std::set<double>{0.1 - 0.2, 0.1 + 0.2});

  const NoiseSpec uni{NoiseDistribution::uniform, 0.0, 0.2, 7};
  const double half_width = std::sqrt(3.0) * 0.2;
  for (int i = 0; i < 1000; ++i) {
    const double x = sample_kick(uni, s);
    CHECK(std::abs(x) <= half_width);
  }
}

TEST_CASE("KickStream depends on seed and index only") {
  KickStream a(1, 2);
  KickStream b(1, 2);
  KickStream c(1, 3);
  KickStream d(2, 2);
  const double xa = a.standard_normal();
  CHECK(xa == b.standard_normal());
  CHECK(xa != c.standard_normal());
  CHECK(xa != d.standard_normal());
}

TEST_CASE("remove_mean: examples") {
  const Unitary2 u = period_propagator(kReference);
  const NoiseSpec zero = gaussian(0.2);
  const MeanRemoved same = remove_mean(zero, u);
  CHECK(distance(same.propagator, u) == 0.0);
  CHECK(same.noise.mean == 0.0);

  const NoiseSpec biased{NoiseDistribution::uniform, 0.4, 0.2, 3};
  const MeanRemoved r = remove_mean(biased, u);
  CHECK(r.noise.mean == 0.0);
  CHECK(r.noise.sigma == 0.2);
  CHECK(r.noise.distribution == NoiseDistribution::uniform);
  CHECK(distance(r.propagator, compose(rotation_z(0.4), u)) < 1e-15);
}

TEST_CASE("remove_mean: matched deviations give matched trajectories") {
  const Unitary2 u = period_propagator(kReference);
  const NoiseSpec biased{NoiseDistribution::gaussian, 0.35, 0.2, 8};
  const MeanRemoved r = remove_mean(biased, u);
  // Same stream index, so both runs draw the same deviations.
  KickStream s1(8, 0);
  KickStream s2(8, 0);
  BlochVector a = kUnitZ;
  BlochVector b = kUnitZ;
  for (int l = 0; l < 200; ++l) {
    const double dev = sample_deviation(biased, s1);
    a = kicked_step(a, u, biased.mean + dev);
    b = kicked_step(b, compose(rotation_z(r.noise.mean + sample_deviation(r.noise, s2)), r.propagator),
                    0.0);
  }
  // R_z(mean + dev) U vs R_z(dev) R_z(mean) U: equal up to the order of roundoff.
  CHECK((a - b).norm() < 1e-11);
}

TEST_CASE("kicked_step: examples") {
  const Unitary2 flip = from_axis_angle(kUnitX, pi);
  CHECK((kicked_step(kUnitZ, flip, 1.234) - (-kUnitZ)).norm() < 1e-15);
  // Kick follows the propagator: R_x(pi/2) takes z to -y, then R_z(pi/2) takes -y to x.
  CHECK((kicked_step(kUnitZ, from_axis_angle(kUnitX, pi / 2.0), pi / 2.0) - kUnitX).norm() < 1e-15);
  const Unitary2 f = period_propagator(kReference);
  const BlochVector s{0.6, 0.0, 0.8};
  CHECK((kicked_step(s, f, 0.3) - apply_to_bloch(compose(rotation_z(0.3), f), s)).norm() < 1e-15);
}

TEST_CASE("run_trajectory: sigma = 0 is the stroboscopic precession") {
  const Unitary2 u = period_propagator(kReference);
  const FloquetDecomposition f = floquet_decompose(u, kReference.period());
  KickStream s(1, 0);
  const Trajectory t = run_trajectory(kUnitZ, u, gaussian(0.0), 50, s);
  REQUIRE(t.states.size() == 51);
  CHECK(t.states[0] == kUnitZ);
  for (std::size_t l = 0; l < t.states.size(); ++l) {
    const double angle = f.rotation_angle_per_period * static_cast<double>(l);
    CHECK((t.states[l] - oracle::rodrigues(f.axis, angle, kUnitZ)).norm() < 1e-12);
  }
}

TEST_CASE("property: trajectories stay on the unit sphere") {
  KickStream s(4, 0);
  const Trajectory t = run_trajectory(kUnitZ, kReference, gaussian(1.3), 2000, s);
  for (const auto& v : t.states) CHECK(std::abs(v.norm() - 1.0) < 1e-10);
}

TEST_CASE("run_ensemble: sigma = 0 equals the single trajectory with zero stderr") {
  const Unitary2 u = period_propagator(kReference);
  const EnsembleSeries e = run_ensemble(kUnitZ, u, kReference.period(), gaussian(0.0), 40, 130, 3);
  KickStream s(kDefaultSeed, 0);
  const Trajectory t = run_trajectory(kUnitZ, u, gaussian(0.0), 40, s);
  REQUIRE(e.size() == 41);
  for (std::size_t l = 0; l < e.size(); ++l) {
    CHECK(std::abs(e.mean_sz[l] - t.states[l].z) < 1e-14);
    CHECK(e.stderr_p_l[l] == 0.0);
    CHECK(e.p_l[l] == doctest::Approx((1.0 + e.mean_sz[l]) / 2.0).epsilon(1e-15));
  }
  CHECK(e.p_l[0] == 1.0);
  CHECK(e.n_traj == 130);
  CHECK(e.t_over_tau(7) == 7.0);
}

TEST_CASE("run_ensemble rejects an empty ensemble") {
  CHECK_THROWS_AS(run_ensemble(kUnitZ, kReference, gaussian(0.2), 10, 0), std::invalid_argument);
}

TEST_CASE("property: ensemble is bit-identical for any worker count") {
  const NoiseSpec n = gaussian(0.4, 1234);
  const EnsembleSeries ref = run_ensemble(kUnitZ, kReference, n, 60, 300, 1);
  for (unsigned w : {2u, 3u, 8u, 17u}) {
    const EnsembleSeries e = run_ensemble(kUnitZ, kReference, n, 60, 300, w);
    CHECK(e.p_l == ref.p_l);
    CHECK(e.stderr_p_l == ref.stderr_p_l);
    CHECK(e.mean_sx == ref.mean_sx);
    CHECK(e.stderr_sy == ref.stderr_sy);
  }
  const EnsembleSeries other = run_ensemble(kUnitZ, kReference, gaussian(0.4, 1235), 60, 300, 1);
  CHECK(other.p_l != ref.p_l);
}

TEST_CASE("property: s_z is conserved under pure dephasing") {
  const DriveSpec off{DriveShape::square, 0.0, 1.1, 1.0};
  const BlochVector s0{0.6, 0.0, 0.8};
  const EnsembleSeries e = run_ensemble(s0, off, gaussian(0.7), 100, 200, 4);
  for (double sz : e.mean_sz) CHECK(std::abs(sz - 0.8) < 1e-12);
}

TEST_CASE("property: transverse decay with the drive off") {
  const double sigma = 0.3;
  const DriveSpec off{DriveShape::none, 0.0, 0.0, 1.0};
  const EnsembleSeries e = run_ensemble(kUnitX, off, gaussian(sigma, 77), 44, 4000, 4);
  for (std::size_t l = 0; l < e.size(); ++l) {
    if (static_cast<double>(l) * sigma * sigma > 4.0) break;
    const double expected = std::exp(-static_cast<double>(l) * sigma * sigma / 2.0);
    CHECK(std::abs(e.mean_sx[l] - expected) <= 3.0 * e.stderr_sx[l] + 1e-12);
  }
}

TEST_CASE("property: kick distribution shape does not matter at equal sigma") {
  const std::size_t periods = 100;
  const std::size_t n = 500;
  const EnsembleSeries g = run_ensemble(kUnitZ, kReference, {NoiseDistribution::gaussian, 0.0, 0.2, 31}, periods, n, 4);
  for (const auto dist : {NoiseDistribution::uniform, NoiseDistribution::two_point}) {
    const EnsembleSeries o = run_ensemble(kUnitZ, kReference, {dist, 0.0, 0.2, 32}, periods, n, 4);
    std::size_t within = 0;
    for (std::size_t l = 0; l < g.size(); ++l) {
      const double band = 3.0 * std::hypot(g.stderr_p_l[l], o.stderr_p_l[l]) + 1e-9;
      if (std::abs(g.p_l[l] - o.p_l[l]) <= band) ++within;
    }
    CHECK(static_cast<double>(within) / static_cast<double>(g.size()) >= 0.95);
  }
}

TEST_CASE("property: long-time population relaxes to one half") {
  // sigma = 0.6 is below the critical kick strength for the reference drive.
  const EnsembleSeries e = run_ensemble(kUnitZ, kReference, gaussian(0.6, 5), 600, 2000, 4);
  const std::size_t last = e.size() - 1;
  CHECK(std::abs(e.p_l[last] - 0.5) <= 3.0 * e.stderr_p_l[last]);
}
