#pragma once

// Continuous-wave Doppler radar front-end model: parametric hand trajectories
// and the single-channel IF voltage they produce.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "neurorad/error.hpp"
#include "neurorad/gesture.hpp"
#include "neurorad/rng.hpp"

namespace neurorad {

inline constexpr double kSpeedOfLight = 2.998e8;     // m/s
inline constexpr double kReferenceRange = 0.4;       // m, amp_ref is quoted here
inline constexpr double kMinRange = 0.05;            // m
inline constexpr double kTrajectoryRate = 200.0;     // Hz
inline constexpr double kIdleJitterStd = 0.5e-3;     // m
inline constexpr double kIdleJitterCutoff = 1.0;     // Hz

struct GestureParams {
  double r0 = 0.45;         // rest range, m
  double amplitude = 0.0;   // motion amplitude, m
  double freq = 0.0;        // oscillation frequency, Hz
  double duration = 1.5;    // s
  double snr_db = 20.0;
  bool lateral = false;     // motion transverse to boresight
};

struct Trajectory {
  double sample_rate = kTrajectoryRate;
  std::vector<double> r;    // radial distance, m
  GestureClass label = GestureClass::NoActivity;
  std::uint64_t seed = 0;
  GestureParams params;

  double duration() const noexcept {
    return static_cast<double>(r.size()) / sample_rate;
  }
};

struct SampledSignal {
  double sample_rate = 0.0;
  std::vector<double> samples;  // volts

  double duration() const noexcept {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

struct RadarConfig {
  double rf_freq = 24e9;
  double sim_rate = 8192.0;
  double amp_ref = 1.0;  // volts at kReferenceRange

  double wavelength() const noexcept { return kSpeedOfLight / rf_freq; }
};

/// Signed Doppler shift for radial velocity `v` (positive = receding).
constexpr double doppler_frequency(double v, double rf_freq) noexcept {
  return 2.0 * v * rf_freq / kSpeedOfLight;
}

/// Two-way inverse-square amplitude law.
inline double if_amplitude(double r, const RadarConfig& cfg) noexcept {
  const double q = kReferenceRange / r;
  return cfg.amp_ref * q * q;
}

/// Noise-free IF voltage for a target at range `r`.
inline double if_voltage(double r, const RadarConfig& cfg,
                         double phase0) noexcept {
  return if_amplitude(r, cfg) *
         std::cos(4.0 * std::numbers::pi * r / cfg.wavelength() + phase0);
}

inline void validate(const GestureParams& p) {
  auto in = [](double v, double lo, double hi) {
    return std::isfinite(v) && v >= lo && v <= hi;
  };
  if (!in(p.r0, 0.2, 0.8))
    throw ValidationError("r0 must lie in [0.2, 0.8] m, got " +
                          std::to_string(p.r0));
  if (!in(p.amplitude, 0.0, 0.3))
    throw ValidationError("amplitude must lie in [0, 0.3] m, got " +
                          std::to_string(p.amplitude));
  if (!in(p.freq, 0.0, 5.0))
    throw ValidationError("freq must lie in [0, 5] Hz, got " +
                          std::to_string(p.freq));
  if (!(std::isfinite(p.duration) && p.duration > 0.0))
    throw ValidationError("duration must be positive");
  if (std::isnan(p.snr_db)) throw ValidationError("snr_db is NaN");
}

/// Lateral centre of the transverse sinusoid, as a multiple of the amplitude.
/// Side-to-side waves swing out from boresight to one side (range follows the
/// hand at the fundamental); the vertical up-down stroke passes through
/// boresight (range oscillates at twice the fundamental).
constexpr double transverse_offset_ratio(GestureClass g) noexcept {
  return g == GestureClass::UpDown ? 0.0 : 1.0;
}

inline Trajectory gesture_trajectory(GestureClass cls, const GestureParams& params,
                                     std::uint64_t seed) {
  validate(params);
  if (cls == GestureClass::NoActivity && params.amplitude > 1e-3)
    throw ValidationError("no-activity requires amplitude ~ 0");
  if (params.lateral != is_transverse(cls))
    throw ValidationError("lateral flag inconsistent with class " +
                          std::string(token(cls)));

  Trajectory traj;
  traj.label = cls;
  traj.seed = seed;
  traj.params = params;
  const auto n = static_cast<std::size_t>(
      std::llround(params.duration * traj.sample_rate));
  traj.r.resize(n);

  Rng rng(seed);
  std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
  const double phase = uphase(rng);
  const double omega = 2.0 * std::numbers::pi * params.freq;
  const double a = params.amplitude;

  switch (cls) {
    case GestureClass::PushPull:
      for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / traj.sample_rate;
        traj.r[k] = params.r0 + a * std::sin(omega * t + phase);
      }
      break;
    case GestureClass::SlowWave:
    case GestureClass::FastWave:
    case GestureClass::UpDown: {
      const double centre = transverse_offset_ratio(cls) * a;
      for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / traj.sample_rate;
        const double x = centre + a * std::sin(omega * t + phase);
        traj.r[k] = std::sqrt(params.r0 * params.r0 + x * x);
      }
      break;
    }
    case GestureClass::NoActivity: {
      // Stationary one-pole low-passed jitter with std kIdleJitterStd.
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double rho =
          std::exp(-2.0 * std::numbers::pi * kIdleJitterCutoff / traj.sample_rate);
      const double drive = std::sqrt(1.0 - rho * rho);
      double y = gauss(rng);
      for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) y = rho * y + drive * gauss(rng);
        traj.r[k] = params.r0 + kIdleJitterStd * y;
      }
      break;
    }
  }
  for (double r : traj.r) {
    if (!(std::isfinite(r) && r > kMinRange))
      throw ValidationError("trajectory comes within " +
                            std::to_string(kMinRange) + " m of the antenna");
  }
  return traj;
}

/// Linear interpolation of a uniformly sampled sequence at fractional index.
inline double interpolate(std::span<const double> v, double pos) noexcept {
  if (v.empty()) return 0.0;
  if (pos <= 0.0) return v.front();
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

/// Standard deviation of white noise giving `snr_db` against a carrier whose
/// instantaneous amplitudes are `amplitudes` (signal power = mean A^2 / 2).
inline double noise_sigma(double mean_sq_amplitude, double snr_db) noexcept {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return std::sqrt(0.5 * mean_sq_amplitude / std::pow(10.0, snr_db / 10.0));
}

inline SampledSignal synthesize_if(const Trajectory& traj, const RadarConfig& cfg,
                                   double snr_db, std::uint64_t seed) {
  if (traj.r.empty()) throw ValidationError("empty trajectory");
  if (cfg.sim_rate < traj.sample_rate)
    throw ConfigError("sim_rate must be at least the trajectory sample rate");

  double max_speed = 0.0;
  for (std::size_t k = 1; k < traj.r.size(); ++k)
    max_speed = std::max(max_speed,
                         std::abs(traj.r[k] - traj.r[k - 1]) * traj.sample_rate);
  const double max_doppler = doppler_frequency(max_speed, cfg.rf_freq);
  if (max_doppler >= cfg.sim_rate / 2.0)
    throw AliasingError(max_doppler, cfg.sim_rate / 2.0);

  const auto n = static_cast<std::size_t>(
      std::llround(traj.duration() * cfg.sim_rate));
  const double step = traj.sample_rate / cfg.sim_rate;

  Rng rng(seed);
  std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
  const double phase0 = uphase(rng);

  SampledSignal out;
  out.sample_rate = cfg.sim_rate;
  out.samples.resize(n);
  double mean_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = interpolate(traj.r, static_cast<double>(k) * step);
    const double amp = if_amplitude(r, cfg);
    mean_sq += amp * amp;
    out.samples[k] = if_voltage(r, cfg, phase0);
  }
  mean_sq /= static_cast<double>(n);

  const double sigma = noise_sigma(mean_sq, snr_db);
  if (sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, sigma);
    for (auto& s : out.samples) s += gauss(rng);
  }
  return out;
}

}  // namespace neurorad
