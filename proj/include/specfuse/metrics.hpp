#pragma once

// Energy-concentration errors: the fraction of a spectrogram's energy lying
// outside a tolerance region around the ideal time-frequency support.
// Tolerance intervals are closed; boundary comparisons allow a relative slack
// of 1e-9 so that tolerances given as multiples of the grid spacing include
// the grid points they are meant to include.

#include <cstddef>
#include <span>
#include <vector>

#include "specfuse/synthgen.hpp"
#include "specfuse/tf_core.hpp"

namespace specfuse {

struct ToleranceBox {
  double delta_f = 0.0;  // Hz
  double delta_t = 0.0;  // s
};

struct PitchTrack {
  std::vector<double> frame_times;  // s
  std::vector<double> f0;           // Hz, 0 = unvoiced
  std::vector<bool> voiced;         // f0 > 0

  std::size_t voiced_count() const;
};

// Nearest grid value; ties go to the smaller one.
double nearest_freq(double f, std::span<const double> axis);
double nearest_time(double t, std::span<const double> axis);
// Zero-based position of the nearest grid value (same tie rule).
std::size_t nearest_index(double x, std::span<const double> axis);

double error_freq(const Spectrogram& spec, double f_star, double delta_f);
double error_time(const Spectrogram& spec, double t_on, double t_off, double delta_t);
double error_joint(const Spectrogram& spec, const std::vector<PacketSpec>& packets,
                   const ToleranceBox& tol);

// Membership mask over `axis` for the union of tolerance intervals around the
// projected harmonics k f0, k = 1..floor(f_s / 2 / f0).
std::vector<bool> harmonic_support(double f0, std::span<const double> axis, double sample_rate,
                                   double delta_f);

// Voiced pitch frames are mapped to spectrogram columns by nearest_time; when
// several frames land on one column the one closest in time decides.
double error_harmonic(const Spectrogram& spec, const PitchTrack& track, double delta_f);

// Columns (zero-based) of `spec` that count as voiced and the f0 assigned to each.
std::vector<std::pair<std::size_t, double>> voiced_columns(const Spectrogram& spec,
                                                           const PitchTrack& track);

enum class StdDev { sample, population };

struct Stats {
  double mean = 0.0;
  double se = 0.0;  // sigma / sqrt(count)
};

Stats experiment_stats(std::span<const double> values, StdDev kind = StdDev::sample);

}  // namespace specfuse
