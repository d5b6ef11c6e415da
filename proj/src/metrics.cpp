#include "specfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specfuse/errors.hpp"

namespace specfuse {

namespace {

constexpr double kRelSlack = 1e-9;

double slack(double scale) { return kRelSlack * std::max(1.0, std::abs(scale)); }

bool inside(double x, double lo, double hi) {
  return x >= lo - slack(lo) && x <= hi + slack(hi);
}

double total_mass(const Spectrogram& spec) {
  const double m = spec.mass();
  if (!(m > 0.0)) throw DomainError("concentration error undefined for a zero-mass spectrogram");
  return m;
}

}  // namespace

std::size_t PitchTrack::voiced_count() const {
  return static_cast<std::size_t>(std::count(voiced.begin(), voiced.end(), true));
}

std::size_t nearest_index(double x, std::span<const double> axis) {
  if (axis.empty()) throw DomainError("nearest neighbor on an empty axis");
  const auto it = std::lower_bound(axis.begin(), axis.end(), x);
  if (it == axis.begin()) return 0;
  if (it == axis.end()) return axis.size() - 1;
  const auto hi = static_cast<std::size_t>(it - axis.begin());
  const std::size_t lo = hi - 1;
  return (x - axis[lo] <= axis[hi] - x) ? lo : hi;
}

double nearest_freq(double f, std::span<const double> axis) { return axis[nearest_index(f, axis)]; }
double nearest_time(double t, std::span<const double> axis) { return axis[nearest_index(t, axis)]; }

double error_freq(const Spectrogram& spec, double f_star, double delta_f) {
  const double total = total_mass(spec);
  const auto freqs = spec.support().freqs();
  const double center = nearest_freq(f_star, freqs);
  double outside = 0.0;
  for (std::size_t n = 0; n < spec.cols(); ++n) {
    for (std::size_t m = 0; m < spec.rows(); ++m) {
      if (!inside(freqs[m], center - delta_f, center + delta_f)) outside += spec.at(m, n);
    }
  }
  return outside / total;
}

double error_time(const Spectrogram& spec, double t_on, double t_off, double delta_t) {
  const double total = total_mass(spec);
  const auto times = spec.support().times();
  const double lo = nearest_time(t_on, times) - delta_t;
  const double hi = nearest_time(t_off, times) + delta_t;
  double outside = 0.0;
  for (std::size_t n = 0; n < spec.cols(); ++n) {
    if (inside(times[n], lo, hi)) continue;
    for (std::size_t m = 0; m < spec.rows(); ++m) outside += spec.at(m, n);
  }
  return outside / total;
}

double error_joint(const Spectrogram& spec, const std::vector<PacketSpec>& packets,
                   const ToleranceBox& tol) {
  if (packets.empty()) throw DomainError("joint error needs at least one packet");
  const double total = total_mass(spec);
  const auto freqs = spec.support().freqs();
  const auto times = spec.support().times();
  // Per packet: masks over rows and columns; a point is covered if some
  // packet covers both its row and its column.
  std::vector<std::vector<bool>> row_in(packets.size()), col_in(packets.size());
  for (std::size_t k = 0; k < packets.size(); ++k) {
    const double fc = nearest_freq(packets[k].freq, freqs);
    const double t0 = nearest_time(packets[k].onset, times) - tol.delta_t;
    const double t1 = nearest_time(packets[k].offset, times) + tol.delta_t;
    row_in[k].resize(freqs.size());
    col_in[k].resize(times.size());
    for (std::size_t m = 0; m < freqs.size(); ++m) {
      row_in[k][m] = inside(freqs[m], fc - tol.delta_f, fc + tol.delta_f);
    }
    for (std::size_t n = 0; n < times.size(); ++n) col_in[k][n] = inside(times[n], t0, t1);
  }
  double outside = 0.0;
  for (std::size_t n = 0; n < spec.cols(); ++n) {
    for (std::size_t m = 0; m < spec.rows(); ++m) {
      bool covered = false;
      for (std::size_t k = 0; k < packets.size() && !covered; ++k) {
        covered = row_in[k][m] && col_in[k][n];
      }
      if (!covered) outside += spec.at(m, n);
    }
  }
  return outside / total;
}

std::vector<bool> harmonic_support(double f0, std::span<const double> axis, double sample_rate,
                                   double delta_f) {
  if (!(f0 > 0.0)) throw DomainError("harmonic support needs f0 > 0");
  const auto k_max = static_cast<std::size_t>(std::floor(sample_rate / 2.0 / f0));
  std::vector<bool> mask(axis.size(), false);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double center = nearest_freq(static_cast<double>(k) * f0, axis);
    const double lo = center - delta_f, hi = center + delta_f;
    // axis is sorted: walk outwards from the lower bound
    auto it = std::lower_bound(axis.begin(), axis.end(), lo - slack(lo));
    for (; it != axis.end() && inside(*it, lo, hi); ++it) {
      mask[static_cast<std::size_t>(it - axis.begin())] = true;
    }
  }
  return mask;
}

std::vector<std::pair<std::size_t, double>> voiced_columns(const Spectrogram& spec,
                                                           const PitchTrack& track) {
  const auto times = spec.support().times();
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> winner(times.size(), kNone);
  for (std::size_t j = 0; j < track.frame_times.size(); ++j) {
    const std::size_t n = nearest_index(track.frame_times[j], times);
    const std::size_t w = winner[n];
    if (w == kNone ||
        std::abs(track.frame_times[j] - times[n]) < std::abs(track.frame_times[w] - times[n])) {
      winner[n] = j;
    }
  }
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (winner[n] != kNone && track.voiced[winner[n]]) out.emplace_back(n, track.f0[winner[n]]);
  }
  return out;
}

double error_harmonic(const Spectrogram& spec, const PitchTrack& track, double delta_f) {
  const auto freqs = spec.support().freqs();
  const double fs = spec.provenance().sample_rate;
  double total = 0.0, outside = 0.0;
  for (const auto& [n, f0] : voiced_columns(spec, track)) {
    const auto mask = harmonic_support(f0, freqs, fs, delta_f);
    for (std::size_t m = 0; m < spec.rows(); ++m) {
      const double v = spec.at(m, n);
      total += v;
      if (!mask[m]) outside += v;
    }
  }
  if (!(total > 0.0)) throw DomainError("harmonic error needs voiced frames carrying energy");
  return outside / total;
}

Stats experiment_stats(std::span<const double> values, StdDev kind) {
  if (values.size() < 2) throw DomainError("statistics need at least two values");
  const double count = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double denom = kind == StdDev::sample ? count - 1.0 : count;
  return Stats{mean, std::sqrt(ss / denom) / std::sqrt(count)};
}

}  // namespace specfuse
