#include "specfuse/synthgen.hpp"

#include <cmath>
#include <numbers>

#include "specfuse/errors.hpp"

namespace specfuse {

void SynthConfig::validate() const {
  const double nyquist = sample_rate / 2.0;
  if (!(duration > 0.0) || !(sample_rate > 0.0)) {
    throw DomainError("synthesis needs positive duration and sample rate");
  }
  if (!(freq_min > 0.0) || !(freq_max >= freq_min) || !(freq_max < nyquist)) {
    throw DomainError("packet frequency range must lie in (0, f_s/2)");
  }
  if (!(dur_min > 0.0) || !(dur_max >= dur_min) || !(dur_max < duration)) {
    throw DomainError("packet duration range must lie in (0, duration)");
  }
}

std::size_t SynthConfig::num_samples() const {
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PacketSpec gen_packet(Rng& rng, const SynthConfig& cfg) {
  cfg.validate();
  std::uniform_real_distribution<double> freq(cfg.freq_min, cfg.freq_max);
  std::uniform_real_distribution<double> dur(cfg.dur_min, cfg.dur_max);
  PacketSpec p;
  p.freq = freq(rng);
  const double d = dur(rng);
  std::uniform_real_distribution<double> onset(0.0, cfg.duration - d);
  p.onset = onset(rng);
  p.offset = p.onset + d;
  return p;
}

std::vector<PacketSpec> gen_mixture(Rng& rng, const SynthConfig& cfg, int k_min, int k_max) {
  if (k_min < 1 || k_max < k_min) throw DomainError("mixture size range must satisfy 1 <= k_min <= k_max");
  std::uniform_int_distribution<int> count(k_min, k_max);
  const int k = count(rng);
  std::vector<PacketSpec> packets;
  packets.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) packets.push_back(gen_packet(rng, cfg));
  return packets;
}

std::vector<double> render(const std::vector<PacketSpec>& packets, const SynthConfig& cfg) {
  std::vector<double> y(cfg.num_samples(), 0.0);
  for (const auto& p : packets) {
    if (!(p.onset >= 0.0) || !(p.offset > p.onset) || !(p.freq > 0.0)) {
      throw DomainError("invalid packet (need freq > 0 and 0 <= onset < offset)");
    }
    for (std::size_t l = 0; l < y.size(); ++l) {
      const double t = static_cast<double>(l) / cfg.sample_rate;
      if (t >= p.onset && t < p.offset) y[l] += std::sin(2.0 * std::numbers::pi * p.freq * t);
    }
  }
  return y;
}

}  // namespace specfuse
