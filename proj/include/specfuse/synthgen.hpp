#pragma once

// Random sinusoidal packets: unit amplitude, zero phase, hard gating on
// [onset, offset).

#include <cstdint>
#include <random>
#include <vector>

namespace specfuse {

struct PacketSpec {
  double freq = 0.0;    // Hz
  double onset = 0.0;   // s
  double offset = 0.0;  // s
};

struct SynthConfig {
  double duration = 0.5;
  double sample_rate = 1000.0;
  double freq_min = 200.0;
  double freq_max = 400.0;
  double dur_min = 0.01;
  double dur_max = 0.04;

  void validate() const;
  std::size_t num_samples() const;
};

using Rng = std::mt19937_64;

// Independent stream for signal `index` of an experiment seeded with `master`.
std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index);

PacketSpec gen_packet(Rng& rng, const SynthConfig& cfg);

// K ~ U{k_min..k_max} i.i.d. packets.
std::vector<PacketSpec> gen_mixture(Rng& rng, const SynthConfig& cfg, int k_min = 2,
                                    int k_max = 10);

std::vector<double> render(const std::vector<PacketSpec>& packets, const SynthConfig& cfg);

}  // namespace specfuse
