#pragma once

#include <cstddef>
#include <vector>

namespace specfuse {

struct MelAxisConfig {
  std::size_t n_bands = 0;  // M >= 2
  double sample_rate = 0.0;
};

// O'Shaughnessy mel scale: 2595 log10(1 + f / 700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// M frequencies (Hz) equally spaced in mel from 0 to mel(f_s / 2).
std::vector<double> mel_axis(const MelAxisConfig& cfg);

}  // namespace specfuse
