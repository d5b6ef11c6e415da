#include "specfuse/melscale.hpp"

#include <cmath>

#include "specfuse/errors.hpp"

namespace specfuse {

double hz_to_mel(double hz) {
  if (!(hz >= 0.0)) throw DomainError("hz_to_mel needs f >= 0");
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel) {
  if (!(mel >= 0.0)) throw DomainError("mel_to_hz needs m >= 0");
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> mel_axis(const MelAxisConfig& cfg) {
  if (cfg.n_bands < 2) throw DomainError("mel axis needs at least 2 bands");
  if (!(cfg.sample_rate > 0.0)) throw DomainError("mel axis needs a positive sample rate");
  const double nyquist = cfg.sample_rate / 2.0;
  const double top = hz_to_mel(nyquist);
  const double denom = static_cast<double>(cfg.n_bands - 1);
  std::vector<double> f(cfg.n_bands);
  for (std::size_t m = 0; m < cfg.n_bands; ++m) {
    f[m] = mel_to_hz(static_cast<double>(m) / denom * top);
  }
  f.back() = nyquist;
  return f;
}

}  // namespace specfuse
