#include "specfuse/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "specfuse/errors.hpp"

namespace specfuse {

void StftParams::validate() const {
  if (window_len < 2 || window_len % 2 != 0) {
    throw DomainError("window length must be an even number of samples >= 2, got " +
                      std::to_string(window_len));
  }
  if (hop == 0) throw DomainError("hop must be >= 1 sample");
  if (n_fft < window_len || n_fft % 2 != 0) {
    throw DomainError("n_fft must be even and >= window length, got " + std::to_string(n_fft));
  }
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw DomainError("sample rate must be positive");
  }
}

std::vector<double> hann_window(std::size_t window_len) {
  if (window_len < 2) throw DomainError("Hann window needs W >= 2");
  std::vector<double> g(window_len);
  const double w = static_cast<double>(window_len);
  for (std::size_t l = 0; l < window_len; ++l) {
    g[l] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(l) / w));
  }
  return g;
}

std::size_t frame_count(std::size_t signal_len, std::size_t hop) {
  if (signal_len == 0 || hop == 0) throw DomainError("frame_count needs L >= 1 and H >= 1");
  return (signal_len - 1) / hop + 1;
}

std::vector<double> time_axis(const StftParams& params, std::size_t num_frames) {
  std::vector<double> t(num_frames);
  for (std::size_t n = 0; n < num_frames; ++n) {
    t[n] = static_cast<double>(n * params.hop) / params.sample_rate;
  }
  return t;
}

std::vector<double> freq_axis(std::size_t num_bins, double sample_rate) {
  if (num_bins < 2) throw DomainError("frequency axis needs M >= 2");
  std::vector<double> f(num_bins);
  const double denom = static_cast<double>(num_bins - 1);
  for (std::size_t m = 0; m < num_bins; ++m) {
    f[m] = static_cast<double>(m) / denom * (sample_rate / 2.0);
  }
  return f;
}

std::size_t fft_size_for_spacing(std::size_t window_len, double sample_rate, double spacing_hz) {
  if (!(spacing_hz > 0.0)) throw DomainError("frequency spacing must be positive");
  std::size_t n = 2;
  while (n < window_len || sample_rate / static_cast<double>(n) > spacing_hz) n *= 2;
  return n;
}

StftParams make_params(double window_s, double hop_s, double sample_rate, double spacing_hz) {
  if (!(window_s > 0.0) || !(hop_s > 0.0) || !(sample_rate > 0.0)) {
    throw DomainError("window, hop and sample rate must be positive");
  }
  StftParams p;
  p.sample_rate = sample_rate;
  p.window_len = 2 * static_cast<std::size_t>(std::llround(window_s * sample_rate / 2.0));
  p.window_len = std::max<std::size_t>(p.window_len, 2);
  p.hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hop_s * sample_rate)));
  p.n_fft = spacing_hz > 0.0 ? fft_size_for_spacing(p.window_len, sample_rate, spacing_hz)
                             : p.window_len;
  p.validate();
  return p;
}

namespace {

// Windowed segment of frame n (0-based), zero-padded. Returns false when the
// segment is identically zero.
bool windowed_segment(std::span<const double> signal, const StftParams& params,
                      std::span<const double> window, std::size_t frame,
                      std::vector<double>& out) {
  const auto len = static_cast<std::ptrdiff_t>(signal.size());
  const auto start = static_cast<std::ptrdiff_t>(frame * params.hop) -
                     static_cast<std::ptrdiff_t>(params.window_len / 2);
  bool any = false;
  for (std::size_t l = 0; l < params.window_len; ++l) {
    const std::ptrdiff_t s = start + static_cast<std::ptrdiff_t>(l);
    const double v = (s >= 0 && s < len) ? signal[static_cast<std::size_t>(s)] * window[l] : 0.0;
    out[l] = v;
    any = any || v != 0.0;
  }
  return any;
}

}  // namespace

std::vector<std::complex<double>> stft_frame(std::span<const double> signal,
                                             const StftParams& params, std::size_t n) {
  params.validate();
  if (n < 1) throw IndexError("frame index must be >= 1");
  const auto window = hann_window(params.window_len);
  std::vector<double> seg(params.window_len);
  windowed_segment(signal, params, window, n - 1, seg);
  std::vector<std::complex<double>> out(params.n_fft);
  const double nfft = static_cast<double>(params.n_fft);
  for (std::size_t m = 0; m < params.n_fft; ++m) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t l = 0; l < params.window_len; ++l) {
      const double phase = -2.0 * std::numbers::pi *
                           static_cast<double>((l * m) % params.n_fft) / nfft;
      acc += seg[l] * std::polar(1.0, phase);
    }
    out[m] = acc;
  }
  return out;
}

Spectrogram spectrogram(std::span<const double> signal, const StftParams& params,
                        std::size_t num_bins) {
  params.validate();
  if (signal.empty()) throw DomainError("cannot compute the spectrogram of an empty signal");
  if (num_bins < 2 || num_bins > params.complete_bins()) {
    throw DomainError("bin count " + std::to_string(num_bins) + " outside 2.." +
                      std::to_string(params.complete_bins()));
  }
  const std::size_t frames = frame_count(signal.size(), params.hop);
  const auto window = hann_window(params.window_len);

  // e^{-j 2 pi k / n_fft}, indexed by (l * m) mod n_fft.
  std::vector<double> cos_table(params.n_fft), sin_table(params.n_fft);
  const double nfft = static_cast<double>(params.n_fft);
  for (std::size_t k = 0; k < params.n_fft; ++k) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(k) / nfft;
    cos_table[k] = std::cos(phase);
    sin_table[k] = -std::sin(phase);
  }

  std::vector<double> values(num_bins * frames, 0.0);
  std::vector<double> seg(params.window_len);
  for (std::size_t n = 0; n < frames; ++n) {
    if (!windowed_segment(signal, params, window, n, seg)) continue;
    double* column = values.data() + n * num_bins;
    for (std::size_t m = 0; m < num_bins; ++m) {
      double re = 0.0, im = 0.0;
      std::size_t k = 0;  // (l * m) mod n_fft
      for (std::size_t l = 0; l < params.window_len; ++l) {
        re += seg[l] * cos_table[k];
        im += seg[l] * sin_table[k];
        k += m;
        if (k >= params.n_fft) k -= params.n_fft;
      }
      column[m] = re * re + im * im;
    }
  }
  TFSupport support(freq_axis(num_bins, params.sample_rate), time_axis(params, frames));
  return Spectrogram(std::move(support), std::move(values),
                     StftProvenance{params.window_seconds(), params.hop, params.sample_rate});
}

}  // namespace specfuse
