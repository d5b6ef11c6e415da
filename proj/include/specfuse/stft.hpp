#pragma once

// Hann-windowed short-time Fourier transform and the spectrogram built on it.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "specfuse/tf_core.hpp"

namespace specfuse {

struct StftParams {
  std::size_t window_len = 0;  // W, samples, even
  std::size_t hop = 0;         // H, samples
  std::size_t n_fft = 0;       // even, >= W
  double sample_rate = 0.0;    // Hz

  void validate() const;
  double window_seconds() const { return static_cast<double>(window_len) / sample_rate; }
  // M = n_fft / 2 + 1.
  std::size_t complete_bins() const { return n_fft / 2 + 1; }
};

// Periodic Hann window of length W: 0.5 * (1 - cos(2 pi l / W)), l = 0..W-1.
std::vector<double> hann_window(std::size_t window_len);

// Frame centers sit at 0, H, 2H, ... up to L - 1.
std::size_t frame_count(std::size_t signal_len, std::size_t hop);

// t_n = (n - 1) H / f_s.
std::vector<double> time_axis(const StftParams& params, std::size_t num_frames);

// f_m = (m - 1) / (M - 1) * f_s / 2.
std::vector<double> freq_axis(std::size_t num_bins, double sample_rate);

// Smallest power of two >= window_len whose bin spacing f_s / n_fft does not
// exceed `spacing_hz`.
std::size_t fft_size_for_spacing(std::size_t window_len, double sample_rate, double spacing_hz);

// Converts second-based settings to samples. The window is rounded to the
// nearest even sample count and the hop to the nearest integer (at least 1).
// With spacing_hz <= 0 the transform uses complete sampling (n_fft = W).
StftParams make_params(double window_s, double hop_s, double sample_rate, double spacing_hz);

// All n_fft DFT coefficients of frame n (1-based), zero-padding outside the
// signal. Used for symmetry checks; `spectrogram` only evaluates M bins.
std::vector<std::complex<double>> stft_frame(std::span<const double> signal,
                                             const StftParams& params, std::size_t n);

// Power magnitude |Y_mn|^2 for m = 1..num_bins over all frames.
Spectrogram spectrogram(std::span<const double> signal, const StftParams& params,
                        std::size_t num_bins);

}  // namespace specfuse
