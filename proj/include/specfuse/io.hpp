#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "specfuse/metrics.hpp"
#include "specfuse/tf_core.hpp"

namespace specfuse {

struct Audio {
  std::vector<double> samples;  // mono, nominally in [-1, 1]
  double sample_rate = 0.0;
};

// RIFF/WAVE with PCM 8/16/24/32-bit integer or 32/64-bit float samples.
// Channels are averaged to mono; 16-bit samples are scaled by 1/32768.
Audio read_wav(const std::filesystem::path& path);

// 16-bit PCM mono; samples are clipped to [-1, 1).
void write_wav(const std::filesystem::path& path, const Audio& audio);

inline constexpr std::size_t kDecimationTaps = 127;
inline constexpr double kDecimationCutoff = 0.45;  // fraction of the new sample rate

// Hamming-windowed sinc low-pass (127 taps, cutoff 0.45 * f_s/k, zero phase)
// followed by keeping every k-th sample.
std::vector<double> decimate(const std::vector<double>& signal, std::size_t factor,
                             double cutoff = kDecimationCutoff);

// Integer-factor resampling of `audio` to `target_rate`. Throws DomainError
// if the rates are not an integer ratio.
Audio resample_to(const Audio& audio, double target_rate);

// TFSP layout (little-endian):
//   "TFSP" | u8 version = 1 | u8 flags = 0 | u32 M | u32 N | f64 sample_rate
//   | f64 window_len_s | u32 hop | M x f64 freqs | N x f64 times
//   | M*N x f64 values (column-major)
inline constexpr std::size_t kTfspHeaderBytes = 34;

void write_spectrogram(const std::filesystem::path& path, const Spectrogram& spec);
Spectrogram read_spectrogram(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_spectrogram(const Spectrogram& spec);
Spectrogram decode_spectrogram(const std::vector<std::uint8_t>& bytes);

// Whitespace-separated columns, one frame per line; `column` (0-based) holds
// f0 in Hz with 0 meaning unvoiced. Blank lines are skipped.
PitchTrack parse_pitch_track(const std::filesystem::path& path, double frame_hop_s = 0.010,
                             std::size_t column = 0);
PitchTrack parse_pitch_track_text(const std::string& text, double frame_hop_s = 0.010,
                                  std::size_t column = 0);

using CsvField = std::variant<std::string, double, std::int64_t>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvField>> rows;
};

// Doubles are written with 17 significant digits so they parse back exactly.
std::string format_csv(const CsvTable& table);
void write_results_csv(const std::filesystem::path& path, const CsvTable& table);

// Cells as strings; the first row is the header.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace specfuse
