#pragma once

// Experiment drivers: analysis presets, the comparator spectrograms built
// from one signal, and the synthetic and speech studies.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specfuse/io.hpp"
#include "specfuse/metrics.hpp"
#include "specfuse/stft.hpp"
#include "specfuse/synthgen.hpp"
#include "specfuse/tf_core.hpp"

namespace specfuse {

struct AnalysisPreset {
  std::string name;
  double sample_rate = 0.0;
  double window1_s = 0.0;  // long window
  double window2_s = 0.0;  // short window
  double hop1_s = 0.0;
  double hop2_s = 0.0;
  double spacing1_hz = 0.0;  // X1 frequency spacing; <= 0 means complete sampling
  double spacing2_hz = 0.0;  // X2 frequency spacing; <= 0 means complete sampling
  // Shared grid of the same-grid comparators; fine_hop_s <= 0 disables them.
  double fine_hop_s = 0.0;
  double fine_spacing_hz = 0.0;
  double eta = 1.0;
  double tol = 1e-6;
  std::size_t mel_bands = 0;
  double duration_s = 0.0;  // signal length used by the preset's own signals

  StftParams long_params() const;
  StftParams short_params() const;
  StftParams fine_long_params() const;
  StftParams fine_short_params() const;
  bool has_fine_grid() const { return fine_hop_s > 0.0; }
};

AnalysisPreset synthetic_preset();  // 1 kHz, 100/20 ms, hops 25/2 ms, 2 Hz grid, eta 10
AnalysisPreset speech_preset();     // 8 kHz, 100/20 ms, hops 25/5 ms, 8 Hz grid, eta 1
AnalysisPreset bass_preset();       // 2 kHz, 200/30 ms, half-window hops, complete sampling
AnalysisPreset mel_preset();        // 22.05 kHz, 100/20 ms, hops 25/5 ms, 300 mel bands

std::optional<AnalysisPreset> find_preset(const std::string& name);

struct SolveRecord {
  std::string name;
  std::size_t rows1 = 0;  // source sizes and target size
  std::size_t rows2 = 0;
  std::size_t cols = 0;
  std::size_t nnz1 = 0;
  std::size_t nnz2 = 0;
  std::size_t iterations = 0;
  double objective = 0.0;
  double seconds = 0.0;
  bool converged = false;
};

struct NamedSpectrogram {
  std::string name;
  Spectrogram spec;
};

// X1, X2 (different grids), X1', X2', XG (shared fine grid), X and X'.
struct ComparatorSet {
  std::vector<NamedSpectrogram> specs;
  std::vector<SolveRecord> solves;

  const Spectrogram& get(const std::string& name) const;
};

struct ComparatorOptions {
  bool same_grid_uot = true;  // X' is the costliest solve
  std::size_t max_iter = 100000;
};

ComparatorSet compute_comparators(std::span<const double> signal, const AnalysisPreset& preset,
                                  const ComparatorOptions& opts = {});

struct MetricRecord {
  std::size_t signal = 0;
  std::string spectrogram;
  std::string metric;  // E_f, E_t or E
  double delta = 0.0;  // Hz for E_f and E, s for E_t
  double value = 0.0;
};

struct SynthExperimentOptions {
  AnalysisPreset preset = synthetic_preset();
  bool mixture = false;
  std::size_t n_signals = 100;
  std::uint64_t seed = 0;
  int k_min = 2;
  int k_max = 10;
  std::size_t n_tolerances = 21;  // multiples 0..n-1 of the fine grid spacing
  ComparatorOptions comparators;
  std::ostream* log = nullptr;
};

struct SynthExperimentResult {
  std::vector<MetricRecord> records;
  std::vector<SolveRecord> solves;
};

// Single-packet runs record E_f(delta_f) and E_t(delta_t); mixture runs
// record the joint E(delta_f, 0).
SynthExperimentResult run_synth_experiment(const SynthExperimentOptions& opts);

// Mean over signals of one (spectrogram, metric, delta) cell.
double mean_metric(const std::vector<MetricRecord>& records, const std::string& spectrogram,
                   const std::string& metric, double delta);

struct SpeechExperimentOptions {
  AnalysisPreset preset = speech_preset();
  std::filesystem::path wav_dir;
  std::filesystem::path pitch_dir;
  double pitch_hop_s = 0.010;
  std::size_t pitch_column = 0;
  std::size_t n_tolerances = 21;
  ComparatorOptions comparators;
  std::ostream* log = nullptr;
};

struct SpeechRecord {
  std::string file;
  double delta_f = 0.0;
  std::string spectrogram;
  double e_h = 0.0;
};

struct SpeechExperimentResult {
  std::vector<SpeechRecord> records;
  std::vector<SolveRecord> solves;
  std::vector<std::pair<std::string, std::size_t>> voiced_frames;  // per file
  std::size_t warnings = 0;
};

// WAV files are matched to pitch files by stem, accepting the "mic_" to
// "ref_" renaming used by PTDB-TUG. Signals are resampled to the preset rate
// and padded with silence to the longest file.
SpeechExperimentResult run_speech_experiment(const SpeechExperimentOptions& opts);

CsvTable metric_table(const std::vector<MetricRecord>& records);
CsvTable summary_table(const std::vector<MetricRecord>& records, StdDev kind = StdDev::sample);
CsvTable speech_table(const std::vector<SpeechRecord>& records);
CsvTable solver_table(const std::vector<SolveRecord>& solves);

}  // namespace specfuse
