#pragma once

// Time-frequency grids, spectrograms and their view as discrete measures.
//
// Matrices are stored column-major: the value at zero-based (row, col) lives
// at col * M + row, which is the zero-based form of the 1-based linear index
// (n - 1) * M + m used throughout the public API.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace specfuse {

class TFSupport {
 public:
  // Both axes must be strictly increasing, non-negative and hold >= 2 points.
  TFSupport(std::vector<double> freqs, std::vector<double> times);

  std::size_t num_freqs() const { return freqs_.size(); }
  std::size_t num_times() const { return times_.size(); }
  std::size_t size() const { return freqs_.size() * times_.size(); }

  std::span<const double> freqs() const { return freqs_; }
  std::span<const double> times() const { return times_; }

  bool operator==(const TFSupport&) const = default;

 private:
  std::vector<double> freqs_;
  std::vector<double> times_;
};

// Analysis parameters a spectrogram was computed with.
struct StftProvenance {
  double window_len_s = 0.0;  // window length in seconds
  std::size_t hop = 1;        // hop in samples
  double sample_rate = 1.0;   // Hz
};

class Spectrogram {
 public:
  // `values` is column-major M x N and must be finite and >= 0.
  Spectrogram(TFSupport support, std::vector<double> values, StftProvenance provenance);

  const TFSupport& support() const { return support_; }
  const StftProvenance& provenance() const { return provenance_; }
  std::span<const double> values() const { return values_; }

  std::size_t rows() const { return support_.num_freqs(); }
  std::size_t cols() const { return support_.num_times(); }

  // Zero-based access.
  double at(std::size_t row, std::size_t col) const { return values_[col * rows() + row]; }

  double mass() const;

 private:
  TFSupport support_;
  std::vector<double> values_;
  StftProvenance provenance_;
};

struct MeasureView {
  std::vector<double> weights;
  TFSupport support;

  double mass() const;
};

// Column-wise vectorization map: (m, n) -> (n - 1) * M + m, all 1-based.
std::size_t index_map(std::size_t m, std::size_t n, std::size_t num_rows);

// Inverse of index_map: 1-based linear index -> 1-based (m, n).
std::pair<std::size_t, std::size_t> index_unmap(std::size_t i, std::size_t num_rows);

MeasureView to_measure(const Spectrogram& spec);

// Rescales to unit mass. Throws DomainError when the mass is zero.
MeasureView normalize(const MeasureView& view);

// Reshapes a measure back onto its grid.
Spectrogram to_spectrogram(const MeasureView& view, StftProvenance provenance);

}  // namespace specfuse
