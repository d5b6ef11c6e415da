#pragma once

// Neighboring-index sets: target frames/bins whose analysis-window supports
// intersect those of a source frame/bin. All indices are 1-based and every
// set is a contiguous, closed range clamped to the target grid.

#include <cstddef>

#include "specfuse/melscale.hpp"

namespace specfuse {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool intersects(const Interval& other, double slack = 0.0) const {
    return lo <= other.hi + slack && other.lo <= hi + slack;
  }
};

// Closed 1-based index range; empty when first > last.
struct IndexRange {
  long first = 1;
  long last = 0;

  bool empty() const { return first > last; }
  std::size_t size() const { return empty() ? 0 : static_cast<std::size_t>(last - first + 1); }
  bool contains(long i) const { return i >= first && i <= last; }
  bool operator==(const IndexRange&) const = default;
};

// Input 1 has the long window (frequency resolution), input 2 the short one.
struct OverlapContext {
  double window1 = 0.0;     // W1, s
  double window2 = 0.0;     // W2, s
  std::size_t hop1 = 1;     // H1, samples
  std::size_t hop2 = 1;     // H2, samples
  double sample_rate = 0.0;
  std::size_t bins1 = 2;    // M1
  std::size_t bins2 = 2;    // M2

  void validate() const;
};

// [t - W/2, t + W/2]
Interval temporal_support(double t, double window);
// Hann main lobe: [f - 2/W, f + 2/W]
Interval freq_support(double f, double window);

// Boundary slack (in index units) applied before rounding interval bounds.
inline constexpr double kIndexSlack = 1e-9;

// Frames n of the target time axis (hop H2) overlapping frame n1 of input 1.
IndexRange temporal_neighbors(std::size_t n1, const OverlapContext& ctx, std::size_t num_frames);

// Bins m of a uniform target axis with `num_bins` bins on [0, f_s/2] whose
// main lobe (window W1) overlaps the main lobe of bin m2 of input 2.
IndexRange freq_neighbors(std::size_t m2, const OverlapContext& ctx, std::size_t num_bins);

// Mel-axis bins m whose main lobe (window W1) overlaps bin m_src of a uniform
// source axis with `src_bins` bins analysed with `src_window` seconds.
IndexRange mel_freq_neighbors(std::size_t m_src, std::size_t src_bins, double src_window,
                              const OverlapContext& ctx, const MelAxisConfig& mel);

}  // namespace specfuse
