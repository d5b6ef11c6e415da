#pragma once

// End-to-end spectrogram fusion: build the target support and cost patterns,
// solve the UOT barycenter and reshape it onto the target grid.

#include <cstddef>
#include <span>
#include <vector>

#include "specfuse/cost.hpp"
#include "specfuse/tf_core.hpp"
#include "specfuse/uot.hpp"

namespace specfuse {

enum class FusionMode {
  canonical,   // target = frequencies of input 1 x frames of input 2
  same_grid,   // both inputs and the target share one grid
  mel,         // target = mel axis x frames of input 2
  dense_cost,  // canonical target, unmasked squared costs
};

enum class Rescale { none, mean_mass };

struct FusionSpec {
  FusionMode mode = FusionMode::canonical;
  bool overlap = true;
  UotConfig uot = UotConfig::uniform(2, 10.0);
  Rescale rescale = Rescale::none;
  std::size_t mel_bands = 300;
  std::size_t entry_cap = kDefaultEntryCap;
};

struct FusionProblem {
  TFSupport target;
  std::vector<CostPtr> costs;
};

struct FusionResult {
  Spectrogram spectrogram;
  BarycenterResult solver;
  std::vector<std::size_t> nnz;  // finite entries per cost matrix
  double seconds = 0.0;          // solver wall time
};

// Input 1 is the long-window spectrogram, input 2 the short-window one.
TFSupport canonical_target(const Spectrogram& long_win, const Spectrogram& short_win);

OverlapContext overlap_context(const Spectrogram& long_win, const Spectrogram& short_win);

// Target support and cost matrices for `spec.mode`, without solving.
FusionProblem build_fusion_problem(const Spectrogram& long_win, const Spectrogram& short_win,
                                   const FusionSpec& spec);

FusionResult fuse(const Spectrogram& long_win, const Spectrogram& short_win, const FusionSpec& spec);

// P-input barycenter with caller-built costs towards `target`.
FusionResult fuse_multi(std::span<const Spectrogram> inputs, std::span<const CostPtr> costs,
                        const TFSupport& target, const UotConfig& cfg,
                        Rescale rescale = Rescale::none);

// Entrywise sqrt(X1 * X2) on a shared support.
Spectrogram geometric_mean_fusion(const Spectrogram& a, const Spectrogram& b);

}  // namespace specfuse
