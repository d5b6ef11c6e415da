#pragma once

// Sparse cost matrices between a source support and the target support.
// Only finite costs are stored; an absent (row, col) pair is an infinite cost
// and forbids transport between the two points.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "specfuse/melscale.hpp"
#include "specfuse/overlap.hpp"
#include "specfuse/tf_core.hpp"

namespace specfuse {

// Row-compressed pattern. Rows index the source grid and columns the target
// grid, both by zero-based column-major linear index. Column indices within a
// row are strictly increasing.
class SparseCostMatrix {
 public:
  SparseCostMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                   std::vector<std::uint32_t> col_index, std::vector<double> cost);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return cost_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::uint32_t> col_index() const { return col_index_; }
  std::span<const double> cost() const { return cost_; }

  std::span<const std::uint32_t> row_cols(std::size_t row) const {
    return std::span(col_index_).subspan(row_offsets_[row], row_offsets_[row + 1] - row_offsets_[row]);
  }
  std::span<const double> row_costs(std::size_t row) const {
    return std::span(cost_).subspan(row_offsets_[row], row_offsets_[row + 1] - row_offsets_[row]);
  }

  // Number of stored entries per column.
  std::vector<std::size_t> column_counts() const;
  // First zero-based row (column) with no entry, or rows() (cols()) if none.
  std::size_t first_empty_row() const;
  std::size_t first_empty_col() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::uint32_t> col_index_;
  std::vector<double> cost_;
};

// Accumulates rows in order; each row's columns must be pushed increasing.
class SparseCostBuilder {
 public:
  SparseCostBuilder(std::size_t rows, std::size_t cols, std::size_t reserve = 0);
  void push(std::size_t col, double cost) {
    col_index_.push_back(static_cast<std::uint32_t>(col));
    cost_.push_back(cost);
  }
  void end_row() { row_offsets_.push_back(cost_.size()); }
  SparseCostMatrix finish();

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::uint32_t> col_index_;
  std::vector<double> cost_;
};

// 1-based grid position inside an M x N grid.
struct GridPos {
  std::size_t m = 1;
  std::size_t n = 1;
  std::size_t rows = 2;  // M
  std::size_t cols = 2;  // N
};

// Squared distance between normalized grid coordinates
// ((m-1)/(M-1), (n-1)/(N-1)).
double normalized_cost(const GridPos& src, const GridPos& tgt);

inline constexpr std::size_t kDefaultEntryCap = 100'000'000;

std::size_t dense_entry_count(const TFSupport& src, const TFSupport& tgt);

// Every (source, target) pair. Throws ResourceError above `entry_cap`.
SparseCostMatrix build_dense_cost(const TFSupport& src, const TFSupport& tgt,
                                  std::size_t entry_cap = kDefaultEntryCap);

// Transport for the long-window input: only along time, at equal frequency
// (and, with use_overlap, only towards overlapping frames). Source and target
// frequency axes must be identical.
SparseCostMatrix build_structured_freq(const TFSupport& src, const TFSupport& tgt,
                                       const OverlapContext& ctx, bool use_overlap);

// Transport for the short-window input: only along frequency, at equal frame
// (and, with use_overlap, only towards overlapping bins). Source and target
// time axes must be identical.
SparseCostMatrix build_structured_time(const TFSupport& src, const TFSupport& tgt,
                                       const OverlapContext& ctx, bool use_overlap);

struct MelCostPair {
  SparseCostMatrix first;   // from input 1
  SparseCostMatrix second;  // from input 2
  std::size_t empty_rows_first = 0;
  std::size_t empty_rows_second = 0;
};

// Costs towards a mel-frequency target M x T2. Input-1 entries need
// overlapping frames and overlapping main lobes (both windows W1); input-2
// entries need the same frame and overlapping main lobes (W2 vs W1). Source
// bins too far from every mel band keep an empty row (their mass cannot be
// transported); an unreachable target column is an error.
MelCostPair build_mel_costs(const TFSupport& src1, const TFSupport& src2, const TFSupport& tgt,
                            const OverlapContext& ctx, const MelAxisConfig& mel);

// Zero-cost diagonal pattern between a support and itself.
SparseCostMatrix build_identity_cost(const TFSupport& support);

}  // namespace specfuse
