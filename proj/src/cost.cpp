#include "specfuse/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "specfuse/errors.hpp"

namespace specfuse {

SparseCostMatrix::SparseCostMatrix(std::size_t rows, std::size_t cols,
                                   std::vector<std::size_t> row_offsets,
                                   std::vector<std::uint32_t> col_index, std::vector<double> cost)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_index_(std::move(col_index)),
      cost_(std::move(cost)) {
  if (cols_ > std::numeric_limits<std::uint32_t>::max()) {
    throw ResourceError("target support too large for 32-bit column indices");
  }
  if (row_offsets_.size() != rows_ + 1 || row_offsets_.front() != 0 ||
      row_offsets_.back() != cost_.size() || col_index_.size() != cost_.size()) {
    throw DomainError("inconsistent sparse cost matrix layout");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    if (row_offsets_[r] > row_offsets_[r + 1]) throw DomainError("row offsets must be non-decreasing");
    for (std::size_t e = row_offsets_[r]; e < row_offsets_[r + 1]; ++e) {
      if (col_index_[e] >= cols_) {
        throw IndexError("column " + std::to_string(col_index_[e] + 1) + " outside 1.." +
                         std::to_string(cols_) + " in row " + std::to_string(r + 1));
      }
      if (e > row_offsets_[r] && col_index_[e] <= col_index_[e - 1]) {
        throw DomainError("columns not strictly increasing in row " + std::to_string(r + 1));
      }
      if (!std::isfinite(cost_[e]) || cost_[e] < 0.0) {
        throw DomainError("cost entry in row " + std::to_string(r + 1) +
                          " is negative or not finite");
      }
    }
  }
}

std::vector<std::size_t> SparseCostMatrix::column_counts() const {
  std::vector<std::size_t> counts(cols_, 0);
  for (auto c : col_index_) ++counts[c];
  return counts;
}

std::size_t SparseCostMatrix::first_empty_row() const {
  for (std::size_t r = 0; r < rows_; ++r) {
    if (row_offsets_[r] == row_offsets_[r + 1]) return r;
  }
  return rows_;
}

std::size_t SparseCostMatrix::first_empty_col() const {
  const auto counts = column_counts();
  const auto it = std::find(counts.begin(), counts.end(), std::size_t{0});
  return static_cast<std::size_t>(it - counts.begin());
}

SparseCostBuilder::SparseCostBuilder(std::size_t rows, std::size_t cols, std::size_t reserve)
    : rows_(rows), cols_(cols) {
  row_offsets_.reserve(rows + 1);
  row_offsets_.push_back(0);
  col_index_.reserve(reserve);
  cost_.reserve(reserve);
}

SparseCostMatrix SparseCostBuilder::finish() {
  return SparseCostMatrix(rows_, cols_, std::move(row_offsets_), std::move(col_index_),
                          std::move(cost_));
}

double normalized_cost(const GridPos& src, const GridPos& tgt) {
  if (src.rows < 2 || src.cols < 2 || tgt.rows < 2 || tgt.cols < 2) {
    throw DomainError("normalized coordinates need grids of at least 2x2");
  }
  const double df = static_cast<double>(src.m - 1) / static_cast<double>(src.rows - 1) -
                    static_cast<double>(tgt.m - 1) / static_cast<double>(tgt.rows - 1);
  const double dt = static_cast<double>(src.n - 1) / static_cast<double>(src.cols - 1) -
                    static_cast<double>(tgt.n - 1) / static_cast<double>(tgt.cols - 1);
  return df * df + dt * dt;
}

namespace {

// Precomputed normalized coordinates (m-1)/(M-1) so that builders evaluate
// exactly the same arithmetic as normalized_cost.
std::vector<double> unit_coords(std::size_t count) {
  std::vector<double> u(count);
  for (std::size_t k = 0; k < count; ++k) {
    u[k] = static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return u;
}

double sq(double x) { return x * x; }

struct GridCoords {
  std::vector<double> f;
  std::vector<double> t;
  explicit GridCoords(const TFSupport& s) : f(unit_coords(s.num_freqs())), t(unit_coords(s.num_times())) {}
};

void require_full_coverage(const SparseCostMatrix& c, const TFSupport& src, const TFSupport& tgt,
                           const char* what) {
  const std::size_t r = c.first_empty_row();
  if (r < c.rows()) {
    const auto [m, n] = index_unmap(r + 1, src.num_freqs());
    throw DomainError(std::string(what) + ": source point (m=" + std::to_string(m) +
                      ", n=" + std::to_string(n) + ") has no admissible target");
  }
  const std::size_t k = c.first_empty_col();
  if (k < c.cols()) {
    const auto [m, n] = index_unmap(k + 1, tgt.num_freqs());
    throw DomainError(std::string(what) + ": target point (m=" + std::to_string(m) +
                      ", n=" + std::to_string(n) + ") is unreachable");
  }
}

}  // namespace

std::size_t dense_entry_count(const TFSupport& src, const TFSupport& tgt) {
  return src.size() * tgt.size();
}

SparseCostMatrix build_dense_cost(const TFSupport& src, const TFSupport& tgt, std::size_t entry_cap) {
  const std::size_t count = dense_entry_count(src, tgt);
  if (count > entry_cap) {
    throw ResourceError("dense cost matrix needs " + std::to_string(count) +
                        " entries, above the cap of " + std::to_string(entry_cap));
  }
  const GridCoords s(src), g(tgt);
  const std::size_t M = tgt.num_freqs(), N = tgt.num_times();
  SparseCostBuilder b(src.size(), tgt.size(), count);
  for (std::size_t n1 = 0; n1 < src.num_times(); ++n1) {
    for (std::size_t m1 = 0; m1 < src.num_freqs(); ++m1) {
      for (std::size_t n = 0; n < N; ++n) {
        const double dt = sq(s.t[n1] - g.t[n]);
        for (std::size_t m = 0; m < M; ++m) b.push(n * M + m, sq(s.f[m1] - g.f[m]) + dt);
      }
      b.end_row();
    }
  }
  return b.finish();
}

SparseCostMatrix build_structured_freq(const TFSupport& src, const TFSupport& tgt,
                                       const OverlapContext& ctx, bool use_overlap) {
  if (!std::ranges::equal(src.freqs(), tgt.freqs())) {
    throw DomainError("frequency-aligned costs need identical source and target frequency axes");
  }
  if (use_overlap) ctx.validate();
  const GridCoords s(src), g(tgt);
  const std::size_t M = tgt.num_freqs(), N = tgt.num_times();
  SparseCostBuilder b(src.size(), tgt.size());
  for (std::size_t n1 = 0; n1 < src.num_times(); ++n1) {
    IndexRange frames{1, static_cast<long>(N)};
    if (use_overlap) frames = temporal_neighbors(n1 + 1, ctx, N);
    for (std::size_t m = 0; m < M; ++m) {
      for (long n = frames.first; n <= frames.last; ++n) {
        const auto col = static_cast<std::size_t>(n - 1);
        b.push(col * M + m, sq(s.f[m] - g.f[m]) + sq(s.t[n1] - g.t[col]));
      }
      b.end_row();
    }
  }
  auto c = b.finish();
  require_full_coverage(c, src, tgt, "frequency-aligned costs");
  return c;
}

SparseCostMatrix build_structured_time(const TFSupport& src, const TFSupport& tgt,
                                       const OverlapContext& ctx, bool use_overlap) {
  if (!std::ranges::equal(src.times(), tgt.times())) {
    throw DomainError("time-aligned costs need identical source and target time axes");
  }
  if (use_overlap) ctx.validate();
  if (use_overlap && ctx.bins2 != src.num_freqs()) {
    throw DomainError("overlap context bin count M2 does not match the source frequency axis");
  }
  const GridCoords s(src), g(tgt);
  const std::size_t M = tgt.num_freqs();
  std::vector<IndexRange> bins(src.num_freqs(), IndexRange{1, static_cast<long>(M)});
  if (use_overlap) {
    for (std::size_t m2 = 0; m2 < src.num_freqs(); ++m2) bins[m2] = freq_neighbors(m2 + 1, ctx, M);
  }
  SparseCostBuilder b(src.size(), tgt.size());
  for (std::size_t n = 0; n < src.num_times(); ++n) {
    for (std::size_t m2 = 0; m2 < src.num_freqs(); ++m2) {
      for (long m = bins[m2].first; m <= bins[m2].last; ++m) {
        const auto row = static_cast<std::size_t>(m - 1);
        b.push(n * M + row, sq(s.f[m2] - g.f[row]) + sq(s.t[n] - g.t[n]));
      }
      b.end_row();
    }
  }
  auto c = b.finish();
  require_full_coverage(c, src, tgt, "time-aligned costs");
  return c;
}

MelCostPair build_mel_costs(const TFSupport& src1, const TFSupport& src2, const TFSupport& tgt,
                            const OverlapContext& ctx, const MelAxisConfig& mel) {
  ctx.validate();
  const auto axis = mel_axis(mel);
  bool same_axis = axis.size() == tgt.num_freqs();
  for (std::size_t m = 0; same_axis && m < axis.size(); ++m) {
    same_axis = std::abs(axis[m] - tgt.freqs()[m]) <= 1e-9 * std::max(1.0, axis[m]);
  }
  if (!same_axis) throw DomainError("mel costs need a target frequency axis built by mel_axis");
  if (!std::ranges::equal(src2.times(), tgt.times())) {
    throw DomainError("mel costs need the target time axis of input 2");
  }
  if (ctx.bins1 != src1.num_freqs() || ctx.bins2 != src2.num_freqs()) {
    throw DomainError("overlap context bin counts do not match the inputs");
  }
  const std::size_t M = tgt.num_freqs(), N = tgt.num_times();
  const GridCoords s1(src1), s2(src2), g(tgt);

  SparseCostBuilder b1(src1.size(), tgt.size());
  std::vector<IndexRange> bins1(src1.num_freqs());
  for (std::size_t m1 = 0; m1 < src1.num_freqs(); ++m1) {
    bins1[m1] = mel_freq_neighbors(m1 + 1, src1.num_freqs(), ctx.window1, ctx, mel);
  }
  for (std::size_t n1 = 0; n1 < src1.num_times(); ++n1) {
    const IndexRange frames = temporal_neighbors(n1 + 1, ctx, N);
    for (std::size_t m1 = 0; m1 < src1.num_freqs(); ++m1) {
      for (long n = frames.first; n <= frames.last; ++n) {
        const auto col = static_cast<std::size_t>(n - 1);
        const double dt = sq(s1.t[n1] - g.t[col]);
        for (long m = bins1[m1].first; m <= bins1[m1].last; ++m) {
          const auto row = static_cast<std::size_t>(m - 1);
          b1.push(col * M + row, sq(s1.f[m1] - g.f[row]) + dt);
        }
      }
      b1.end_row();
    }
  }

  SparseCostBuilder b2(src2.size(), tgt.size());
  std::vector<IndexRange> bins2(src2.num_freqs());
  for (std::size_t m2 = 0; m2 < src2.num_freqs(); ++m2) {
    bins2[m2] = mel_freq_neighbors(m2 + 1, src2.num_freqs(), ctx.window2, ctx, mel);
  }
  for (std::size_t n = 0; n < src2.num_times(); ++n) {
    for (std::size_t m2 = 0; m2 < src2.num_freqs(); ++m2) {
      for (long m = bins2[m2].first; m <= bins2[m2].last; ++m) {
        const auto row = static_cast<std::size_t>(m - 1);
        b2.push(n * M + row, sq(s2.f[m2] - g.f[row]) + sq(s2.t[n] - g.t[n]));
      }
      b2.end_row();
    }
  }

  MelCostPair out{b1.finish(), b2.finish(), 0, 0};
  for (const auto* c : {&out.first, &out.second}) {
    const std::size_t k = c->first_empty_col();
    if (k < c->cols()) {
      const auto [m, n] = index_unmap(k + 1, M);
      throw DomainError("mel costs: target point (m=" + std::to_string(m) + ", n=" +
                        std::to_string(n) + ") is unreachable from input " +
                        (c == &out.first ? "1" : "2"));
    }
  }
  auto count_empty = [](const SparseCostMatrix& c) {
    std::size_t e = 0;
    for (std::size_t r = 0; r < c.rows(); ++r) e += c.row_offsets()[r] == c.row_offsets()[r + 1];
    return e;
  };
  out.empty_rows_first = count_empty(out.first);
  out.empty_rows_second = count_empty(out.second);
  return out;
}

SparseCostMatrix build_identity_cost(const TFSupport& support) {
  SparseCostBuilder b(support.size(), support.size(), support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    b.push(i, 0.0);
    b.end_row();
  }
  return b.finish();
}

}  // namespace specfuse
