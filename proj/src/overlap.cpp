#include "specfuse/overlap.hpp"

#include <algorithm>
#include <cmath>

#include "specfuse/errors.hpp"

namespace specfuse {

void OverlapContext::validate() const {
  if (!(window1 > 0.0) || !(window2 > 0.0)) throw DomainError("overlap windows must be positive");
  if (hop1 < 1 || hop2 < 1) throw DomainError("overlap hops must be >= 1 sample");
  if (!(sample_rate > 0.0)) throw DomainError("overlap sample rate must be positive");
  if (bins1 < 2 || bins2 < 2) throw DomainError("overlap bin counts must be >= 2");
}

Interval temporal_support(double t, double window) {
  return {t - window / 2.0, t + window / 2.0};
}

Interval freq_support(double f, double window) {
  return {f - 2.0 / window, f + 2.0 / window};
}

namespace {

IndexRange clamp_range(double lo, double hi, std::size_t count) {
  IndexRange r;
  r.first = std::max<long>(1, static_cast<long>(std::ceil(lo - kIndexSlack)));
  r.last = std::min<long>(static_cast<long>(count), static_cast<long>(std::floor(hi + kIndexSlack)));
  return r;
}

}  // namespace

IndexRange temporal_neighbors(std::size_t n1, const OverlapContext& ctx, std::size_t num_frames) {
  ctx.validate();
  if (n1 < 1) throw IndexError("source frame index must be >= 1");
  const double center = static_cast<double>(n1 - 1) * static_cast<double>(ctx.hop1) /
                            static_cast<double>(ctx.hop2) + 1.0;
  const double half = ctx.sample_rate * (ctx.window1 + ctx.window2) /
                      (2.0 * static_cast<double>(ctx.hop2));
  return clamp_range(center - half, center + half, num_frames);
}

IndexRange freq_neighbors(std::size_t m2, const OverlapContext& ctx, std::size_t num_bins) {
  ctx.validate();
  if (m2 < 1 || m2 > ctx.bins2) {
    throw IndexError("source bin index m2=" + std::to_string(m2) + " outside 1.." +
                     std::to_string(ctx.bins2));
  }
  if (num_bins < 2) throw DomainError("target axis needs >= 2 bins");
  const double scale = static_cast<double>(num_bins - 1);
  const double center = static_cast<double>(m2 - 1) * scale /
                            static_cast<double>(ctx.bins2 - 1) + 1.0;
  const double half = 4.0 * scale * (1.0 / ctx.window1 + 1.0 / ctx.window2) / ctx.sample_rate;
  return clamp_range(center - half, center + half, num_bins);
}

IndexRange mel_freq_neighbors(std::size_t m_src, std::size_t src_bins, double src_window,
                              const OverlapContext& ctx, const MelAxisConfig& mel) {
  ctx.validate();
  if (src_bins < 2 || m_src < 1 || m_src > src_bins) {
    throw IndexError("source bin index " + std::to_string(m_src) + " outside 1.." +
                     std::to_string(src_bins));
  }
  if (!(src_window > 0.0)) throw DomainError("source window must be positive");
  if (mel.n_bands < 2) throw DomainError("mel axis needs at least 2 bands");
  if (mel.sample_rate != ctx.sample_rate) throw DomainError("mel axis and overlap context disagree on f_s");
  const double nyquist = ctx.sample_rate / 2.0;
  const double f = static_cast<double>(m_src - 1) / static_cast<double>(src_bins - 1) * nyquist;
  const double reach = 2.0 * (1.0 / ctx.window1 + 1.0 / src_window);
  // mel position of a frequency, in target index units
  const double per_mel = static_cast<double>(mel.n_bands - 1) / hz_to_mel(nyquist);
  const double lo = f - reach <= 0.0 ? 1.0 : per_mel * hz_to_mel(f - reach) + 1.0;
  const double hi = per_mel * hz_to_mel(f + reach) + 1.0;
  return clamp_range(lo, hi, mel.n_bands);
}

}  // namespace specfuse
