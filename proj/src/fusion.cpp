#include "specfuse/fusion.hpp"

#include <chrono>
#include <cmath>

#include "specfuse/errors.hpp"
#include "specfuse/melscale.hpp"

namespace specfuse {

TFSupport canonical_target(const Spectrogram& long_win, const Spectrogram& short_win) {
  const auto f = long_win.support().freqs();
  const auto t = short_win.support().times();
  return TFSupport({f.begin(), f.end()}, {t.begin(), t.end()});
}

OverlapContext overlap_context(const Spectrogram& long_win, const Spectrogram& short_win) {
  const auto& p1 = long_win.provenance();
  const auto& p2 = short_win.provenance();
  if (p1.sample_rate != p2.sample_rate) {
    throw DomainError("inputs were computed at different sample rates");
  }
  OverlapContext ctx;
  ctx.window1 = p1.window_len_s;
  ctx.window2 = p2.window_len_s;
  ctx.hop1 = p1.hop;
  ctx.hop2 = p2.hop;
  ctx.sample_rate = p1.sample_rate;
  ctx.bins1 = long_win.rows();
  ctx.bins2 = short_win.rows();
  return ctx;
}

FusionProblem build_fusion_problem(const Spectrogram& long_win, const Spectrogram& short_win,
                                   const FusionSpec& spec) {
  const OverlapContext ctx = overlap_context(long_win, short_win);
  auto share = [](SparseCostMatrix&& c) { return std::make_shared<const SparseCostMatrix>(std::move(c)); };
  switch (spec.mode) {
    case FusionMode::canonical: {
      TFSupport target = canonical_target(long_win, short_win);
      auto c1 = share(build_structured_freq(long_win.support(), target, ctx, spec.overlap));
      auto c2 = share(build_structured_time(short_win.support(), target, ctx, spec.overlap));
      return {std::move(target), {c1, c2}};
    }
    case FusionMode::same_grid: {
      if (!(long_win.support() == short_win.support())) {
        throw DomainError("same-grid fusion needs inputs on one support");
      }
      const TFSupport& target = long_win.support();
      auto c1 = share(build_structured_freq(long_win.support(), target, ctx, spec.overlap));
      auto c2 = share(build_structured_time(short_win.support(), target, ctx, spec.overlap));
      return {target, {c1, c2}};
    }
    case FusionMode::mel: {
      const MelAxisConfig mel{spec.mel_bands, ctx.sample_rate};
      const auto t = short_win.support().times();
      TFSupport target(mel_axis(mel), {t.begin(), t.end()});
      auto pair = build_mel_costs(long_win.support(), short_win.support(), target, ctx, mel);
      return {std::move(target), {share(std::move(pair.first)), share(std::move(pair.second))}};
    }
    case FusionMode::dense_cost: {
      TFSupport target = canonical_target(long_win, short_win);
      auto c1 = share(build_dense_cost(long_win.support(), target, spec.entry_cap));
      auto c2 = share(build_dense_cost(short_win.support(), target, spec.entry_cap));
      return {std::move(target), {c1, c2}};
    }
  }
  throw DomainError("unknown fusion mode");
}

FusionResult fuse(const Spectrogram& long_win, const Spectrogram& short_win, const FusionSpec& spec) {
  if (spec.uot.inputs() != 2) throw DomainError("pairwise fusion needs a two-input UOT config");
  const FusionProblem problem = build_fusion_problem(long_win, short_win, spec);
  const Spectrogram inputs[] = {long_win, short_win};
  return fuse_multi(inputs, problem.costs, problem.target, spec.uot, spec.rescale);
}

FusionResult fuse_multi(std::span<const Spectrogram> inputs, std::span<const CostPtr> costs,
                        const TFSupport& target, const UotConfig& cfg, Rescale rescale) {
  if (inputs.size() < 2) throw DomainError("fusion needs at least two spectrograms");
  std::vector<std::vector<double>> weights;
  weights.reserve(inputs.size());
  for (const auto& s : inputs) weights.emplace_back(s.values().begin(), s.values().end());
  for (const auto& c : costs) {
    if (c && c->cols() != target.size()) {
      throw DomainError("cost matrix columns do not match the target support size");
    }
  }

  const auto start = std::chrono::steady_clock::now();
  BarycenterResult solved = solve_barycenter(weights, costs, cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<double> values = solved.weights;
  if (rescale == Rescale::mean_mass) {
    double mean = 0.0;
    for (const auto& s : inputs) mean += s.mass();
    mean /= static_cast<double>(inputs.size());
    double mass = 0.0;
    for (double v : values) mass += v;
    if (mass > 0.0) {
      for (double& v : values) v *= mean / mass;
    }
  }
  StftProvenance prov = inputs.front().provenance();
  prov.hop = inputs.back().provenance().hop;

  std::vector<std::size_t> nnz;
  for (const auto& c : costs) nnz.push_back(c->nnz());
  return FusionResult{Spectrogram(target, std::move(values), prov), std::move(solved),
                      std::move(nnz), seconds};
}

Spectrogram geometric_mean_fusion(const Spectrogram& a, const Spectrogram& b) {
  if (!(a.support() == b.support())) throw DomainError("geometric mean needs identical supports");
  std::vector<double> v(a.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sqrt(a.values()[i] * b.values()[i]);
  return Spectrogram(a.support(), std::move(v), a.provenance());
}

}  // namespace specfuse
