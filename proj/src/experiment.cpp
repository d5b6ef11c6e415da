#include "specfuse/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

#include "specfuse/errors.hpp"
#include "specfuse/fusion.hpp"

namespace specfuse {

StftParams AnalysisPreset::long_params() const {
  return make_params(window1_s, hop1_s, sample_rate, spacing1_hz);
}
StftParams AnalysisPreset::short_params() const {
  return make_params(window2_s, hop2_s, sample_rate, spacing2_hz);
}
StftParams AnalysisPreset::fine_long_params() const {
  return make_params(window1_s, fine_hop_s, sample_rate, fine_spacing_hz);
}
StftParams AnalysisPreset::fine_short_params() const {
  // Both same-grid inputs need one FFT size; the short window is zero-padded.
  StftParams p = make_params(window2_s, fine_hop_s, sample_rate, fine_spacing_hz);
  p.n_fft = fine_long_params().n_fft;
  return p;
}

AnalysisPreset synthetic_preset() {
  AnalysisPreset p;
  p.name = "synthetic";
  p.sample_rate = 1000.0;
  p.window1_s = 0.100;
  p.window2_s = 0.020;
  p.hop1_s = 0.025;
  p.hop2_s = 0.002;
  p.spacing1_hz = 2.0;
  p.fine_hop_s = 0.002;
  p.fine_spacing_hz = 2.0;
  p.eta = 10.0;
  p.tol = 1e-6;
  p.duration_s = 0.5;
  return p;
}

AnalysisPreset speech_preset() {
  AnalysisPreset p;
  p.name = "speech";
  p.sample_rate = 8000.0;
  p.window1_s = 0.100;
  p.window2_s = 0.020;
  p.hop1_s = 0.025;
  p.hop2_s = 0.005;
  p.spacing1_hz = 8.0;
  p.fine_hop_s = 0.005;
  p.fine_spacing_hz = 8.0;
  p.eta = 1.0;
  p.tol = 5e-7;
  p.duration_s = 5.0;
  return p;
}

AnalysisPreset bass_preset() {
  AnalysisPreset p;
  p.name = "bass";
  p.sample_rate = 2000.0;
  p.window1_s = 0.200;
  p.window2_s = 0.030;
  p.hop1_s = 0.100;
  p.hop2_s = 0.015;
  p.eta = 10.0;
  p.tol = 1e-6;
  p.duration_s = 0.8;
  return p;
}

AnalysisPreset mel_preset() {
  AnalysisPreset p;
  p.name = "mel";
  p.sample_rate = 22050.0;
  p.window1_s = 0.100;
  p.window2_s = 0.020;
  p.hop1_s = 0.025;
  p.hop2_s = 0.005;
  p.spacing1_hz = 8.0;
  p.eta = 1.0;
  p.tol = 5e-7;
  p.mel_bands = 300;
  p.duration_s = 0.5;
  return p;
}

std::optional<AnalysisPreset> find_preset(const std::string& name) {
  for (auto make : {synthetic_preset, speech_preset, bass_preset, mel_preset}) {
    AnalysisPreset p = make();
    if (p.name == name) return p;
  }
  return std::nullopt;
}

const Spectrogram& ComparatorSet::get(const std::string& name) const {
  for (const auto& s : specs) {
    if (s.name == name) return s.spec;
  }
  throw DomainError("no comparator named " + name);
}

namespace {

SolveRecord record_solve(const std::string& name, const Spectrogram& a, const Spectrogram& b,
                         const FusionResult& r) {
  SolveRecord rec;
  rec.name = name;
  rec.rows1 = a.support().size();
  rec.rows2 = b.support().size();
  rec.cols = r.spectrogram.support().size();
  rec.nnz1 = r.nnz.at(0);
  rec.nnz2 = r.nnz.at(1);
  rec.iterations = r.solver.iterations;
  rec.objective = r.solver.objective_trace.empty() ? 0.0 : r.solver.objective_trace.back();
  rec.seconds = r.seconds;
  rec.converged = r.solver.converged;
  return rec;
}

FusionSpec fusion_spec(const AnalysisPreset& preset, FusionMode mode, std::size_t max_iter) {
  FusionSpec spec;
  spec.mode = mode;
  spec.uot = UotConfig::uniform(2, preset.eta);
  spec.uot.tol = preset.tol;
  spec.uot.max_iter = max_iter;
  spec.mel_bands = preset.mel_bands;
  return spec;
}

}  // namespace

ComparatorSet compute_comparators(std::span<const double> signal, const AnalysisPreset& preset,
                                  const ComparatorOptions& opts) {
  ComparatorSet out;
  const StftParams p1 = preset.long_params();
  const StftParams p2 = preset.short_params();
  Spectrogram x1 = spectrogram(signal, p1, p1.complete_bins());
  Spectrogram x2 = spectrogram(signal, p2, p2.complete_bins());

  const FusionMode mode = preset.mel_bands > 0 ? FusionMode::mel : FusionMode::canonical;
  FusionResult x = fuse(x1, x2, fusion_spec(preset, mode, opts.max_iter));
  out.solves.push_back(record_solve("X", x1, x2, x));
  out.specs.push_back({"X1", std::move(x1)});
  out.specs.push_back({"X2", std::move(x2)});

  if (preset.has_fine_grid()) {
    const StftParams f1 = preset.fine_long_params();
    const StftParams f2 = preset.fine_short_params();
    Spectrogram x1f = spectrogram(signal, f1, f1.complete_bins());
    Spectrogram x2f = spectrogram(signal, f2, f2.complete_bins());
    Spectrogram xg = geometric_mean_fusion(x1f, x2f);
    std::optional<FusionResult> xp;
    if (opts.same_grid_uot) {
      xp = fuse(x1f, x2f, fusion_spec(preset, FusionMode::same_grid, opts.max_iter));
      out.solves.push_back(record_solve("X'", x1f, x2f, *xp));
    }
    out.specs.push_back({"X1'", std::move(x1f)});
    out.specs.push_back({"X2'", std::move(x2f)});
    out.specs.push_back({"XG", std::move(xg)});
    out.specs.push_back({"X", std::move(x.spectrogram)});
    if (xp) out.specs.push_back({"X'", std::move(xp->spectrogram)});
  } else {
    out.specs.push_back({"X", std::move(x.spectrogram)});
  }
  return out;
}

SynthExperimentResult run_synth_experiment(const SynthExperimentOptions& opts) {
  const AnalysisPreset& preset = opts.preset;
  if (!preset.has_fine_grid()) throw DomainError("the synthetic study needs a preset with a shared fine grid");
  SynthConfig cfg;
  cfg.sample_rate = preset.sample_rate;
  cfg.duration = preset.duration_s;
  cfg.validate();
  if (opts.mixture && (opts.k_min < 1 || opts.k_max < opts.k_min)) {
    throw DomainError("mixture size range must satisfy 1 <= k_min <= k_max");
  }

  const double df = preset.sample_rate / static_cast<double>(preset.fine_long_params().n_fft);
  const double dt = static_cast<double>(preset.fine_long_params().hop) / preset.sample_rate;

  SynthExperimentResult result;
  for (std::size_t s = 0; s < opts.n_signals; ++s) {
    Rng rng(sub_seed(opts.seed, s));
    std::vector<PacketSpec> packets;
    if (opts.mixture) {
      packets = gen_mixture(rng, cfg, opts.k_min, opts.k_max);
    } else {
      packets.push_back(gen_packet(rng, cfg));
    }
    const std::vector<double> y = render(packets, cfg);
    ComparatorSet set = compute_comparators(y, preset, opts.comparators);

    for (const auto& named : set.specs) {
      for (std::size_t k = 0; k < opts.n_tolerances; ++k) {
        const double delta_f = static_cast<double>(k) * df;
        if (opts.mixture) {
          result.records.push_back({s, named.name, "E", delta_f,
                                    error_joint(named.spec, packets, ToleranceBox{delta_f, 0.0})});
        } else {
          const PacketSpec& p = packets.front();
          const double delta_t = static_cast<double>(k) * dt;
          result.records.push_back({s, named.name, "E_f", delta_f, error_freq(named.spec, p.freq, delta_f)});
          result.records.push_back(
              {s, named.name, "E_t", delta_t, error_time(named.spec, p.onset, p.offset, delta_t)});
        }
      }
    }
    for (auto& rec : set.solves) {
      rec.name = std::to_string(s) + "/" + rec.name;
      result.solves.push_back(std::move(rec));
    }
    if (opts.log) {
      *opts.log << "signal " << s + 1 << "/" << opts.n_signals;
      for (const auto& rec : result.solves) {
        if (rec.name.starts_with(std::to_string(s) + "/")) {
          *opts.log << "  " << rec.name.substr(rec.name.find('/') + 1) << ": " << rec.iterations
                    << " it, " << rec.seconds << " s";
        }
      }
      *opts.log << '\n' << std::flush;
    }
  }
  return result;
}

double mean_metric(const std::vector<MetricRecord>& records, const std::string& spectrogram,
                   const std::string& metric, double delta) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : records) {
    if (r.spectrogram == spectrogram && r.metric == metric &&
        std::abs(r.delta - delta) <= 1e-12 * std::max(1.0, std::abs(delta))) {
      sum += r.value;
      ++count;
    }
  }
  if (count == 0) throw DomainError("no records for " + spectrogram + " " + metric);
  return sum / static_cast<double>(count);
}

namespace {

bool has_extension(const std::filesystem::path& p, const std::string& ext) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

std::vector<std::filesystem::path> sorted_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

SpeechExperimentResult run_speech_experiment(const SpeechExperimentOptions& opts) {
  const AnalysisPreset& preset = opts.preset;
  SpeechExperimentResult result;

  std::map<std::string, std::filesystem::path> pitch_by_stem;
  for (const auto& p : sorted_files(opts.pitch_dir)) pitch_by_stem.emplace(p.stem().string(), p);

  struct Item {
    std::string name;
    Audio audio;
    PitchTrack track;
  };
  std::vector<Item> items;
  for (const auto& wav : sorted_files(opts.wav_dir)) {
    if (!has_extension(wav, ".wav")) continue;
    const std::string stem = wav.stem().string();
    auto it = pitch_by_stem.find(stem);
    if (it == pitch_by_stem.end() && stem.starts_with("mic_")) {
      it = pitch_by_stem.find("ref_" + stem.substr(4));
    }
    if (it == pitch_by_stem.end()) {
      ++result.warnings;
      if (opts.log) *opts.log << "warning: no pitch file for " << wav.filename().string() << '\n';
      continue;
    }
    Audio audio = read_wav(wav);
    if (audio.sample_rate != preset.sample_rate) audio = resample_to(audio, preset.sample_rate);
    items.push_back({wav.filename().string(), std::move(audio),
                     parse_pitch_track(it->second, opts.pitch_hop_s, opts.pitch_column)});
  }
  if (items.empty()) {
    ++result.warnings;
    if (opts.log) *opts.log << "warning: no matched WAV/pitch pairs in " << opts.wav_dir.string() << '\n';
    return result;
  }

  std::size_t longest = 0;
  for (const auto& item : items) longest = std::max(longest, item.audio.samples.size());
  const double df = preset.sample_rate / static_cast<double>(
                        (preset.has_fine_grid() ? preset.fine_long_params() : preset.long_params()).n_fft);

  for (auto& item : items) {
    item.audio.samples.resize(longest, 0.0);
    const std::size_t voiced = item.track.voiced_count();
    result.voiced_frames.emplace_back(item.name, voiced);
    if (opts.log) *opts.log << item.name << ": " << voiced << " voiced frames\n" << std::flush;

    ComparatorSet set = compute_comparators(item.audio.samples, preset, opts.comparators);
    for (const auto& named : set.specs) {
      for (std::size_t k = 0; k < opts.n_tolerances; ++k) {
        const double delta_f = static_cast<double>(k) * df;
        double e = std::numeric_limits<double>::quiet_NaN();
        try {
          e = error_harmonic(named.spec, item.track, delta_f);
        } catch (const DomainError&) {
          if (k == 0) {
            ++result.warnings;
            if (opts.log) *opts.log << "warning: " << item.name << ": no voiced energy in " << named.name << '\n';
          }
        }
        result.records.push_back({item.name, delta_f, named.name, e});
      }
    }
    for (auto& rec : set.solves) {
      rec.name = item.name + "/" + rec.name;
      result.solves.push_back(std::move(rec));
    }
  }
  return result;
}

CsvTable metric_table(const std::vector<MetricRecord>& records) {
  CsvTable t;
  t.header = {"signal", "spectrogram", "metric", "delta", "value"};
  for (const auto& r : records) {
    t.rows.push_back({static_cast<std::int64_t>(r.signal), r.spectrogram, r.metric, r.delta, r.value});
  }
  return t;
}

CsvTable summary_table(const std::vector<MetricRecord>& records, StdDev kind) {
  // Keyed by first appearance so rows follow the experiment's own ordering.
  using Key = std::tuple<std::string, std::string, double>;
  std::vector<Key> order;
  std::map<Key, std::vector<double>> cells;
  for (const auto& r : records) {
    Key key{r.spectrogram, r.metric, r.delta};
    auto [it, inserted] = cells.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(r.value);
  }
  CsvTable t;
  t.header = {"spectrogram", "delta", "metric", "mean", "se"};
  for (const auto& key : order) {
    const auto& v = cells[key];
    Stats s{v.front(), std::numeric_limits<double>::quiet_NaN()};
    if (v.size() >= 2) s = experiment_stats(v, kind);
    t.rows.push_back({std::get<0>(key), std::get<2>(key), std::get<1>(key), s.mean, s.se});
  }
  return t;
}

CsvTable speech_table(const std::vector<SpeechRecord>& records) {
  CsvTable t;
  t.header = {"file", "delta_f", "spectrogram", "e_h"};
  for (const auto& r : records) t.rows.push_back({r.file, r.delta_f, r.spectrogram, r.e_h});
  return t;
}

CsvTable solver_table(const std::vector<SolveRecord>& solves) {
  CsvTable t;
  t.header = {"case", "rows1", "rows2", "cols", "nnz1", "nnz2", "iterations", "objective", "seconds"};
  for (const auto& s : solves) {
    t.rows.push_back({s.name, static_cast<std::int64_t>(s.rows1), static_cast<std::int64_t>(s.rows2),
                      static_cast<std::int64_t>(s.cols), static_cast<std::int64_t>(s.nnz1),
                      static_cast<std::int64_t>(s.nnz2), static_cast<std::int64_t>(s.iterations),
                      s.objective, s.seconds});
  }
  return t;
}

}  // namespace specfuse
