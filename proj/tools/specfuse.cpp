// specfuse: spectrogram computation, UOT fusion and the localization studies.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "specfuse/errors.hpp"
#include "specfuse/experiment.hpp"
#include "specfuse/fusion.hpp"
#include "specfuse/io.hpp"
#include "specfuse/stft.hpp"

namespace fs = std::filesystem;
using namespace specfuse;

namespace {

enum Exit { kOk = 0, kUsage = 2, kNoConvergence = 3, kIo = 4 };

// Validation failures found after parsing; reported like CLI11 errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

AnalysisPreset preset_or_throw(const std::string& name) {
  auto p = find_preset(name);
  if (!p) throw UsageError("--preset: unknown preset '" + name + "' (synthetic, speech, bass, mel)");
  return *p;
}

struct StftArgs {
  std::string input, output;
  std::string preset;
  std::string which = "long";
  std::optional<double> window_ms, hop_ms, spacing_hz;
  bool complete = false;
};

struct FuseArgs {
  std::string input1, input2, output, report;
  std::string preset;
  std::string mode = "canonical";
  std::optional<double> eta, lambda, tol;
  std::optional<std::size_t> max_iter;
  bool no_overlap = false;
  std::optional<std::size_t> mel_bands;
  std::string rescale = "none";
  std::size_t entry_cap = kDefaultEntryCap;
};

struct SynthArgs {
  std::string preset = "synthetic";
  std::string out_dir = ".";
  bool mixture = false;
  std::size_t n_signals = 100;
  std::uint64_t seed = 0;
  int k_min = 2, k_max = 10;
  std::optional<double> eta, tol;
  std::optional<std::size_t> max_iter;
  bool skip_same_grid = false;
};

struct SpeechArgs {
  std::string wav_dir, pitch_dir;
  std::string preset = "speech";
  std::string out_dir = ".";
  double pitch_hop_ms = 10.0;
  std::size_t pitch_column = 0;
  std::optional<double> eta, tol;
  std::optional<std::size_t> max_iter;
  bool skip_same_grid = false;
};

StftParams stft_params(const StftArgs& a, double wav_rate) {
  if (a.spacing_hz && a.complete) {
    throw UsageError("--freq-spacing-hz conflicts with --complete-sampling");
  }
  if (!a.preset.empty()) {
    AnalysisPreset p = preset_or_throw(a.preset);
    if (a.which == "fine-long" || a.which == "fine-short") {
      if (!p.has_fine_grid()) throw UsageError("--which: preset '" + p.name + "' has no shared fine grid");
    }
    const bool long_win = a.which == "long" || a.which == "fine-long";
    const bool fine = a.which.starts_with("fine");
    double window = long_win ? p.window1_s : p.window2_s;
    double hop = fine ? p.fine_hop_s : (long_win ? p.hop1_s : p.hop2_s);
    double spacing = fine ? p.fine_spacing_hz : (long_win ? p.spacing1_hz : p.spacing2_hz);
    if (a.window_ms) window = *a.window_ms / 1000.0;
    if (a.hop_ms) hop = *a.hop_ms / 1000.0;
    if (a.spacing_hz) spacing = *a.spacing_hz;
    if (a.complete) spacing = 0.0;
    if (a.which == "fine-short" && !a.spacing_hz && !a.complete) {
      StftParams s = make_params(window, hop, p.sample_rate, spacing);
      s.n_fft = p.fine_long_params().n_fft;
      return s;
    }
    return make_params(window, hop, p.sample_rate, spacing);
  }
  if (!a.window_ms || !a.hop_ms) throw UsageError("--window-ms and --hop-ms are required without --preset");
  return make_params(*a.window_ms / 1000.0, *a.hop_ms / 1000.0, wav_rate, a.spacing_hz.value_or(0.0));
}

int cmd_stft(const StftArgs& a) {
  // Parameters are checked against a placeholder rate first so bad flags fail
  // before the input is read.
  if (a.preset.empty()) stft_params(a, 1.0e6);
  else stft_params(a, 0.0);
  Audio audio = read_wav(a.input);
  const StftParams params = stft_params(a, audio.sample_rate);
  if (audio.sample_rate != params.sample_rate) audio = resample_to(audio, params.sample_rate);
  const Spectrogram spec = spectrogram(audio.samples, params, params.complete_bins());
  write_spectrogram(a.output, spec);
  std::cout << "M=" << spec.rows() << " N=" << spec.cols() << " mass=" << spec.mass() << '\n';
  return kOk;
}

FusionMode parse_mode(const std::string& s) {
  if (s == "canonical") return FusionMode::canonical;
  if (s == "same_grid") return FusionMode::same_grid;
  if (s == "mel") return FusionMode::mel;
  return FusionMode::dense_cost;
}

void apply_solver_overrides(UotConfig& cfg, std::optional<double> eta, std::optional<double> tol,
                            std::optional<std::size_t> max_iter) {
  if (eta) cfg = [&] {
    UotConfig c = UotConfig::uniform(cfg.inputs(), *eta);
    c.lambda = cfg.lambda;
    c.tol = cfg.tol;
    c.max_iter = cfg.max_iter;
    return c;
  }();
  if (tol) cfg.tol = *tol;
  if (max_iter) cfg.max_iter = *max_iter;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

int cmd_fuse(const FuseArgs& a) {
  FusionSpec spec;
  spec.mode = parse_mode(a.mode);
  spec.overlap = !a.no_overlap;
  spec.entry_cap = a.entry_cap;
  spec.rescale = a.rescale == "mean_mass" ? Rescale::mean_mass : Rescale::none;
  double eta = 10.0, tol = 1e-6;
  if (!a.preset.empty()) {
    const AnalysisPreset p = preset_or_throw(a.preset);
    eta = p.eta;
    tol = p.tol;
    if (p.mel_bands > 0) spec.mel_bands = p.mel_bands;
  }
  spec.uot = UotConfig::uniform(2, eta);
  spec.uot.tol = tol;
  if (a.lambda) spec.uot.lambda = {*a.lambda, 1.0 - *a.lambda};
  if (a.mel_bands) spec.mel_bands = *a.mel_bands;
  if (spec.mode == FusionMode::mel && spec.mel_bands < 2) throw UsageError("--mel-bands must be >= 2");
  apply_solver_overrides(spec.uot, a.eta, a.tol, a.max_iter);

  const Spectrogram x1 = read_spectrogram(a.input1);
  const Spectrogram x2 = read_spectrogram(a.input2);
  FusionResult r = fuse(x1, x2, spec);
  write_spectrogram(a.output, r.spectrogram);

  SolveRecord rec;
  rec.name = fs::path(a.output).filename().string();
  rec.rows1 = x1.support().size();
  rec.rows2 = x2.support().size();
  rec.cols = r.spectrogram.support().size();
  rec.nnz1 = r.nnz.at(0);
  rec.nnz2 = r.nnz.at(1);
  rec.iterations = r.solver.iterations;
  rec.objective = r.solver.objective_trace.back();
  rec.seconds = r.seconds;
  const CsvTable table = solver_table({rec});
  std::cout << format_csv(table);
  if (!a.report.empty()) write_results_csv(a.report, table);
  if (!r.solver.converged) {
    std::cerr << "warning: solver stopped at --max-iter " << spec.uot.max_iter
              << " without converging; " << a.output << " holds a partial result\n";
    return kNoConvergence;
  }
  return kOk;
}

void configure_preset(AnalysisPreset& p, std::optional<double> eta, std::optional<double> tol) {
  if (eta) {
    if (!(*eta > 0.0)) throw UsageError("--eta must be positive");
    p.eta = *eta;
  }
  if (tol) {
    if (!(*tol > 0.0)) throw UsageError("--tol must be positive");
    p.tol = *tol;
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

int cmd_synth(const SynthArgs& a) {
  SynthExperimentOptions o;
  o.preset = preset_or_throw(a.preset);
  if (!o.preset.has_fine_grid()) throw UsageError("--preset: '" + a.preset + "' has no shared fine grid");
  configure_preset(o.preset, a.eta, a.tol);
  o.mixture = a.mixture;
  o.n_signals = a.n_signals;
  o.seed = a.seed;
  o.k_min = a.k_min;
  o.k_max = a.k_max;
  if (a.k_min < 1 || a.k_max < a.k_min) throw UsageError("--k-min/--k-max: need 1 <= k-min <= k-max");
  if (a.max_iter) o.comparators.max_iter = *a.max_iter;
  o.comparators.same_grid_uot = !a.skip_same_grid;
  o.log = &std::cerr;
  ensure_dir(a.out_dir);

  const SynthExperimentResult r = run_synth_experiment(o);
  const fs::path dir(a.out_dir);
  write_results_csv(dir / "per_signal.csv", metric_table(r.records));
  write_results_csv(dir / "summary.csv", summary_table(r.records));
  write_results_csv(dir / "solver.csv", solver_table(r.solves));
  for (const auto& s : r.solves) {
    if (!s.converged) {
      std::cerr << "warning: " << s.name << " did not converge\n";
      return kNoConvergence;
    }
  }
  return kOk;
}

int cmd_speech(const SpeechArgs& a) {
  SpeechExperimentOptions o;
  o.preset = preset_or_throw(a.preset);
  configure_preset(o.preset, a.eta, a.tol);
  if (!(a.pitch_hop_ms > 0.0)) throw UsageError("--pitch-hop-ms must be positive");
  o.wav_dir = a.wav_dir;
  o.pitch_dir = a.pitch_dir;
  o.pitch_hop_s = a.pitch_hop_ms / 1000.0;
  o.pitch_column = a.pitch_column;
  if (a.max_iter) o.comparators.max_iter = *a.max_iter;
  o.comparators.same_grid_uot = !a.skip_same_grid;
  o.log = &std::cerr;
  ensure_dir(a.out_dir);

  const SpeechExperimentResult r = run_speech_experiment(o);
  const fs::path dir(a.out_dir);
  write_results_csv(dir / "speech.csv", speech_table(r.records));
  write_results_csv(dir / "solver.csv", solver_table(r.solves));
  if (r.warnings > 0) std::cerr << r.warnings << " warning(s)\n";
  for (const auto& s : r.solves) {
    if (!s.converged) {
      std::cerr << "warning: " << s.name << " did not converge\n";
      return kNoConvergence;
    }
  }
  return kOk;
}

void add_solver_flags(CLI::App* sub, std::optional<double>& eta, std::optional<double>& tol,
                      std::optional<std::size_t>& max_iter) {
  sub->add_option("--eta", eta, "KL marginal weight (all marginals)");
  sub->add_option("--tol", tol, "relative objective-change stopping tolerance");
  sub->add_option("--max-iter", max_iter, "iteration limit")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrogram fusion with unbalanced optimal transport barycenters"};
  app.require_subcommand(1);
  const std::vector<std::string> presets{"synthetic", "speech", "bass", "mel"};

  StftArgs stft;
  auto* s = app.add_subcommand("stft", "compute a Hann spectrogram of a WAV file");
  s->add_option("input", stft.input, "input WAV")->required();
  s->add_option("-o,--output", stft.output, "output TFSP file")->required();
  s->add_option("--preset", stft.preset, "take settings from a preset")->check(CLI::IsMember(presets));
  s->add_option("--which", stft.which, "preset spectrogram: long, short, fine-long, fine-short")
      ->check(CLI::IsMember({"long", "short", "fine-long", "fine-short"}));
  s->add_option("--window-ms", stft.window_ms, "window length (ms)")->check(CLI::PositiveNumber);
  s->add_option("--hop-ms", stft.hop_ms, "hop (ms)")->check(CLI::PositiveNumber);
  s->add_option("--freq-spacing-hz", stft.spacing_hz, "maximum bin spacing (Hz)")->check(CLI::PositiveNumber);
  s->add_flag("--complete-sampling", stft.complete, "n_fft = window length");

  FuseArgs fuse_args;
  auto* f = app.add_subcommand("fuse", "fuse a long-window and a short-window spectrogram");
  f->add_option("input1", fuse_args.input1, "long-window TFSP")->required();
  f->add_option("input2", fuse_args.input2, "short-window TFSP")->required();
  f->add_option("-o,--output", fuse_args.output, "output TFSP file")->required();
  f->add_option("--report", fuse_args.report, "write the solver report CSV here");
  f->add_option("--preset", fuse_args.preset, "take eta, tol and mel bands from a preset")
      ->check(CLI::IsMember(presets));
  f->add_option("--mode", fuse_args.mode, "canonical, same_grid, mel or dense_cost")
      ->check(CLI::IsMember({"canonical", "same_grid", "mel", "dense_cost"}));
  f->add_option("--lambda", fuse_args.lambda, "weight of input 1 (input 2 gets 1 - lambda)")
      ->check(CLI::Range(0.0, 1.0));
  f->add_flag("--no-overlap", fuse_args.no_overlap, "drop the window-overlap masks");
  f->add_option("--mel-bands", fuse_args.mel_bands, "mel target size");
  f->add_option("--rescale", fuse_args.rescale, "none or mean_mass")
      ->check(CLI::IsMember({"none", "mean_mass"}));
  f->add_option("--entry-cap", fuse_args.entry_cap, "largest dense cost matrix allowed");
  add_solver_flags(f, fuse_args.eta, fuse_args.tol, fuse_args.max_iter);

  SynthArgs synth;
  auto* y = app.add_subcommand("synth-experiment", "random sinusoidal-packet localization study");
  y->add_option("--preset", synth.preset, "analysis preset")->check(CLI::IsMember(presets));
  y->add_option("--out-dir", synth.out_dir, "directory for per_signal.csv, summary.csv, solver.csv");
  y->add_flag("--mixture", synth.mixture, "K packets per signal instead of one");
  y->add_option("--n-signals", synth.n_signals, "number of signals")->check(CLI::PositiveNumber);
  y->add_option("--seed", synth.seed, "master seed");
  y->add_option("--k-min", synth.k_min, "fewest packets in a mixture");
  y->add_option("--k-max", synth.k_max, "most packets in a mixture");
  y->add_flag("--skip-same-grid", synth.skip_same_grid, "do not compute the same-grid barycenter X'");
  add_solver_flags(y, synth.eta, synth.tol, synth.max_iter);

  SpeechArgs speech;
  auto* p = app.add_subcommand("speech-experiment", "harmonic concentration study on WAV/pitch pairs");
  p->add_option("wav_dir", speech.wav_dir, "directory of WAV files")->required();
  p->add_option("pitch_dir", speech.pitch_dir, "directory of pitch tracks")->required();
  p->add_option("--preset", speech.preset, "analysis preset")->check(CLI::IsMember(presets));
  p->add_option("--out-dir", speech.out_dir, "directory for speech.csv and solver.csv");
  p->add_option("--pitch-hop-ms", speech.pitch_hop_ms, "pitch frame hop (ms)");
  p->add_option("--pitch-column", speech.pitch_column, "zero-based f0 column");
  p->add_flag("--skip-same-grid", speech.skip_same_grid, "do not compute the same-grid barycenter X'");
  add_solver_flags(p, speech.eta, speech.tol, speech.max_iter);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*s) return cmd_stft(stft);
    if (*f) return cmd_fuse(fuse_args);
    if (*y) return cmd_synth(synth);
    return cmd_speech(speech);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kIo;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << " (see --entry-cap)\n";
    return kUsage;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
