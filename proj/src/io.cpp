#include "specfuse/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "specfuse/errors.hpp"

namespace specfuse {

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_bytes(const std::filesystem::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw IoError("write failed: " + path.string());
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint64_t get_u64(const std::uint8_t* p) {
  return static_cast<std::uint64_t>(get_u32(p)) | (static_cast<std::uint64_t>(get_u32(p + 4)) << 32);
}
double get_f64(const std::uint8_t* p) { return std::bit_cast<double>(get_u64(p)); }

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int s = 0; s < 64; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}
void put_f64(std::vector<std::uint8_t>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

double decode_sample(const std::uint8_t* p, std::uint16_t format, std::uint16_t bits) {
  if (format == 3) {
    if (bits == 32) return static_cast<double>(std::bit_cast<float>(get_u32(p)));
    return get_f64(p);
  }
  switch (bits) {
    case 8:
      return (static_cast<double>(p[0]) - 128.0) / 128.0;
    case 16:
      return static_cast<double>(static_cast<std::int16_t>(get_u16(p))) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return static_cast<double>(v) / 8388608.0;
    }
    default:
      return static_cast<double>(static_cast<std::int32_t>(get_u32(p))) / 2147483648.0;
  }
}

}  // namespace

Audio read_wav(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  const std::string where = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError(where + ": not a RIFF/WAVE file (byte offset 0)");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::size_t len = get_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(len, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw FormatError(where + ": fmt chunk too short at byte offset " + std::to_string(pos));
      const std::uint8_t* f = bytes.data() + body;
      format = get_u16(f);
      channels = get_u16(f + 2);
      rate = get_u32(f + 4);
      bits = get_u16(f + 14);
      if (format == 0xFFFE && avail >= 26) format = get_u16(f + 24);  // extensible: sub-format GUID
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      // Streaming writers leave the length as 0 or 0xFFFFFFFF; anything else
      // running past the end of the file is truncation.
      const bool placeholder = len == 0 || len == 0xFFFFFFFFu;
      if (avail < len && !placeholder) {
        throw FormatError(where + ": data chunk at byte offset " + std::to_string(pos) + " declares " +
                          std::to_string(len) + " bytes, " + std::to_string(avail) + " present (truncated)");
      }
      data = bytes.data() + body;
      data_len = placeholder ? bytes.size() - body : avail;
    }
    pos = body + len + (len & 1);
  }
  if (format == 0) throw FormatError(where + ": missing fmt chunk");
  if (!data) throw FormatError(where + ": missing data chunk");
  const bool pcm_ok = format == 1 && (bits == 8 || bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == 3 && (bits == 32 || bits == 64);
  if (!pcm_ok && !float_ok) {
    throw FormatError(where + ": unsupported codec (format " + std::to_string(format) + ", " +
                      std::to_string(bits) + " bits)");
  }
  if (channels == 0 || rate == 0) throw FormatError(where + ": invalid channel count or sample rate");
  const std::size_t frame_bytes = static_cast<std::size_t>(bits / 8) * channels;
  const std::size_t frames = data_len / frame_bytes;
  Audio audio;
  audio.sample_rate = rate;
  audio.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      acc += decode_sample(data + i * frame_bytes + c * (bits / 8), format, bits);
    }
    audio.samples[i] = acc / channels;
  }
  return audio;
}

void write_wav(const std::filesystem::path& path, const Audio& audio) {
  const auto rate = static_cast<std::uint32_t>(std::llround(audio.sample_rate));
  const auto data_len = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_len);
  for (double x : audio.samples) {
    const double q = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  write_bytes(path, out.data(), out.size());
}

std::vector<double> decimate(const std::vector<double>& signal, std::size_t factor, double cutoff) {
  if (factor == 0) throw DomainError("decimation factor must be >= 1");
  if (factor == 1) return signal;
  constexpr std::size_t taps = kDecimationTaps;
  constexpr std::ptrdiff_t half = taps / 2;
  const double fc = cutoff / static_cast<double>(factor);  // cycles per input sample
  std::vector<double> h(taps);
  double sum = 0.0;
  for (std::size_t t = 0; t < taps; ++t) {
    const double x = static_cast<double>(static_cast<std::ptrdiff_t>(t) - half);
    const double sinc = x == 0.0 ? 2.0 * fc
                                 : std::sin(2.0 * std::numbers::pi * fc * x) / (std::numbers::pi * x);
    const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) /
                                            static_cast<double>(taps - 1));
    h[t] = sinc * w;
    sum += h[t];
  }
  for (double& v : h) v /= sum;

  const auto len = static_cast<std::ptrdiff_t>(signal.size());
  std::vector<double> out((signal.size() + factor - 1) / factor);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto center = static_cast<std::ptrdiff_t>(j * factor);
    double acc = 0.0;
    for (std::size_t t = 0; t < taps; ++t) {
      const std::ptrdiff_t s = center + half - static_cast<std::ptrdiff_t>(t);
      if (s >= 0 && s < len) acc += h[t] * signal[static_cast<std::size_t>(s)];
    }
    out[j] = acc;
  }
  return out;
}

Audio resample_to(const Audio& audio, double target_rate) {
  if (!(target_rate > 0.0)) throw DomainError("target sample rate must be positive");
  const double ratio = audio.sample_rate / target_rate;
  const double k = std::round(ratio);
  if (k < 1.0 || std::abs(ratio - k) > 1e-9 * ratio) {
    throw DomainError("cannot resample " + std::to_string(audio.sample_rate) + " Hz to " +
                      std::to_string(target_rate) + " Hz: not an integer decimation factor");
  }
  return Audio{decimate(audio.samples, static_cast<std::size_t>(k)), target_rate};
}

std::vector<std::uint8_t> encode_spectrogram(const Spectrogram& spec) {
  const auto freqs = spec.support().freqs();
  const auto times = spec.support().times();
  std::vector<std::uint8_t> out;
  out.reserve(kTfspHeaderBytes + 8 * (freqs.size() + times.size() + spec.values().size()));
  out.insert(out.end(), {'T', 'F', 'S', 'P'});
  out.push_back(1);
  out.push_back(0);
  put_u32(out, static_cast<std::uint32_t>(freqs.size()));
  put_u32(out, static_cast<std::uint32_t>(times.size()));
  put_f64(out, spec.provenance().sample_rate);
  put_f64(out, spec.provenance().window_len_s);
  put_u32(out, static_cast<std::uint32_t>(spec.provenance().hop));
  for (double f : freqs) put_f64(out, f);
  for (double t : times) put_f64(out, t);
  for (double v : spec.values()) put_f64(out, v);
  return out;
}

Spectrogram decode_spectrogram(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "TFSP", 4) != 0) {
    throw FormatError("bad magic at byte offset 0: expected \"TFSP\"");
  }
  if (bytes.size() < kTfspHeaderBytes) {
    throw FormatError("truncated header: " + std::to_string(bytes.size()) + " of " +
                      std::to_string(kTfspHeaderBytes) + " bytes");
  }
  const std::uint8_t* p = bytes.data();
  if (p[4] != 1) throw FormatError("unsupported version " + std::to_string(p[4]) + " at byte offset 4");
  if (p[5] != 0) throw FormatError("unsupported flags " + std::to_string(p[5]) + " at byte offset 5");
  const std::uint64_t m = get_u32(p + 6);
  const std::uint64_t n = get_u32(p + 10);
  const double rate = get_f64(p + 14);
  const double window = get_f64(p + 22);
  const std::uint32_t hop = get_u32(p + 30);
  const std::uint64_t expected = kTfspHeaderBytes + 8 * (m + n + m * n);
  if (bytes.size() != expected) {
    throw FormatError("payload length mismatch: header implies " + std::to_string(expected) +
                      " bytes, file has " + std::to_string(bytes.size()) +
                      (bytes.size() < expected ? " (truncated)" : " (trailing data)"));
  }
  std::size_t off = kTfspHeaderBytes;
  auto take = [&](std::uint64_t count) {
    std::vector<double> v(count);
    for (auto& x : v) {
      x = get_f64(p + off);
      off += 8;
    }
    return v;
  };
  auto freqs = take(m);
  auto times = take(n);
  auto values = take(m * n);
  try {
    return Spectrogram(TFSupport(std::move(freqs), std::move(times)), std::move(values),
                       StftProvenance{window, hop, rate});
  } catch (const std::exception& e) {
    throw FormatError(std::string("invalid spectrogram payload after byte offset ") +
                      std::to_string(kTfspHeaderBytes) + ": " + e.what());
  }
}

void write_spectrogram(const std::filesystem::path& path, const Spectrogram& spec) {
  const auto bytes = encode_spectrogram(spec);
  write_bytes(path, bytes.data(), bytes.size());
}

Spectrogram read_spectrogram(const std::filesystem::path& path) {
  try {
    return decode_spectrogram(read_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

PitchTrack parse_pitch_track_text(const std::string& text, double frame_hop_s, std::size_t column) {
  if (!(frame_hop_s > 0.0)) throw DomainError("pitch frame hop must be positive");
  PitchTrack track;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> cols;
    for (std::string tok; fields >> tok;) cols.push_back(tok);
    if (cols.empty()) continue;
    if (column >= cols.size()) {
      throw FormatError("line " + std::to_string(line_no) + ": expected at least " +
                        std::to_string(column + 1) + " columns");
    }
    const std::string& tok = cols[column];
    double f0 = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), f0);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(f0) || f0 < 0.0) {
      throw FormatError("line " + std::to_string(line_no) + ": invalid f0 value '" + tok + "'");
    }
    track.frame_times.push_back(static_cast<double>(track.f0.size()) * frame_hop_s);
    track.f0.push_back(f0);
    track.voiced.push_back(f0 > 0.0);
  }
  return track;
}

PitchTrack parse_pitch_track(const std::filesystem::path& path, double frame_hop_s, std::size_t column) {
  const auto bytes = read_bytes(path);
  try {
    return parse_pitch_track_text(std::string(bytes.begin(), bytes.end()), frame_hop_s, column);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

namespace {

std::string format_field(const CsvField& field) {
  if (const auto* s = std::get_if<std::string>(&field)) {
    if (s->find_first_of(",\"\n") == std::string::npos) return *s;
    std::string q = "\"";
    for (char c : *s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }
  if (const auto* i = std::get_if<std::int64_t>(&field)) return std::to_string(*i);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, std::get<double>(field),
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string format_csv(const CsvTable& table) {
  std::string out;
  auto line = [&out](const auto& cells, auto&& fmt) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += fmt(cells[i]);
    }
    out += '\n';
  };
  line(table.header, [](const std::string& s) { return format_field(CsvField{s}); });
  for (const auto& row : table.rows) line(row, format_field);
  return out;
}

void write_results_csv(const std::filesystem::path& path, const CsvTable& table) {
  const std::string text = format_csv(table);
  write_bytes(path, text.data(), text.size());
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const char c = static_cast<char>(bytes[i]);
    any = true;
    if (quoted) {
      if (c == '"' && i + 1 < bytes.size() && bytes[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n') {
      row.push_back(std::move(cell));
      cell.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (any) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace specfuse
