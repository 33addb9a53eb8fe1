#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "blw/error.hpp"
#include "blw/signal.hpp"

namespace blw {

/// Per-channel description from a WFDB header signal line.
struct ChannelSpec {
  std::string file_name;
  int format = 0;
  long long byte_offset = 0;
  double gain = 200.0;  // adc units per physical unit
  double baseline = 0.0;
  std::string units;
  std::string label;
};

struct RecordHeader {
  std::string record_name;
  std::size_t n_channels = 0;
  double fs = 250.0;
  std::size_t n_samples = 0;  // 0 when the header omits it
  std::vector<ChannelSpec> channels;
};

namespace detail {

inline bool parse_double(std::string_view tok, double& out) {
  const char* end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc{} && p == end;
}

inline bool parse_integer(std::string_view tok, long long& out) {
  const char* end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc{} && p == end;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses a single-segment WFDB header.
///
/// Record line: "name n_sig [fs[/counter][(base)] [n_samples ...]]".
/// Signal line: "file format[xN][:skew][+offset] [gain[(baseline)][/units]
/// [adc_res [adc_zero [init [checksum [block [description]]]]]]]".
/// A missing or zero gain means the WFDB default of 200; a missing baseline
/// falls back to adc_zero.
inline RecordHeader parse_wfdb_header(const std::string& text) {
  RecordHeader h;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool have_record_line = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields{std::string(line)};
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);

    if (!have_record_line) {
      have_record_line = true;
      if (tok.size() < 2) throw ParseError("record line needs a name and a signal count", line_no);
      if (tok[0].find('/') != std::string::npos)
        throw UnsupportedFormatError("multi-segment records are not supported");
      h.record_name = tok[0];
      long long nsig = 0;
      if (!detail::parse_integer(tok[1], nsig) || nsig < 1) throw ParseError("invalid signal count '" + tok[1] + "'", line_no);
      h.n_channels = static_cast<std::size_t>(nsig);
      if (tok.size() > 2) {
        std::string f = tok[2];
        f = f.substr(0, f.find_first_of("/("));
        if (!detail::parse_double(f, h.fs) || !(h.fs > 0.0)) throw ParseError("invalid sampling frequency '" + tok[2] + "'", line_no);
      }
      if (tok.size() > 3) {
        long long ns = 0;
        if (!detail::parse_integer(tok[3], ns) || ns < 0) throw ParseError("invalid sample count '" + tok[3] + "'", line_no);
        h.n_samples = static_cast<std::size_t>(ns);
      }
      continue;
    }

    if (h.channels.size() == h.n_channels) break;  // trailing info lines
    if (tok.size() < 2) throw ParseError("signal line needs a file name and a format", line_no);
    ChannelSpec ch;
    ch.file_name = tok[0];
    {
      std::string fmt = tok[1];
      const auto plus = fmt.find('+');
      if (plus != std::string::npos) {
        if (!detail::parse_integer(std::string_view(fmt).substr(plus + 1), ch.byte_offset))
          throw ParseError("invalid byte offset in '" + tok[1] + "'", line_no);
        fmt.erase(plus);
      }
      fmt = fmt.substr(0, fmt.find_first_of("x:"));
      long long code = 0;
      if (!detail::parse_integer(fmt, code)) throw ParseError("invalid format code '" + tok[1] + "'", line_no);
      ch.format = static_cast<int>(code);
    }
    bool have_baseline = false;
    if (tok.size() > 2) {
      std::string g = tok[2];
      const auto slash = g.find('/');
      if (slash != std::string::npos) {
        ch.units = g.substr(slash + 1);
        g.erase(slash);
      }
      const auto paren = g.find('(');
      if (paren != std::string::npos) {
        const auto close = g.find(')', paren);
        if (close == std::string::npos) throw ParseError("unterminated baseline in '" + tok[2] + "'", line_no);
        if (!detail::parse_double(std::string_view(g).substr(paren + 1, close - paren - 1), ch.baseline))
          throw ParseError("invalid baseline in '" + tok[2] + "'", line_no);
        have_baseline = true;
        g.erase(paren);
      }
      if (!detail::parse_double(g, ch.gain)) throw ParseError("invalid gain '" + tok[2] + "'", line_no);
      if (ch.gain == 0.0) ch.gain = 200.0;
    }
    if (tok.size() > 4 && !have_baseline) {
      double zero = 0.0;
      if (!detail::parse_double(tok[4], zero)) throw ParseError("invalid adc zero '" + tok[4] + "'", line_no);
      ch.baseline = zero;
    }
    for (std::size_t i = 8; i < tok.size(); ++i) ch.label += (ch.label.empty() ? "" : " ") + tok[i];
    h.channels.push_back(std::move(ch));
  }
  if (!have_record_line) throw ParseError("header has no record line");
  if (h.channels.size() != h.n_channels)
    throw ParseError("header declares " + std::to_string(h.n_channels) + " signals but describes " +
                     std::to_string(h.channels.size()));
  return h;
}

namespace wfdb {

inline int sign_extend12(unsigned v) { return (v & 0x800u) ? static_cast<int>(v) - 4096 : static_cast<int>(v); }

/// Format 212: two 12-bit two's-complement samples per three bytes.
/// Decodes up to `count` samples; a trailing half group yields one sample.
inline std::vector<int> decode_212(std::span<const std::uint8_t> bytes, std::size_t count) {
  std::vector<int> out;
  out.reserve(count);
  for (std::size_t i = 0; out.size() < count; i += 3) {
    if (i + 1 >= bytes.size()) break;
    const unsigned b0 = bytes[i], b1 = bytes[i + 1];
    out.push_back(sign_extend12(((b1 & 0x0Fu) << 8) | b0));
    if (out.size() == count || i + 2 >= bytes.size()) break;
    const unsigned b2 = bytes[i + 2];
    out.push_back(sign_extend12(((b1 & 0xF0u) << 4) | b2));
  }
  return out;
}

inline std::vector<std::uint8_t> encode_212(std::span<const int> samples) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < samples.size(); i += 2) {
    const unsigned s1 = static_cast<unsigned>(samples[i]) & 0xFFFu;
    const unsigned s2 = i + 1 < samples.size() ? static_cast<unsigned>(samples[i + 1]) & 0xFFFu : 0u;
    out.push_back(static_cast<std::uint8_t>(s1 & 0xFFu));
    out.push_back(static_cast<std::uint8_t>(((s1 >> 8) & 0x0Fu) | ((s2 >> 4) & 0xF0u)));
    if (i + 1 < samples.size()) out.push_back(static_cast<std::uint8_t>(s2 & 0xFFu));
  }
  return out;
}

/// Format 16: little-endian 16-bit two's complement.
inline std::vector<int> decode_16(std::span<const std::uint8_t> bytes, std::size_t count) {
  std::vector<int> out;
  out.reserve(count);
  for (std::size_t i = 0; i + 1 < bytes.size() && out.size() < count; i += 2)
    out.push_back(static_cast<std::int16_t>(static_cast<std::uint16_t>(bytes[i] | (bytes[i + 1] << 8))));
  return out;
}

}  // namespace wfdb

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline RecordHeader read_wfdb_header(const std::filesystem::path& header_path) {
  return parse_wfdb_header(read_text_file(header_path));
}

/// Reads one channel of a WFDB record in physical units (adc - baseline) / gain.
inline Signal read_wfdb(const std::filesystem::path& header_path, std::size_t channel) {
  const RecordHeader h = read_wfdb_header(header_path);
  if (channel >= h.n_channels)
    throw ParameterError("channel " + std::to_string(channel) + " out of range (record has " +
                         std::to_string(h.n_channels) + ")");
  const ChannelSpec& ch = h.channels[channel];
  if (ch.format != 212 && ch.format != 16)
    throw UnsupportedFormatError("WFDB format " + std::to_string(ch.format) + " is not supported (212 and 16 are)");

  // Channels sharing the file are interleaved frame by frame.
  std::size_t group = 0, position = 0;
  for (std::size_t i = 0; i < h.channels.size(); ++i) {
    if (h.channels[i].file_name != ch.file_name) continue;
    if (h.channels[i].format != ch.format)
      throw UnsupportedFormatError("mixed formats within one signal file are not supported");
    if (i == channel) position = group;
    ++group;
  }

  const auto data_path = header_path.parent_path() / ch.file_name;
  const std::string raw = read_text_file(data_path);
  if (ch.byte_offset < 0 || static_cast<std::size_t>(ch.byte_offset) > raw.size())
    throw LengthError("byte offset beyond the end of " + data_path.string());
  const std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(raw.data()) + ch.byte_offset,
                                            raw.size() - static_cast<std::size_t>(ch.byte_offset));

  std::size_t frames = h.n_samples;
  const std::size_t available =
      ch.format == 16 ? bytes.size() / 2 : bytes.size() / 3 * 2 + (bytes.size() % 3 >= 2 ? 1 : 0);
  if (frames == 0) frames = available / group;
  const std::size_t needed = frames * group;
  if (available < needed)
    throw LengthError(data_path.string() + " is truncated: " + std::to_string(available) + " samples, header needs " +
                      std::to_string(needed));
  if (frames == 0) throw LengthError(data_path.string() + " holds no samples");

  const auto adc = ch.format == 16 ? wfdb::decode_16(bytes, needed) : wfdb::decode_212(bytes, needed);
  std::vector<double> out(frames);
  for (std::size_t f = 0; f < frames; ++f) out[f] = (adc[f * group + position] - ch.baseline) / ch.gain;
  return Signal(std::move(out), h.fs, h.record_name + ":" + std::to_string(channel));
}

/// One amplitude per line; lines starting with '#' and blank lines are skipped.
inline Signal parse_csv_signal(const std::string& text, double fs, const std::string& label = {}) {
  std::vector<double> values;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    ++line_no;
    const auto line = detail::trim(std::string_view(text).substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    double v = 0.0;
    if (!detail::parse_double(line, v) || !std::isfinite(v))
      throw ParseError("non-numeric value '" + std::string(line) + "'", line_no);
    values.push_back(v);
  }
  if (values.empty()) throw LengthError("CSV holds no samples");
  return Signal(std::move(values), fs, label);
}

inline Signal read_csv(const std::filesystem::path& path, double fs) {
  return parse_csv_signal(read_text_file(path), fs, path.stem().string());
}

/// Shortest decimal form that round-trips (at most 17 significant digits).
inline std::string format_sample(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

inline void write_csv(const Signal& s, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  for (double v : s.samples()) f << format_sample(v) << '\n';
  if (!f) throw IoError("write failed for " + path.string());
}

/// First round(seconds * fs) samples.
inline Signal take_prefix(const Signal& s, double seconds) {
  const auto n = detail::rounded_count(seconds, s.fs());
  if (n == 0) throw LengthError("prefix duration rounds to zero samples");
  if (n > s.size()) throw LengthError("requested prefix longer than the record");
  return s.with_samples({s.samples().begin(), s.samples().begin() + static_cast<std::ptrdiff_t>(n)});
}

}  // namespace blw
