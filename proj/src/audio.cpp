#include "vip/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>

#include "vip/error.hpp"
#include "vip/image_io.hpp"

namespace vip {

Biquad design_band_pass(double f_low, double f_high, double sample_rate) {
  if (!(sample_rate > 0.0) || !(f_low > 0.0) || !(f_low < f_high) ||
      !(f_high < sample_rate / 2.0)) {
    throw Error(ErrorCode::BadParam, "band-pass needs 0 < f_low < f_high < sample_rate/2, got " +
                                         std::to_string(f_low) + ".." + std::to_string(f_high) +
                                         " at " + std::to_string(sample_rate) + " Hz");
  }
  const double f0 = std::sqrt(f_low * f_high);
  const double q = f0 / (f_high - f_low);
  const double w0 = 2.0 * std::numbers::pi * f0 / sample_rate;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad c;
  c.b0 = alpha / a0;
  c.b1 = 0.0;
  c.b2 = -alpha / a0;
  c.a1 = -2.0 * std::cos(w0) / a0;
  c.a2 = (1.0 - alpha) / a0;
  return c;
}

BandPassFilter::BandPassFilter(double f_low, double f_high, double sample_rate)
    : q_(design_band_pass(f_low, f_high, sample_rate)), rate_(sample_rate) {}

AudioChunk BandPassFilter::process(const AudioChunk& chunk) {
  if (chunk.sample_rate != rate_) {
    throw Error(ErrorCode::BadParam, "chunk rate " + std::to_string(chunk.sample_rate) +
                                         " differs from filter rate " + std::to_string(rate_));
  }
  AudioChunk out{std::vector<double>(chunk.samples.size()), chunk.sample_rate,
                 chunk.start_time_ms};
  for (std::size_t i = 0; i < chunk.samples.size(); ++i) {
    const double x = chunk.samples[i];
    const double y = q_.b0 * x + z1_;
    z1_ = q_.b1 * x - q_.a1 * y + z2_;
    z2_ = q_.b2 * x - q_.a2 * y;
    out.samples[i] = y;
  }
  return out;
}

AudioChunk band_pass(const AudioChunk& chunk, double f_low, double f_high) {
  BandPassFilter f(f_low, f_high, chunk.sample_rate);
  return f.process(chunk);
}

void ClickParams::validate(double sample_rate) const {
  design_band_pass(f_low, f_high, sample_rate);
  if (!(level_threshold >= 0.0 && level_threshold <= 1.0)) {
    throw Error(ErrorCode::BadParam, "level_threshold must lie in [0,1]");
  }
  if (window == 0) throw Error(ErrorCode::BadParam, "window must be at least one sample");
  if (!(debounce_ms >= 0.0)) throw Error(ErrorCode::BadParam, "debounce must be non-negative");
}

ClickDetector::ClickDetector(ClickParams params, double sample_rate)
    : params_(params), rate_(sample_rate) {
  params_.validate(sample_rate);
}

void ClickDetector::close_window(std::vector<ClickEvent>& out) {
  const double rms = std::sqrt(sum_sq_ / static_cast<double>(params_.window));
  const double t = *origin_ms_ + 1000.0 * static_cast<double>(windows_done_ * params_.window) / rate_;
  ++windows_done_;
  filled_ = 0;
  sum_sq_ = 0.0;

  if (open_ && t - open_->time_ms > params_.debounce_ms) {
    out.push_back(*open_);
    open_.reset();
  }
  if (rms < params_.level_threshold) return;
  if (open_) {
    open_->peak_level = std::max(open_->peak_level, rms);
  } else {
    open_ = ClickEvent{t, rms};
  }
}

std::vector<ClickEvent> ClickDetector::push(const AudioChunk& filtered) {
  if (filtered.sample_rate != rate_) {
    throw Error(ErrorCode::BadParam, "chunk rate differs from detector rate");
  }
  if (!origin_ms_) origin_ms_ = filtered.start_time_ms;
  std::vector<ClickEvent> out;
  for (double s : filtered.samples) {
    sum_sq_ += s * s;
    if (++filled_ == params_.window) close_window(out);
  }
  return out;
}

std::vector<ClickEvent> ClickDetector::flush() {
  std::vector<ClickEvent> out;
  if (open_) {
    out.push_back(*open_);
    open_.reset();
  }
  return out;
}

std::vector<ClickEvent> detect_clicks(std::span<const AudioChunk> filtered,
                                      const ClickParams& params) {
  if (filtered.empty()) return {};
  ClickDetector det(params, filtered.front().sample_rate);
  std::vector<ClickEvent> all;
  for (const AudioChunk& c : filtered) {
    auto part = det.push(c);
    all.insert(all.end(), part.begin(), part.end());
  }
  auto rest = det.flush();
  all.insert(all.end(), rest.begin(), rest.end());
  return all;
}

namespace io {
namespace {

[[noreturn]] void wav_fail(std::string_view source, std::size_t offset, std::string_view msg) {
  throw Error(ErrorCode::DecodeError,
              std::string(source) + ": offset " + std::to_string(offset) + ": " + std::string(msg));
}

std::uint32_t le32(std::string_view b, std::size_t at) {
  return static_cast<std::uint8_t>(b[at]) | static_cast<std::uint8_t>(b[at + 1]) << 8 |
         static_cast<std::uint8_t>(b[at + 2]) << 16 |
         static_cast<std::uint32_t>(static_cast<std::uint8_t>(b[at + 3])) << 24;
}

std::uint16_t le16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<std::uint8_t>(b[at]) |
                                    static_cast<std::uint8_t>(b[at + 1]) << 8);
}

void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

}  // namespace

AudioChunk decode_wav(std::string_view bytes, std::string_view source) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE") {
    wav_fail(source, 0, "not a RIFF/WAVE file");
  }
  std::size_t pos = 12;
  bool have_fmt = false;
  std::uint32_t rate = 0;
  while (pos + 8 <= bytes.size()) {
    const std::string_view id = bytes.substr(pos, 4);
    const std::uint32_t size = le32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) wav_fail(source, pos, "chunk runs past end of file");
    if (id == "fmt ") {
      if (size < 16) wav_fail(source, pos, "fmt chunk too short");
      const std::uint16_t format = le16(bytes, body);
      const std::uint16_t channels = le16(bytes, body + 2);
      rate = le32(bytes, body + 4);
      const std::uint16_t bits = le16(bytes, body + 14);
      if (format != 1) wav_fail(source, body, "only PCM (format 1) is supported");
      if (channels != 1) wav_fail(source, body + 2, "only mono is supported");
      if (bits != 16) wav_fail(source, body + 14, "only 16-bit samples are supported");
      if (rate == 0) wav_fail(source, body + 4, "sample rate is zero");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) wav_fail(source, pos, "data chunk before fmt chunk");
      if (size % 2 != 0) wav_fail(source, pos + 4, "odd data size for 16-bit samples");
      AudioChunk out;
      out.sample_rate = rate;
      out.samples.resize(size / 2);
      for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(le16(bytes, body + 2 * i));
        out.samples[i] = v / 32768.0;
      }
      return out;
    }
    pos = body + size + (size & 1);
  }
  wav_fail(source, pos, "no data chunk");
}

AudioChunk read_wav(const std::filesystem::path& path) {
  return decode_wav(read_file(path), path.string());
}

std::string encode_wav(const AudioChunk& chunk) {
  const auto rate = static_cast<std::uint32_t>(std::lround(chunk.sample_rate));
  const auto data_bytes = static_cast<std::uint32_t>(2 * chunk.samples.size());
  std::string s;
  s.reserve(44 + data_bytes);
  s += "RIFF";
  put32(s, 36 + data_bytes);
  s += "WAVEfmt ";
  put32(s, 16);
  put16(s, 1);
  put16(s, 1);
  put32(s, rate);
  put32(s, rate * 2);
  put16(s, 2);
  put16(s, 16);
  s += "data";
  put32(s, data_bytes);
  for (double x : chunk.samples) {
    const double c = std::clamp(x, -1.0, 1.0);
    const long q = std::clamp(std::lround(c * 32768.0), -32768L, 32767L);
    put16(s, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return s;
}

void write_wav(const std::filesystem::path& path, const AudioChunk& chunk) {
  write_file(path, encode_wav(chunk));
}

}  // namespace io
}  // namespace vip
