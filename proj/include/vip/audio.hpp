#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vip {

// Mono samples in [-1, 1]. Doubles so filtering stays linear to ~1e-15.
struct AudioChunk {
  std::vector<double> samples;
  double sample_rate = 16000.0;
  double start_time_ms = 0.0;

  double duration_ms() const noexcept { return 1000.0 * samples.size() / sample_rate; }
  double end_time_ms() const noexcept { return start_time_ms + duration_ms(); }
};

// Normalised biquad, a0 == 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
};

// Bilinear-transform band-pass with unit gain at f0 = sqrt(f_low * f_high),
// Q = f0 / (f_high - f_low). Throws BadParam unless
// 0 < f_low < f_high < sample_rate / 2.
Biquad design_band_pass(double f_low, double f_high, double sample_rate);

// Direct form II transposed; state carries across process() calls.
class BandPassFilter {
 public:
  BandPassFilter(double f_low, double f_high, double sample_rate);

  AudioChunk process(const AudioChunk& chunk);
  void reset() noexcept { z1_ = z2_ = 0.0; }
  const Biquad& coefficients() const noexcept { return q_; }
  double sample_rate() const noexcept { return rate_; }

 private:
  Biquad q_;
  double rate_;
  double z1_ = 0.0;
  double z2_ = 0.0;
};

// One chunk through a fresh filter at the chunk's own rate.
AudioChunk band_pass(const AudioChunk& chunk, double f_low, double f_high);

struct ClickParams {
  double f_low = 800.0;
  double f_high = 4000.0;
  double level_threshold = 0.15;  // RMS
  std::size_t window = 256;       // samples
  double debounce_ms = 150.0;

  // Throws BadParam when the band does not fit below sample_rate / 2, the
  // threshold leaves [0, 1], window is 0 or debounce is negative.
  void validate(double sample_rate) const;
};

struct ClickEvent {
  double time_ms = 0.0;  // start of the first window of the run
  double peak_level = 0.0;

  friend bool operator==(const ClickEvent&, const ClickEvent&) = default;
};

// RMS over non-overlapping windows of an already filtered stream. Windows are
// counted from the first chunk's start time and carry across chunks. A click
// opens at the first window with RMS >= threshold; later windows starting at
// most debounce_ms after it are absorbed. A click is reported once a window
// past its debounce span has been seen, or on flush().
class ClickDetector {
 public:
  ClickDetector(ClickParams params, double sample_rate);

  std::vector<ClickEvent> push(const AudioChunk& filtered);
  std::vector<ClickEvent> flush();

  const ClickParams& params() const noexcept { return params_; }

 private:
  void close_window(std::vector<ClickEvent>& out);

  ClickParams params_;
  double rate_;
  std::optional<double> origin_ms_;
  std::size_t windows_done_ = 0;
  std::size_t filled_ = 0;
  double sum_sq_ = 0.0;
  std::optional<ClickEvent> open_;
};

// Whole stream at once: filters nothing, flushes at the end.
std::vector<ClickEvent> detect_clicks(std::span<const AudioChunk> filtered,
                                      const ClickParams& params);

namespace io {

// 16-bit PCM mono RIFF/WAVE. Samples map to [-1, 1) by /32768.
AudioChunk decode_wav(std::string_view bytes, std::string_view source = "<memory>");
AudioChunk read_wav(const std::filesystem::path& path);
// Clamps to [-1, 1] and rounds to the nearest 16-bit step.
std::string encode_wav(const AudioChunk& chunk);
void write_wav(const std::filesystem::path& path, const AudioChunk& chunk);

}  // namespace io
}  // namespace vip
