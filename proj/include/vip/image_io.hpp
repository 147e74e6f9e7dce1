#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vip/raster.hpp"

namespace vip::io {

// Binary PPM (P6, maxval 255). Decode errors report "<source>: offset N: ...".
std::string encode_ppm(const Frame& frame);
Frame decode_ppm(std::string_view bytes, std::string_view source = "<memory>");
Frame read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Frame& frame);

// Binary PGM (P5, maxval 255) holding a {0,255} mask. Nonzero bytes read as 255.
std::string encode_pgm(const BinaryMask& mask);
BinaryMask decode_pgm(std::string_view bytes, std::string_view source = "<memory>");
BinaryMask read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const BinaryMask& mask);

std::string encode_png(const Frame& frame);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// A frame stream is a directory of zero-padded numbered PPMs plus
// manifest.json: {"frames": [{"file": "000000.ppm", "timestamp_ms": 0}, ...]}.
struct StreamEntry {
  std::string file;  // relative to the stream directory
  std::int64_t timestamp_ms = 0;
};

inline constexpr std::string_view kManifestName = "manifest.json";

// Validates strictly increasing timestamps. A missing manifest in an empty
// directory reads as an empty stream.
std::vector<StreamEntry> read_manifest(const std::filesystem::path& dir);
void write_frame_stream(const std::filesystem::path& dir, std::span<const Frame> frames);

std::string stream_file_name(std::size_t index);

}  // namespace vip::io
