#include "vip/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "vip/error.hpp"

namespace vip::io {
namespace {

[[noreturn]] void decode_fail(std::string_view source, std::size_t offset, std::string_view msg) {
  throw Error(ErrorCode::DecodeError,
              std::string(source) + ": offset " + std::to_string(offset) + ": " + std::string(msg));
}

struct NetpbmHeader {
  int width = 0;
  int height = 0;
  std::size_t data_offset = 0;
};

// Parses "<magic> <w> <h> <maxval><single whitespace>" with '#' comments.
NetpbmHeader parse_header(std::string_view bytes, std::string_view magic, std::string_view source) {
  if (bytes.substr(0, 2) != magic) decode_fail(source, 0, "expected magic " + std::string(magic));
  std::size_t pos = 2;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&](std::string_view what) {
    skip_space();
    const std::size_t start = pos;
    long value = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1'000'000) decode_fail(source, start, std::string(what) + " too large");
      ++pos;
    }
    if (pos == start) decode_fail(source, start, "expected " + std::string(what));
    return static_cast<int>(value);
  };
  NetpbmHeader h;
  h.width = read_int("width");
  h.height = read_int("height");
  const std::size_t maxval_at = pos;
  const int maxval = read_int("maxval");
  if (h.width < 1 || h.height < 1) decode_fail(source, 2, "dimensions must be positive");
  if (maxval != 255) decode_fail(source, maxval_at, "only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    decode_fail(source, pos, "missing whitespace after header");
  }
  h.data_offset = pos + 1;
  return h;
}

std::string header(std::string_view magic, int w, int h) {
  return std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

std::string encode_ppm(const Frame& frame) {
  std::string out = header("P6", frame.width(), frame.height());
  const auto bytes = frame.bytes();
  out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return out;
}

Frame decode_ppm(std::string_view bytes, std::string_view source) {
  const NetpbmHeader h = parse_header(bytes, "P6", source);
  const std::size_t need = static_cast<std::size_t>(h.width) * h.height * 3;
  if (bytes.size() - h.data_offset < need) {
    decode_fail(source, bytes.size(), "truncated pixel data");
  }
  std::vector<Rgb> pixels(static_cast<std::size_t>(h.width) * h.height);
  const char* data = bytes.data() + h.data_offset;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = {static_cast<std::uint8_t>(data[3 * i]), static_cast<std::uint8_t>(data[3 * i + 1]),
                 static_cast<std::uint8_t>(data[3 * i + 2])};
  }
  return Frame(h.width, h.height, std::move(pixels));
}

Frame read_ppm(const std::filesystem::path& path) {
  return decode_ppm(read_file(path), path.string());
}

void write_ppm(const std::filesystem::path& path, const Frame& frame) {
  write_file(path, encode_ppm(frame));
}

std::string encode_pgm(const BinaryMask& mask) {
  std::string out = header("P5", mask.width(), mask.height());
  const auto values = mask.values();
  out.append(reinterpret_cast<const char*>(values.data()), values.size());
  return out;
}

BinaryMask decode_pgm(std::string_view bytes, std::string_view source) {
  const NetpbmHeader h = parse_header(bytes, "P5", source);
  const std::size_t need = static_cast<std::size_t>(h.width) * h.height;
  if (bytes.size() - h.data_offset < need) {
    decode_fail(source, bytes.size(), "truncated pixel data");
  }
  BinaryMask mask(h.width, h.height);
  auto values = mask.values();
  for (std::size_t i = 0; i < need; ++i) {
    values[i] = bytes[h.data_offset + i] != 0 ? BinaryMask::kOn : 0;
  }
  return mask;
}

BinaryMask read_pgm(const std::filesystem::path& path) {
  return decode_pgm(read_file(path), path.string());
}

void write_pgm(const std::filesystem::path& path, const BinaryMask& mask) {
  write_file(path, encode_pgm(mask));
}

std::string encode_png(const Frame& frame) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.width());
  image.height = static_cast<png_uint_32>(frame.height());
  image.format = PNG_FORMAT_RGB;
  const auto bytes = frame.bytes();
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, bytes.data(), 0, nullptr)) {
    throw Error(ErrorCode::Io, std::string("png sizing failed: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, bytes.data(), 0, nullptr)) {
    throw Error(ErrorCode::Io, std::string("png encoding failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

std::string stream_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu.ppm", index);
  return buf;
}

std::vector<StreamEntry> read_manifest(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestName;
  if (!std::filesystem::exists(manifest_path)) {
    if (std::filesystem::is_directory(dir) && std::filesystem::is_empty(dir)) return {};
    throw Error(ErrorCode::Io, "missing " + manifest_path.string());
  }
  const std::string text = read_file(manifest_path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    decode_fail(manifest_path.string(), e.byte, "invalid JSON");
  }
  std::vector<StreamEntry> out;
  if (!doc.contains("frames") || !doc["frames"].is_array()) {
    decode_fail(manifest_path.string(), 0, "manifest needs a \"frames\" array");
  }
  for (const auto& entry : doc["frames"]) {
    if (!entry.is_object() || !entry.contains("file") || !entry["file"].is_string() ||
        !entry.contains("timestamp_ms") || !entry["timestamp_ms"].is_number_integer()) {
      decode_fail(manifest_path.string(), 0,
                  "frame entry " + std::to_string(out.size()) + " needs file and timestamp_ms");
    }
    StreamEntry e{entry["file"].get<std::string>(), entry["timestamp_ms"].get<std::int64_t>()};
    if (!out.empty() && e.timestamp_ms <= out.back().timestamp_ms) {
      decode_fail(manifest_path.string(), 0,
                  "timestamps must strictly increase (entry " + std::to_string(out.size()) + ")");
    }
    out.push_back(std::move(e));
  }
  return out;
}

void write_frame_stream(const std::filesystem::path& dir, std::span<const Frame> frames) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json manifest;
  manifest["frames"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string name = stream_file_name(i);
    write_ppm(dir / name, frames[i]);
    manifest["frames"].push_back({{"file", name}, {"timestamp_ms", frames[i].timestamp_ms()}});
  }
  write_file(dir / kManifestName, manifest.dump(2) + "\n");
}

}  // namespace vip::io
