#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mixgt/core_types.hpp"

namespace mixgt {

// MPV ensemble container:
//   offset 0   "MPV1"
//   offset 4   M, H, W, D as uint32 little-endian
//   offset 20  M*H*W*D float32 little-endian, ordered [m][h][w][d]
inline constexpr std::size_t kVolumeHeaderSize = 20;

void write_volume(const std::filesystem::path& path, const EnsembleVolumes& ensemble);
EnsembleVolumes read_volume(const std::filesystem::path& path);

/// In-memory forms of the above, used by the file functions and the fuzz tests.
std::vector<std::uint8_t> encode_volume(const EnsembleVolumes& ensemble);
EnsembleVolumes decode_volume(std::span<const std::uint8_t> bytes);

/// Grayscale PFM ("Pf"), scale -1.0, rows stored bottom-up. Invalid pixels
/// are written as +inf. A positive scale on read means big-endian samples.
void write_pfm(const std::filesystem::path& path, const DisparityMap& map);
DisparityMap read_pfm(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_pfm(const DisparityMap& map);
DisparityMap decode_pfm(std::span<const std::uint8_t> bytes);

/// Single-channel image with samples scaled to [0, 1].
struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> pixels;

  double at(std::size_t y, std::size_t x) const { return pixels[y * width + x]; }
  double& at(std::size_t y, std::size_t x) { return pixels[y * width + x]; }
};

/// Binary PGM ("P5"). Samples are quantized to maxval (255 or 65535; 16-bit
/// samples are big-endian).
void write_pgm(const std::filesystem::path& path, const GrayImage& image,
               std::uint16_t maxval = 255);
GrayImage read_pgm(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image, std::uint16_t maxval = 255);
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);

/// Per-pixel mode diagnostics.
struct PixelModes {
  std::size_t y = 0;
  std::size_t x = 0;
  GroundTruthMixture mixture;
};

struct ModesDocument {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t depth = 0;
  std::vector<PixelModes> pixels;
};

/// Keys are written in the fixed order H, W, D, pixels and y, x,
/// noise_count, label_cluster, modes; reals carry 17 significant digits.
void write_modes_json(const std::filesystem::path& path, const ModesDocument& doc);
std::string encode_modes_json(const ModesDocument& doc);
ModesDocument read_modes_json(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace mixgt
