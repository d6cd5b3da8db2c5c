#include "mixgt/io_formats.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <regex>
#include <string>
#include <string_view>

#include <json.hpp>

namespace mixgt {
namespace {

constexpr char kVolumeMagic[4] = {'M', 'P', 'V', '1'};
// Largest payload the reader accepts (16 GiB); guards the size arithmetic.
constexpr std::uint64_t kMaxPayloadBytes = std::uint64_t{1} << 34;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes[offset + i]} << (8 * i);
  return v;
}

void put_f32_le(std::vector<std::uint8_t>& out, float f) {
  put_u32(out, std::bit_cast<std::uint32_t>(f));
}

float get_f32(std::span<const std::uint8_t> bytes, std::size_t offset, bool little_endian) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    const int shift = little_endian ? 8 * i : 8 * (3 - i);
    v |= std::uint32_t{bytes[offset + i]} << shift;
  }
  return std::bit_cast<float>(v);
}

std::uint32_t checked_dim(std::size_t v, const char* what) {
  if (v == 0 || v > std::numeric_limits<std::uint32_t>::max()) {
    throw DataError(std::string(what) + " does not fit the file header");
  }
  return static_cast<std::uint32_t>(v);
}

// Reads one '\n'-terminated header line starting at `pos`; advances past it.
std::string_view header_line(std::span<const std::uint8_t> bytes, std::size_t& pos,
                             std::size_t max_len = 64) {
  const std::size_t start = pos;
  while (pos < bytes.size() && bytes[pos] != '\n') {
    if (pos - start >= max_len) throw FormatError("header line too long", start);
    ++pos;
  }
  if (pos >= bytes.size()) throw FormatError("truncated header", bytes.size());
  std::string_view line(reinterpret_cast<const char*>(bytes.data()) + start, pos - start);
  ++pos;
  return line;
}

std::pair<std::size_t, std::size_t> parse_size_line(std::string_view line, std::size_t offset) {
  static const std::regex kSize("([1-9][0-9]{0,8}) ([1-9][0-9]{0,8}) ?");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(line.begin(), line.end(), m, kSize)) {
    throw FormatError("malformed image size line", offset);
  }
  return {std::stoul(m[1].str()), std::stoul(m[2].str())};
}

void check_payload(std::size_t available, std::uint64_t expected, std::size_t offset) {
  if (available < expected) {
    throw FormatError("truncated payload: expected " + std::to_string(expected) +
                          " bytes, found " + std::to_string(available),
                      offset + available);
  }
  if (available > expected) {
    throw FormatError("unexpected trailing data after payload", offset + expected);
  }
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// MPV

std::vector<std::uint8_t> encode_volume(const EnsembleVolumes& ensemble) {
  ensemble.validate();
  std::vector<std::uint8_t> out;
  const std::size_t values = ensemble.members.size() * ensemble.members.front().data().size();
  out.reserve(kVolumeHeaderSize + 4 * values);
  out.insert(out.end(), std::begin(kVolumeMagic), std::end(kVolumeMagic));
  put_u32(out, checked_dim(ensemble.members.size(), "member count"));
  put_u32(out, checked_dim(ensemble.height(), "height"));
  put_u32(out, checked_dim(ensemble.width(), "width"));
  put_u32(out, checked_dim(ensemble.depth(), "depth"));
  for (const ProbabilityVolume& member : ensemble.members) {
    for (float v : member.data()) put_f32_le(out, v);
  }
  return out;
}

EnsembleVolumes decode_volume(std::span<const std::uint8_t> bytes) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (i >= bytes.size()) throw FormatError("truncated header", bytes.size());
    if (bytes[i] != static_cast<std::uint8_t>(kVolumeMagic[i])) {
      throw FormatError("bad magic, expected MPV1", i);
    }
  }
  if (bytes.size() < kVolumeHeaderSize) throw FormatError("truncated header", bytes.size());

  std::uint64_t dims[4];
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < 4; ++i) {
    dims[i] = get_u32(bytes, 4 + 4 * i);
    if (dims[i] == 0) throw FormatError("zero dimension in header", 4 + 4 * i);
    if (count > kMaxPayloadBytes / 4 / dims[i]) {
      throw FormatError("dimensions overflow the payload limit", 4 + 4 * i);
    }
    count *= dims[i];
  }
  check_payload(bytes.size() - kVolumeHeaderSize, 4 * count, kVolumeHeaderSize);

  const std::size_t per_member = static_cast<std::size_t>(dims[1] * dims[2] * dims[3]);
  EnsembleVolumes ensemble;
  ensemble.members.reserve(dims[0]);
  std::size_t offset = kVolumeHeaderSize;
  for (std::uint64_t m = 0; m < dims[0]; ++m) {
    std::vector<float> data(per_member);
    for (float& v : data) {
      v = get_f32(bytes, offset, true);
      offset += 4;
    }
    ensemble.members.emplace_back(dims[1], dims[2], dims[3], std::move(data));
  }
  return ensemble;
}

void write_volume(const std::filesystem::path& path, const EnsembleVolumes& ensemble) {
  write_file_bytes(path, encode_volume(ensemble));
}

EnsembleVolumes read_volume(const std::filesystem::path& path) {
  return decode_volume(read_file_bytes(path));
}

// ---------------------------------------------------------------------------
// PFM

std::vector<std::uint8_t> encode_pfm(const DisparityMap& map) {
  checked_dim(map.width(), "width");
  checked_dim(map.height(), "height");
  const std::string header =
      "Pf\n" + std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n-1.0\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + 4 * map.values().size());
  for (std::size_t row = map.height(); row-- > 0;) {
    for (std::size_t x = 0; x < map.width(); ++x) {
      const float v = map.at(row, x);
      put_f32_le(out, DisparityMap::is_valid_value(v) ? v : DisparityMap::kInvalid);
    }
  }
  return out;
}

DisparityMap decode_pfm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const std::string_view kind = header_line(bytes, pos);
  if (kind == "PF") throw UnsupportedFormatError("color PFM is not supported", 0);
  if (kind != "Pf") throw FormatError("not a grayscale PFM", 0);

  const std::size_t size_offset = pos;
  const auto [width, height] = parse_size_line(header_line(bytes, pos), size_offset);

  const std::size_t scale_offset = pos;
  const std::string_view scale = header_line(bytes, pos);
  static const std::regex kScale("-?1(\\.0+)?");
  if (!std::regex_match(scale.begin(), scale.end(), kScale)) {
    throw FormatError("unsupported PFM scale '" + std::string(scale) + "'", scale_offset);
  }
  const bool little_endian = scale.front() == '-';

  check_payload(bytes.size() - pos, std::uint64_t{4} * width * height, pos);
  DisparityMap map(height, width);
  for (std::size_t row = height; row-- > 0;) {
    for (std::size_t x = 0; x < width; ++x) {
      map.at(row, x) = get_f32(bytes, pos, little_endian);
      pos += 4;
    }
  }
  return map;
}

void write_pfm(const std::filesystem::path& path, const DisparityMap& map) {
  write_file_bytes(path, encode_pfm(map));
}

DisparityMap read_pfm(const std::filesystem::path& path) {
  return decode_pfm(read_file_bytes(path));
}

// ---------------------------------------------------------------------------
// PGM

std::vector<std::uint8_t> encode_pgm(const GrayImage& image, std::uint16_t maxval) {
  if (maxval != 255 && maxval != 65535) throw InvalidParameterError("PGM maxval must be 255 or 65535");
  if (image.pixels.size() != image.width * image.height) throw DataError("image size mismatch");
  checked_dim(image.width, "width");
  checked_dim(image.height, "height");
  const std::string header = "P5\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n" + std::to_string(maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (double v : image.pixels) {
    const auto q = static_cast<std::uint32_t>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
    if (maxval > 255) out.push_back(static_cast<std::uint8_t>(q >> 8));
    out.push_back(static_cast<std::uint8_t>(q & 0xff));
  }
  return out;
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const std::string_view kind = header_line(bytes, pos);
  if (kind == "P2") throw UnsupportedFormatError("ASCII PGM is not supported", 0);
  if (kind != "P5") throw FormatError("not a binary PGM", 0);

  std::size_t line_offset = pos;
  std::string_view line = header_line(bytes, pos, 256);
  while (!line.empty() && line.front() == '#') {
    line_offset = pos;
    line = header_line(bytes, pos, 256);
  }
  const auto [width, height] = parse_size_line(line, line_offset);

  const std::size_t maxval_offset = pos;
  const std::string_view maxval_text = header_line(bytes, pos);
  static const std::regex kMaxval("[1-9][0-9]{0,4}");
  if (!std::regex_match(maxval_text.begin(), maxval_text.end(), kMaxval)) {
    throw FormatError("malformed maxval", maxval_offset);
  }
  const unsigned long maxval = std::stoul(std::string(maxval_text));
  // Only full bit depths (2^n - 1) are accepted.
  if (maxval > 65535 || (maxval & (maxval + 1)) != 0) {
    throw FormatError("unsupported maxval " + std::string(maxval_text), maxval_offset);
  }
  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;

  check_payload(bytes.size() - pos, std::uint64_t{sample_bytes} * width * height, pos);
  GrayImage image{height, width, std::vector<double>(width * height)};
  for (double& v : image.pixels) {
    unsigned sample = bytes[pos++];
    if (sample_bytes == 2) sample = (sample << 8) | bytes[pos++];
    if (sample > maxval) throw FormatError("sample exceeds maxval", pos - sample_bytes);
    v = static_cast<double>(sample) / static_cast<double>(maxval);
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image, std::uint16_t maxval) {
  write_file_bytes(path, encode_pgm(image, maxval));
}

GrayImage read_pgm(const std::filesystem::path& path) {
  return decode_pgm(read_file_bytes(path));
}

// ---------------------------------------------------------------------------
// Mode diagnostics JSON

std::string encode_modes_json(const ModesDocument& doc) {
  std::string out = "{\"H\":" + std::to_string(doc.height) + ",\"W\":" +
                    std::to_string(doc.width) + ",\"D\":" + std::to_string(doc.depth) +
                    ",\"pixels\":[";
  for (std::size_t i = 0; i < doc.pixels.size(); ++i) {
    const PixelModes& px = doc.pixels[i];
    if (i > 0) out += ',';
    out += "{\"y\":" + std::to_string(px.y) + ",\"x\":" + std::to_string(px.x) +
           ",\"noise_count\":" + std::to_string(px.mixture.noise_count) + ",\"label_cluster\":";
    out += px.mixture.label_cluster_index ? std::to_string(*px.mixture.label_cluster_index)
                                          : std::string("null");
    out += ",\"modes\":[";
    for (std::size_t k = 0; k < px.mixture.modes.size(); ++k) {
      const LaplaceMode& m = px.mixture.modes[k];
      if (k > 0) out += ',';
      out += "{\"w\":" + format_real(m.w) + ",\"mu\":" + format_real(m.mu) +
             ",\"b\":" + format_real(m.b) + "}";
    }
    out += "]}";
  }
  out += "]}\n";
  return out;
}

void write_modes_json(const std::filesystem::path& path, const ModesDocument& doc) {
  const std::string text = encode_modes_json(doc);
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

ModesDocument read_modes_json(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
    ModesDocument doc;
    doc.height = j.at("H").get<std::size_t>();
    doc.width = j.at("W").get<std::size_t>();
    doc.depth = j.at("D").get<std::size_t>();
    for (const nlohmann::json& p : j.at("pixels")) {
      PixelModes px;
      px.y = p.at("y").get<std::size_t>();
      px.x = p.at("x").get<std::size_t>();
      px.mixture.noise_count = p.at("noise_count").get<std::size_t>();
      if (!p.at("label_cluster").is_null()) {
        px.mixture.label_cluster_index = p.at("label_cluster").get<std::size_t>();
      }
      for (const nlohmann::json& m : p.at("modes")) {
        px.mixture.modes.push_back(
            {m.at("w").get<double>(), m.at("mu").get<double>(), m.at("b").get<double>()});
      }
      doc.pixels.push_back(std::move(px));
    }
    return doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what(), e.byte);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("unexpected JSON layout: ") + e.what(), 0);
  }
}

}  // namespace mixgt
