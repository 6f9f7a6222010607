#include "depthseg/pgm_io.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <limits>

namespace depthseg {
namespace {

struct Header {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t payload_offset = 0;
};

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  int read_uint(const char* field) {
    skip_space_and_comments();
    long long v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > std::numeric_limits<int>::max()) {
        throw PgmError(PgmError::Kind::kMalformedHeader,
                       std::string("malformed header: ") + field + " too large");
      }
      ++pos_;
      ++digits;
    }
    if (digits == 0) {
      throw PgmError(PgmError::Kind::kMalformedHeader,
                     std::string("malformed header: missing ") + field);
    }
    return static_cast<int>(v);
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

Header parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw PgmError(PgmError::Kind::kMalformedHeader, "malformed header: magic is not P5");
  }
  HeaderReader r(bytes);
  r.advance(2);
  Header h;
  h.width = r.read_uint("width");
  h.height = r.read_uint("height");
  h.maxval = r.read_uint("maxval");
  // Exactly one whitespace byte separates maxval from the raster.
  if (r.pos() >= bytes.size() || !std::isspace(bytes[r.pos()])) {
    throw PgmError(PgmError::Kind::kMalformedHeader,
                   "malformed header: no separator before raster");
  }
  h.payload_offset = r.pos() + 1;
  if (h.width < 1 || h.height < 1) {
    throw PgmError(PgmError::Kind::kMalformedHeader, "malformed header: zero dimension");
  }
  return h;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) {
    throw PgmError(PgmError::Kind::kOpen, "cannot open " + path.string());
  }
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PgmError(PgmError::Kind::kWrite, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PgmError(PgmError::Kind::kWrite, "write failed: " + path.string());
}

std::vector<std::uint8_t> header_bytes(int width, int height, int maxval) {
  const std::string h = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
                        std::to_string(maxval) + "\n";
  return std::vector<std::uint8_t>(h.begin(), h.end());
}

}  // namespace

DepthFrame decode_depth_pgm(std::span<const std::uint8_t> bytes) {
  const Header h = parse_header(bytes);
  if (h.maxval != 65535) {
    throw PgmError(PgmError::Kind::kUnsupportedMaxval,
                   "unsupported maxval " + std::to_string(h.maxval) + " (need 65535)");
  }
  const std::size_t n = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  if (bytes.size() - h.payload_offset < 2 * n) {
    throw PgmError(PgmError::Kind::kTruncatedPayload,
                   "truncated payload: expected " + std::to_string(2 * n) + " bytes, got " +
                       std::to_string(bytes.size() - h.payload_offset));
  }
  std::vector<Depth> data(n);
  const std::uint8_t* p = bytes.data() + h.payload_offset;
  for (std::size_t i = 0; i < n; ++i) {
    data[i] = static_cast<Depth>((p[2 * i] << 8) | p[2 * i + 1]);
  }
  return DepthFrame(h.width, h.height, std::move(data));
}

std::vector<std::uint8_t> encode_depth_pgm(const DepthFrame& frame) {
  auto out = header_bytes(frame.width(), frame.height(), 65535);
  out.reserve(out.size() + 2 * frame.size());
  for (Depth v : frame.data()) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

DepthFrame load_depth_frame(const std::filesystem::path& path) {
  return decode_depth_pgm(read_file(path));
}

void save_depth_frame(const DepthFrame& frame, const std::filesystem::path& path) {
  write_file(path, encode_depth_pgm(frame));
}

void save_gray_pgm(const GrayImage& image, const std::filesystem::path& path) {
  if (image.width < 1 || image.height < 1 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw std::invalid_argument("gray image dimensions do not match pixel buffer");
  }
  auto out = header_bytes(image.width, image.height, 255);
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  write_file(path, out);
}

GrayImage load_gray_pgm(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const Header h = parse_header(bytes);
  if (h.maxval != 255) {
    throw PgmError(PgmError::Kind::kUnsupportedMaxval,
                   "unsupported maxval " + std::to_string(h.maxval) + " (need 255)");
  }
  const std::size_t n = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  if (bytes.size() - h.payload_offset < n) {
    throw PgmError(PgmError::Kind::kTruncatedPayload, "truncated payload");
  }
  GrayImage img{h.width, h.height, {}};
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(h.payload_offset),
                    bytes.begin() + static_cast<std::ptrdiff_t>(h.payload_offset + n));
  return img;
}

void save_mask_pgm(const PixelMask& mask, const std::filesystem::path& path) {
  GrayImage img{mask.width(), mask.height(), {}};
  img.pixels.reserve(mask.size());
  for (auto b : mask.bits()) img.pixels.push_back(b ? 255 : 0);
  save_gray_pgm(img, path);
}

}  // namespace depthseg
