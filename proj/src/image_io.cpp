#include "alrs/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "alrs/error.hpp"

namespace alrs {
namespace {

std::vector<unsigned char> readAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("unreadable file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool isPng(const std::vector<unsigned char>& bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

// Skips whitespace and '#' comments in a PNM header.
std::size_t skipPnmSpace(const std::vector<unsigned char>& b, std::size_t pos) {
  while (pos < b.size()) {
    if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(b[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  return pos;
}

long readPnmInt(const std::vector<unsigned char>& b, std::size_t& pos) {
  pos = skipPnmSpace(b, pos);
  long v = 0;
  std::size_t digits = 0;
  while (pos < b.size() && std::isdigit(b[pos])) {
    v = v * 10 + (b[pos] - '0');
    if (v > 1'000'000) throw IoError("unreadable file: PGM header value too large");
    ++pos;
    ++digits;
  }
  if (digits == 0) throw IoError("unreadable file: malformed PGM header");
  return v;
}

GrayImage decodePgm(const std::vector<unsigned char>& b) {
  std::size_t pos = 2;
  const long w = readPnmInt(b, pos);
  const long h = readPnmInt(b, pos);
  const long maxval = readPnmInt(b, pos);
  if (w < 1 || h < 1) throw IoError("zero-dimension image");
  if (maxval < 1 || maxval > 255) throw IoError("unsupported format: PGM maxval must be in 1..255");
  if (pos >= b.size() || !std::isspace(b[pos])) throw IoError("unreadable file: malformed PGM header");
  ++pos;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (b.size() - pos < n) throw IoError("unreadable file: truncated PGM data");
  std::vector<double> data(n);
  for (std::size_t i = 0; i < n; ++i) data[i] = static_cast<double>(b[pos + i]) / static_cast<double>(maxval);
  return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

GrayImage decodePng(const std::vector<unsigned char>& bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw IoError(std::string("unreadable file: ") + image.message);
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw IoError("zero-dimension image");
  }
  const bool colour = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = colour ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = colour ? 3 : 1;
  std::vector<png_byte> raw(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError("unreadable file: " + msg);
  }
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  std::vector<double> data(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (channels == 1) {
      data[i] = raw[i] / 255.0;
    } else {
      const double sum = raw[3 * i] + raw[3 * i + 1] + raw[3 * i + 2];
      data[i] = sum / (3.0 * 255.0);
    }
  }
  return GrayImage(static_cast<int>(image.width), static_cast<int>(image.height), std::move(data));
}

void writePng(const std::filesystem::path& path, int w, int h, bool rgb, const std::vector<png_byte>& pixels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = rgb ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels.data(), 0, nullptr))
    throw IoError("cannot write " + path.string() + ": " + image.message);
}

}  // namespace

GrayImage loadImage(const std::filesystem::path& path) {
  const auto bytes = readAll(path);
  if (bytes.empty()) throw IoError("unreadable file: empty " + path.string());
  if (isPng(bytes)) return decodePng(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decodePgm(bytes);
  throw IoError("unsupported format: " + path.string());
}

void savePng(const GrayImage& img, const std::filesystem::path& path) {
  std::vector<png_byte> px(img.size());
  const auto data = img.data();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<png_byte>(std::lround(data[i] * 255.0));
  writePng(path, img.width(), img.height(), false, px);
}

RgbImage RgbImage::fromGray(const GrayImage& img) {
  RgbImage out(img.width(), img.height());
  const auto data = img.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto v = static_cast<std::uint8_t>(std::lround(data[i] * 255.0));
    out.pixels[3 * i] = out.pixels[3 * i + 1] = out.pixels[3 * i + 2] = v;
  }
  return out;
}

void RgbImage::set(int x, int y, std::array<std::uint8_t, 3> rgb) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
  pixels[i] = rgb[0];
  pixels[i + 1] = rgb[1];
  pixels[i + 2] = rgb[2];
}

void savePng(const RgbImage& img, const std::filesystem::path& path) {
  writePng(path, img.width, img.height, true, img.pixels);
}

}  // namespace alrs
