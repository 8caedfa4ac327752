#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "alrs/image.hpp"

namespace alrs {

/// Reads an 8-bit PNG (gray, gray+alpha, RGB, RGBA) or a binary P5 PGM.
/// Colour input is reduced to the mean of its R, G, B channels; values are
/// divided by the maximum sample value (255 for PNG). Throws IoError.
GrayImage loadImage(const std::filesystem::path& path);

/// 8-bit grayscale PNG, values round(v * 255).
void savePng(const GrayImage& img, const std::filesystem::path& path);

/// Interleaved 8-bit RGB raster for overlays.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}
  static RgbImage fromGray(const GrayImage& img);
  void set(int x, int y, std::array<std::uint8_t, 3> rgb);
};

void savePng(const RgbImage& img, const std::filesystem::path& path);

}  // namespace alrs
