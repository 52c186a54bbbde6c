// Copyright 2026 The AttriKit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "attrikit/raster.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "attrikit/error.hpp"
#include "attrikit/util.hpp"

namespace attrikit {

Raster::Raster(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw ValidationError("raster dimensions must be positive");
  }
  pixels_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill[0];
    pixels_[i + 1] = fill[1];
    pixels_[i + 2] = fill[2];
  }
}

Rgb Raster::at(int x, int y) const {
  const std::size_t o = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {pixels_[o], pixels_[o + 1], pixels_[o + 2]};
}

void Raster::set(int x, int y, Rgb c) {
  const std::size_t o = (static_cast<std::size_t>(y) * width_ + x) * 3;
  pixels_[o] = c[0];
  pixels_[o + 1] = c[1];
  pixels_[o + 2] = c[2];
}

Raster Raster::crop(const Box& rect) const {
  const Box r = clip_and_crop_rect(rect, size());
  const int x0 = static_cast<int>(std::floor(r.x_min));
  const int y0 = static_cast<int>(std::floor(r.y_min));
  const int x1 = std::min(width_, static_cast<int>(std::ceil(r.x_max)));
  const int y1 = std::min(height_, static_cast<int>(std::ceil(r.y_max)));
  Raster out(std::max(1, x1 - x0), std::max(1, y1 - y0));
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out.set(x, y, at(x0 + x, y0 + y));
    }
  }
  return out;
}

void Raster::draw_rect(const Box& rect, Rgb color, int thickness) {
  const int x0 = static_cast<int>(std::floor(rect.x_min));
  const int y0 = static_cast<int>(std::floor(rect.y_min));
  const int x1 = static_cast<int>(std::ceil(rect.x_max)) - 1;
  const int y1 = static_cast<int>(std::ceil(rect.y_max)) - 1;
  auto plot = [&](int x, int y) {
    if (x >= 0 && y >= 0 && x < width_ && y < height_) set(x, y, color);
  };
  for (int t = 0; t < thickness; ++t) {
    for (int x = x0; x <= x1; ++x) {
      plot(x, y0 + t);
      plot(x, y1 - t);
    }
    for (int y = y0; y <= y1; ++y) {
      plot(x0 + t, y);
      plot(x1 - t, y);
    }
  }
}

std::string encode_ppm(const Raster& image) {
  std::string out = "P6\n" + std::to_string(image.width()) + " " +
                    std::to_string(image.height()) + "\n255\n";
  out.append(image.bytes().begin(), image.bytes().end());
  return out;
}

Raster decode_ppm(const std::string& data) {
  std::istringstream in(data);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (!in || magic != "P6" || maxval != 255 || w <= 0 || h <= 0) {
    throw ParseError("not a binary 8-bit PPM image");
  }
  in.get();  // single whitespace after the header
  const std::size_t offset = static_cast<std::size_t>(in.tellg());
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (data.size() < offset + need) throw ParseError("truncated PPM payload");
  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t o = offset + (static_cast<std::size_t>(y) * w + x) * 3;
      out.set(x, y,
              {static_cast<std::uint8_t>(data[o]),
               static_cast<std::uint8_t>(data[o + 1]),
               static_cast<std::uint8_t>(data[o + 2])});
    }
  }
  return out;
}

void write_ppm(const std::filesystem::path& path, const Raster& image) {
  write_file(path, encode_ppm(image));
}

Raster read_ppm(const std::filesystem::path& path) {
  try {
    return decode_ppm(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace attrikit
