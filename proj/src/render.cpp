#include "n2ns/render.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace n2ns {

namespace {

void put_u32(std::vector<unsigned char>& out, uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

void put_chunk(std::vector<unsigned char>& out, const char type[4],
               const std::vector<unsigned char>& data) {
  put_u32(out, static_cast<uint32_t>(data.size()));
  const size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uint32_t crc = static_cast<uint32_t>(
      ::crc32(0L, out.data() + crc_start, static_cast<uInt>(4 + data.size())));
  put_u32(out, crc);
}

void write_png(const std::string& path, int width, int height, int channels,
               const std::vector<unsigned char>& pixels) {
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<size_t>(height) * (1 + static_cast<size_t>(width) * channels));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);  // filter: none
    const auto* row = pixels.data() + static_cast<size_t>(y) * width * channels;
    raw.insert(raw.end(), row, row + static_cast<size_t>(width) * channels);
  }
  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw std::runtime_error("png: deflate failed");
  comp.resize(comp_len);

  std::vector<unsigned char> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<unsigned char> ihdr;
  put_u32(ihdr, static_cast<uint32_t>(width));
  put_u32(ihdr, static_cast<uint32_t>(height));
  ihdr.push_back(8);                                  // bit depth
  ihdr.push_back(channels == 1 ? 0 : 2);              // grayscale | truecolor
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", comp);
  put_chunk(out, "IEND", {});

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
}

}  // namespace

void render_png(const std::string& path, const SeismicSection& section,
                double clip_percentile, Colormap cmap) {
  section.validate();
  if (clip_percentile <= 0.0 || clip_percentile > 100.0)
    throw std::invalid_argument("clip percentile must be in (0, 100]");

  std::vector<double> mags(section.data.size());
  for (size_t i = 0; i < mags.size(); ++i) mags[i] = std::fabs(section.data[i]);
  std::sort(mags.begin(), mags.end());
  const size_t idx = std::min(
      mags.size() - 1,
      static_cast<size_t>(std::llround(clip_percentile / 100.0 * (mags.size() - 1))));
  const double clip = mags[idx];

  const bool constant =
      *std::max_element(section.data.begin(), section.data.end()) ==
      *std::min_element(section.data.begin(), section.data.end());

  const int channels = (cmap == Colormap::gray) ? 1 : 3;
  std::vector<unsigned char> pixels(section.data.size() * channels);
  for (int i = 0; i < section.m; ++i)
    for (int j = 0; j < section.n; ++j) {
      double t = 0.5;
      if (!constant && clip > 0.0)
        t = std::clamp(section.at(i, j), -clip, clip) / clip * 0.5 + 0.5;
      const size_t p = (static_cast<size_t>(i) * section.n + j) * channels;
      if (cmap == Colormap::gray) {
        pixels[p] = static_cast<unsigned char>(std::lround(t * 255.0));
      } else {
        // diverging blue (negative) - white - red (positive)
        const double s = 2.0 * std::fabs(t - 0.5);
        const auto chan = [](double v) {
          return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        };
        if (t < 0.5) {
          pixels[p] = chan(1.0 - s);
          pixels[p + 1] = chan(1.0 - s);
          pixels[p + 2] = 255;
        } else {
          pixels[p] = 255;
          pixels[p + 1] = chan(1.0 - s);
          pixels[p + 2] = chan(1.0 - s);
        }
      }
    }
  write_png(path, section.n, section.m, channels, pixels);
}

}  // namespace n2ns
