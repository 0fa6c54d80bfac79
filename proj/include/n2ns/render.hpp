#pragma once

#include <string>

#include "n2ns/section.hpp"

namespace n2ns {

enum class Colormap { gray, seismic };

// Amplitude-to-pixel rendering with a symmetric percentile clip.
// The image is n traces wide by m samples tall.
void render_png(const std::string& path, const SeismicSection& section,
                double clip_percentile = 99.0, Colormap cmap = Colormap::gray);

}  // namespace n2ns
