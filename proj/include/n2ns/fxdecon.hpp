#pragma once

#include <optional>
#include <utility>

#include "n2ns/section.hpp"

namespace n2ns {

struct FxConfig {
  int window_length_samples = 64;
  double window_overlap = 0.5;  // fraction in [0, 0.9]
  int filter_length_traces = 4;
  double prewhitening = 0.01;
  std::optional<std::pair<double, double>> band_hz;  // process only this band if set

  void validate() const;
};

// f-x prediction filtering: per tapered time window, complex forward/backward
// linear prediction across traces at each temporal frequency, averaged and
// overlap-added back.
SeismicSection fx_decon(const SeismicSection& section, const FxConfig& config);

}  // namespace n2ns
