#include "n2ns/clip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace n2ns {

void ClipSchedule::validate() const {
  if (alphas.empty()) throw std::invalid_argument("schedule must have t >= 1");
  double prev = 0.0;
  for (double a : alphas) {
    if (!(a > prev)) throw std::invalid_argument("schedule must be strictly increasing and positive");
    prev = a;
  }
}

SeismicSection clip(const SeismicSection& section, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("clip threshold must be positive");
  SeismicSection out = section;
  for (double& v : out.data) v = std::clamp(v, -alpha, alpha);
  return out;
}

BandDecomposition decompose(const SeismicSection& section, const ClipSchedule& schedule) {
  schedule.validate();
  const int t = schedule.t();
  BandDecomposition d;
  d.schedule = schedule;
  d.band_masks.assign(t, BinaryMask(section.m, section.n));
  for (size_t i = 0; i < section.data.size(); ++i) {
    const double a = std::fabs(section.data[i]);
    int band = t - 1;  // top band absorbs |x| > alpha_t
    for (int k = 0; k < t; ++k)
      if (a <= schedule.alphas[k]) {
        band = k;
        break;
      }
    d.band_masks[band].data[i] = 1;
  }
  return d;
}

ClipSchedule default_schedule(const SeismicSection& section, int t) {
  if (t < 1) throw std::invalid_argument("t must be >= 1");
  double max_abs = 0.0;
  for (double v : section.data) max_abs = std::max(max_abs, std::fabs(v));
  if (max_abs == 0.0) throw std::invalid_argument("degenerate amplitude range");
  ClipSchedule s;
  s.alphas.resize(t);
  for (int k = 1; k <= t; ++k) s.alphas[k - 1] = k * max_abs / t;
  return s;
}

SeismicSection clip_denoise(const SeismicSection& section, const ClipSchedule& schedule,
                            const DenoiserFn& denoiser) {
  section.validate();
  schedule.validate();
  const int t = schedule.t();

  SeismicSection out(section.m, section.n);
  out.sample_interval = section.sample_interval;
  out.axis_unit = section.axis_unit;
  out.provenance = section.provenance;

  double max_abs = 0.0;
  for (double v : section.data) max_abs = std::max(max_abs, std::fabs(v));
  if (schedule.alphas.back() < 0.99 * max_abs)
    out.provenance += " | warning: top threshold below section max_abs, top band absorbs excess";

  const BandDecomposition bands = decompose(section, schedule);
  for (int k = 0; k < t; ++k) {
    const double alpha = schedule.alphas[k];
    // top band sees the unclipped section, lower bands the clipped one
    SeismicSection clipped = (k == t - 1) ? section : clip(section, alpha);
    for (double& v : clipped.data) v /= alpha;
    SeismicSection denoised = denoiser(clipped);
    if (denoised.m != section.m || denoised.n != section.n)
      throw std::runtime_error("denoiser changed section shape");
    const BinaryMask& mask = bands.band_masks[k];
    for (size_t i = 0; i < out.data.size(); ++i)
      if (mask.data[i]) out.data[i] = denoised.data[i] * alpha;
  }
  return out;
}

}  // namespace n2ns
