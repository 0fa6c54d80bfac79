#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "n2ns/section.hpp"

namespace n2ns {

struct NoiseSpec {
  double mean = 0.0;
  double sigma = 0.0;
  uint64_t seed = 0;
  int region_start_row = 0;  // rows above this index are left clean
};

struct WedgeConfig {
  int n_samples = 200;
  int n_traces = 51;
  int top_reflector_row = 60;
  int wedge_apex_trace = 0;
  int max_thickness_rows = 50;
  double wavelet_peak_frequency_hz = 30.0;
  double sample_interval_s = 0.002;
};

struct Patch {
  int h = 0;
  int w = 0;
  std::vector<double> v;
};

struct NoisePairBatch {
  std::vector<Patch> inputs;   // s + n
  std::vector<Patch> targets;  // s + n'
  std::vector<Patch> clean;    // s (normalized patch, kept for validation sets)
  int patch_size = 0;
};

// Zero-phase Ricker wavelet sampled at dt, truncated at |tau| <= 1.5/f.
std::vector<double> ricker_wavelet(double peak_frequency_hz, double dt_s);

// Two-reflector wedge seismogram, normalized to [-1, 1].
SeismicSection make_wedge(const WedgeConfig& config);

// section + i.i.d. Gaussian noise on rows >= region_start_row, seed-deterministic.
SeismicSection add_noise(const SeismicSection& section, const NoiseSpec& spec);

NoisePairBatch sample_noise_pairs(const std::vector<SeismicSection>& corpus,
                                  int patch_size, int count,
                                  std::pair<double, double> sigma_range,
                                  uint64_t seed);

// Band-limited random fields for dependency-free training corpora.
std::vector<SeismicSection> procedural_textures(int count, int size, uint64_t seed);

}  // namespace n2ns
