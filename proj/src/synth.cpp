#include "n2ns/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace n2ns {

std::vector<double> ricker_wavelet(double peak_frequency_hz, double dt_s) {
  if (!(peak_frequency_hz > 0.0) || !(dt_s > 0.0))
    throw std::invalid_argument("ricker: frequency and dt must be positive");
  const int half = static_cast<int>(std::floor(1.5 / peak_frequency_hz / dt_s));
  std::vector<double> w(2 * half + 1);
  const double pf = std::numbers::pi * peak_frequency_hz;
  for (int k = -half; k <= half; ++k) {
    const double tau = k * dt_s;
    const double u = pf * pf * tau * tau;
    w[k + half] = (1.0 - 2.0 * u) * std::exp(-u);
  }
  return w;
}

SeismicSection make_wedge(const WedgeConfig& config) {
  if (config.n_samples < 1 || config.n_traces < 1)
    throw std::invalid_argument("wedge: dimensions must be >= 1");
  if (config.top_reflector_row <= 0 || config.top_reflector_row >= config.n_samples)
    throw std::invalid_argument("wedge: top reflector outside section");
  if (config.top_reflector_row + config.max_thickness_rows >= config.n_samples)
    throw std::invalid_argument("wedge: bottom reflector outside section");

  const auto wavelet = ricker_wavelet(config.wavelet_peak_frequency_hz,
                                      config.sample_interval_s);
  if (static_cast<int>(wavelet.size()) > config.n_samples)
    throw std::invalid_argument("wedge: wavelet longer than section");
  const int half = static_cast<int>(wavelet.size()) / 2;

  SeismicSection out(config.n_samples, config.n_traces);
  out.sample_interval = config.sample_interval_s;
  out.axis_unit = AxisUnit::time;
  out.provenance = "wedge";

  const int far_trace =
      (config.wedge_apex_trace < config.n_traces / 2) ? config.n_traces - 1 : 0;
  const double span = (far_trace == config.wedge_apex_trace)
                          ? 1.0
                          : static_cast<double>(far_trace - config.wedge_apex_trace);

  for (int j = 0; j < config.n_traces; ++j) {
    const double frac = (j - config.wedge_apex_trace) / span;
    const int thickness =
        static_cast<int>(std::lround(std::clamp(frac, 0.0, 1.0) * config.max_thickness_rows));
    // reflectivity spikes: +1 at the flat top, -1 at the dipping bottom
    const int rows[2] = {config.top_reflector_row, config.top_reflector_row + thickness};
    const double coef[2] = {1.0, -1.0};
    for (int r = 0; r < 2; ++r) {
      for (int k = 0; k < static_cast<int>(wavelet.size()); ++k) {
        const int i = rows[r] + k - half;
        if (i >= 0 && i < config.n_samples) out.at(i, j) += coef[r] * wavelet[k];
      }
    }
  }

  double max_abs = 0.0;
  for (double v : out.data) max_abs = std::max(max_abs, std::fabs(v));
  if (max_abs > 0.0)
    for (double& v : out.data) v /= max_abs;
  return out;
}

SeismicSection add_noise(const SeismicSection& section, const NoiseSpec& spec) {
  section.validate();
  if (spec.sigma < 0.0) throw std::invalid_argument("noise sigma must be >= 0");
  if (spec.region_start_row < 0 || spec.region_start_row >= section.m)
    throw std::invalid_argument("region_start_row outside section");
  SeismicSection out = section;
  if (spec.sigma == 0.0 && spec.mean == 0.0) return out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(spec.mean, spec.sigma);
  for (int i = spec.region_start_row; i < out.m; ++i)
    for (int j = 0; j < out.n; ++j) out.at(i, j) += gauss(rng);
  return out;
}

NoisePairBatch sample_noise_pairs(const std::vector<SeismicSection>& corpus,
                                  int patch_size, int count,
                                  std::pair<double, double> sigma_range,
                                  uint64_t seed) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  if (sigma_range.first < 0.0 || sigma_range.second < sigma_range.first)
    throw std::invalid_argument("invalid sigma range");
  for (const auto& item : corpus)
    if (item.m < patch_size || item.n < patch_size)
      throw std::invalid_argument("patch larger than smallest corpus item");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick_item(0, corpus.size() - 1);
  std::uniform_real_distribution<double> pick_sigma(sigma_range.first, sigma_range.second);
  std::normal_distribution<double> gauss(0.0, 1.0);

  NoisePairBatch batch;
  batch.patch_size = patch_size;
  batch.inputs.reserve(count);
  batch.targets.reserve(count);
  for (int p = 0; p < count; ++p) {
    const SeismicSection& item = corpus[pick_item(rng)];
    std::uniform_int_distribution<int> pick_row(0, item.m - patch_size);
    std::uniform_int_distribution<int> pick_col(0, item.n - patch_size);
    const int r0 = pick_row(rng);
    const int c0 = pick_col(rng);

    Patch clean{patch_size, patch_size, std::vector<double>(
                                            static_cast<size_t>(patch_size) * patch_size)};
    double max_abs = 0.0;
    for (int i = 0; i < patch_size; ++i)
      for (int j = 0; j < patch_size; ++j) {
        const double v = item.at(r0 + i, c0 + j);
        clean.v[static_cast<size_t>(i) * patch_size + j] = v;
        max_abs = std::max(max_abs, std::fabs(v));
      }
    if (max_abs > 0.0)
      for (double& v : clean.v) v /= max_abs;

    const double sigma = pick_sigma(rng);
    Patch in = clean, tgt = clean;
    for (double& v : in.v) v += sigma * gauss(rng);
    for (double& v : tgt.v) v += sigma * gauss(rng);
    batch.inputs.push_back(std::move(in));
    batch.targets.push_back(std::move(tgt));
    batch.clean.push_back(std::move(clean));
  }
  return batch;
}

std::vector<SeismicSection> procedural_textures(int count, int size, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> pick_radius(0.8, 6.0);
  std::vector<SeismicSection> corpus;
  corpus.reserve(count);
  for (int t = 0; t < count; ++t) {
    SeismicSection field(size, size);
    for (double& v : field.data) v = gauss(rng);

    // separable Gaussian blur -> band-limited random field
    const double radius = pick_radius(rng);
    const int half = std::max(1, static_cast<int>(std::ceil(3.0 * radius)));
    std::vector<double> kernel(2 * half + 1);
    double ksum = 0.0;
    for (int k = -half; k <= half; ++k) {
      kernel[k + half] = std::exp(-0.5 * k * k / (radius * radius));
      ksum += kernel[k + half];
    }
    for (double& k : kernel) k /= ksum;

    SeismicSection tmp(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) {
        double acc = 0.0;
        for (int k = -half; k <= half; ++k)
          acc += kernel[k + half] * field.at(i, std::clamp(j + k, 0, size - 1));
        tmp.at(i, j) = acc;
      }
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) {
        double acc = 0.0;
        for (int k = -half; k <= half; ++k)
          acc += kernel[k + half] * tmp.at(std::clamp(i + k, 0, size - 1), j);
        field.at(i, j) = acc;
      }

    double max_abs = 0.0;
    for (double v : field.data) max_abs = std::max(max_abs, std::fabs(v));
    if (max_abs > 0.0)
      for (double& v : field.data) v /= max_abs;
    field.provenance = "procedural-texture";
    corpus.push_back(std::move(field));
  }
  return corpus;
}

}  // namespace n2ns
