#pragma once

#include <string>
#include <utility>
#include <vector>

#include "n2ns/section.hpp"

namespace n2ns {

struct PhaseBandCorr {
  double band_low_hz = 0.0;
  double band_high_hz = 0.0;
  double corrcoef = 0.0;
};

struct EvalReport {
  double mse = 0.0;
  double snr_db = 0.0;
  bool snr_infinite = false;  // zero noise power
  double corrcoef = 0.0;
  std::vector<PhaseBandCorr> phase_band_corr;
  std::string label;
};

struct PhaseCurve {
  std::vector<double> frequency_hz;
  std::vector<double> phase_rad;  // circular mean across traces, wrapped to (-pi, pi]
};

double mse(const SeismicSection& s, const SeismicSection& s_hat);

// 10*log10(sum(s_hat^2) / sum((s - s_hat)^2)); throws on zero noise power.
double snr_db(const SeismicSection& s, const SeismicSection& s_hat);

// Pearson correlation over flattened grids.
double corrcoef(const SeismicSection& s, const SeismicSection& s_hat);

// Per-frequency phase, averaged circularly across traces, up to f_max_hz.
PhaseCurve phase_spectrum(const SeismicSection& section, double dt_s,
                          double f_max_hz = 60.0);

// Pearson correlation of unwrapped phase curves per frequency band.
std::vector<double> phase_band_corr(const SeismicSection& clean,
                                    const SeismicSection& test, double dt_s,
                                    const std::vector<std::pair<double, double>>& bands_hz);

std::vector<double> extract_trace(const SeismicSection& section, int trace_index);

EvalReport evaluate(const SeismicSection& clean, const SeismicSection& test,
                    double dt_s, const std::vector<std::pair<double, double>>& bands_hz,
                    const std::string& label);

}  // namespace n2ns
