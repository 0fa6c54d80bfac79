#include "n2ns/metrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace n2ns {

namespace {

void require_same_shape(const SeismicSection& a, const SeismicSection& b) {
  if (a.m != b.m || a.n != b.n)
    throw std::invalid_argument("section shape mismatch");
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t k = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < k; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < k; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  constexpr double tiny = 1e-30;
  if (sxx < tiny || syy < tiny) {
    // degenerate (constant) curve: equal curves correlate perfectly
    double max_diff = 0.0;
    for (size_t i = 0; i < k; ++i) max_diff = std::max(max_diff, std::fabs(x[i] - y[i]));
    if (max_diff < 1e-12) return 1.0;
    throw std::invalid_argument("zero-variance input to correlation");
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> unwrap(const std::vector<double>& phase) {
  std::vector<double> out = phase;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (size_t i = 1; i < out.size(); ++i) {
    double d = out[i] - out[i - 1];
    while (d > std::numbers::pi) {
      out[i] -= two_pi;
      d -= two_pi;
    }
    while (d < -std::numbers::pi) {
      out[i] += two_pi;
      d += two_pi;
    }
  }
  return out;
}

}  // namespace

double mse(const SeismicSection& s, const SeismicSection& s_hat) {
  require_same_shape(s, s_hat);
  double acc = 0.0;
  for (size_t i = 0; i < s.data.size(); ++i) {
    const double d = s.data[i] - s_hat.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(s.data.size());
}

double snr_db(const SeismicSection& s, const SeismicSection& s_hat) {
  require_same_shape(s, s_hat);
  double signal = 0.0, noise = 0.0;
  for (size_t i = 0; i < s.data.size(); ++i) {
    const double d = s.data[i] - s_hat.data[i];
    signal += s_hat.data[i] * s_hat.data[i];
    noise += d * d;
  }
  if (noise == 0.0) throw std::domain_error("infinite SNR");
  return 10.0 * std::log10(signal / noise);
}

double corrcoef(const SeismicSection& s, const SeismicSection& s_hat) {
  require_same_shape(s, s_hat);
  return pearson(s.data, s_hat.data);
}

PhaseCurve phase_spectrum(const SeismicSection& section, double dt_s, double f_max_hz) {
  section.validate();
  if (section.m < 16) throw std::invalid_argument("too few samples for phase analysis");
  if (!(dt_s > 0.0)) throw std::invalid_argument("dt must be positive");
  const double nyquist = 0.5 / dt_s;
  if (nyquist < f_max_hz)
    throw std::invalid_argument("Nyquist frequency below requested f_max");

  const int nfft = section.m;
  const int n_freq = nfft / 2 + 1;
  const double df = 1.0 / (nfft * dt_s);
  int n_keep = 0;
  while (n_keep < n_freq && n_keep * df <= f_max_hz) ++n_keep;

  std::vector<double> in(nfft);
  std::vector<std::complex<double>> out(n_freq);
  fftw_plan plan = fftw_plan_dft_r2c_1d(
      nfft, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);

  std::vector<std::complex<double>> phasor_sum(n_keep, {0.0, 0.0});
  for (int j = 0; j < section.n; ++j) {
    for (int i = 0; i < nfft; ++i) in[i] = section.at(i, j);
    fftw_execute(plan);
    double peak = 0.0;
    for (int k = 0; k < n_freq; ++k) peak = std::max(peak, std::abs(out[k]));
    // Spectral notches leave O(eps) residues with meaningless phase; skip them.
    const double floor = peak * 1e-9;
    for (int k = 0; k < n_keep; ++k) {
      const double mag = std::abs(out[k]);
      if (mag > floor) phasor_sum[k] += out[k] / mag;
    }
  }
  fftw_destroy_plan(plan);

  PhaseCurve curve;
  curve.frequency_hz.resize(n_keep);
  curve.phase_rad.resize(n_keep);
  for (int k = 0; k < n_keep; ++k) {
    curve.frequency_hz[k] = k * df;
    curve.phase_rad[k] =
        (std::abs(phasor_sum[k]) > 0.0) ? std::arg(phasor_sum[k]) : 0.0;
  }
  return curve;
}

std::vector<double> phase_band_corr(const SeismicSection& clean,
                                    const SeismicSection& test, double dt_s,
                                    const std::vector<std::pair<double, double>>& bands_hz) {
  require_same_shape(clean, test);
  double f_max = 0.0;
  for (const auto& [lo, hi] : bands_hz) f_max = std::max(f_max, hi);
  const PhaseCurve a = phase_spectrum(clean, dt_s, f_max);
  const PhaseCurve b = phase_spectrum(test, dt_s, f_max);

  std::vector<double> result;
  result.reserve(bands_hz.size());
  for (const auto& [lo, hi] : bands_hz) {
    std::vector<double> pa, pb;
    for (size_t k = 0; k < a.frequency_hz.size(); ++k) {
      const double f = a.frequency_hz[k];
      if (f >= lo && f < hi) {
        pa.push_back(a.phase_rad[k]);
        pb.push_back(b.phase_rad[k]);
      }
    }
    if (pa.size() < 3) throw std::invalid_argument("band too narrow for correlation");
    result.push_back(pearson(unwrap(pa), unwrap(pb)));
  }
  return result;
}

std::vector<double> extract_trace(const SeismicSection& section, int trace_index) {
  if (trace_index < 0 || trace_index >= section.n)
    throw std::out_of_range("trace index out of range");
  std::vector<double> trace(section.m);
  for (int i = 0; i < section.m; ++i) trace[i] = section.at(i, trace_index);
  return trace;
}

EvalReport evaluate(const SeismicSection& clean, const SeismicSection& test,
                    double dt_s, const std::vector<std::pair<double, double>>& bands_hz,
                    const std::string& label) {
  EvalReport report;
  report.label = label;
  report.mse = mse(clean, test);
  try {
    report.snr_db = snr_db(clean, test);
  } catch (const std::domain_error&) {
    report.snr_infinite = true;
    report.snr_db = 0.0;
  }
  report.corrcoef = corrcoef(clean, test);
  if (!bands_hz.empty()) {
    const auto corrs = phase_band_corr(clean, test, dt_s, bands_hz);
    for (size_t k = 0; k < bands_hz.size(); ++k)
      report.phase_band_corr.push_back({bands_hz[k].first, bands_hz[k].second, corrs[k]});
  }
  return report;
}

}  // namespace n2ns
