#include "n2ns/fxdecon.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace n2ns {

namespace {

using cplx = std::complex<double>;

// Cholesky solve for a Hermitian positive-definite system G a = rhs.
std::vector<cplx> solve_hermitian(std::vector<cplx> g, std::vector<cplx> rhs, int l) {
  auto at = [&g, l](int r, int c) -> cplx& { return g[static_cast<size_t>(r) * l + c]; };
  for (int j = 0; j < l; ++j) {
    double d = at(j, j).real();
    for (int k = 0; k < j; ++k) d -= std::norm(at(j, k));
    if (!(d > 0.0))
      throw std::runtime_error("fx_decon: singular normal equations (diag " +
                               std::to_string(d) + " at row " + std::to_string(j) + ")");
    const double root = std::sqrt(d);
    at(j, j) = root;
    for (int i = j + 1; i < l; ++i) {
      cplx s = at(i, j);
      for (int k = 0; k < j; ++k) s -= at(i, k) * std::conj(at(j, k));
      at(i, j) = s / root;
    }
  }
  // L y = rhs
  for (int i = 0; i < l; ++i) {
    cplx s = rhs[i];
    for (int k = 0; k < i; ++k) s -= at(i, k) * rhs[k];
    rhs[i] = s / at(i, i).real();
  }
  // L^H a = y
  for (int i = l - 1; i >= 0; --i) {
    cplx s = rhs[i];
    for (int k = i + 1; k < l; ++k) s -= std::conj(at(k, i)) * rhs[k];
    rhs[i] = s / at(i, i).real();
  }
  return rhs;
}

// Replace the frequency slice by averaged forward/backward predictions.
void predict_slice(std::vector<cplx>& d, int l, double prewhitening) {
  const int n = static_cast<int>(d.size());
  std::vector<cplx> gf(static_cast<size_t>(l) * l, cplx{});
  std::vector<cplx> rf(l, cplx{});
  std::vector<cplx> gb(static_cast<size_t>(l) * l, cplx{});
  std::vector<cplx> rb(l, cplx{});
  for (int m = l; m < n; ++m)
    for (int p = 0; p < l; ++p) {
      const cplx cp = std::conj(d[m - 1 - p]);
      rf[p] += cp * d[m];
      for (int q = 0; q < l; ++q) gf[static_cast<size_t>(p) * l + q] += cp * d[m - 1 - q];
    }
  for (int m = 0; m + l < n; ++m)
    for (int p = 0; p < l; ++p) {
      const cplx cp = std::conj(d[m + 1 + p]);
      rb[p] += cp * d[m];
      for (int q = 0; q < l; ++q) gb[static_cast<size_t>(p) * l + q] += cp * d[m + 1 + q];
    }

  double trace = 0.0;
  for (int p = 0; p < l; ++p) trace += gf[static_cast<size_t>(p) * l + p].real();
  if (trace <= 0.0) {
    std::fill(d.begin(), d.end(), cplx{});
    return;
  }
  const double mu = prewhitening * trace / l;
  for (int p = 0; p < l; ++p) {
    gf[static_cast<size_t>(p) * l + p] += mu;
    gb[static_cast<size_t>(p) * l + p] += mu;
  }
  const std::vector<cplx> a = solve_hermitian(std::move(gf), std::move(rf), l);
  const std::vector<cplx> b = solve_hermitian(std::move(gb), std::move(rb), l);

  std::vector<cplx> out(n);
  for (int m = 0; m < n; ++m) {
    cplx acc{};
    int cnt = 0;
    if (m >= l) {
      for (int p = 0; p < l; ++p) acc += a[p] * d[m - 1 - p];
      ++cnt;
    }
    if (m + l < n) {
      cplx bp{};
      for (int p = 0; p < l; ++p) bp += b[p] * d[m + 1 + p];
      acc += bp;
      ++cnt;
    }
    out[m] = acc / static_cast<double>(cnt);
  }
  d = std::move(out);
}

}  // namespace

void FxConfig::validate() const {
  if (filter_length_traces < 1)
    throw std::invalid_argument("fx: filter length must be >= 1");
  if (window_length_samples < 2 * filter_length_traces)
    throw std::invalid_argument("fx: window length must be >= 2 * filter length");
  if (window_overlap < 0.0 || window_overlap > 0.9)
    throw std::invalid_argument("fx: overlap must be in [0, 0.9]");
  if (prewhitening < 0.0) throw std::invalid_argument("fx: prewhitening must be >= 0");
}

SeismicSection fx_decon(const SeismicSection& section, const FxConfig& config) {
  section.validate();
  config.validate();
  const int m = section.m, n = section.n, l = config.filter_length_traces;
  if (n < 2 * l + 1)
    throw std::invalid_argument("fx: too few traces for the filter length");

  const int wl = std::min(config.window_length_samples, m);
  const int hop = std::max(1, static_cast<int>(std::lround(wl * (1.0 - config.window_overlap))));
  std::vector<int> starts;
  for (int s = 0;; s += hop) {
    if (s + wl >= m) {
      starts.push_back(m - wl);
      break;
    }
    starts.push_back(s);
  }

  std::vector<double> taper(wl);
  for (int i = 0; i < wl; ++i)
    taper[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1) / (wl + 1));

  const int n_freq = wl / 2 + 1;
  const double df = 1.0 / (wl * section.sample_interval);
  std::vector<double> buf(wl);
  std::vector<cplx> spec(n_freq);
  fftw_plan fwd = fftw_plan_dft_r2c_1d(
      wl, buf.data(), reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
  fftw_plan inv = fftw_plan_dft_c2r_1d(
      wl, reinterpret_cast<fftw_complex*>(spec.data()), buf.data(), FFTW_ESTIMATE);

  SeismicSection out(m, n);
  out.sample_interval = section.sample_interval;
  out.axis_unit = section.axis_unit;
  out.provenance = section.provenance;
  std::vector<double> wsum(m, 0.0);

  std::vector<std::vector<cplx>> window_spec(n, std::vector<cplx>(n_freq));
  for (int s : starts) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < wl; ++i) buf[i] = section.at(s + i, j);
      fftw_execute(fwd);
      window_spec[j] = spec;
    }
    std::vector<cplx> slice(n);
    for (int k = 0; k < n_freq; ++k) {
      if (config.band_hz) {
        const double f = k * df;
        if (f < config.band_hz->first || f > config.band_hz->second) continue;
      }
      for (int j = 0; j < n; ++j) slice[j] = window_spec[j][k];
      predict_slice(slice, l, config.prewhitening);
      for (int j = 0; j < n; ++j) window_spec[j][k] = slice[j];
    }
    // synthesis-only taper: cross-fades windows without amplifying edge error
    for (int j = 0; j < n; ++j) {
      spec = window_spec[j];
      fftw_execute(inv);
      for (int i = 0; i < wl; ++i) out.at(s + i, j) += taper[i] * buf[i] / wl;
    }
    for (int i = 0; i < wl; ++i) wsum[s + i] += taper[i];
  }
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(inv);

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) /= wsum[i];
  return out;
}

}  // namespace n2ns
