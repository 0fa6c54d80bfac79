#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "doctest.h"
#include "n2ns/metrics.hpp"
#include "n2ns/synth.hpp"

using namespace n2ns;

namespace {

SeismicSection random_section(int m, int n, uint64_t seed, double lo = -1.0,
                              double hi = 1.0) {
  SeismicSection s(m, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& v : s.data) v = u(rng);
  return s;
}

const std::vector<std::pair<double, double>> kSixBands = {
    {0, 10}, {10, 20}, {20, 30}, {30, 40}, {40, 50}, {50, 60}};

}  // namespace

TEST_CASE("mse hand cases") {
  SeismicSection a(4, 5, 0.3);
  CHECK(mse(a, a) == 0.0);
  SeismicSection b = a;
  for (double& v : b.data) v += 0.1;
  CHECK(mse(a, b) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("mse matches a scalar double-loop oracle") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto a = random_section(23, 17, seed);
    auto b = random_section(23, 17, seed + 100);
    double acc = 0.0;
    for (int i = 0; i < a.m; ++i)
      for (int j = 0; j < a.n; ++j) {
        const double d = a.at(i, j) - b.at(i, j);
        acc += d * d;
      }
    const double oracle = acc / (a.m * a.n);
    CHECK(std::fabs(mse(a, b) - oracle) <= 1e-12);
  }
}

TEST_CASE("snr hand-derived 20 dB case") {
  SeismicSection s_hat(1, 2), s(1, 2);
  s_hat.at(0, 0) = 1.0;
  s_hat.at(0, 1) = -1.0;
  s.at(0, 0) = 1.1;
  s.at(0, 1) = -0.9;
  CHECK(snr_db(s, s_hat) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("snr is 0 dB when noise power equals signal power") {
  auto s_hat = random_section(8, 8, 4);
  SeismicSection s = s_hat;
  for (double& v : s.data) v *= 2.0;  // S - S_hat == S_hat
  CHECK(snr_db(s, s_hat) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("snr is invariant under a common scale") {
  auto s_hat = random_section(16, 16, 5);
  auto s = random_section(16, 16, 6);
  const double base = snr_db(s, s_hat);
  SeismicSection cs = s, cs_hat = s_hat;
  for (double& v : cs.data) v *= -7.25;
  for (double& v : cs_hat.data) v *= -7.25;
  CHECK(snr_db(cs, cs_hat) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("snr throws on zero noise power") {
  auto s = random_section(4, 4, 7);
  CHECK_THROWS_WITH_AS(snr_db(s, s), doctest::Contains("infinite SNR"),
                       std::domain_error);
}

TEST_CASE("snr and mse are consistent") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto s = random_section(19, 11, seed);
    auto s_hat = random_section(19, 11, seed + 50);
    double ss = 0.0;
    for (double v : s_hat.data) ss += v * v;
    const double expected = 10.0 * std::log10(ss / (s.m * s.n * mse(s, s_hat)));
    CHECK(snr_db(s, s_hat) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("corrcoef hand cases and oracle") {
  auto s = random_section(12, 12, 8);
  CHECK(corrcoef(s, s) == doctest::Approx(1.0).epsilon(1e-12));
  SeismicSection neg = s;
  for (double& v : neg.data) v = -v;
  CHECK(corrcoef(s, neg) == doctest::Approx(-1.0).epsilon(1e-12));

  auto t = random_section(12, 12, 9);
  double ms = 0.0, mt = 0.0;
  for (double v : s.data) ms += v;
  for (double v : t.data) mt += v;
  ms /= s.data.size();
  mt /= t.data.size();
  double num = 0.0, ds = 0.0, dt = 0.0;
  for (size_t i = 0; i < s.data.size(); ++i) {
    num += (s.data[i] - ms) * (t.data[i] - mt);
    ds += (s.data[i] - ms) * (s.data[i] - ms);
    dt += (t.data[i] - mt) * (t.data[i] - mt);
  }
  const double oracle = num / std::sqrt(ds * dt);
  CHECK(std::fabs(corrcoef(s, t) - oracle) <= 1e-12);
}

TEST_CASE("corrcoef is invariant under positive affine transforms") {
  auto s = random_section(10, 10, 14);
  auto t = random_section(10, 10, 15);
  const double base = corrcoef(s, t);
  SeismicSection at = t;
  for (double& v : at.data) v = 3.5 * v + 11.0;
  CHECK(corrcoef(s, at) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("phase spectrum of cosine and sine at a bin frequency") {
  const int m = 128;
  const double dt = 0.002;          // Nyquist 250 Hz
  const double f = 8.0 / (m * dt);  // exact bin: 31.25 Hz
  SeismicSection cosine(m, 3), sine(m, 3);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < 3; ++j) {
      cosine.at(i, j) = std::cos(2.0 * std::numbers::pi * f * i * dt);
      sine.at(i, j) = std::sin(2.0 * std::numbers::pi * f * i * dt);
    }
  auto pc = phase_spectrum(cosine, dt);
  auto ps = phase_spectrum(sine, dt);
  REQUIRE(pc.frequency_hz.size() == ps.frequency_hz.size());
  bool found = false;
  for (size_t k = 0; k < pc.frequency_hz.size(); ++k)
    if (std::fabs(pc.frequency_hz[k] - f) < 1e-9) {
      found = true;
      CHECK(std::fabs(pc.phase_rad[k]) < 1e-9);
      CHECK(ps.phase_rad[k] == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-9));
    }
  CHECK(found);
}

TEST_CASE("phase spectrum obeys the shift theorem") {
  auto wedge = make_wedge(WedgeConfig{});
  const int shift = 3;
  SeismicSection shifted(wedge.m, wedge.n);
  shifted.sample_interval = wedge.sample_interval;
  for (int i = 0; i < wedge.m; ++i)
    for (int j = 0; j < wedge.n; ++j)
      shifted.at(i, j) = wedge.at((i - shift + wedge.m) % wedge.m, j);

  const double dt = wedge.sample_interval;
  auto p0 = phase_spectrum(wedge, dt);
  auto p1 = phase_spectrum(shifted, dt);
  REQUIRE(p0.frequency_hz.size() == p1.frequency_hz.size());
  const double two_pi = 2.0 * std::numbers::pi;
  for (size_t k = 1; k < p0.frequency_hz.size(); ++k) {
    const double f = p0.frequency_hz[k];
    double diff = p1.phase_rad[k] - p0.phase_rad[k] + two_pi * f * shift * dt;
    diff = std::remainder(diff, two_pi);
    CHECK(std::fabs(diff) < 1e-6);
  }
}

TEST_CASE("trace spectra round-trip through the inverse transform") {
  auto wedge = make_wedge(WedgeConfig{});
  auto trace = extract_trace(wedge, 25);
  const int m = static_cast<int>(trace.size());
  std::vector<double> in = trace, back(m);
  std::vector<fftw_complex> spec(static_cast<size_t>(m) / 2 + 1);
  fftw_plan fwd = fftw_plan_dft_r2c_1d(m, in.data(), spec.data(), FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_plan inv = fftw_plan_dft_c2r_1d(m, spec.data(), back.data(), FFTW_ESTIMATE);
  fftw_execute(inv);
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(inv);
  double ref = 0.0;
  for (double v : trace) ref = std::max(ref, std::fabs(v));
  for (int i = 0; i < m; ++i)
    CHECK(std::fabs(back[i] / m - trace[i]) <= 1e-9 * std::max(ref, 1.0));
}

TEST_CASE("phase_band_corr of a section with itself is 1 in every band") {
  auto wedge = make_wedge(WedgeConfig{});
  auto corr = phase_band_corr(wedge, wedge, wedge.sample_interval, kSixBands);
  REQUIRE(corr.size() == kSixBands.size());
  for (double c : corr) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phase_band_corr decreases under growing phase jitter") {
  auto wedge = make_wedge(WedgeConfig{});
  auto noisy = [&](double eps, uint64_t seed) {
    return add_noise(wedge, NoiseSpec{0.0, eps, seed, 0});
  };
  // Monotonically harsher corruption -> no larger mean band correlation.
  std::vector<double> means;
  for (double eps : {0.01, 0.1, 0.5}) {
    auto corr = phase_band_corr(wedge, noisy(eps, 99), wedge.sample_interval, kSixBands);
    double mean = 0.0;
    for (double c : corr) mean += c;
    means.push_back(mean / corr.size());
  }
  CHECK(means[0] > means[1]);
  CHECK(means[1] > means[2]);
}

TEST_CASE("phase_band_corr rejects bands with fewer than 3 bins") {
  auto wedge = make_wedge(WedgeConfig{});
  // 200 samples at 2 ms -> bin width 2.5 Hz; a 4 Hz band holds < 3 bins.
  std::vector<std::pair<double, double>> bands{{10.0, 14.0}};
  CHECK_THROWS_WITH_AS(phase_band_corr(wedge, wedge, wedge.sample_interval, bands),
                       doctest::Contains("band too narrow"), std::invalid_argument);
}

TEST_CASE("extract_trace returns columns and checks bounds") {
  auto s = random_section(6, 4, 21);
  auto first = extract_trace(s, 0);
  auto last = extract_trace(s, 3);
  REQUIRE(first.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(first[i] == s.at(i, 0));
    CHECK(last[i] == s.at(i, 3));
  }
  CHECK_THROWS_AS(extract_trace(s, 4), std::out_of_range);
  CHECK_THROWS_AS(extract_trace(s, -1), std::out_of_range);
}

TEST_CASE("evaluate flags infinite SNR instead of failing") {
  auto wedge = make_wedge(WedgeConfig{});
  auto rep = evaluate(wedge, wedge, wedge.sample_interval, kSixBands, "self");
  CHECK(rep.mse == 0.0);
  CHECK(rep.snr_infinite);
  CHECK(rep.corrcoef == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(rep.phase_band_corr.size() == kSixBands.size());
  for (const auto& b : rep.phase_band_corr)
    CHECK(b.corrcoef == doctest::Approx(1.0).epsilon(1e-12));
}
