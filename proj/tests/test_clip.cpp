#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "n2ns/clip.hpp"
#include "n2ns/synth.hpp"

using namespace n2ns;

namespace {

SeismicSection random_section(int m, int n, uint64_t seed, double amp = 1.2) {
  SeismicSection s(m, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  for (double& v : s.data) v = u(rng);
  return s;
}

// 3x3 box blur: a deterministic, genuinely amplitude-dependent "denoiser".
SeismicSection box_blur(const SeismicSection& s) {
  SeismicSection out(s.m, s.n);
  out.sample_interval = s.sample_interval;
  for (int i = 0; i < s.m; ++i)
    for (int j = 0; j < s.n; ++j) {
      double acc = 0.0;
      int cnt = 0;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di, b = j + dj;
          if (a >= 0 && a < s.m && b >= 0 && b < s.n) {
            acc += s.at(a, b);
            ++cnt;
          }
        }
      out.at(i, j) = acc / cnt;
    }
  return out;
}

}  // namespace

TEST_CASE("clip hand cases") {
  SeismicSection s(1, 3);
  s.at(0, 0) = 1.5;
  s.at(0, 1) = -0.7;
  s.at(0, 2) = 0.3;
  auto c1 = clip(s, 1.0);
  CHECK(c1.at(0, 0) == 1.0);
  auto c05 = clip(s, 0.5);
  CHECK(c05.at(0, 1) == -0.5);
  CHECK(c05.at(0, 2) == 0.3);
}

TEST_CASE("clip at or above max_abs is the identity") {
  auto s = random_section(20, 10, 1);
  double max_abs = 0.0;
  for (double v : s.data) max_abs = std::max(max_abs, std::fabs(v));
  CHECK(clip(s, max_abs).data == s.data);
  CHECK(clip(s, max_abs * 2).data == s.data);
}

TEST_CASE("clip is idempotent") {
  auto s = random_section(20, 10, 2);
  auto once = clip(s, 0.4);
  auto twice = clip(once, 0.4);
  CHECK(once.data == twice.data);
}

TEST_CASE("clip rejects non-positive alpha") {
  auto s = random_section(2, 2, 3);
  CHECK_THROWS_AS(clip(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(clip(s, -1.0), std::invalid_argument);
}

TEST_CASE("decompose assigns bands by amplitude") {
  SeismicSection s(1, 3);
  s.at(0, 0) = 0.3;
  s.at(0, 1) = 0.7;
  s.at(0, 2) = 1.2;
  ClipSchedule sched{{0.5, 1.0}};
  auto dec = decompose(s, sched);
  REQUIRE(dec.band_masks.size() == 2);
  CHECK(dec.band_masks[0].at(0, 0) == 1);
  CHECK(dec.band_masks[1].at(0, 1) == 1);
  CHECK(dec.band_masks[1].at(0, 2) == 1);  // top band absorbs |x| > alpha_t
}

TEST_CASE("decompose with t = 1 yields a single all-ones band") {
  auto s = random_section(10, 10, 4);
  auto dec = decompose(s, ClipSchedule{{1.0}});
  REQUIRE(dec.band_masks.size() == 1);
  for (auto v : dec.band_masks[0].data) CHECK(v == 1);
}

TEST_CASE("decompose matches a brute-force per-cell oracle and partitions") {
  auto s = random_section(200, 51, 5, 1.5);
  ClipSchedule sched{{0.2, 0.4, 0.6, 0.8, 1.0}};
  auto dec = decompose(s, sched);
  REQUIRE(dec.band_masks.size() == 5);
  for (int i = 0; i < s.m; ++i)
    for (int j = 0; j < s.n; ++j) {
      const double a = std::fabs(s.at(i, j));
      int expected = 4;  // top band takes the overflow
      for (int k = 0; k < 5; ++k)
        if (a <= sched.alphas[k]) {
          expected = k;
          break;
        }
      int sum = 0;
      for (int k = 0; k < 5; ++k) {
        sum += dec.band_masks[k].at(i, j);
        CHECK(dec.band_masks[k].at(i, j) == (k == expected ? 1 : 0));
      }
      CHECK(sum == 1);
    }
}

TEST_CASE("boundary cells belong to the lower band") {
  SeismicSection s(1, 2);
  s.at(0, 0) = 0.5;
  s.at(0, 1) = -0.5;
  auto dec = decompose(s, ClipSchedule{{0.5, 1.0}});
  CHECK(dec.band_masks[0].at(0, 0) == 1);
  CHECK(dec.band_masks[0].at(0, 1) == 1);
}

TEST_CASE("default_schedule spaces thresholds evenly up to max_abs") {
  SeismicSection s(1, 2);
  s.at(0, 0) = 1.0;
  s.at(0, 1) = -0.25;

  auto five = default_schedule(s, 5);
  REQUIRE(five.alphas.size() == 5);
  const double expect5[5] = {0.2, 0.4, 0.6, 0.8, 1.0};
  for (int k = 0; k < 5; ++k)
    CHECK(five.alphas[k] == doctest::Approx(expect5[k]).epsilon(1e-15));

  auto two = default_schedule(s, 2);
  CHECK(two.alphas[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(two.alphas[1] == doctest::Approx(1.0).epsilon(1e-15));

  auto one = default_schedule(s, 1);
  REQUIRE(one.alphas.size() == 1);
  CHECK(one.alphas[0] == 1.0);

  SeismicSection zeros(2, 2, 0.0);
  CHECK_THROWS_AS(default_schedule(zeros, 2), std::invalid_argument);
}

TEST_CASE("clip_denoise with the identity denoiser reproduces the input") {
  DenoiserFn identity = [](const SeismicSection& x) { return x; };
  auto wedge = make_wedge(WedgeConfig{});
  for (int t : {1, 2, 5}) {
    auto out = clip_denoise(wedge, default_schedule(wedge, t), identity);
    for (size_t i = 0; i < wedge.data.size(); ++i)
      CHECK(std::fabs(out.data[i] - wedge.data[i]) <= 1e-12);
  }
}

TEST_CASE("clip_denoise with t = 1 reduces to plain single-pass denoising") {
  auto s = random_section(40, 30, 6);
  auto sched = default_schedule(s, 1);
  const double alpha = sched.alphas[0];
  auto out = clip_denoise(s, sched, box_blur);

  SeismicSection scaled = s;
  for (double& v : scaled.data) v /= alpha;
  auto expected = box_blur(scaled);
  for (double& v : expected.data) v *= alpha;
  for (size_t i = 0; i < s.data.size(); ++i)
    CHECK(out.data[i] == doctest::Approx(expected.data[i]).epsilon(1e-12));
}

TEST_CASE("clip_denoise with a constant-zero denoiser returns zeros") {
  DenoiserFn zero = [](const SeismicSection& x) {
    return SeismicSection(x.m, x.n, 0.0);
  };
  auto s = random_section(15, 9, 7);
  auto out = clip_denoise(s, default_schedule(s, 3), zero);
  for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("identity round trip is schedule-invariant") {
  DenoiserFn identity = [](const SeismicSection& x) { return x; };
  auto s = random_section(30, 20, 8);
  auto a = clip_denoise(s, default_schedule(s, 2), identity);
  auto b = clip_denoise(s, default_schedule(s, 7), identity);
  for (size_t i = 0; i < s.data.size(); ++i) {
    CHECK(std::fabs(a.data[i] - s.data[i]) <= 1e-12);
    CHECK(std::fabs(b.data[i] - s.data[i]) <= 1e-12);
  }
}

TEST_CASE("band output depends only on values that survive clipping") {
  // Mutating a cell while keeping it beyond alpha_k (same sign) leaves the
  // clipped input of band k unchanged, so band-k output cells must not move.
  auto s = random_section(24, 16, 9);
  ClipSchedule sched{{0.4, 0.8, 1.2}};
  auto base = clip_denoise(s, sched, box_blur);
  auto dec = decompose(s, sched);

  SeismicSection mutated = s;
  int changed = 0;
  for (size_t i = 0; i < mutated.data.size(); ++i)
    if (mutated.data[i] > 0.8) {
      mutated.data[i] = 1.19;  // still above alpha_2, below alpha_t
      ++changed;
    }
  REQUIRE(changed > 0);
  auto out = clip_denoise(mutated, sched, box_blur);

  for (int i = 0; i < s.m; ++i)
    for (int j = 0; j < s.n; ++j)
      if (dec.band_masks[0].at(i, j) || dec.band_masks[1].at(i, j))
        CHECK(out.at(i, j) == doctest::Approx(base.at(i, j)).epsilon(1e-12));
}
