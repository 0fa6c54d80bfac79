#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "n2ns/section.hpp"

using namespace n2ns;

namespace {

SeismicSection from_rows(const std::vector<std::vector<double>>& rows) {
  SeismicSection s(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int i = 0; i < s.m; ++i)
    for (int j = 0; j < s.n; ++j) s.at(i, j) = rows[i][j];
  return s;
}

}  // namespace

TEST_CASE("normalize divides by max_abs") {
  auto s = from_rows({{2, -4}, {1, 0}});
  auto [scaled, scale] = normalize(s);
  CHECK(scale == 4.0);
  CHECK(scaled.at(0, 0) == 0.5);
  CHECK(scaled.at(0, 1) == -1.0);
  CHECK(scaled.at(1, 0) == 0.25);
  CHECK(scaled.at(1, 1) == 0.0);
}

TEST_CASE("normalize of already-normalized section is identity") {
  auto s = from_rows({{1, -1}});
  auto [scaled, scale] = normalize(s);
  CHECK(scale == 1.0);
  CHECK(scaled.at(0, 0) == 1.0);
  CHECK(scaled.at(0, 1) == -1.0);
}

TEST_CASE("normalize yields max_abs exactly 1 on a random grid") {
  SeismicSection s(200, 51);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (double& v : s.data) v = u(rng);
  auto [scaled, scale] = normalize(s);
  double max_abs = 0.0;
  for (double v : scaled.data) max_abs = std::max(max_abs, std::fabs(v));
  CHECK(max_abs == 1.0);
  CHECK(scale > 0.0);
}

TEST_CASE("normalize then denormalize round-trips to 1e-12 relative") {
  SeismicSection s(37, 23);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (double& v : s.data) v = u(rng);
  auto [scaled, scale] = normalize(s);
  for (size_t i = 0; i < s.data.size(); ++i) {
    const double back = scaled.data[i] * scale;
    const double denom = std::max(std::fabs(s.data[i]), 1e-30);
    CHECK(std::fabs(back - s.data[i]) / denom <= 1e-12);
  }
}

TEST_CASE("normalize rejects an all-zero section") {
  SeismicSection s(3, 3, 0.0);
  CHECK_THROWS_WITH_AS(normalize(s), doctest::Contains("degenerate amplitude range"),
                       std::invalid_argument);
}

TEST_CASE("stats on a hand case") {
  auto s = from_rows({{1, -2, 3}});
  auto st = stats(s, 3);
  CHECK(st.max_abs == 3.0);
  CHECK(st.mean == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("stats variance of a constant grid is zero") {
  SeismicSection s(10, 10, 5.0);
  auto st = stats(s, 4);
  CHECK(st.variance == 0.0);
  CHECK(st.max_abs == 5.0);
}

TEST_CASE("stats histogram counts sum to M*N and bins cover the range") {
  SeismicSection s(100, 100);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double& v : s.data) v = g(rng);
  auto st = stats(s, 17);
  long total = 0;
  for (const auto& b : st.histogram) {
    CHECK(b.upper >= b.lower);
    total += b.count;
  }
  CHECK(total == 100L * 100L);
  CHECK(st.histogram.size() == 17);
}

TEST_CASE("stats variance estimate converges on Gaussian samples") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g(0.0, 0.1);

  SeismicSection small(100, 100);
  for (double& v : small.data) v = g(rng);
  CHECK(stats(small, 1).variance == doctest::Approx(0.01).epsilon(0.05));

  SeismicSection big(1000, 1000);
  for (double& v : big.data) v = g(rng);
  const double est = stats(big, 1).variance;
  CHECK(std::fabs(est - 0.01) / 0.01 < 0.01);
}

TEST_CASE("mask_complement of the empty family is all-ones") {
  auto c = mask_complement({}, 2, 2);
  for (auto v : c.data) CHECK(v == 1);
}

TEST_CASE("mask_complement of all-ones is all-zeros") {
  BinaryMask ones(2, 2, 1);
  std::vector<BinaryMask> fam{ones};
  auto c = mask_complement(fam, 2, 2);
  for (auto v : c.data) CHECK(v == 0);
}

TEST_CASE("mask_complement of two disjoint halves is all-zeros") {
  BinaryMask top(4, 4), bottom(4, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) (i < 2 ? top : bottom).at(i, j) = 1;
  std::vector<BinaryMask> fam{top, bottom};
  auto c = mask_complement(fam, 4, 4);
  for (auto v : c.data) CHECK(v == 0);
}

TEST_CASE("mask_complement rejects overlapping masks") {
  BinaryMask a(2, 2, 1), b(2, 2);
  b.at(0, 0) = 1;
  std::vector<BinaryMask> fam{a, b};
  CHECK_THROWS_WITH_AS(mask_complement(fam, 2, 2),
                       doctest::Contains("masks not disjoint"), std::invalid_argument);
}

TEST_CASE("disjoint masks plus complement partition the grid exactly") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> lab(0, 3);  // label 3 = "unassigned"
  const int m = 31, n = 17;
  std::vector<BinaryMask> fam(3, BinaryMask(m, n));
  std::vector<int> labels(static_cast<size_t>(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const int k = lab(rng);
      labels[static_cast<size_t>(i) * n + j] = k;
      if (k < 3) fam[k].at(i, j) = 1;
    }
  auto c = mask_complement(fam, m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      int sum = c.at(i, j);
      for (const auto& f : fam) sum += f.at(i, j);
      CHECK(sum == 1);
      CHECK(c.at(i, j) == (labels[static_cast<size_t>(i) * n + j] == 3 ? 1 : 0));
    }
}

TEST_CASE("validate rejects non-finite amplitudes") {
  SeismicSection s(2, 2, 0.0);
  s.at(1, 1) = std::nan("");
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
