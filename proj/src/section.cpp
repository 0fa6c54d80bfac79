#include "n2ns/section.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace n2ns {

void SeismicSection::validate() const {
  if (m < 1 || n < 1) throw std::invalid_argument("section dimensions must be >= 1");
  if (data.size() != static_cast<size_t>(m) * n)
    throw std::invalid_argument("section data size does not match m*n");
  if (!(sample_interval > 0.0))
    throw std::invalid_argument("sample_interval must be > 0");
  for (double v : data)
    if (!std::isfinite(v)) throw std::invalid_argument("section contains non-finite amplitude");
}

std::pair<SeismicSection, double> normalize(const SeismicSection& section) {
  section.validate();
  double max_abs = 0.0;
  for (double v : section.data) max_abs = std::max(max_abs, std::fabs(v));
  if (max_abs == 0.0) throw std::invalid_argument("degenerate amplitude range");
  SeismicSection out = section;
  for (double& v : out.data) v /= max_abs;
  return {std::move(out), max_abs};
}

SectionStats stats(const SeismicSection& section, int n_bins) {
  section.validate();
  if (n_bins < 1) throw std::invalid_argument("n_bins must be >= 1");
  SectionStats s;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double v : section.data) {
    s.max_abs = std::max(s.max_abs, std::fabs(v));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  const double count = static_cast<double>(section.size());
  s.mean = sum / count;
  double ss = 0.0;
  for (double v : section.data) {
    const double d = v - s.mean;
    ss += d * d;
  }
  s.variance = ss / count;

  s.histogram.resize(n_bins);
  const double width = (hi - lo) / n_bins;
  for (int b = 0; b < n_bins; ++b)
    s.histogram[b] = {lo + b * width, lo + (b + 1) * width, 0};
  s.histogram.back().upper = hi;  // rightmost bin closed
  for (double v : section.data) {
    int b = (width > 0.0) ? static_cast<int>((v - lo) / width) : 0;
    b = std::clamp(b, 0, n_bins - 1);
    ++s.histogram[b].count;
  }
  return s;
}

BinaryMask mask_complement(std::span<const BinaryMask> masks, int m, int n) {
  BinaryMask out(m, n, 1);
  for (const BinaryMask& mask : masks) {
    if (mask.m != m || mask.n != n)
      throw std::invalid_argument("mask shape mismatch");
    for (size_t i = 0; i < out.data.size(); ++i) {
      if (mask.data[i] == 0) continue;
      if (out.data[i] == 0) throw std::invalid_argument("masks not disjoint");
      out.data[i] = 0;
    }
  }
  return out;
}

}  // namespace n2ns
