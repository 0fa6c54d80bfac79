#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace n2ns {

enum class AxisUnit { time, depth };

// 2D amplitude grid, row-major, m samples (time/depth) x n traces.
struct SeismicSection {
  int m = 0;
  int n = 0;
  std::vector<double> data;
  double sample_interval = 1.0;  // seconds or meters, per axis_unit
  AxisUnit axis_unit = AxisUnit::time;
  std::string provenance;

  SeismicSection() = default;
  SeismicSection(int m_, int n_, double fill = 0.0)
      : m(m_), n(n_), data(static_cast<size_t>(m_) * n_, fill) {}

  double& at(int i, int j) { return data[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return data[static_cast<size_t>(i) * n + j]; }
  size_t size() const { return data.size(); }

  // Throws std::invalid_argument on shape/finiteness violations.
  void validate() const;
};

struct BinaryMask {
  int m = 0;
  int n = 0;
  std::vector<uint8_t> data;  // entries exactly 0 or 1

  BinaryMask() = default;
  BinaryMask(int m_, int n_, uint8_t fill = 0)
      : m(m_), n(n_), data(static_cast<size_t>(m_) * n_, fill) {}

  uint8_t& at(int i, int j) { return data[static_cast<size_t>(i) * n + j]; }
  uint8_t at(int i, int j) const { return data[static_cast<size_t>(i) * n + j]; }
};

struct SectionStats {
  struct Bin {
    double lower;
    double upper;
    long count;
  };
  double max_abs = 0.0;
  double mean = 0.0;
  double variance = 0.0;  // population variance
  std::vector<Bin> histogram;
};

// Divides every entry by max_abs; returns the scaled section and the scale.
// Throws on an all-zero section ("degenerate amplitude range").
std::pair<SeismicSection, double> normalize(const SeismicSection& section);

SectionStats stats(const SeismicSection& section, int n_bins);

// All-ones minus the element-wise sum of the given masks.
// Throws if the masks overlap anywhere ("masks not disjoint").
BinaryMask mask_complement(std::span<const BinaryMask> masks, int m, int n);

}  // namespace n2ns
