#pragma once

#include <functional>
#include <vector>

#include "n2ns/section.hpp"

namespace n2ns {

// Ordered amplitude thresholds alpha_1 < ... < alpha_t, all positive.
struct ClipSchedule {
  std::vector<double> alphas;

  int t() const { return static_cast<int>(alphas.size()); }
  void validate() const;
};

// Disjoint amplitude-band masks: B_k marks cells with alpha_{k-1} < |x| <= alpha_k
// (alpha_0 = 0); the top band also absorbs |x| > alpha_t.
struct BandDecomposition {
  std::vector<BinaryMask> band_masks;
  ClipSchedule schedule;
};

// Denoiser operating on a section normalized to roughly [-1, 1].
using DenoiserFn = std::function<SeismicSection(const SeismicSection&)>;

SeismicSection clip(const SeismicSection& section, double alpha);

BandDecomposition decompose(const SeismicSection& section, const ClipSchedule& schedule);

// Evenly spaced thresholds {k * max_abs / t : k = 1..t}.
ClipSchedule default_schedule(const SeismicSection& section, int t);

// Clip & de-noise composition: per band k, run the denoiser on the section
// clipped at alpha_k (unclipped for the top band) and normalized by alpha_k,
// rescale by alpha_k, and keep the band's cells.
SeismicSection clip_denoise(const SeismicSection& section, const ClipSchedule& schedule,
                            const DenoiserFn& denoiser);

}  // namespace n2ns
