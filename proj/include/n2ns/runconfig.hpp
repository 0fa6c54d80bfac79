#pragma once

#include <string>
#include <utility>
#include <vector>

#include "n2ns/fxdecon.hpp"
#include "n2ns/model.hpp"
#include "n2ns/synth.hpp"

namespace n2ns {

// Tunables for every pipeline stage, parsed from "key = value" text.
// Unknown keys are rejected.
struct RunConfig {
  WedgeConfig wedge;
  NoiseSpec noise;
  DenoiserConfig model;
  FxConfig fx;
  std::vector<std::pair<double, double>> eval_bands = {
      {0, 10}, {10, 20}, {20, 30}, {30, 40}, {40, 50}, {50, 60}};
  int clip_t = 2;
  uint64_t seed = 0;
};

RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& origin);

}  // namespace n2ns
