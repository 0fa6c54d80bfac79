#include "n2ns/runconfig.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace n2ns {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::pair<double, double>> parse_bands(const std::string& v) {
  // "0:10,10:20,..." pairs in Hz
  std::vector<std::pair<double, double>> bands;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("bad band '" + item + "' (expected low:high)");
    bands.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
  }
  if (bands.empty()) throw std::invalid_argument("empty band list");
  return bands;
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
  RunConfig rc;
  using Setter = std::function<void(const std::string&)>;
  auto i = [](int& f) { return [&f](const std::string& v) { f = std::stoi(v); }; };
  auto d = [](double& f) { return [&f](const std::string& v) { f = std::stod(v); }; };
  auto u = [](uint64_t& f) { return [&f](const std::string& v) { f = std::stoull(v); }; };
  auto b = [](bool& f) {
    return [&f](const std::string& v) {
      if (v == "true" || v == "1") f = true;
      else if (v == "false" || v == "0") f = false;
      else throw std::invalid_argument("expected boolean, got '" + v + "'");
    };
  };

  const std::map<std::string, Setter> setters = {
      {"wedge.n_samples", i(rc.wedge.n_samples)},
      {"wedge.n_traces", i(rc.wedge.n_traces)},
      {"wedge.top_reflector_row", i(rc.wedge.top_reflector_row)},
      {"wedge.apex_trace", i(rc.wedge.wedge_apex_trace)},
      {"wedge.max_thickness_rows", i(rc.wedge.max_thickness_rows)},
      {"wedge.peak_frequency_hz", d(rc.wedge.wavelet_peak_frequency_hz)},
      {"wedge.sample_interval_s", d(rc.wedge.sample_interval_s)},
      {"noise.mean", d(rc.noise.mean)},
      {"noise.sigma", d(rc.noise.sigma)},
      {"noise.seed", u(rc.noise.seed)},
      {"noise.from_row", i(rc.noise.region_start_row)},
      {"model.feature_dim", i(rc.model.feature_dim)},
      {"model.residual_units", i(rc.model.n_residual_units)},
      {"model.learning_rate", d(rc.model.learning_rate)},
      {"model.steps_per_epoch", i(rc.model.steps_per_epoch)},
      {"model.batch_size", i(rc.model.batch_size)},
      {"model.patch_size", i(rc.model.patch_size)},
      {"model.patience", i(rc.model.early_stop_patience_epochs)},
      {"model.max_epochs", i(rc.model.max_epochs)},
      {"model.seed", u(rc.model.seed)},
      {"model.global_skip", b(rc.model.global_skip)},
      {"model.sigma_min", d(rc.model.train_sigma_min)},
      {"model.sigma_max", d(rc.model.train_sigma_max)},
      {"model.validation_pairs", i(rc.model.validation_pairs)},
      {"model.tile_size", i(rc.model.tile_size)},
      {"model.tile_overlap", i(rc.model.tile_overlap)},
      {"fx.window_length", i(rc.fx.window_length_samples)},
      {"fx.overlap", d(rc.fx.window_overlap)},
      {"fx.filter_length", i(rc.fx.filter_length_traces)},
      {"fx.prewhitening", d(rc.fx.prewhitening)},
      {"clip.t", i(rc.clip_t)},
      {"seed", u(rc.seed)},
  };

  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "eval.bands") {
      rc.eval_bands = parse_bands(value);
      continue;
    }
    if (key == "fx.band") {
      const auto bands = parse_bands(value);
      rc.fx.band_hz = bands.front();
      continue;
    }
    const auto it = setters.find(key);
    if (it == setters.end())
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": unknown config key '" + key + "'");
    it->second(value);
  }
  return rc;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config_text(ss.str(), path);
}

}  // namespace n2ns
