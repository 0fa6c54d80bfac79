#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "n2ns/checkpoint.hpp"
#include "n2ns/clip.hpp"
#include "n2ns/fxdecon.hpp"
#include "n2ns/gridfile.hpp"
#include "n2ns/metrics.hpp"
#include "n2ns/model.hpp"
#include "n2ns/render.hpp"
#include "n2ns/runconfig.hpp"
#include "n2ns/synth.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDivergence = 3;

n2ns::RunConfig load_config(const std::string& explicit_path) {
  if (!explicit_path.empty()) return n2ns::parse_run_config(explicit_path);
  if (const char* env = std::getenv("N2NS_CONFIG"); env && *env)
    return n2ns::parse_run_config(env);
  return {};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void print_stats(const n2ns::SeismicSection& s) {
  const auto st = n2ns::stats(s, 10);
  std::cout << s.m << "x" << s.n << "  max_abs=" << fmt(st.max_abs)
            << "  mean=" << fmt(st.mean) << "  variance=" << fmt(st.variance) << "\n";
}

std::vector<n2ns::SeismicSection> load_corpus_dir(const std::string& dir) {
  std::vector<std::filesystem::path> paths;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext == ".csv" || ext == ".n2ng" || ext == ".grid") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<n2ns::SeismicSection> corpus;
  for (const auto& p : paths) corpus.push_back(n2ns::load_seismic(p.string()));
  if (corpus.empty())
    throw std::runtime_error("no corpus files (.csv/.n2ng/.grid) in " + dir);
  return corpus;
}

void write_training_log(const std::string& path, const n2ns::TrainingLog& log) {
  std::ofstream f(path, std::ios::trunc);
  f << "epoch,train_loss,val_mse,wall_s\n";
  for (const auto& e : log.epochs)
    f << e.epoch << ',' << fmt(e.train_loss) << ',' << fmt(e.val_mse) << ','
      << fmt(e.wall_s) << '\n';
  const char* reason =
      log.termination == n2ns::TrainingLog::Termination::converged ? "converged"
      : log.termination == n2ns::TrainingLog::Termination::max_epochs ? "max_epochs"
                                                                      : "manual";
  f << "# termination," << reason << '\n';
}

int cmd_wedge_gen(const std::string& out, const std::string& config_path) {
  const auto rc = load_config(config_path);
  n2ns::SeismicSection wedge = n2ns::make_wedge(rc.wedge);
  wedge.provenance = "wedge-gen";
  n2ns::write_grid(out, wedge);
  print_stats(wedge);
  return 0;
}

int cmd_corrupt(const std::string& in, const std::string& out, double sigma,
                double mean, uint64_t seed, int from_row) {
  n2ns::SeismicSection s = n2ns::load_seismic(in);
  n2ns::NoiseSpec spec{mean, sigma, seed, from_row};
  n2ns::SeismicSection noisy = n2ns::add_noise(s, spec);
  std::ostringstream stage;
  stage << "corrupt sigma=" << fmt(sigma) << " mean=" << fmt(mean)
        << " seed=" << seed << " from_row=" << from_row;
  n2ns::append_provenance(noisy, stage.str());
  n2ns::write_grid(out, noisy);
  print_stats(noisy);
  return 0;
}

int cmd_train(const std::string& corpus_dir, bool procedural,
              const std::string& out_ckpt, const std::string& config_path,
              const std::string& resume_path) {
  const auto rc = load_config(config_path);
  std::vector<n2ns::SeismicSection> corpus;
  if (procedural) {
    corpus = n2ns::procedural_textures(32, std::max(128, rc.model.patch_size * 2),
                                       rc.model.seed + 1);
  } else {
    corpus = load_corpus_dir(corpus_dir);
  }

  n2ns::Model<float> model = n2ns::Model<float>::random_init(rc.model);
  n2ns::ResumeState resume;
  const n2ns::Model<float>* initial_best = nullptr;
  n2ns::Checkpoint prev;
  if (!resume_path.empty()) {
    prev = n2ns::load_checkpoint(resume_path);
    model = prev.model;
    resume = prev.resume;
    initial_best = &prev.best;
  }

  n2ns::TrainResult result = n2ns::train(std::move(model), corpus, resume, initial_best);
  n2ns::Checkpoint ckpt;
  ckpt.model = std::move(result.last);
  ckpt.best = std::move(result.best);
  ckpt.resume.start_epoch =
      result.log.epochs.empty() ? resume.start_epoch
                                : result.log.epochs.back().epoch + 1;
  ckpt.resume.best_val = result.best_val;
  ckpt.resume.patience_used = 0;  // recomputed from the tail of the log
  for (auto it = result.log.epochs.rbegin(); it != result.log.epochs.rend(); ++it) {
    if (it->val_mse <= result.best_val) break;
    ++ckpt.resume.patience_used;
  }
  if (result.diverged) {
    n2ns::save_checkpoint(out_ckpt + ".diverged", ckpt);
    write_training_log(out_ckpt + ".diverged.log.csv", result.log);
    std::cerr << "error: " << result.divergence_message << "\n";
    return kExitDivergence;
  }
  n2ns::save_checkpoint(out_ckpt, ckpt);
  write_training_log(out_ckpt + ".log.csv", result.log);
  std::cout << "best validation MSE " << fmt(result.best_val) << " over "
            << result.log.epochs.size() << " epochs\n";
  return 0;
}

n2ns::DenoiserFn make_denoiser(n2ns::Model<float>& model) {
  return [&model](const n2ns::SeismicSection& s) { return n2ns::denoise_image(model, s); };
}

int cmd_denoise(const std::string& in, const std::string& out,
                const std::string& ckpt_path, int t, const std::string& schedule_str,
                const std::string& mode, bool identity) {
  n2ns::SeismicSection s = n2ns::load_seismic(in);

  n2ns::Checkpoint ckpt;
  n2ns::DenoiserFn denoiser;
  if (identity) {
    denoiser = [](const n2ns::SeismicSection& x) { return x; };
  } else {
    if (ckpt_path.empty()) throw CLI::ValidationError("--checkpoint or --identity required");
    ckpt = n2ns::load_checkpoint(ckpt_path);
    denoiser = make_denoiser(ckpt.best);
  }

  n2ns::SeismicSection result;
  if (mode == "n2n-image") {
    auto [normed, scale] = n2ns::normalize(s);
    n2ns::SeismicSection d = denoiser(normed);
    for (double& v : d.data) v *= scale;
    result = std::move(d);
    result.provenance = s.provenance;
    n2ns::append_provenance(result, "denoise mode=n2n-image");
  } else {
    n2ns::ClipSchedule schedule;
    if (!schedule_str.empty()) {
      std::stringstream ss(schedule_str);
      for (std::string item; std::getline(ss, item, ',');)
        schedule.alphas.push_back(std::stod(item));
    } else {
      schedule = n2ns::default_schedule(s, t);
    }
    result = n2ns::clip_denoise(s, schedule, denoiser);
    std::ostringstream stage;
    stage << "denoise mode=n2n-seismic schedule=";
    for (size_t k = 0; k < schedule.alphas.size(); ++k)
      stage << (k ? "," : "") << fmt(schedule.alphas[k]);
    n2ns::append_provenance(result, stage.str());
  }
  n2ns::write_grid(out, result);
  print_stats(result);
  return 0;
}

int cmd_fxdecon(const std::string& in, const std::string& out,
                const std::string& config_path) {
  const auto rc = load_config(config_path);
  n2ns::SeismicSection s = n2ns::load_seismic(in);
  n2ns::SeismicSection result = n2ns::fx_decon(s, rc.fx);
  std::ostringstream stage;
  stage << "fxdecon window=" << rc.fx.window_length_samples
        << " filter=" << rc.fx.filter_length_traces
        << " prewhitening=" << fmt(rc.fx.prewhitening);
  n2ns::append_provenance(result, stage.str());
  n2ns::write_grid(out, result);
  print_stats(result);
  return 0;
}

int cmd_eval(const std::string& clean_path, const std::vector<std::string>& test_paths,
             double dt, double velocity, const std::string& bands_str,
             const std::string& out_csv) {
  n2ns::SeismicSection clean = n2ns::load_seismic(clean_path);

  double dt_s = dt;
  if (dt_s <= 0.0) {
    if (clean.axis_unit == n2ns::AxisUnit::time) {
      dt_s = clean.sample_interval;
    } else if (velocity > 0.0) {
      dt_s = 2.0 * clean.sample_interval / velocity;  // two-way time
    } else {
      throw std::runtime_error("depth-axis data: supply --dt or --velocity");
    }
  }

  std::vector<std::pair<double, double>> bands;
  if (!bands_str.empty()) {
    std::stringstream ss(bands_str);
    for (std::string item; std::getline(ss, item, ',');) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("bad band '" + item + "' (expected low:high)");
      bands.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    }
  } else {
    bands = {{0, 10}, {10, 20}, {20, 30}, {30, 40}, {40, 50}, {50, 60}};
  }

  std::ostringstream csv;
  csv << "label,mse,snr_db,corrcoef";
  for (const auto& [lo, hi] : bands)
    csv << ",phase_corr_" << fmt(lo) << "_" << fmt(hi);
  csv << '\n';
  for (const std::string& tp : test_paths) {
    n2ns::SeismicSection test = n2ns::load_seismic(tp);
    const auto report = n2ns::evaluate(
        clean, test, dt_s, bands, std::filesystem::path(tp).filename().string());
    csv << report.label << ',' << fmt(report.mse) << ','
        << (report.snr_infinite ? "inf" : fmt(report.snr_db)) << ','
        << fmt(report.corrcoef);
    for (const auto& b : report.phase_band_corr) csv << ',' << fmt(b.corrcoef);
    csv << '\n';
  }
  if (out_csv.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(out_csv, std::ios::trunc);
    f << csv.str();
  }
  return 0;
}

int cmd_render(const std::string& in, const std::string& out_png,
               double clip_percentile, const std::string& cmap) {
  n2ns::SeismicSection s = n2ns::load_seismic(in);
  n2ns::render_png(out_png, s, clip_percentile,
                   cmap == "seismic" ? n2ns::Colormap::seismic : n2ns::Colormap::gray);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"N2N-Seismic random-noise attenuation pipeline"};
  app.require_subcommand(1);

  std::string in, out, config_path, ckpt_path, resume_path, corpus_dir;
  std::string schedule_str, mode = "n2n-seismic", cmap = "gray", bands_str, out_csv;
  std::string clean_path;
  std::vector<std::string> test_paths;
  double sigma = 0.0, mean = 0.0, dt = 0.0, velocity = 0.0, clip_percentile = 99.0;
  uint64_t seed = 0;
  int from_row = 0, t = 2;
  bool procedural = false, identity = false;

  auto* wedge = app.add_subcommand("wedge-gen", "generate the clean wedge model");
  wedge->add_option("--out", out)->required();
  wedge->add_option("--config", config_path);

  auto* corrupt = app.add_subcommand("corrupt", "add Gaussian noise to a grid");
  corrupt->add_option("--in", in)->required();
  corrupt->add_option("--out", out)->required();
  corrupt->add_option("--sigma", sigma)->required();
  corrupt->add_option("--mean", mean);
  corrupt->add_option("--seed", seed);
  corrupt->add_option("--from-row", from_row);

  auto* train = app.add_subcommand("train", "train the residual denoiser");
  train->add_option("--corpus-dir", corpus_dir);
  train->add_flag("--procedural", procedural, "use the built-in texture corpus");
  train->add_option("--out-checkpoint", ckpt_path)->required();
  train->add_option("--config", config_path);
  train->add_option("--resume", resume_path);

  auto* denoise = app.add_subcommand("denoise", "run clip & de-noise or plain inference");
  denoise->add_option("--in", in)->required();
  denoise->add_option("--out", out)->required();
  denoise->add_option("--checkpoint", ckpt_path);
  denoise->add_option("--t", t);
  denoise->add_option("--schedule", schedule_str, "explicit thresholds a1,a2,...");
  denoise->add_option("--mode", mode)->check(CLI::IsMember({"n2n-seismic", "n2n-image"}));
  denoise->add_flag("--identity", identity, "debug: identity denoiser");

  auto* fx = app.add_subcommand("fxdecon", "f-x prediction-filter baseline");
  fx->add_option("--in", in)->required();
  fx->add_option("--out", out)->required();
  fx->add_option("--config", config_path);

  auto* eval = app.add_subcommand("eval", "metric report against a clean reference");
  eval->add_option("--clean", clean_path)->required();
  eval->add_option("--test", test_paths)->required();
  eval->add_option("--dt", dt, "time sample interval (s) for phase analysis");
  eval->add_option("--velocity", velocity, "constant velocity (m/s) for depth data");
  eval->add_option("--bands", bands_str, "phase bands low:high,low:high,... in Hz");
  eval->add_option("--out-csv", out_csv);

  auto* render = app.add_subcommand("render", "render a grid to PNG");
  render->add_option("--in", in)->required();
  render->add_option("--out-png", out)->required();
  render->add_option("--clip-percentile", clip_percentile);
  render->add_option("--cmap", cmap)->check(CLI::IsMember({"gray", "seismic"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (wedge->parsed()) return cmd_wedge_gen(out, config_path);
    if (corrupt->parsed()) return cmd_corrupt(in, out, sigma, mean, seed, from_row);
    if (train->parsed()) {
      if (corpus_dir.empty() && !procedural) {
        std::cerr << "error: --corpus-dir or --procedural required\n";
        return kExitUsage;
      }
      return cmd_train(corpus_dir, procedural, ckpt_path, config_path, resume_path);
    }
    if (denoise->parsed())
      return cmd_denoise(in, out, ckpt_path, t, schedule_str, mode, identity);
    if (fx->parsed()) return cmd_fxdecon(in, out, config_path);
    if (eval->parsed())
      return cmd_eval(clean_path, test_paths, dt, velocity, bands_str, out_csv);
    if (render->parsed()) return cmd_render(in, out, clip_percentile, cmap);
  } catch (const n2ns::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
