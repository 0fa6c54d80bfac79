#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "n2ns/section.hpp"
#include "n2ns/synth.hpp"

namespace n2ns {

struct DenoiserConfig {
  int feature_dim = 64;
  int n_residual_units = 16;
  double learning_rate = 0.01;
  int steps_per_epoch = 1000;
  int batch_size = 16;
  int patch_size = 64;
  int early_stop_patience_epochs = 5;
  int max_epochs = 30;
  uint64_t seed = 0;
  bool global_skip = true;
  double train_sigma_min = 0.02;
  double train_sigma_max = 0.12;
  int validation_pairs = 16;
  int tile_size = 256;
  int tile_overlap = 16;

  void validate() const;
};

template <class T>
struct Tensor4 {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<T> v;

  Tensor4() = default;
  Tensor4(int n_, int c_, int h_, int w_, T fill = T(0))
      : n(n_), c(c_), h(h_), w(w_),
        v(static_cast<size_t>(n_) * c_ * h_ * w_, fill) {}

  size_t size() const { return v.size(); }
  T* plane(int a, int b) {
    return v.data() + (static_cast<size_t>(a) * c + b) * h * w;
  }
  const T* plane(int a, int b) const {
    return v.data() + (static_cast<size_t>(a) * c + b) * h * w;
  }
};

// Thrown when training produces a non-finite loss or gradient.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Residual denoiser: head conv -> n residual units -> tail conv (+ global skip).
// Each unit is conv -> BN -> PReLU -> conv -> BN with an identity shortcut.
template <class T>
class Model {
 public:
  struct Unit {
    Tensor4<T> c1_w, c2_w;                    // [F,F,3,3]
    std::vector<T> c1_b, c2_b;                // [F]
    std::vector<T> bn1_gamma, bn1_beta, bn1_rmean, bn1_rvar;
    std::vector<T> bn2_gamma, bn2_beta, bn2_rmean, bn2_rvar;
    std::vector<T> prelu_a;
  };

  DenoiserConfig config;
  Tensor4<T> head_w;  // [F,1,3,3]
  Tensor4<T> tail_w;  // [1,F,3,3]
  std::vector<T> head_b, tail_b;
  std::vector<Unit> units;

  // Adam state, parallel to parameter_views() ordering.
  std::vector<std::vector<T>> adam_m, adam_v;
  int64_t adam_step = 0;

  static Model random_init(const DenoiserConfig& cfg);

  // Named views over every trainable parameter, in a fixed order.
  std::vector<std::pair<std::string, std::span<T>>> parameter_views();
  // Batch-norm running statistics (non-trainable buffers).
  std::vector<std::pair<std::string, std::span<T>>> buffer_views();

  Tensor4<T> forward(const Tensor4<T>& x, bool train_mode,
                     bool update_running_stats = true);

  // Train-mode forward + loss without touching any state (for gradient checks).
  double loss_at(const Tensor4<T>& in, const Tensor4<T>& target);

  // Fills `grads` (parallel to parameter_views order) via backprop;
  // returns the loss. Updates running batch-norm statistics.
  double compute_gradients(const Tensor4<T>& in, const Tensor4<T>& target,
                           std::vector<std::vector<T>>& grads);

  // One Adam step (beta1 0.9, beta2 0.999, eps 1e-8); returns pre-update loss.
  double backward_and_step(const Tensor4<T>& in, const Tensor4<T>& target);

  template <class U>
  Model<U> cast() const;
};

// Sum over pixels of squared difference, averaged over batch elements.
template <class T>
double batch_loss(const Tensor4<T>& pred, const Tensor4<T>& target);

// Zero-padded "same" 3x3 convolution; y is resized to [x.n, w.n, x.h, x.w].
template <class T>
void conv3x3_same(const Tensor4<T>& x, const Tensor4<T>& w,
                  const std::vector<T>& b, Tensor4<T>& y);

struct TrainingLog {
  struct Epoch {
    int epoch;
    double train_loss;
    double val_mse;
    double wall_s;
  };
  enum class Termination { converged, max_epochs, manual };
  std::vector<Epoch> epochs;
  Termination termination = Termination::max_epochs;
};

// Carries trainer state across a checkpoint/resume boundary.
struct ResumeState {
  int start_epoch = 0;
  double best_val = -1.0;  // < 0 means "no best yet"
  int patience_used = 0;
};

struct TrainResult {
  Model<float> best;  // best-validation checkpoint
  Model<float> last;  // state to resume from
  TrainingLog log;
  double best_val = 0.0;
  bool diverged = false;  // training halted on a non-finite loss/gradient
  std::string divergence_message;
};

// Noise2Noise training over the corpus; batches come from sample_noise_pairs
// with seeds derived from (config.seed, epoch, step), so a resumed run
// replays exactly.
TrainResult train(Model<float> model, const std::vector<SeismicSection>& corpus,
                  const ResumeState& resume = {},
                  const Model<float>* initial_best = nullptr);

// Mean MSE of model(noisy) vs clean over the deterministic validation set.
double validation_mse(Model<float>& model, const std::vector<SeismicSection>& corpus);

// Full-section inference with overlap-averaged tiling. Input expected in [-1,1].
SeismicSection denoise_image(Model<float>& model, const SeismicSection& section);

extern template class Model<float>;
extern template class Model<double>;
extern template Model<double> Model<float>::cast<double>() const;
extern template Model<float> Model<double>::cast<float>() const;

}  // namespace n2ns
