#include "n2ns/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace n2ns {

namespace {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// Zero-padded "same" 3x3 convolution. y must be pre-sized [n, cout, h, w].
template <class T>
void conv3x3_forward(const Tensor4<T>& x, const Tensor4<T>& w,
                     const std::vector<T>& b, Tensor4<T>& y) {
  const int H = x.h, W = x.w;
  for (int a = 0; a < x.n; ++a) {
    for (int co = 0; co < w.n; ++co) {
      T* yp = y.plane(a, co);
      std::fill(yp, yp + static_cast<size_t>(H) * W, b[co]);
      for (int ci = 0; ci < w.c; ++ci) {
        const T* xp = x.plane(a, ci);
        const T* wp = w.plane(co, ci);
        for (int ky = -1; ky <= 1; ++ky) {
          const int oy0 = std::max(0, -ky), oy1 = H - 1 - std::max(0, ky);
          for (int kx = -1; kx <= 1; ++kx) {
            const T wv = wp[(ky + 1) * 3 + (kx + 1)];
            const int ox0 = std::max(0, -kx), ox1 = W - 1 - std::max(0, kx);
            const int len = ox1 - ox0 + 1;
            for (int oy = oy0; oy <= oy1; ++oy) {
              T* yr = yp + static_cast<size_t>(oy) * W + ox0;
              const T* xr = xp + static_cast<size_t>(oy + ky) * W + ox0 + kx;
              for (int i = 0; i < len; ++i) yr[i] += wv * xr[i];
            }
          }
        }
      }
    }
  }
}

template <class T>
void conv3x3_backward_data(const Tensor4<T>& dy, const Tensor4<T>& w,
                           Tensor4<T>& dx) {
  const int H = dx.h, W = dx.w;
  std::fill(dx.v.begin(), dx.v.end(), T(0));
  for (int a = 0; a < dx.n; ++a) {
    for (int ci = 0; ci < w.c; ++ci) {
      T* dxp = dx.plane(a, ci);
      for (int co = 0; co < w.n; ++co) {
        const T* dyp = dy.plane(a, co);
        const T* wp = w.plane(co, ci);
        for (int ky = -1; ky <= 1; ++ky) {
          const int oy0 = std::max(0, -ky), oy1 = H - 1 - std::max(0, ky);
          for (int kx = -1; kx <= 1; ++kx) {
            const T wv = wp[(ky + 1) * 3 + (kx + 1)];
            const int ox0 = std::max(0, -kx), ox1 = W - 1 - std::max(0, kx);
            const int len = ox1 - ox0 + 1;
            for (int oy = oy0; oy <= oy1; ++oy) {
              const T* dyr = dyp + static_cast<size_t>(oy) * W + ox0;
              T* dxr = dxp + static_cast<size_t>(oy + ky) * W + ox0 + kx;
              for (int i = 0; i < len; ++i) dxr[i] += wv * dyr[i];
            }
          }
        }
      }
    }
  }
}

template <class T>
void conv3x3_backward_params(const Tensor4<T>& dy, const Tensor4<T>& x,
                             std::vector<T>& dw, std::vector<T>& db, int cout, int cin) {
  const int H = x.h, W = x.w;
  for (int a = 0; a < x.n; ++a) {
    for (int co = 0; co < cout; ++co) {
      const T* dyp = dy.plane(a, co);
      double bsum = 0.0;
      for (size_t i = 0; i < static_cast<size_t>(H) * W; ++i) bsum += dyp[i];
      db[co] += static_cast<T>(bsum);
      for (int ci = 0; ci < cin; ++ci) {
        const T* xp = x.plane(a, ci);
        for (int ky = -1; ky <= 1; ++ky) {
          const int oy0 = std::max(0, -ky), oy1 = H - 1 - std::max(0, ky);
          for (int kx = -1; kx <= 1; ++kx) {
            const int ox0 = std::max(0, -kx), ox1 = W - 1 - std::max(0, kx);
            const int len = ox1 - ox0 + 1;
            double acc = 0.0;
            for (int oy = oy0; oy <= oy1; ++oy) {
              const T* dyr = dyp + static_cast<size_t>(oy) * W + ox0;
              const T* xr = xp + static_cast<size_t>(oy + ky) * W + ox0 + kx;
              for (int i = 0; i < len; ++i) acc += double(dyr[i]) * double(xr[i]);
            }
            dw[((static_cast<size_t>(co) * cin + ci) * 3 + (ky + 1)) * 3 + (kx + 1)] +=
                static_cast<T>(acc);
          }
        }
      }
    }
  }
}

template <class T>
struct BnCache {
  Tensor4<T> xhat;
  std::vector<T> invstd;
};

// In-place batch normalization; train mode uses batch statistics.
template <class T>
void bn_forward(Tensor4<T>& x, const std::vector<T>& gamma,
                const std::vector<T>& beta, std::vector<T>& rmean,
                std::vector<T>& rvar, bool train_mode, bool update_running,
                BnCache<T>* cache) {
  const size_t plane = static_cast<size_t>(x.h) * x.w;
  const double k = static_cast<double>(x.n) * plane;
  if (cache) {
    cache->xhat = Tensor4<T>(x.n, x.c, x.h, x.w);
    cache->invstd.assign(x.c, T(0));
  }
  for (int c = 0; c < x.c; ++c) {
    double mean, invstd;
    if (train_mode) {
      double sum = 0.0, sq = 0.0;
      for (int a = 0; a < x.n; ++a) {
        const T* p = x.plane(a, c);
        for (size_t i = 0; i < plane; ++i) {
          sum += p[i];
          sq += double(p[i]) * double(p[i]);
        }
      }
      mean = sum / k;
      const double var = std::max(0.0, sq / k - mean * mean);
      invstd = 1.0 / std::sqrt(var + kBnEps);
      if (update_running) {
        rmean[c] = static_cast<T>((1.0 - kBnMomentum) * rmean[c] + kBnMomentum * mean);
        rvar[c] = static_cast<T>((1.0 - kBnMomentum) * rvar[c] + kBnMomentum * var);
      }
    } else {
      mean = rmean[c];
      invstd = 1.0 / std::sqrt(double(rvar[c]) + kBnEps);
    }
    const T g = gamma[c], b = beta[c];
    for (int a = 0; a < x.n; ++a) {
      T* p = x.plane(a, c);
      T* xh = cache ? cache->xhat.plane(a, c) : nullptr;
      for (size_t i = 0; i < plane; ++i) {
        const T h = static_cast<T>((p[i] - mean) * invstd);
        if (xh) xh[i] = h;
        p[i] = g * h + b;
      }
    }
    if (cache) cache->invstd[c] = static_cast<T>(invstd);
  }
}

template <class T>
void bn_backward(const Tensor4<T>& dy, const BnCache<T>& cache,
                 const std::vector<T>& gamma, Tensor4<T>& dx,
                 std::vector<T>& dgamma, std::vector<T>& dbeta) {
  const size_t plane = static_cast<size_t>(dy.h) * dy.w;
  const double k = static_cast<double>(dy.n) * plane;
  for (int c = 0; c < dy.c; ++c) {
    double s1 = 0.0, s2 = 0.0;
    for (int a = 0; a < dy.n; ++a) {
      const T* d = dy.plane(a, c);
      const T* xh = cache.xhat.plane(a, c);
      for (size_t i = 0; i < plane; ++i) {
        s1 += d[i];
        s2 += double(d[i]) * double(xh[i]);
      }
    }
    dbeta[c] += static_cast<T>(s1);
    dgamma[c] += static_cast<T>(s2);
    const double gi = double(gamma[c]) * double(cache.invstd[c]);
    for (int a = 0; a < dy.n; ++a) {
      const T* d = dy.plane(a, c);
      const T* xh = cache.xhat.plane(a, c);
      T* dxp = dx.plane(a, c);
      for (size_t i = 0; i < plane; ++i)
        dxp[i] = static_cast<T>(gi * (d[i] - s1 / k - double(xh[i]) * s2 / k));
    }
  }
}

template <class T>
void prelu_forward(Tensor4<T>& x, const std::vector<T>& slope) {
  const size_t plane = static_cast<size_t>(x.h) * x.w;
  for (int a = 0; a < x.n; ++a)
    for (int c = 0; c < x.c; ++c) {
      T* p = x.plane(a, c);
      const T s = slope[c];
      for (size_t i = 0; i < plane; ++i)
        if (p[i] < T(0)) p[i] *= s;
    }
}

template <class T>
void prelu_backward(const Tensor4<T>& dy, const Tensor4<T>& x_in,
                    const std::vector<T>& slope, Tensor4<T>& dx,
                    std::vector<T>& dslope) {
  const size_t plane = static_cast<size_t>(dy.h) * dy.w;
  for (int a = 0; a < dy.n; ++a)
    for (int c = 0; c < dy.c; ++c) {
      const T* d = dy.plane(a, c);
      const T* xi = x_in.plane(a, c);
      T* dxp = dx.plane(a, c);
      const T s = slope[c];
      double da = 0.0;
      for (size_t i = 0; i < plane; ++i) {
        if (xi[i] > T(0)) {
          dxp[i] = d[i];
        } else {
          dxp[i] = s * d[i];
          da += double(d[i]) * double(xi[i]);
        }
      }
      dslope[c] += static_cast<T>(da);
    }
}

template <class T>
struct UnitCache {
  Tensor4<T> in;     // unit input (conv1 input, identity branch)
  BnCache<T> bn1;
  Tensor4<T> p_in;   // bn1 output = prelu input
  Tensor4<T> p_out;  // prelu output = conv2 input
  BnCache<T> bn2;
};

template <class T>
struct ForwardCache {
  Tensor4<T> x;
  std::vector<UnitCache<T>> units;
  Tensor4<T> stack_out;  // tail conv input
};

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
  uint64_t h = seed + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
  h ^= h >> 30;
  h *= 0xBF58476D1CE4E5B9ULL;
  h ^= h >> 27;
  h *= 0x94D049BB133111EBULL;
  h ^= h >> 31;
  return h;
}

Tensor4<float> to_tensor(const Patch& p) {
  Tensor4<float> t(1, 1, p.h, p.w);
  for (size_t i = 0; i < p.v.size(); ++i) t.v[i] = static_cast<float>(p.v[i]);
  return t;
}

Tensor4<float> to_batch_tensor(const std::vector<Patch>& patches) {
  const int h = patches[0].h, w = patches[0].w;
  Tensor4<float> t(static_cast<int>(patches.size()), 1, h, w);
  for (size_t a = 0; a < patches.size(); ++a) {
    float* p = t.plane(static_cast<int>(a), 0);
    for (size_t i = 0; i < patches[a].v.size(); ++i)
      p[i] = static_cast<float>(patches[a].v[i]);
  }
  return t;
}

}  // namespace

void DenoiserConfig::validate() const {
  if (feature_dim < 1 || n_residual_units < 1 || steps_per_epoch < 1 ||
      batch_size < 1 || max_epochs < 1 || validation_pairs < 1)
    throw std::invalid_argument("config fields must be positive");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
  if (patch_size < 8) throw std::invalid_argument("patch_size must be >= 8");
  if (early_stop_patience_epochs < 0)
    throw std::invalid_argument("patience must be >= 0");
  if (train_sigma_min < 0.0 || train_sigma_max < train_sigma_min)
    throw std::invalid_argument("invalid training sigma range");
  if (tile_size < 8 || tile_overlap < 0 || tile_overlap >= tile_size)
    throw std::invalid_argument("invalid tile geometry");
}

template <class T>
Model<T> Model<T>::random_init(const DenoiserConfig& cfg) {
  cfg.validate();
  Model<T> model;
  model.config = cfg;
  const int f = cfg.feature_dim;
  std::mt19937_64 rng(cfg.seed);
  auto fill_he = [&rng](auto& tensor, int fan_in) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(2.0 / fan_in));
    for (auto& v : tensor.v) v = static_cast<T>(gauss(rng));
  };
  model.head_w = Tensor4<T>(f, 1, 3, 3);
  fill_he(model.head_w, 9);
  model.head_b.assign(f, T(0));
  model.units.resize(cfg.n_residual_units);
  for (auto& u : model.units) {
    u.c1_w = Tensor4<T>(f, f, 3, 3);
    u.c2_w = Tensor4<T>(f, f, 3, 3);
    fill_he(u.c1_w, 9 * f);
    fill_he(u.c2_w, 9 * f);
    u.c1_b.assign(f, T(0));
    u.c2_b.assign(f, T(0));
    u.bn1_gamma.assign(f, T(1));
    u.bn1_beta.assign(f, T(0));
    u.bn1_rmean.assign(f, T(0));
    u.bn1_rvar.assign(f, T(1));
    u.bn2_gamma.assign(f, T(1));
    u.bn2_beta.assign(f, T(0));
    u.bn2_rmean.assign(f, T(0));
    u.bn2_rvar.assign(f, T(1));
    u.prelu_a.assign(f, T(0.25));
  }
  model.tail_w = Tensor4<T>(1, f, 3, 3);
  fill_he(model.tail_w, 9 * f);
  model.tail_b.assign(1, T(0));

  auto views = model.parameter_views();
  model.adam_m.resize(views.size());
  model.adam_v.resize(views.size());
  for (size_t i = 0; i < views.size(); ++i) {
    model.adam_m[i].assign(views[i].second.size(), T(0));
    model.adam_v[i].assign(views[i].second.size(), T(0));
  }
  return model;
}

template <class T>
std::vector<std::pair<std::string, std::span<T>>> Model<T>::parameter_views() {
  std::vector<std::pair<std::string, std::span<T>>> views;
  views.emplace_back("head.w", std::span<T>(head_w.v));
  views.emplace_back("head.b", std::span<T>(head_b));
  for (size_t k = 0; k < units.size(); ++k) {
    const std::string p = "unit" + std::to_string(k) + ".";
    Unit& u = units[k];
    views.emplace_back(p + "c1.w", std::span<T>(u.c1_w.v));
    views.emplace_back(p + "c1.b", std::span<T>(u.c1_b));
    views.emplace_back(p + "bn1.gamma", std::span<T>(u.bn1_gamma));
    views.emplace_back(p + "bn1.beta", std::span<T>(u.bn1_beta));
    views.emplace_back(p + "prelu.a", std::span<T>(u.prelu_a));
    views.emplace_back(p + "c2.w", std::span<T>(u.c2_w.v));
    views.emplace_back(p + "c2.b", std::span<T>(u.c2_b));
    views.emplace_back(p + "bn2.gamma", std::span<T>(u.bn2_gamma));
    views.emplace_back(p + "bn2.beta", std::span<T>(u.bn2_beta));
  }
  views.emplace_back("tail.w", std::span<T>(tail_w.v));
  views.emplace_back("tail.b", std::span<T>(tail_b));
  return views;
}

template <class T>
std::vector<std::pair<std::string, std::span<T>>> Model<T>::buffer_views() {
  std::vector<std::pair<std::string, std::span<T>>> views;
  for (size_t k = 0; k < units.size(); ++k) {
    const std::string p = "unit" + std::to_string(k) + ".";
    Unit& u = units[k];
    views.emplace_back(p + "bn1.rmean", std::span<T>(u.bn1_rmean));
    views.emplace_back(p + "bn1.rvar", std::span<T>(u.bn1_rvar));
    views.emplace_back(p + "bn2.rmean", std::span<T>(u.bn2_rmean));
    views.emplace_back(p + "bn2.rvar", std::span<T>(u.bn2_rvar));
  }
  return views;
}

namespace {

template <class T>
Tensor4<T> forward_impl(Model<T>& model, const Tensor4<T>& x, bool train_mode,
                        bool update_running, ForwardCache<T>* cache) {
  if (x.c != 1) throw std::invalid_argument("model expects single-channel input");
  if (x.h < 8 || x.w < 8) throw std::invalid_argument("input smaller than 8x8");
  for (T v : x.v)
    if (!std::isfinite(double(v))) throw std::invalid_argument("non-finite model input");
  const int f = model.config.feature_dim;

  if (cache) {
    cache->x = x;
    cache->units.resize(model.units.size());
  }
  Tensor4<T> h(x.n, f, x.h, x.w);
  conv3x3_forward(x, model.head_w, model.head_b, h);

  Tensor4<T> z(x.n, f, x.h, x.w);
  for (size_t k = 0; k < model.units.size(); ++k) {
    auto& u = model.units[k];
    UnitCache<T>* uc = cache ? &cache->units[k] : nullptr;
    if (uc) uc->in = h;
    conv3x3_forward(h, u.c1_w, u.c1_b, z);
    bn_forward(z, u.bn1_gamma, u.bn1_beta, u.bn1_rmean, u.bn1_rvar, train_mode,
               update_running, uc ? &uc->bn1 : nullptr);
    if (uc) uc->p_in = z;
    prelu_forward(z, u.prelu_a);
    if (uc) uc->p_out = z;
    Tensor4<T> z2(x.n, f, x.h, x.w);
    conv3x3_forward(z, u.c2_w, u.c2_b, z2);
    bn_forward(z2, u.bn2_gamma, u.bn2_beta, u.bn2_rmean, u.bn2_rvar, train_mode,
               update_running, uc ? &uc->bn2 : nullptr);
    for (size_t i = 0; i < h.v.size(); ++i) h.v[i] += z2.v[i];  // identity shortcut
  }
  if (cache) cache->stack_out = h;

  Tensor4<T> y(x.n, 1, x.h, x.w);
  conv3x3_forward(h, model.tail_w, model.tail_b, y);
  if (model.config.global_skip)
    for (size_t i = 0; i < y.v.size(); ++i) y.v[i] += x.v[i];
  return y;
}

}  // namespace

template <class T>
Tensor4<T> Model<T>::forward(const Tensor4<T>& x, bool train_mode,
                             bool update_running_stats) {
  return forward_impl(*this, x, train_mode, update_running_stats,
                      static_cast<ForwardCache<T>*>(nullptr));
}

template <class T>
double batch_loss(const Tensor4<T>& pred, const Tensor4<T>& target) {
  if (pred.n != target.n || pred.c != target.c || pred.h != target.h ||
      pred.w != target.w)
    throw std::invalid_argument("loss shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < pred.v.size(); ++i) {
    const double d = double(pred.v[i]) - double(target.v[i]);
    acc += d * d;
  }
  return acc / pred.n;
}

template <class T>
double Model<T>::loss_at(const Tensor4<T>& in, const Tensor4<T>& target) {
  Tensor4<T> y = forward_impl(*this, in, true, false, static_cast<ForwardCache<T>*>(nullptr));
  return batch_loss(y, target);
}

template <class T>
double Model<T>::compute_gradients(const Tensor4<T>& in, const Tensor4<T>& target,
                                   std::vector<std::vector<T>>& grads) {
  auto views = parameter_views();
  grads.resize(views.size());
  for (size_t i = 0; i < views.size(); ++i)
    grads[i].assign(views[i].second.size(), T(0));

  ForwardCache<T> cache;
  Tensor4<T> y = forward_impl(*this, in, true, true, &cache);
  const double loss = batch_loss(y, target);
  if (!std::isfinite(loss)) throw DivergenceError("divergence: non-finite loss");

  const int f = config.feature_dim;
  const size_t n_units = units.size();
  // view index helpers (must match parameter_views order)
  auto unit_base = [](size_t k) { return 2 + 9 * k; };
  const size_t tail_w_idx = 2 + 9 * n_units;

  Tensor4<T> dy(y.n, 1, y.h, y.w);
  for (size_t i = 0; i < y.v.size(); ++i)
    dy.v[i] = static_cast<T>(2.0 * (double(y.v[i]) - double(target.v[i])) / y.n);

  // tail conv
  conv3x3_backward_params(dy, cache.stack_out, grads[tail_w_idx],
                          grads[tail_w_idx + 1], 1, f);
  Tensor4<T> g(in.n, f, in.h, in.w);
  conv3x3_backward_data(dy, tail_w, g);

  Tensor4<T> d1(in.n, f, in.h, in.w), d2(in.n, f, in.h, in.w);
  for (size_t k = n_units; k-- > 0;) {
    auto& u = units[k];
    UnitCache<T>& uc = cache.units[k];
    const size_t b = unit_base(k);
    // unit output = in + bn2(conv2(prelu(bn1(conv1(in)))))
    bn_backward(g, uc.bn2, u.bn2_gamma, d1, grads[b + 7], grads[b + 8]);
    conv3x3_backward_params(d1, uc.p_out, grads[b + 5], grads[b + 6], f, f);
    conv3x3_backward_data(d1, u.c2_w, d2);
    prelu_backward(d2, uc.p_in, u.prelu_a, d1, grads[b + 4]);
    bn_backward(d1, uc.bn1, u.bn1_gamma, d2, grads[b + 2], grads[b + 3]);
    conv3x3_backward_params(d2, uc.in, grads[b + 0], grads[b + 1], f, f);
    Tensor4<T> dres(in.n, f, in.h, in.w);
    conv3x3_backward_data(d2, u.c1_w, dres);
    for (size_t i = 0; i < g.v.size(); ++i) g.v[i] += dres.v[i];
  }
  // head conv
  conv3x3_backward_params(g, cache.x, grads[0], grads[1], f, 1);

  for (const auto& gv : grads)
    for (T v : gv)
      if (!std::isfinite(double(v)))
        throw DivergenceError("divergence: non-finite gradient");
  return loss;
}

template <class T>
double Model<T>::backward_and_step(const Tensor4<T>& in, const Tensor4<T>& target) {
  std::vector<std::vector<T>> grads;
  const double loss = compute_gradients(in, target, grads);

  ++adam_step;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(adam_step));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(adam_step));
  auto views = parameter_views();
  for (size_t i = 0; i < views.size(); ++i) {
    auto theta = views[i].second;
    for (size_t j = 0; j < theta.size(); ++j) {
      const double gj = grads[i][j];
      const double m = kAdamBeta1 * adam_m[i][j] + (1.0 - kAdamBeta1) * gj;
      const double v = kAdamBeta2 * adam_v[i][j] + (1.0 - kAdamBeta2) * gj * gj;
      adam_m[i][j] = static_cast<T>(m);
      adam_v[i][j] = static_cast<T>(v);
      theta[j] -= static_cast<T>(config.learning_rate * (m / bc1) /
                                 (std::sqrt(v / bc2) + kAdamEps));
    }
  }
  return loss;
}

template <class T>
template <class U>
Model<U> Model<T>::cast() const {
  Model<U> out;
  out.config = config;
  auto copy_tensor = [](const Tensor4<T>& src) {
    Tensor4<U> dst(src.n, src.c, src.h, src.w);
    for (size_t i = 0; i < src.v.size(); ++i) dst.v[i] = static_cast<U>(src.v[i]);
    return dst;
  };
  auto copy_vec = [](const std::vector<T>& src) {
    std::vector<U> dst(src.size());
    for (size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<U>(src[i]);
    return dst;
  };
  out.head_w = copy_tensor(head_w);
  out.head_b = copy_vec(head_b);
  out.tail_w = copy_tensor(tail_w);
  out.tail_b = copy_vec(tail_b);
  out.units.resize(units.size());
  for (size_t k = 0; k < units.size(); ++k) {
    const Unit& s = units[k];
    auto& d = out.units[k];
    d.c1_w = copy_tensor(s.c1_w);
    d.c2_w = copy_tensor(s.c2_w);
    d.c1_b = copy_vec(s.c1_b);
    d.c2_b = copy_vec(s.c2_b);
    d.bn1_gamma = copy_vec(s.bn1_gamma);
    d.bn1_beta = copy_vec(s.bn1_beta);
    d.bn1_rmean = copy_vec(s.bn1_rmean);
    d.bn1_rvar = copy_vec(s.bn1_rvar);
    d.bn2_gamma = copy_vec(s.bn2_gamma);
    d.bn2_beta = copy_vec(s.bn2_beta);
    d.bn2_rmean = copy_vec(s.bn2_rmean);
    d.bn2_rvar = copy_vec(s.bn2_rvar);
    d.prelu_a = copy_vec(s.prelu_a);
  }
  out.adam_m.resize(adam_m.size());
  out.adam_v.resize(adam_v.size());
  for (size_t i = 0; i < adam_m.size(); ++i) {
    out.adam_m[i] = copy_vec(adam_m[i]);
    out.adam_v[i] = copy_vec(adam_v[i]);
  }
  out.adam_step = adam_step;
  return out;
}

double validation_mse(Model<float>& model, const std::vector<SeismicSection>& corpus) {
  const DenoiserConfig& cfg = model.config;
  const double sigma_mid = 0.5 * (cfg.train_sigma_min + cfg.train_sigma_max);
  NoisePairBatch val =
      sample_noise_pairs(corpus, cfg.patch_size, cfg.validation_pairs,
                         {sigma_mid, sigma_mid}, mix_seed(cfg.seed, 0x7a11, 0));
  double acc = 0.0;
  for (int p = 0; p < cfg.validation_pairs; ++p) {
    Tensor4<float> in = to_tensor(val.inputs[p]);
    Tensor4<float> out = model.forward(in, false);
    const Patch& clean = val.clean[p];
    double e = 0.0;
    for (size_t i = 0; i < clean.v.size(); ++i) {
      const double d = double(out.v[i]) - clean.v[i];
      e += d * d;
    }
    acc += e / clean.v.size();
  }
  return acc / cfg.validation_pairs;
}

TrainResult train(Model<float> model, const std::vector<SeismicSection>& corpus,
                  const ResumeState& resume, const Model<float>* initial_best) {
  if (corpus.empty()) throw std::invalid_argument("empty training corpus");
  const DenoiserConfig cfg = model.config;
  cfg.validate();

  TrainResult result;
  result.best = initial_best ? *initial_best : model;
  result.best_val = (resume.best_val >= 0.0)
                        ? resume.best_val
                        : std::numeric_limits<double>::infinity();
  int patience_used = resume.patience_used;
  result.log.termination = TrainingLog::Termination::max_epochs;

  for (int epoch = resume.start_epoch; epoch < cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    double loss_sum = 0.0;
    for (int step = 0; step < cfg.steps_per_epoch; ++step) {
      NoisePairBatch batch = sample_noise_pairs(
          corpus, cfg.patch_size, cfg.batch_size,
          {cfg.train_sigma_min, cfg.train_sigma_max},
          mix_seed(cfg.seed, static_cast<uint64_t>(epoch), static_cast<uint64_t>(step)));
      Tensor4<float> in = to_batch_tensor(batch.inputs);
      Tensor4<float> tgt = to_batch_tensor(batch.targets);
      try {
        loss_sum += model.backward_and_step(in, tgt);
      } catch (const DivergenceError& e) {
        result.diverged = true;
        result.divergence_message = e.what();
        result.log.termination = TrainingLog::Termination::manual;
        result.last = std::move(model);
        return result;
      }
    }
    const double val = validation_mse(model, corpus);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.log.epochs.push_back({epoch, loss_sum / cfg.steps_per_epoch, val, wall});

    if (val < result.best_val) {
      result.best_val = val;
      result.best = model;
      patience_used = 0;
    } else {
      ++patience_used;
      if (patience_used > cfg.early_stop_patience_epochs) {
        result.log.termination = TrainingLog::Termination::converged;
        break;
      }
    }
  }
  result.last = std::move(model);
  return result;
}

SeismicSection denoise_image(Model<float>& model, const SeismicSection& section) {
  section.validate();
  if (section.m < 8 || section.n < 8)
    throw std::invalid_argument("section too small for inference");
  const int tile = model.config.tile_size;
  const int overlap = model.config.tile_overlap;

  SeismicSection out(section.m, section.n);
  out.sample_interval = section.sample_interval;
  out.axis_unit = section.axis_unit;
  out.provenance = section.provenance;

  std::vector<double> weight(section.size(), 0.0);
  const int step = tile - overlap;
  auto tile_starts = [&](int dim) {
    std::vector<int> starts;
    if (dim <= tile) return std::vector<int>{0};
    for (int s = 0;; s += step) {
      if (s + tile >= dim) {
        starts.push_back(dim - tile);
        break;
      }
      starts.push_back(s);
    }
    return starts;
  };

  for (int r0 : tile_starts(section.m)) {
    for (int c0 : tile_starts(section.n)) {
      const int th = std::min(tile, section.m);
      const int tw = std::min(tile, section.n);
      Tensor4<float> in(1, 1, th, tw);
      for (int i = 0; i < th; ++i)
        for (int j = 0; j < tw; ++j)
          in.v[static_cast<size_t>(i) * tw + j] =
              static_cast<float>(section.at(r0 + i, c0 + j));
      Tensor4<float> pred = model.forward(in, false);
      for (int i = 0; i < th; ++i)
        for (int j = 0; j < tw; ++j) {
          out.at(r0 + i, c0 + j) += pred.v[static_cast<size_t>(i) * tw + j];
          weight[static_cast<size_t>(r0 + i) * section.n + c0 + j] += 1.0;
        }
    }
  }
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] /= weight[i];
  return out;
}

template <class T>
void conv3x3_same(const Tensor4<T>& x, const Tensor4<T>& w,
                  const std::vector<T>& b, Tensor4<T>& y) {
  y = Tensor4<T>(x.n, w.n, x.h, x.w);
  conv3x3_forward(x, w, b, y);
}

template void conv3x3_same<float>(const Tensor4<float>&, const Tensor4<float>&,
                                  const std::vector<float>&, Tensor4<float>&);
template void conv3x3_same<double>(const Tensor4<double>&,
                                   const Tensor4<double>&,
                                   const std::vector<double>&,
                                   Tensor4<double>&);

template class Model<float>;
template class Model<double>;
template double batch_loss<float>(const Tensor4<float>&, const Tensor4<float>&);
template double batch_loss<double>(const Tensor4<double>&, const Tensor4<double>&);
template Model<double> Model<float>::cast<double>() const;
template Model<float> Model<double>::cast<float>() const;

}  // namespace n2ns
