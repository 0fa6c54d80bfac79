#include "n2ns/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

namespace n2ns {

namespace {

constexpr char kMagic[8] = {'N', '2', 'N', 'S', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("truncated checkpoint");
  return v;
}

void put_named(std::ostream& os, const std::string& name, std::span<const float> data) {
  put<uint16_t>(os, static_cast<uint16_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  put<uint64_t>(os, data.size());
  os.write(reinterpret_cast<const char*>(data.data()),
           static_cast<std::streamsize>(data.size() * sizeof(float)));
}

void write_model_tensors(std::ostream& os, Model<float>& m, const std::string& prefix) {
  for (auto& [name, view] : m.parameter_views()) put_named(os, prefix + name, view);
  for (auto& [name, view] : m.buffer_views()) put_named(os, prefix + name, view);
}

void write_config(std::ostream& os, const DenoiserConfig& c) {
  put<int32_t>(os, c.feature_dim);
  put<int32_t>(os, c.n_residual_units);
  put<double>(os, c.learning_rate);
  put<int32_t>(os, c.steps_per_epoch);
  put<int32_t>(os, c.batch_size);
  put<int32_t>(os, c.patch_size);
  put<int32_t>(os, c.early_stop_patience_epochs);
  put<int32_t>(os, c.max_epochs);
  put<uint64_t>(os, c.seed);
  put<uint8_t>(os, c.global_skip ? 1 : 0);
  put<double>(os, c.train_sigma_min);
  put<double>(os, c.train_sigma_max);
  put<int32_t>(os, c.validation_pairs);
  put<int32_t>(os, c.tile_size);
  put<int32_t>(os, c.tile_overlap);
}

DenoiserConfig read_config(std::istream& is) {
  DenoiserConfig c;
  c.feature_dim = get<int32_t>(is);
  c.n_residual_units = get<int32_t>(is);
  c.learning_rate = get<double>(is);
  c.steps_per_epoch = get<int32_t>(is);
  c.batch_size = get<int32_t>(is);
  c.patch_size = get<int32_t>(is);
  c.early_stop_patience_epochs = get<int32_t>(is);
  c.max_epochs = get<int32_t>(is);
  c.seed = get<uint64_t>(is);
  c.global_skip = get<uint8_t>(is) != 0;
  c.train_sigma_min = get<double>(is);
  c.train_sigma_max = get<double>(is);
  c.validation_pairs = get<int32_t>(is);
  c.tile_size = get<int32_t>(is);
  c.tile_overlap = get<int32_t>(is);
  return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.write(kMagic, sizeof(kMagic));
  put<uint32_t>(os, kVersion);
  write_config(os, ckpt.model.config);
  put<int64_t>(os, ckpt.model.adam_step);
  put<int32_t>(os, ckpt.resume.start_epoch);
  put<double>(os, ckpt.resume.best_val);
  put<int32_t>(os, ckpt.resume.patience_used);

  Model<float> model = ckpt.model;  // views are non-const
  Model<float> best = ckpt.best;
  uint32_t count = 0;
  count += static_cast<uint32_t>(model.parameter_views().size() * 3 +
                                 model.buffer_views().size());
  count += static_cast<uint32_t>(best.parameter_views().size() +
                                 best.buffer_views().size());
  put<uint32_t>(os, count);
  write_model_tensors(os, model, "");
  auto params = model.parameter_views();
  for (size_t i = 0; i < params.size(); ++i) {
    put_named(os, "adam_m/" + params[i].first, model.adam_m[i]);
    put_named(os, "adam_v/" + params[i].first, model.adam_v[i]);
  }
  write_model_tensors(os, best, "best/");
  if (!os) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error(path + ": not a checkpoint");
  if (get<uint32_t>(is) != kVersion)
    throw std::runtime_error(path + ": unsupported checkpoint version");

  const DenoiserConfig cfg = read_config(is);
  Checkpoint ckpt;
  ckpt.model = Model<float>::random_init(cfg);
  ckpt.best = Model<float>::random_init(cfg);
  ckpt.model.adam_step = get<int64_t>(is);
  ckpt.best.adam_step = ckpt.model.adam_step;
  ckpt.resume.start_epoch = get<int32_t>(is);
  ckpt.resume.best_val = get<double>(is);
  ckpt.resume.patience_used = get<int32_t>(is);

  std::map<std::string, std::vector<float>> tensors;
  const uint32_t count = get<uint32_t>(is);
  for (uint32_t t = 0; t < count; ++t) {
    const auto name_len = get<uint16_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    const auto n = get<uint64_t>(is);
    std::vector<float> data(n);
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    if (!is) throw std::runtime_error("truncated checkpoint");
    tensors[name] = std::move(data);
  }

  auto fill = [&tensors, &path](Model<float>& m, const std::string& prefix) {
    auto load_into = [&](const std::string& name, std::span<float> view) {
      auto it = tensors.find(name);
      if (it == tensors.end())
        throw std::runtime_error(path + ": missing tensor " + name);
      if (it->second.size() != view.size())
        throw std::runtime_error(path + ": shape mismatch for " + name);
      std::copy(it->second.begin(), it->second.end(), view.begin());
    };
    for (auto& [name, view] : m.parameter_views()) load_into(prefix + name, view);
    for (auto& [name, view] : m.buffer_views()) load_into(prefix + name, view);
    return load_into;
  };
  fill(ckpt.model, "");
  fill(ckpt.best, "best/");
  auto params = ckpt.model.parameter_views();
  for (size_t i = 0; i < params.size(); ++i) {
    auto m_it = tensors.find("adam_m/" + params[i].first);
    auto v_it = tensors.find("adam_v/" + params[i].first);
    if (m_it == tensors.end() || v_it == tensors.end())
      throw std::runtime_error(path + ": missing Adam state for " + params[i].first);
    ckpt.model.adam_m[i] = m_it->second;
    ckpt.model.adam_v[i] = v_it->second;
  }
  return ckpt;
}

}  // namespace n2ns
