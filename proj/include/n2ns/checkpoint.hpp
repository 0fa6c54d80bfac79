#pragma once

#include <string>

#include "n2ns/model.hpp"

namespace n2ns {

// On-disk training state: config, current and best-validation parameters,
// batch-norm buffers, Adam moments, and the trainer's resume position.
struct Checkpoint {
  Model<float> model;
  Model<float> best;
  ResumeState resume;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace n2ns
