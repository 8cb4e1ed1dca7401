#include "ctsn/step_cache.hpp"

#include <string>

#include "ctsn/errors.hpp"

namespace ctsn {

StepCache::StepCache(std::size_t num_layers, std::size_t timesteps, FireMode mode)
    : num_layers_(num_layers),
      timesteps_(timesteps),
      mode_(mode),
      records_(num_layers * timesteps) {}

namespace {
std::string where(std::size_t layer, std::size_t t) {
  return "layer " + std::to_string(layer) + ", timestep " + std::to_string(t + 1);
}
}  // namespace

void StepCache::write(std::size_t layer, std::size_t t, StepRecord record) {
  if (layer >= num_layers_ || t >= timesteps_) {
    throw StateError("step cache write out of range at " + where(layer, t));
  }
  auto& slot = records_[layer * timesteps_ + t];
  if (slot) throw StateError("step cache record already written at " + where(layer, t));
  slot = std::move(record);
}

bool StepCache::has(std::size_t layer, std::size_t t) const {
  return layer < num_layers_ && t < timesteps_ && records_[layer * timesteps_ + t].has_value();
}

const StepRecord& StepCache::at(std::size_t layer, std::size_t t) const {
  if (!has(layer, t)) throw StateError("step cache has no record at " + where(layer, t));
  return *records_[layer * timesteps_ + t];
}

bool StepCache::complete() const {
  if (records_.empty()) return false;
  for (const auto& r : records_) {
    if (!r) return false;
  }
  return true;
}

void StepCache::require_complete() const {
  if (records_.empty()) throw StateError("step cache is empty");
  for (std::size_t l = 0; l < num_layers_; ++l) {
    for (std::size_t t = 0; t < timesteps_; ++t) {
      if (!has(l, t)) throw StateError("step cache incomplete: missing " + where(l, t));
    }
  }
}

}  // namespace ctsn
