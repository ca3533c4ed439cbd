#include "vfrl/replay_buffer.hpp"

#include <algorithm>
#include <string>

#include "vfrl/error.hpp"

namespace vfrl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : data_(capacity) {
  if (capacity == 0) throw DimensionError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  data_[next_] = t;
  next_ = (next_ + 1) % data_.size();
  size_ = std::min(size_ + 1, data_.size());
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
  if (batch > size_) {
    throw InsufficientDataError("replay buffer holds " + std::to_string(size_) +
                                " transitions, batch needs " + std::to_string(batch));
  }
  // Floyd's algorithm: batch distinct draws from [0, size).
  std::vector<std::size_t> picked;
  picked.reserve(batch);
  for (std::size_t j = size_ - batch; j < size_; ++j) {
    const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
    if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
      picked.push_back(t);
    } else {
      picked.push_back(j);
    }
  }
  return picked;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  std::vector<Transition> out;
  out.reserve(batch);
  for (std::size_t i : sample_indices(batch, rng)) out.push_back(data_[i]);
  return out;
}

const Transition& ReplayBuffer::at_age(std::size_t i) const {
  if (i >= size_) throw DimensionError("replay buffer index out of range");
  const std::size_t oldest = size_ < data_.size() ? 0 : next_;
  return data_[(oldest + i) % data_.size()];
}

void ReplayBuffer::clear() {
  next_ = 0;
  size_ = 0;
}

}  // namespace vfrl
