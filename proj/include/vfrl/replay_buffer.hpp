#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "vfrl/river_env.hpp"
#include "vfrl/rng.hpp"

namespace vfrl {

struct Transition {
  std::array<double, kObservationSize> state{};
  double action = 0.0;
  double reward = 0.0;
  std::array<double, kObservationSize> next_state{};
  bool done = false;
};

// Fixed-capacity ring buffer; the oldest transition is overwritten once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return data_.size(); }

  // Indices into the buffer, distinct within one batch. Throws
  // InsufficientDataError if fewer than batch transitions are stored.
  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;
  std::vector<Transition> sample(std::size_t batch, Rng& rng) const;

  // i = 0 is the oldest stored transition.
  const Transition& at_age(std::size_t i) const;
  const Transition& operator[](std::size_t slot) const { return data_[slot]; }

  void clear();

 private:
  std::vector<Transition> data_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
};

}  // namespace vfrl
