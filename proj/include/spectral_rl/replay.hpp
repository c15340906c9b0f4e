#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "spectral_rl/env.hpp"

namespace spectral {

// One environment step. Rewards are stored raw; any clipping, squashing or
// spectral decomposition happens at target-computation time, so one buffer
// serves every agent kind.
struct Transition {
    Observation obs{};
    Observation next_obs{};
    int action = 0;
    double reward = 0.0;
    bool terminal = false;
    int score_bucket = 0;  // player score when the step was taken
};

// An n-step segment assembled at sample time. The segment is cut short at
// episode boundaries so returns never bootstrap across them.
struct NStepSegment {
    size_t start_index = 0;
    int length = 0;        // actual steps used (<= n)
    bool terminal = false; // segment ended the episode: no bootstrap
};

class ReplayBuffer {
  public:
    explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
        data_.reserve(capacity);
    }

    void push(const Transition& t);
    size_t size() const { return data_.size(); }
    size_t capacity() const { return capacity_; }

    // Logical indexing: 0 is the oldest stored transition.
    const Transition& at(size_t logical_index) const {
        return data_[(head_ + logical_index) % data_.size()];
    }

    bool can_sample(int n_step) const {
        return size() >= static_cast<size_t>(n_step);
    }

    // Uniform over start indices that leave room for an n-step window.
    NStepSegment sample_segment(int n_step, std::mt19937_64& rng) const;
    NStepSegment segment_at(size_t start, int n_step) const;

  private:
    size_t capacity_;
    size_t head_ = 0;  // index of the oldest element once full
    std::vector<Transition> data_;
};

}  // namespace spectral
