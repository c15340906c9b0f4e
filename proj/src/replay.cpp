#include "spectral_rl/replay.hpp"

namespace spectral {

void ReplayBuffer::push(const Transition& t) {
    if (data_.size() < capacity_) {
        data_.push_back(t);
    } else {
        data_[head_] = t;
        head_ = (head_ + 1) % capacity_;
    }
}

NStepSegment ReplayBuffer::segment_at(size_t start, int n_step) const {
    NStepSegment segment;
    segment.start_index = start;
    for (int k = 0; k < n_step && start + k < size(); ++k) {
        ++segment.length;
        if (at(start + k).terminal) {
            segment.terminal = true;
            break;
        }
    }
    return segment;
}

NStepSegment ReplayBuffer::sample_segment(int n_step, std::mt19937_64& rng) const {
    if (!can_sample(n_step))
        throw std::logic_error("ReplayBuffer: not enough transitions for an n-step sample");
    std::uniform_int_distribution<size_t> start(0, size() - static_cast<size_t>(n_step));
    return segment_at(start(rng), n_step);
}

}  // namespace spectral
