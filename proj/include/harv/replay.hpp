#pragma once

#include "harv/rng.hpp"

#include <cstddef>
#include <vector>

namespace harv {

/// One off-policy learning record. Observations are stored in encoded
/// (network-input) form; the action is the raw bounded actuation.
struct Transition {
    std::vector<double> s;
    double a = 0.0;
    double r = 0.0;
    std::vector<double> s_next;
    bool done = false;
};

/// Fixed-capacity ring with uniform sampling (with replacement). When
/// full, the oldest transitions are overwritten.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

    void push(Transition t) {
        if (data_.size() < capacity_) {
            data_.push_back(std::move(t));
        } else {
            data_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& operator[](std::size_t j) const { return data_[j]; }

    /// n independent uniform draws over the current contents.
    std::vector<const Transition*> sample(std::size_t n, Rng& rng) const {
        std::vector<const Transition*> out;
        out.reserve(n);
        for (std::size_t j = 0; j < n; ++j) out.push_back(&data_[rng.below(data_.size())]);
        return out;
    }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition> data_;
};

/// Ornstein-Uhlenbeck exploration noise in units of the action bound.
struct OuNoise {
    double theta = 0.15;
    double sigma = 0.2;
    double state = 0.0;

    void reset() { state = 0.0; }
    double step(Rng& rng) {
        state += theta * (0.0 - state) + sigma * rng.normal();
        return state;
    }
};

} // namespace harv
