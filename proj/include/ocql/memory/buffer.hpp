#pragma once

#include <random>
#include <stdexcept>
#include <vector>

namespace ocql {

// Fixed-capacity FIFO store. Insertion order is preserved (at(0) is the
// oldest surviving item); once full, each push evicts the oldest.
template <typename T>
class RingBuffer {
public:
    explicit RingBuffer(int capacity) : capacity_(capacity) {
        if (capacity < 1) throw std::invalid_argument("buffer: capacity must be >= 1");
        items_.reserve(capacity);
    }

    int size() const { return static_cast<int>(items_.size()); }
    int capacity() const { return capacity_; }

    void push(T item) {
        if (size() < capacity_) {
            items_.push_back(std::move(item));
        } else {
            items_[head_] = std::move(item);
            head_ = (head_ + 1) % capacity_;
        }
    }

    // i = 0 .. size()-1, oldest first.
    const T& at(int i) const {
        if (i < 0 || i >= size()) throw std::out_of_range("buffer: index out of range");
        return items_[(head_ + i) % size()];
    }

    // k uniform draws: without replacement when k <= size (k == size gives a
    // permutation of the contents), with replacement when the buffer is still
    // smaller than k. Sampling an empty buffer is an error.
    std::vector<T> sample_minibatch(int k, std::mt19937_64& rng) const {
        if (k < 1) throw std::invalid_argument("buffer: minibatch size must be >= 1");
        if (size() == 0) throw std::logic_error("buffer: cannot sample from an empty buffer");
        std::vector<T> out;
        out.reserve(k);
        int n = size();
        if (n < k) {
            std::uniform_int_distribution<int> pick(0, n - 1);
            for (int i = 0; i < k; ++i) out.push_back(at(pick(rng)));
        } else {
            // partial Fisher-Yates over the index range
            std::vector<int> idx(n);
            for (int i = 0; i < n; ++i) idx[i] = i;
            for (int i = 0; i < k; ++i) {
                std::uniform_int_distribution<int> pick(i, n - 1);
                std::swap(idx[i], idx[pick(rng)]);
                out.push_back(at(idx[i]));
            }
        }
        return out;
    }

private:
    int capacity_;
    int head_ = 0;  // index of the oldest item once the buffer has wrapped
    std::vector<T> items_;
};

}  // namespace ocql
