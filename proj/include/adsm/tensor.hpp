// Copyright 2026 The ADSM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADSM_TENSOR_HPP
#define ADSM_TENSOR_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "adsm/common.hpp"

namespace adsm {

using Shape = std::vector<int>;

inline std::int64_t shape_numel(const Shape& s) {
    std::int64_t n = 1;
    for (int d : s) n *= d;
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    out += ")";
    return out;
}

// Dense row-major value buffer plus an optional gradient buffer of the same
// extent. Values are immutable once an op has produced them; only the grad
// buffer mutates, and only during a single-threaded backward pass.
template <typename T>
struct TensorData {
    Shape shape;
    std::vector<T> v;
    bool requires_grad = false;
    std::vector<T> g;

    std::int64_t numel() const { return static_cast<std::int64_t>(v.size()); }

    void ensure_grad() {
        if (g.empty()) g.assign(v.size(), T(0));
    }
};

// Shared handle to a TensorData node. Copies alias the same buffer, which is
// what ties multiple uses of one tensor to a single gradient accumulator.
template <typename T>
class Tensor {
public:
    using value_type = T;

    Tensor() = default;

    explicit Tensor(Shape shape, bool requires_grad = false)
        : d_(std::make_shared<TensorData<T>>()) {
        for (int e : shape) {
            if (e <= 0) throw ShapeError("tensor extent must be positive, got shape " + shape_str(shape));
        }
        d_->shape = std::move(shape);
        d_->v.assign(static_cast<std::size_t>(shape_numel(d_->shape)), T(0));
        d_->requires_grad = requires_grad;
    }

    static Tensor from_vector(Shape shape, std::vector<T> values, bool requires_grad = false) {
        Tensor t(std::move(shape), requires_grad);
        if (static_cast<std::int64_t>(values.size()) != t.numel()) {
            throw ShapeError(format_msg("value count ", values.size(), " does not fill shape ",
                                        shape_str(t.shape())));
        }
        t.d_->v = std::move(values);
        return t;
    }

    static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }

    static Tensor full(Shape shape, T value) {
        Tensor t(std::move(shape));
        std::fill(t.d_->v.begin(), t.d_->v.end(), value);
        return t;
    }

    static Tensor scalar(T value) { return full({1}, value); }

    bool defined() const { return static_cast<bool>(d_); }
    const Shape& shape() const { return d_->shape; }
    int rank() const { return static_cast<int>(d_->shape.size()); }
    int dim(int i) const { return d_->shape[static_cast<std::size_t>(i)]; }
    std::int64_t numel() const { return d_->numel(); }

    T* data() { return d_->v.data(); }
    const T* data() const { return d_->v.data(); }
    std::vector<T>& values() { return d_->v; }
    const std::vector<T>& values() const { return d_->v; }

    T item() const {
        if (numel() != 1) throw ContractError("item() requires a scalar tensor, got " + shape_str(shape()));
        return d_->v[0];
    }

    bool requires_grad() const { return d_->requires_grad; }
    void set_requires_grad(bool rg) { d_->requires_grad = rg; }

    bool has_grad() const { return !d_->g.empty(); }
    const std::vector<T>& grad() const { return d_->g; }
    std::vector<T>& grad_mut() {
        d_->ensure_grad();
        return d_->g;
    }
    void zero_grad() {
        if (!d_->g.empty()) std::fill(d_->g.begin(), d_->g.end(), T(0));
    }

    std::shared_ptr<TensorData<T>> node() const { return d_; }

    // Deep copy; the clone is detached from any tape history.
    Tensor clone() const {
        Tensor t(d_->shape, d_->requires_grad);
        t.d_->v = d_->v;
        return t;
    }

private:
    std::shared_ptr<TensorData<T>> d_;
};

// A linear record of forward operations. Recording order is topological by
// construction, so one reverse sweep propagates every adjoint exactly once.
template <typename T>
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    static Tape*& active() {
        thread_local Tape* tape = nullptr;
        return tape;
    }

    void record(std::function<void()> back) { ops_.push_back(std::move(back)); }

    std::size_t size() const { return ops_.size(); }
    void clear() { ops_.clear(); }

    void backward_from(const Tensor<T>& loss) {
        if (loss.numel() != 1) {
            throw ContractError("backward requires a scalar loss, got shape " + shape_str(loss.shape()));
        }
        auto node = loss.node();
        node->ensure_grad();
        node->g[0] += T(1);
        for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
    }

private:
    std::vector<std::function<void()>> ops_;
};

// RAII activation of a tape on the current thread.
template <typename T>
class TapeScope {
public:
    explicit TapeScope(Tape<T>& tape) : prev_(Tape<T>::active()) { Tape<T>::active() = &tape; }
    ~TapeScope() { Tape<T>::active() = prev_; }
    TapeScope(const TapeScope&) = delete;
    TapeScope& operator=(const TapeScope&) = delete;

private:
    Tape<T>* prev_;
};

// Runs the reverse sweep for a scalar loss recorded on the active tape.
template <typename T>
void backward(const Tensor<T>& loss) {
    Tape<T>* tape = Tape<T>::active();
    if (!tape) throw ContractError("backward called with no active tape");
    tape->backward_from(loss);
}

enum class InitKind { Zero, UniformFanIn, SinusoidFixed };

// Named trainable (or frozen) tensor. `trainable` distinguishes optimizer
// targets from fixed buffers such as the sinusoid table, which still travel
// through checkpoints.
template <typename T>
struct Parameter {
    std::string name;
    Tensor<T> tensor;
    InitKind init_kind = InitKind::UniformFanIn;
    bool trainable = true;
};

template <typename T>
using ParamList = std::vector<Parameter<T>*>;

template <typename T>
void zero_grads(const ParamList<T>& params) {
    for (auto* p : params) p->tensor.zero_grad();
}

}  // namespace adsm

#endif  // ADSM_TENSOR_HPP
