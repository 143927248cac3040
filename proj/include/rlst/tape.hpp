/*
   Copyright 2026 The rlst Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#pragma once

#include <cstdint>
#include <vector>

#include "rlst/tensor.hpp"

namespace rlst {

/// Reverse-mode gradient tape. Nodes are appended in evaluation order, so a
/// single backward sweep from the seed node reaches every dependency.
/// Forward values are computed by the same kernels as the inference path.
///
/// One tape per training pass: build the loss, call backward(), read the
/// accumulated gradients off the bound parameter tensors.
class Tape {
public:
    using Var = std::int32_t;

    /// Constant leaf; no gradient flows into it.
    Var input(Tensor value);
    Var input_vector(std::vector<double> values);
    Var scalar(double value);

    /// Trainable leaf. backward() accumulates into t.grad().
    Var param(Tensor& t);

    /// Row r of a rank-2 node (embedding lookup).
    Var row(Var table, std::size_t r);

    const Tensor& value(Var v) const { return nodes_[v].val; }
    double scalar_value(Var v) const { return nodes_[v].val[0]; }

    Var matvec(Var w, Var x);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double s);
    Var sigmoid(Var x);
    Var tanh(Var x);
    Var concat(Var a, Var b);
    Var dot(Var a, Var b);
    Var softmax(Var logits);
    /// ln(max(probs[index], floor)); gradient is zero below the floor.
    Var log_pick(Var probs, std::size_t index);
    /// sum_s weights[s] * vecs[s].
    Var weighted_sum(const std::vector<Var>& vecs, Var weights);
    /// Elementwise clamp to [lo, hi]; gradient passes only strictly inside.
    Var clamp(Var x, double lo, double hi);

    /// Propagate d(seed)/d(everything); seed must be scalar. Accumulates
    /// seed_value * gradient into every bound parameter tensor.
    void backward(Var seed, double seed_value = 1.0);

    std::size_t node_count() const { return nodes_.size(); }

private:
    enum class Op : std::uint8_t {
        input, param, row, matvec, add, sub, mul, scale, sigmoid_, tanh_,
        concat, dot, softmax_, log_pick, weighted_sum, clamp_
    };

    struct Node {
        Tensor val;
        std::vector<double> adj;     // lazily allocated on first touch
        Op op = Op::input;
        Var a = -1;
        Var b = -1;
        std::vector<Var> extra;      // weighted_sum inputs
        std::size_t index = 0;       // row / log_pick
        double coeff = 0.0;          // scale factor, clamp lower bound
        double coeff2 = 0.0;         // clamp upper bound
        Tensor* bound = nullptr;     // param leaves
    };

    Var push(Node n) {
        nodes_.push_back(std::move(n));
        return static_cast<Var>(nodes_.size() - 1);
    }

    std::vector<double>& adj(Var v);
    void backprop(Var v);

    std::vector<Node> nodes_;
};

}  // namespace rlst
