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

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace rlst {

/// Floor applied inside every logarithm of a probability, so log terms stay
/// finite. Stated once, used uniformly across cross-entropy and LM scoring.
inline constexpr double kProbFloor = 1e-12;

namespace kernel {

// Raw loops shared by the plain forward path and the tape, so both produce
// bit-identical values.

inline void matvec(const double* w, const double* x, double* y,
                   std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        const double* wr = w + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
        y[r] = acc;
    }
}

inline double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

inline void sigmoid(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

inline void tanh(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}

/// Stable softmax. The normalizing sum runs over the exponentials in sorted
/// value order, which makes the output an exact function of the input
/// multiset: permuting the logits permutes the probabilities bit-for-bit.
void softmax(const double* logits, double* probs, std::size_t n);

/// out[i] = sum_s weights[s] * rows[s][i]. Each coordinate accumulates its
/// terms in ascending value order, so the result depends only on the
/// multiset of (weight, row) pairs: pooling a reordered sequence with
/// correspondingly reordered weights is bit-identical.
void weighted_sum(const std::vector<const double*>& rows,
                  const double* weights, double* out, std::size_t dim);

}  // namespace kernel

/// softmax over a logit vector; entries positive and summing to 1 within
/// 1e-12, stable for logits up to about +-1e3.
std::vector<double> softmax(std::span<const double> logits);

/// -ln(predicted[target]) with the probability floor.
double cross_entropy(std::span<const double> predicted, std::size_t target_index);

}  // namespace rlst
