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

#include <cstddef>
#include <span>

#include "rlst/gru.hpp"
#include "rlst/param_set.hpp"
#include "rlst/rng.hpp"
#include "rlst/sentence.hpp"
#include "rlst/tape.hpp"
#include "rlst/tensor.hpp"

namespace rlst {

/// Scores are clamped to [kScoreFloor, 1 - kScoreFloor] so both log D and
/// log(1 - D) stay finite in every loss.
inline constexpr double kScoreFloor = 1e-6;

struct DiscriminatorConfig {
    std::size_t vocab_size = 0;
    std::size_t embedding_dim = 50;
    std::size_t hidden_dim = 64;
};

/// Bidirectional GRU style classifier with attention pooling. The embedding
/// table is its own (never shared with the generator, so policy gradients
/// cannot leak into the critic). The attention pooling vector and the
/// logistic weights are stored as forward/backward halves: every reduction
/// either stays within one half or combines exactly two scalars, which makes
/// the forward/backward role symmetry exact in floating point.
struct DiscriminatorParams {
    Tensor* embedding = nullptr;      // vocab x embedding_dim
    GruParams forward_rnn;            // hidden over embedding input
    GruParams backward_rnn;
    Tensor* attention_f = nullptr;    // hidden, scores forward states
    Tensor* attention_b = nullptr;    // hidden, scores backward states
    Tensor* output_wf = nullptr;      // hidden, weighs pooled forward half
    Tensor* output_wb = nullptr;      // hidden, weighs pooled backward half
    Tensor* output_b = nullptr;       // 1

    /// Allocates all tensors inside `set` under "disc." names, weights
    /// uniform(-0.08, 0.08), biases zero. ConfigError on a vocabulary that
    /// has no room for content tokens or on zero dims.
    static DiscriminatorParams create(ParameterSet& set,
                                      const DiscriminatorConfig& config,
                                      Rng& rng);

    /// Wires pointers to tensors previously created in `set`.
    static DiscriminatorParams bind(ParameterSet& set);

    std::size_t vocab_size() const { return embedding->rows(); }
    std::size_t embedding_dim() const { return embedding->cols(); }
    std::size_t hidden_dim() const { return attention_f->size(); }

    /// ConfigError when any dimension disagrees with the embedding table.
    void check_dims() const;
};

/// Probability that the sentence is in the target style. Runs a forward and
/// a backward GRU over the content tokens, scores each position with the
/// attention vector over tanh of the states, pools the states under the
/// softmax weights, and applies the logistic output layer. The result is
/// clamped to [kScoreFloor, 1 - kScoreFloor]. Sentence must be framed with
/// at least one content token, all indices in range; UsageError otherwise.
double style_score(const Sentence& sentence, const DiscriminatorParams& params);

/// Training-path twin of style_score: same value bit for bit, built on the
/// tape so the loss can backpropagate. Returns a size-1 node.
Tape::Var taped_style_score(Tape& tape, const DiscriminatorParams& params,
                            const Sentence& sentence);

/// Mean discriminator loss of one adversarial batch without any update:
///   (1/K) * (-sum log(1 - D(model)) - sum log D(human)).
/// UsageError on empty or mismatched batches.
double adversarial_loss(std::span<const Sentence> human_batch,
                        std::span<const Sentence> model_batch,
                        const DiscriminatorParams& params);

/// One gradient step on the adversarial loss above; returns the pre-update
/// loss. Both batches must have the same size K >= 1. NumericalError on a
/// non-finite loss, raised before any parameter changes.
double adversarial_step(std::span<const Sentence> human_batch,
                        std::span<const Sentence> model_batch,
                        ParameterSet& set, const DiscriminatorParams& params,
                        double learning_rate);

/// One gradient step on mean binary cross-entropy over a labeled batch; a
/// sentence's own style is its label (target = 1). Returns the pre-update
/// loss. UsageError on an empty batch; NumericalError on a non-finite loss,
/// raised before any parameter changes.
double pretrain_discriminator_step(std::span<const Sentence> batch,
                                   ParameterSet& set,
                                   const DiscriminatorParams& params,
                                   double learning_rate);

}  // namespace rlst
