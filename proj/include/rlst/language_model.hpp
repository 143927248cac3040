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

struct LmConfig {
    std::size_t vocab_size = 0;
    std::size_t embedding_dim = 50;
    std::size_t hidden_dim = 64;
};

/// Two-layer recurrent language model: embedding, two stacked GRUs, and an
/// output projection to vocabulary logits. Both layer states start at zero
/// for every sentence. A zero output projection makes the next-token
/// distribution exactly uniform.
///
/// One instance scores fluency rewards during policy training and a
/// separately trained instance scores evaluation perplexity; both live in
/// their own ParameterSet, so the fixed "lm." names never collide.
struct LmParams {
    Tensor* embedding = nullptr;  // vocab x embedding_dim
    GruParams layer1;             // hidden <- embedding_dim
    GruParams layer2;             // hidden <- hidden
    Tensor* output_w = nullptr;   // vocab x hidden

    /// Allocates all tensors in `set` under "lm." names, uniform(-0.08, 0.08)
    /// weights and zero GRU biases.
    static LmParams create(ParameterSet& set, const LmConfig& config, Rng& rng);

    /// Wires pointers to tensors previously created by create().
    static LmParams bind(ParameterSet& set);

    std::size_t vocab_size() const { return embedding->rows(); }
    std::size_t embedding_dim() const { return embedding->cols(); }
    std::size_t hidden_dim() const { return layer1.hidden_dim(); }

    void check_dims() const;
};

/// Sum over the continuation tokens of ln P(token | everything before it),
/// conditioned on the prefix. The prefix provides context only; none of its
/// tokens are scored. Logs are floored at kProbFloor. Splitting a
/// continuation at any point and summing the two parts reproduces the whole,
/// within accumulation rounding. Throws UsageError on an empty prefix or an
/// out-of-range token; an empty continuation scores zero.
double continuation_log_prob(std::span<const std::size_t> prefix,
                             std::span<const std::size_t> continuation,
                             const LmParams& params);

/// ln P(sentence): every token after BOS is predicted, the end marker
/// included, starting from the BOS context. Always <= 0. Throws UsageError
/// on an unframed sentence or an out-of-range token.
double sentence_log_prob(const Sentence& sentence, const LmParams& params);

/// Predicted-token count M: the end marker counts, the begin marker does
/// not. Stated once, used by every per-token aggregate below.
std::size_t predicted_token_count(const Sentence& sentence);

/// sentence_log_prob divided by the predicted-token count; higher is more
/// fluent. Always <= 0.
double fluency_score(const Sentence& sentence, const LmParams& params);

/// exp(-fluency_score): the per-token inverse probability. Always >= 1.
double perplexity(const Sentence& sentence, const LmParams& params);

/// Corpus-level perplexity: total log-probability over total predicted
/// tokens, so long sentences weigh proportionally. Throws UsageError on an
/// empty corpus.
double corpus_perplexity(std::span<const Sentence> corpus,
                         const LmParams& params);

/// Training-path twin of sentence_log_prob: same value bit for bit.
Tape::Var taped_sentence_log_prob(Tape& tape, const LmParams& params,
                                  const Sentence& sentence);

/// One teacher-forced next-token update over the batch. Returns the
/// pre-update mean per-token cross-entropy. Throws UsageError on an empty
/// batch, NumericalError (before touching any parameter) on a non-finite
/// loss.
double pretrain_lm_step(std::span<const Sentence> batch, ParameterSet& set,
                        const LmParams& params, double learning_rate);

}  // namespace rlst
