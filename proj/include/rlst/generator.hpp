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
#include <cstdint>
#include <span>
#include <vector>

#include "rlst/gru.hpp"
#include "rlst/param_set.hpp"
#include "rlst/rng.hpp"
#include "rlst/sentence.hpp"
#include "rlst/tape.hpp"
#include "rlst/tensor.hpp"

namespace rlst {

struct GeneratorConfig {
    std::size_t vocab_size = 0;
    std::size_t embedding_dim = 50;
    std::size_t hidden_dim = 64;
};

/// Attention encoder-decoder parameters. The attention score is the bilinear
/// form state' * attention_w * enc_state; the combined vector tanh(concat_w *
/// [context; state]) feeds the output projection output_w into the softmax.
struct GeneratorParams {
    Tensor* embedding = nullptr;    // vocab x embedding_dim
    GruParams encoder;              // hidden <- embedding_dim
    GruParams decoder;              // hidden <- embedding_dim
    Tensor* attention_w = nullptr;  // hidden x hidden
    Tensor* concat_w = nullptr;     // hidden x 2*hidden
    Tensor* output_w = nullptr;     // vocab x hidden

    /// Allocates all tensors in `set` under "gen." names, uniform(-0.08, 0.08)
    /// weights and zero GRU biases.
    static GeneratorParams create(ParameterSet& set,
                                  const GeneratorConfig& config, Rng& rng);

    /// Wires pointers to tensors previously created by create().
    static GeneratorParams bind(ParameterSet& set);

    std::size_t vocab_size() const { return embedding->rows(); }
    std::size_t embedding_dim() const { return embedding->cols(); }
    std::size_t hidden_dim() const { return encoder.hidden_dim(); }

    void check_dims() const;
};

/// Encoder output: one hidden state per input token, left to right, plus the
/// framed sentence they came from.
struct EncoderStates {
    std::vector<std::vector<double>> states;
    Sentence source;
};

/// Runs the encoder GRU over the source tokens from a zero initial state.
/// Callers pass framed sentences; encode itself needs only a non-empty token
/// sequence. Throws UsageError on an empty one or an out-of-range token.
EncoderStates encode(const Sentence& source, const GeneratorParams& params);

struct AttentionResult {
    std::vector<double> context;
    std::vector<double> weights;  // sums to 1 within 1e-12, entries >= 0
};

/// Bilinear attention over the encoder states for one decoder state.
AttentionResult attention_context(const std::vector<double>& decoder_state,
                                  const EncoderStates& enc,
                                  const GeneratorParams& params);

struct DecodeResult {
    std::vector<double> probs;      // next-token distribution over the vocab
    std::vector<double> state;      // decoder state advanced by one step
    std::vector<double> attention;  // weights used for the context vector
};

/// One decoder step: advance the GRU on vec(prev_token), attend, project,
/// softmax. Pure; repeated calls with equal inputs give bit-equal outputs.
DecodeResult decode_step(std::size_t prev_token,
                         const std::vector<double>& decoder_state,
                         const EncoderStates& enc,
                         const GeneratorParams& params);

/// Decode length budget: 1.5x source content length + 5, capped at 30.
std::size_t max_decode_length(const Sentence& source);

struct BeamHypothesis {
    std::vector<std::size_t> tokens;  // starts with BOS
    double log_prob = 0.0;            // accumulated, floor-clamped logs
    std::vector<double> state;
    bool finished = false;            // implies tokens.back() == EOS
};

struct BeamResult {
    Sentence sentence;         // framed, target style
    double log_prob = 0.0;     // accumulated log-probability
    double normalized = 0.0;   // log_prob / generated token count
    bool truncated = false;    // no hypothesis finished; EOS was appended
};

/// Deterministic beam search; returns the finished hypothesis with the best
/// length-normalized log-probability. width 1 reduces to greedy argmax
/// decoding exactly (ties break toward the lower token index).
BeamResult beam_search(const Sentence& source, const GeneratorParams& params,
                       std::size_t width, std::size_t max_len);

/// Continues prefix (which must start with BOS) by multinomial sampling until
/// EOS, forcing EOS once max_len tokens follow BOS. The returned framed
/// sentence contains the prefix verbatim. A prefix already ending in EOS is
/// returned unchanged.
Sentence multinomial_rollout(std::span<const std::size_t> prefix,
                             const Sentence& source,
                             const GeneratorParams& params,
                             std::size_t max_len, std::uint64_t rng_seed);

/// One teacher-forced autoencoding update (input = expected output) over the
/// batch. Returns the pre-update mean per-token cross-entropy. Throws
/// UsageError on an empty batch, NumericalError (before touching any
/// parameter) on a non-finite loss.
double pretrain_generator_step(std::span<const Sentence> batch,
                               ParameterSet& set,
                               const GeneratorParams& params,
                               double learning_rate);

/// Tape-side generator pass mirroring encode/decode_step op for op, so
/// training forwards are bit-identical with inference values.
struct TapedGenerator {
    Tape* tape = nullptr;
    GruTapeVars encoder;
    GruTapeVars decoder;
    Tape::Var embedding = -1;
    Tape::Var attention_w = -1;
    Tape::Var concat_w = -1;
    Tape::Var output_w = -1;
    std::vector<Tape::Var> enc_states;
    Tape::Var state = -1;

    /// Binds params onto the tape and encodes source; the decoder state
    /// starts at the final encoder state.
    static TapedGenerator begin(Tape& tape, const GeneratorParams& params,
                                const Sentence& source);

    /// One decoder step on prev_token; returns the probability node and
    /// advances the internal state.
    Tape::Var step(std::size_t prev_token);
};

}  // namespace rlst
