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
#include "rlst/language_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rlst/error.hpp"
#include "rlst/ops.hpp"
#include "rlst/optimizer.hpp"

namespace rlst {

namespace {

double floored_log(double p) { return std::log(std::max(p, kProbFloor)); }

void check_framed(const Sentence& s, const LmParams& params, const char* who) {
    validate_sentence(s, params.vocab_size());
    if (!s.framed) {
        throw UsageError(std::string(who) + ": sentence not framed");
    }
}

/// Plain two-layer recurrence; states persist across the whole sequence.
struct LmState {
    const LmParams* params;
    std::vector<double> state1, state2;

    explicit LmState(const LmParams& p)
        : params(&p),
          state1(p.hidden_dim(), 0.0),
          state2(p.hidden_dim(), 0.0) {}

    void advance(std::size_t token) {
        const double* r = params->embedding->row(token);
        const std::vector<double> x(r, r + params->embedding->cols());
        state1 = gru_step(params->layer1, state1, x);
        state2 = gru_step(params->layer2, state2, state1);
    }

    /// Next-token distribution at the current state.
    std::vector<double> distribution() const {
        const std::size_t vocab = params->vocab_size();
        std::vector<double> logits(vocab);
        kernel::matvec(params->output_w->data(), state2.data(), logits.data(),
                       vocab, params->hidden_dim());
        std::vector<double> probs(vocab);
        kernel::softmax(logits.data(), probs.data(), vocab);
        return probs;
    }
};

}  // namespace

LmParams LmParams::create(ParameterSet& set, const LmConfig& config, Rng& rng) {
    if (config.vocab_size <= kReservedCount) {
        throw ConfigError("language model: vocabulary too small");
    }
    if (config.embedding_dim == 0 || config.hidden_dim == 0) {
        throw ConfigError("language model: zero dimension");
    }
    LmParams p;
    p.embedding = &set.add(
        "lm.embedding",
        Tensor::uniform({config.vocab_size, config.embedding_dim}, rng));
    p.layer1 = GruParams::create(set, "lm.layer1", config.hidden_dim,
                                 config.embedding_dim, rng);
    p.layer2 = GruParams::create(set, "lm.layer2", config.hidden_dim,
                                 config.hidden_dim, rng);
    p.output_w = &set.add(
        "lm.output_w",
        Tensor::uniform({config.vocab_size, config.hidden_dim}, rng));
    p.check_dims();
    return p;
}

LmParams LmParams::bind(ParameterSet& set) {
    LmParams p;
    p.embedding = &set.get("lm.embedding");
    p.layer1 = GruParams::bind(set, "lm.layer1");
    p.layer2 = GruParams::bind(set, "lm.layer2");
    p.output_w = &set.get("lm.output_w");
    p.check_dims();
    return p;
}

void LmParams::check_dims() const {
    layer1.check_dims();
    layer2.check_dims();
    const std::size_t hidden = layer1.hidden_dim();
    if (layer1.input_dim() != embedding->cols() ||
        layer2.hidden_dim() != hidden || layer2.input_dim() != hidden) {
        throw ConfigError("language model: layer dimensions disagree");
    }
    if (output_w->rank() != 2 || output_w->rows() != embedding->rows() ||
        output_w->cols() != hidden) {
        throw ConfigError("language model: output projection must be vocab x hidden");
    }
}

double continuation_log_prob(std::span<const std::size_t> prefix,
                             std::span<const std::size_t> continuation,
                             const LmParams& params) {
    if (prefix.empty()) {
        throw UsageError("language model: empty context");
    }
    const std::size_t vocab = params.vocab_size();
    for (std::size_t t : prefix) {
        if (t >= vocab) throw UsageError("language model: token index out of range");
    }
    for (std::size_t t : continuation) {
        if (t >= vocab) throw UsageError("language model: token index out of range");
    }
    LmState lm(params);
    for (std::size_t t : prefix) lm.advance(t);
    double total = 0.0;
    for (std::size_t j = 0; j < continuation.size(); ++j) {
        total += floored_log(lm.distribution()[continuation[j]]);
        // the state after the last scored token conditions nothing
        if (j + 1 < continuation.size()) lm.advance(continuation[j]);
    }
    return total;
}

double sentence_log_prob(const Sentence& sentence, const LmParams& params) {
    check_framed(sentence, params, "language model");
    const std::span<const std::size_t> tokens(sentence.tokens);
    return continuation_log_prob(tokens.first(1), tokens.subspan(1), params);
}

std::size_t predicted_token_count(const Sentence& sentence) {
    if (!sentence.framed || sentence.tokens.size() < 2) {
        throw UsageError("language model: sentence not framed");
    }
    return sentence.tokens.size() - 1;
}

double fluency_score(const Sentence& sentence, const LmParams& params) {
    return sentence_log_prob(sentence, params) /
           static_cast<double>(predicted_token_count(sentence));
}

double perplexity(const Sentence& sentence, const LmParams& params) {
    return std::exp(-fluency_score(sentence, params));
}

double corpus_perplexity(std::span<const Sentence> corpus,
                         const LmParams& params) {
    if (corpus.empty()) {
        throw UsageError("corpus_perplexity: empty corpus");
    }
    double total = 0.0;
    std::size_t tokens = 0;
    for (const Sentence& s : corpus) {
        total += sentence_log_prob(s, params);
        tokens += predicted_token_count(s);
    }
    return std::exp(-total / static_cast<double>(tokens));
}

Tape::Var taped_sentence_log_prob(Tape& tape, const LmParams& params,
                                  const Sentence& sentence) {
    check_framed(sentence, params, "language model");
    const GruTapeVars layer1 = GruTapeVars::bind(tape, params.layer1);
    const GruTapeVars layer2 = GruTapeVars::bind(tape, params.layer2);
    const Tape::Var embedding = tape.param(*params.embedding);
    const Tape::Var output_w = tape.param(*params.output_w);
    const std::vector<double> zero(params.hidden_dim(), 0.0);
    Tape::Var state1 = tape.input_vector(zero);
    Tape::Var state2 = tape.input_vector(zero);
    Tape::Var total = tape.scalar(0.0);
    for (std::size_t t = 1; t < sentence.tokens.size(); ++t) {
        const Tape::Var x = tape.row(embedding, sentence.tokens[t - 1]);
        state1 = gru_step(tape, layer1, state1, x);
        state2 = gru_step(tape, layer2, state2, state1);
        const Tape::Var probs = tape.softmax(tape.matvec(output_w, state2));
        total = tape.add(total, tape.log_pick(probs, sentence.tokens[t]));
    }
    return total;
}

double pretrain_lm_step(std::span<const Sentence> batch, ParameterSet& set,
                        const LmParams& params, double learning_rate) {
    if (batch.empty()) {
        throw UsageError("pretrain_lm_step: empty batch");
    }
    Tape tape;
    Tape::Var total = tape.scalar(0.0);
    std::size_t predictions = 0;
    for (const Sentence& sentence : batch) {
        check_framed(sentence, params, "pretrain_lm_step");
        const Tape::Var log_prob = taped_sentence_log_prob(tape, params, sentence);
        total = tape.add(total, tape.scale(log_prob, -1.0));
        predictions += predicted_token_count(sentence);
    }
    const Tape::Var mean =
        tape.scale(total, 1.0 / static_cast<double>(predictions));
    const double loss = tape.scalar_value(mean);
    if (!std::isfinite(loss)) {
        throw NumericalError("pretrain_lm_step: non-finite loss over batch of " +
                             std::to_string(batch.size()) + " sentences");
    }
    tape.backward(mean);
    SgdOptions opts;
    opts.learning_rate = learning_rate;
    sgd_step(set, opts);
    return loss;
}

}  // namespace rlst
