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
#include "rlst/discriminator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rlst/error.hpp"
#include "rlst/ops.hpp"
#include "rlst/optimizer.hpp"

namespace rlst {

namespace {

// framed, at least one content token, all indices inside the table
void check_scorable(const Sentence& s, std::size_t vocab) {
    validate_sentence(s, vocab);
    if (!s.framed || s.tokens.front() != kBosIndex ||
        s.tokens.back() != kEosIndex) {
        throw UsageError("discriminator: sentence not framed");
    }
    if (s.tokens.size() < 3) {
        throw UsageError("discriminator: no content tokens to score");
    }
}

double floored_log(double p) { return std::log(std::max(p, kProbFloor)); }

}  // namespace

DiscriminatorParams DiscriminatorParams::create(
    ParameterSet& set, const DiscriminatorConfig& config, Rng& rng) {
    if (config.vocab_size <= kReservedCount) {
        throw ConfigError("discriminator: vocabulary too small");
    }
    if (config.embedding_dim == 0 || config.hidden_dim == 0) {
        throw ConfigError("discriminator: zero dimension");
    }
    DiscriminatorParams p;
    p.embedding = &set.add(
        "disc.embedding",
        Tensor::uniform({config.vocab_size, config.embedding_dim}, rng));
    p.forward_rnn = GruParams::create(set, "disc.forward", config.hidden_dim,
                                      config.embedding_dim, rng);
    p.backward_rnn = GruParams::create(set, "disc.backward", config.hidden_dim,
                                       config.embedding_dim, rng);
    p.attention_f =
        &set.add("disc.attention_f", Tensor::uniform({config.hidden_dim}, rng));
    p.attention_b =
        &set.add("disc.attention_b", Tensor::uniform({config.hidden_dim}, rng));
    p.output_wf =
        &set.add("disc.output_wf", Tensor::uniform({config.hidden_dim}, rng));
    p.output_wb =
        &set.add("disc.output_wb", Tensor::uniform({config.hidden_dim}, rng));
    p.output_b = &set.add("disc.output_b", Tensor::vector(1));
    p.check_dims();
    return p;
}

DiscriminatorParams DiscriminatorParams::bind(ParameterSet& set) {
    DiscriminatorParams p;
    p.embedding = &set.get("disc.embedding");
    p.forward_rnn = GruParams::bind(set, "disc.forward");
    p.backward_rnn = GruParams::bind(set, "disc.backward");
    p.attention_f = &set.get("disc.attention_f");
    p.attention_b = &set.get("disc.attention_b");
    p.output_wf = &set.get("disc.output_wf");
    p.output_wb = &set.get("disc.output_wb");
    p.output_b = &set.get("disc.output_b");
    p.check_dims();
    return p;
}

void DiscriminatorParams::check_dims() const {
    forward_rnn.check_dims();
    backward_rnn.check_dims();
    const std::size_t hidden = forward_rnn.hidden_dim();
    const std::size_t embed = embedding->cols();
    if (vocab_size() <= kReservedCount) {
        throw ConfigError("discriminator: vocabulary too small");
    }
    if (forward_rnn.input_dim() != embed || backward_rnn.input_dim() != embed ||
        backward_rnn.hidden_dim() != hidden) {
        throw ConfigError("discriminator: recurrent dims disagree");
    }
    if (attention_f->size() != hidden || attention_b->size() != hidden ||
        output_wf->size() != hidden || output_wb->size() != hidden ||
        output_b->size() != 1) {
        throw ConfigError("discriminator: head dims disagree");
    }
}

double style_score(const Sentence& sentence,
                   const DiscriminatorParams& params) {
    check_scorable(sentence, params.vocab_size());
    const std::vector<std::size_t> content = sentence.content();
    const std::size_t count = content.size();
    const std::size_t hidden = params.hidden_dim();

    std::vector<std::vector<double>> fwd(count), bwd(count);
    std::vector<double> state(hidden, 0.0);
    for (std::size_t t = 0; t < count; ++t) {
        const double* e = params.embedding->row(content[t]);
        std::vector<double> input(e, e + params.embedding_dim());
        state = gru_step(params.forward_rnn, state, input);
        fwd[t] = state;
    }
    state.assign(hidden, 0.0);
    for (std::size_t t = count; t-- > 0;) {
        const double* e = params.embedding->row(content[t]);
        std::vector<double> input(e, e + params.embedding_dim());
        state = gru_step(params.backward_rnn, state, input);
        bwd[t] = state;
    }

    // score per position: one dot per role half, combined by a single add
    std::vector<double> scores(count);
    std::vector<double> squashed(hidden);
    for (std::size_t t = 0; t < count; ++t) {
        kernel::tanh(fwd[t].data(), squashed.data(), hidden);
        const double sf =
            kernel::dot(params.attention_f->data(), squashed.data(), hidden);
        kernel::tanh(bwd[t].data(), squashed.data(), hidden);
        const double sb =
            kernel::dot(params.attention_b->data(), squashed.data(), hidden);
        scores[t] = sf + sb;
    }
    std::vector<double> alpha(count);
    kernel::softmax(scores.data(), alpha.data(), count);

    std::vector<const double*> rows(count);
    std::vector<double> pooled_f(hidden), pooled_b(hidden);
    for (std::size_t t = 0; t < count; ++t) rows[t] = fwd[t].data();
    kernel::weighted_sum(rows, alpha.data(), pooled_f.data(), hidden);
    for (std::size_t t = 0; t < count; ++t) rows[t] = bwd[t].data();
    kernel::weighted_sum(rows, alpha.data(), pooled_b.data(), hidden);

    const double df =
        kernel::dot(params.output_wf->data(), pooled_f.data(), hidden);
    const double db =
        kernel::dot(params.output_wb->data(), pooled_b.data(), hidden);
    const double logit = (df + db) + (*params.output_b)[0];
    double score = 0.0;
    kernel::sigmoid(&logit, &score, 1);
    return std::clamp(score, kScoreFloor, 1.0 - kScoreFloor);
}

Tape::Var taped_style_score(Tape& tape, const DiscriminatorParams& params,
                            const Sentence& sentence) {
    check_scorable(sentence, params.vocab_size());
    const std::vector<std::size_t> content = sentence.content();
    const std::size_t count = content.size();
    const std::size_t hidden = params.hidden_dim();

    const GruTapeVars fwd_vars = GruTapeVars::bind(tape, params.forward_rnn);
    const GruTapeVars bwd_vars = GruTapeVars::bind(tape, params.backward_rnn);
    const Tape::Var embedding = tape.param(*params.embedding);
    const Tape::Var attn_f = tape.param(*params.attention_f);
    const Tape::Var attn_b = tape.param(*params.attention_b);
    const Tape::Var out_wf = tape.param(*params.output_wf);
    const Tape::Var out_wb = tape.param(*params.output_wb);
    const Tape::Var out_b = tape.param(*params.output_b);

    std::vector<Tape::Var> fwd(count), bwd(count);
    Tape::Var state = tape.input_vector(std::vector<double>(hidden, 0.0));
    for (std::size_t t = 0; t < count; ++t) {
        state = gru_step(tape, fwd_vars, state, tape.row(embedding, content[t]));
        fwd[t] = state;
    }
    state = tape.input_vector(std::vector<double>(hidden, 0.0));
    for (std::size_t t = count; t-- > 0;) {
        state = gru_step(tape, bwd_vars, state, tape.row(embedding, content[t]));
        bwd[t] = state;
    }

    Tape::Var scores = -1;
    for (std::size_t t = 0; t < count; ++t) {
        const Tape::Var sf = tape.dot(attn_f, tape.tanh(fwd[t]));
        const Tape::Var sb = tape.dot(attn_b, tape.tanh(bwd[t]));
        const Tape::Var score = tape.add(sf, sb);
        scores = t == 0 ? score : tape.concat(scores, score);
    }
    const Tape::Var alpha = tape.softmax(scores);
    const Tape::Var pooled_f = tape.weighted_sum(fwd, alpha);
    const Tape::Var pooled_b = tape.weighted_sum(bwd, alpha);

    const Tape::Var logit =
        tape.add(tape.add(tape.dot(out_wf, pooled_f), tape.dot(out_wb, pooled_b)),
                 out_b);
    return tape.clamp(tape.sigmoid(logit), kScoreFloor, 1.0 - kScoreFloor);
}

double adversarial_loss(std::span<const Sentence> human_batch,
                        std::span<const Sentence> model_batch,
                        const DiscriminatorParams& params) {
    if (human_batch.empty() || model_batch.empty()) {
        throw UsageError("adversarial_loss: empty batch");
    }
    if (human_batch.size() != model_batch.size()) {
        throw UsageError("adversarial_loss: batch sizes differ");
    }
    double total = 0.0;
    for (const Sentence& s : model_batch) {
        total += -floored_log(1.0 - style_score(s, params));
    }
    for (const Sentence& s : human_batch) {
        total += -floored_log(style_score(s, params));
    }
    // reciprocal multiply, mirroring the training tape term for term
    return total * (1.0 / static_cast<double>(human_batch.size()));
}

double adversarial_step(std::span<const Sentence> human_batch,
                        std::span<const Sentence> model_batch,
                        ParameterSet& set, const DiscriminatorParams& params,
                        double learning_rate) {
    if (human_batch.empty() || model_batch.empty()) {
        throw UsageError("adversarial_step: empty batch");
    }
    if (human_batch.size() != model_batch.size()) {
        throw UsageError("adversarial_step: batch sizes differ");
    }
    Tape tape;
    const Tape::Var one = tape.scalar(1.0);
    Tape::Var total = tape.scalar(0.0);
    for (const Sentence& s : model_batch) {
        const Tape::Var d = taped_style_score(tape, params, s);
        const Tape::Var log_miss = tape.log_pick(tape.sub(one, d), 0);
        total = tape.add(total, tape.scale(log_miss, -1.0));
    }
    for (const Sentence& s : human_batch) {
        const Tape::Var d = taped_style_score(tape, params, s);
        total = tape.add(total, tape.scale(tape.log_pick(d, 0), -1.0));
    }
    const Tape::Var mean =
        tape.scale(total, 1.0 / static_cast<double>(human_batch.size()));
    const double loss = tape.scalar_value(mean);
    if (!std::isfinite(loss)) {
        throw NumericalError("adversarial_step: non-finite loss over batch of " +
                             std::to_string(human_batch.size()) + " pairs");
    }
    tape.backward(mean);
    SgdOptions opts;
    opts.learning_rate = learning_rate;
    sgd_step(set, opts);
    return loss;
}

double pretrain_discriminator_step(std::span<const Sentence> batch,
                                   ParameterSet& set,
                                   const DiscriminatorParams& params,
                                   double learning_rate) {
    if (batch.empty()) {
        throw UsageError("pretrain_discriminator_step: empty batch");
    }
    Tape tape;
    const Tape::Var one = tape.scalar(1.0);
    Tape::Var total = tape.scalar(0.0);
    for (const Sentence& s : batch) {
        const Tape::Var d = taped_style_score(tape, params, s);
        const Tape::Var log_prob = s.style == Style::target
                                       ? tape.log_pick(d, 0)
                                       : tape.log_pick(tape.sub(one, d), 0);
        total = tape.add(total, tape.scale(log_prob, -1.0));
    }
    const Tape::Var mean =
        tape.scale(total, 1.0 / static_cast<double>(batch.size()));
    const double loss = tape.scalar_value(mean);
    if (!std::isfinite(loss)) {
        throw NumericalError(
            "pretrain_discriminator_step: non-finite loss over batch of " +
            std::to_string(batch.size()) + " sentences");
    }
    tape.backward(mean);
    SgdOptions opts;
    opts.learning_rate = learning_rate;
    sgd_step(set, opts);
    return loss;
}

}  // namespace rlst
