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
#include "rlst/generator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rlst/error.hpp"
#include "rlst/ops.hpp"
#include "rlst/optimizer.hpp"

namespace rlst {

namespace {

std::vector<double> embedding_row(const GeneratorParams& params,
                                  std::size_t token) {
    if (token >= params.vocab_size()) {
        throw UsageError("generator: token index outside embedding table");
    }
    const double* r = params.embedding->row(token);
    return std::vector<double>(r, r + params.embedding->cols());
}

double floored_log(double p) { return std::log(std::max(p, kProbFloor)); }

}  // namespace

GeneratorParams GeneratorParams::create(ParameterSet& set,
                                        const GeneratorConfig& config,
                                        Rng& rng) {
    if (config.vocab_size <= kReservedCount) {
        throw ConfigError("generator: vocabulary too small");
    }
    if (config.embedding_dim == 0 || config.hidden_dim == 0) {
        throw ConfigError("generator: zero dimension");
    }
    GeneratorParams p;
    p.embedding = &set.add(
        "gen.embedding",
        Tensor::uniform({config.vocab_size, config.embedding_dim}, rng));
    p.encoder = GruParams::create(set, "gen.encoder", config.hidden_dim,
                                  config.embedding_dim, rng);
    p.decoder = GruParams::create(set, "gen.decoder", config.hidden_dim,
                                  config.embedding_dim, rng);
    p.attention_w = &set.add(
        "gen.attention_w",
        Tensor::uniform({config.hidden_dim, config.hidden_dim}, rng));
    p.concat_w = &set.add(
        "gen.concat_w",
        Tensor::uniform({config.hidden_dim, 2 * config.hidden_dim}, rng));
    p.output_w = &set.add(
        "gen.output_w",
        Tensor::uniform({config.vocab_size, config.hidden_dim}, rng));
    p.check_dims();
    return p;
}

GeneratorParams GeneratorParams::bind(ParameterSet& set) {
    GeneratorParams p;
    p.embedding = &set.get("gen.embedding");
    p.encoder = GruParams::bind(set, "gen.encoder");
    p.decoder = GruParams::bind(set, "gen.decoder");
    p.attention_w = &set.get("gen.attention_w");
    p.concat_w = &set.get("gen.concat_w");
    p.output_w = &set.get("gen.output_w");
    p.check_dims();
    return p;
}

void GeneratorParams::check_dims() const {
    encoder.check_dims();
    decoder.check_dims();
    const std::size_t hidden = encoder.hidden_dim();
    const std::size_t emb = embedding->cols();
    if (decoder.hidden_dim() != hidden || encoder.input_dim() != emb ||
        decoder.input_dim() != emb) {
        throw ConfigError("generator: encoder/decoder dimensions disagree");
    }
    if (attention_w->rank() != 2 || attention_w->rows() != hidden ||
        attention_w->cols() != hidden) {
        throw ConfigError("generator: attention matrix must be hidden x hidden");
    }
    if (concat_w->rank() != 2 || concat_w->rows() != hidden ||
        concat_w->cols() != 2 * hidden) {
        throw ConfigError("generator: concat projection must be hidden x 2*hidden");
    }
    if (output_w->rank() != 2 || output_w->rows() != embedding->rows() ||
        output_w->cols() != hidden) {
        throw ConfigError("generator: output projection must be vocab x hidden");
    }
}

EncoderStates encode(const Sentence& source, const GeneratorParams& params) {
    if (source.tokens.empty()) {
        throw UsageError("generator: encode requires at least one token");
    }
    EncoderStates enc;
    enc.source = source;
    std::vector<double> state(params.hidden_dim(), 0.0);
    for (std::size_t token : source.tokens) {
        state = gru_step(params.encoder, state, embedding_row(params, token));
        enc.states.push_back(state);
    }
    return enc;
}

AttentionResult attention_context(const std::vector<double>& decoder_state,
                                  const EncoderStates& enc,
                                  const GeneratorParams& params) {
    const std::size_t hidden = params.hidden_dim();
    if (decoder_state.size() != hidden) {
        throw ConfigError("generator: decoder state has wrong dimension");
    }
    if (enc.states.empty()) {
        throw UsageError("generator: no encoder states to attend over");
    }
    const std::size_t count = enc.states.size();
    std::vector<double> scores(count);
    std::vector<double> projected(hidden);
    for (std::size_t s = 0; s < count; ++s) {
        kernel::matvec(params.attention_w->data(), enc.states[s].data(),
                       projected.data(), hidden, hidden);
        scores[s] = kernel::dot(decoder_state.data(), projected.data(), hidden);
    }
    AttentionResult out;
    out.weights.resize(count);
    kernel::softmax(scores.data(), out.weights.data(), count);
    out.context.assign(hidden, 0.0);
    std::vector<const double*> rows(count);
    for (std::size_t s = 0; s < count; ++s) {
        rows[s] = enc.states[s].data();
    }
    kernel::weighted_sum(rows, out.weights.data(), out.context.data(), hidden);
    return out;
}

DecodeResult decode_step(std::size_t prev_token,
                         const std::vector<double>& decoder_state,
                         const EncoderStates& enc,
                         const GeneratorParams& params) {
    const std::size_t hidden = params.hidden_dim();
    DecodeResult out;
    out.state = gru_step(params.decoder, decoder_state,
                         embedding_row(params, prev_token));
    AttentionResult att = attention_context(out.state, enc, params);
    out.attention = std::move(att.weights);

    std::vector<double> cat;
    cat.reserve(2 * hidden);
    cat.insert(cat.end(), att.context.begin(), att.context.end());
    cat.insert(cat.end(), out.state.begin(), out.state.end());

    std::vector<double> combined(hidden);
    kernel::matvec(params.concat_w->data(), cat.data(), combined.data(),
                   hidden, 2 * hidden);
    kernel::tanh(combined.data(), combined.data(), hidden);

    const std::size_t vocab = params.vocab_size();
    std::vector<double> logits(vocab);
    kernel::matvec(params.output_w->data(), combined.data(), logits.data(),
                   vocab, hidden);
    out.probs.resize(vocab);
    kernel::softmax(logits.data(), out.probs.data(), vocab);
    return out;
}

std::size_t max_decode_length(const Sentence& source) {
    const std::size_t content = source.content().size();
    return std::min<std::size_t>(30, (3 * content) / 2 + 5);
}

BeamResult beam_search(const Sentence& source, const GeneratorParams& params,
                       std::size_t width, std::size_t max_len) {
    if (width < 1) throw UsageError("beam_search: width must be at least 1");
    if (max_len < 1) throw UsageError("beam_search: max_len must be at least 1");
    const EncoderStates enc = encode(source, params);
    const std::size_t vocab = params.vocab_size();

    std::vector<BeamHypothesis> beam(1);
    beam[0].tokens = {kBosIndex};
    beam[0].state = enc.states.back();

    // candidate: parent beam slot plus one appended token; token == vocab
    // marks a finished hypothesis carried over unchanged
    struct Candidate {
        std::size_t parent;
        std::size_t token;
        double log_prob;
    };

    for (std::size_t step = 0; step < max_len; ++step) {
        bool all_finished = true;
        for (const BeamHypothesis& h : beam) {
            if (!h.finished) all_finished = false;
        }
        if (all_finished) break;

        std::vector<Candidate> candidates;
        std::vector<DecodeResult> decoded(beam.size());
        for (std::size_t p = 0; p < beam.size(); ++p) {
            if (beam[p].finished) {
                candidates.push_back({p, vocab, beam[p].log_prob});
                continue;
            }
            decoded[p] = decode_step(beam[p].tokens.back(), beam[p].state,
                                     enc, params);
            for (std::size_t token = 0; token < vocab; ++token) {
                candidates.push_back(
                    {p, token,
                     beam[p].log_prob + floored_log(decoded[p].probs[token])});
            }
        }
        // stable sort keeps generation order on ties: parent order first,
        // then ascending token, which makes width 1 exactly greedy argmax
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& a, const Candidate& b) {
                             return a.log_prob > b.log_prob;
                         });
        const std::size_t keep = std::min(width, candidates.size());
        std::vector<BeamHypothesis> next;
        next.reserve(keep);
        for (std::size_t i = 0; i < keep; ++i) {
            const Candidate& c = candidates[i];
            if (c.token == vocab) {
                next.push_back(beam[c.parent]);
                continue;
            }
            BeamHypothesis h;
            h.tokens = beam[c.parent].tokens;
            h.tokens.push_back(c.token);
            h.log_prob = c.log_prob;
            h.state = decoded[c.parent].state;
            h.finished = c.token == kEosIndex;
            next.push_back(std::move(h));
        }
        beam = std::move(next);
    }

    const auto normalized = [](const BeamHypothesis& h) {
        return h.log_prob / static_cast<double>(h.tokens.size() - 1);
    };
    const BeamHypothesis* best = nullptr;
    for (const BeamHypothesis& h : beam) {
        if (h.finished && (best == nullptr || normalized(h) > normalized(*best))) {
            best = &h;
        }
    }
    BeamResult result;
    if (best == nullptr) {
        for (const BeamHypothesis& h : beam) {
            if (best == nullptr || normalized(h) > normalized(*best)) best = &h;
        }
        result.truncated = true;
    }
    result.log_prob = best->log_prob;
    result.normalized = normalized(*best);
    result.sentence.tokens = best->tokens;
    if (result.truncated) result.sentence.tokens.push_back(kEosIndex);
    result.sentence.style = Style::target;
    result.sentence.framed = true;
    return result;
}

Sentence multinomial_rollout(std::span<const std::size_t> prefix,
                             const Sentence& source,
                             const GeneratorParams& params,
                             std::size_t max_len, std::uint64_t rng_seed) {
    if (prefix.empty() || prefix.front() != kBosIndex) {
        throw UsageError("rollout: prefix must begin with BOS");
    }
    if (max_len < 1) throw UsageError("rollout: max_len must be at least 1");
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (prefix[i] >= params.vocab_size()) {
            throw UsageError("rollout: prefix token out of range");
        }
        if (prefix[i] == kEosIndex && i + 1 < prefix.size()) {
            throw UsageError("rollout: EOS inside prefix");
        }
    }

    Sentence out;
    out.tokens.assign(prefix.begin(), prefix.end());
    out.style = Style::target;
    out.framed = true;
    if (out.tokens.size() >= 2 && out.tokens.back() == kEosIndex) return out;

    const EncoderStates enc = encode(source, params);
    std::vector<double> state = enc.states.back();
    DecodeResult step;
    for (std::size_t token : out.tokens) {
        step = decode_step(token, state, enc, params);
        state = step.state;
    }

    Rng rng(rng_seed);
    while (true) {
        const std::size_t generated = out.tokens.size() - 1;
        const std::size_t token = generated + 1 >= max_len
                                      ? kEosIndex
                                      : rng.multinomial(step.probs);
        out.tokens.push_back(token);
        if (token == kEosIndex) return out;
        step = decode_step(token, state, enc, params);
        state = step.state;
    }
}

TapedGenerator TapedGenerator::begin(Tape& tape, const GeneratorParams& params,
                                     const Sentence& source) {
    if (source.tokens.empty()) {
        throw UsageError("generator: encode requires at least one token");
    }
    for (std::size_t token : source.tokens) {
        if (token >= params.vocab_size()) {
            throw UsageError("generator: token index outside embedding table");
        }
    }
    TapedGenerator g;
    g.tape = &tape;
    g.embedding = tape.param(*params.embedding);
    g.encoder = GruTapeVars::bind(tape, params.encoder);
    g.decoder = GruTapeVars::bind(tape, params.decoder);
    g.attention_w = tape.param(*params.attention_w);
    g.concat_w = tape.param(*params.concat_w);
    g.output_w = tape.param(*params.output_w);

    Tape::Var state = tape.input_vector(
        std::vector<double>(params.hidden_dim(), 0.0));
    for (std::size_t token : source.tokens) {
        state = gru_step(tape, g.encoder, state, tape.row(g.embedding, token));
        g.enc_states.push_back(state);
    }
    g.state = g.enc_states.back();
    return g;
}

Tape::Var TapedGenerator::step(std::size_t prev_token) {
    Tape& t = *tape;
    state = gru_step(t, decoder, state, t.row(embedding, prev_token));

    Tape::Var scores = -1;
    for (std::size_t s = 0; s < enc_states.size(); ++s) {
        const Tape::Var score =
            t.dot(state, t.matvec(attention_w, enc_states[s]));
        scores = s == 0 ? score : t.concat(scores, score);
    }
    const Tape::Var weights = t.softmax(scores);
    const Tape::Var context = t.weighted_sum(enc_states, weights);

    const Tape::Var combined =
        t.tanh(t.matvec(concat_w, t.concat(context, state)));
    return t.softmax(t.matvec(output_w, combined));
}

double pretrain_generator_step(std::span<const Sentence> batch,
                               ParameterSet& set,
                               const GeneratorParams& params,
                               double learning_rate) {
    if (batch.empty()) {
        throw UsageError("pretrain_generator_step: empty batch");
    }
    Tape tape;
    Tape::Var total = tape.scalar(0.0);
    std::size_t predictions = 0;
    for (const Sentence& sentence : batch) {
        validate_sentence(sentence, params.vocab_size());
        if (!sentence.framed) {
            throw UsageError("pretrain_generator_step: sentence not framed");
        }
        TapedGenerator gen = TapedGenerator::begin(tape, params, sentence);
        for (std::size_t t = 1; t < sentence.tokens.size(); ++t) {
            const Tape::Var probs = gen.step(sentence.tokens[t - 1]);
            const Tape::Var log_prob = tape.log_pick(probs, sentence.tokens[t]);
            total = tape.add(total, tape.scale(log_prob, -1.0));
            ++predictions;
        }
    }
    const Tape::Var mean =
        tape.scale(total, 1.0 / static_cast<double>(predictions));
    const double loss = tape.scalar_value(mean);
    if (!std::isfinite(loss)) {
        throw NumericalError("pretrain_generator_step: non-finite loss over batch of " +
                             std::to_string(batch.size()) + " sentences");
    }
    tape.backward(mean);
    SgdOptions opts;
    opts.learning_rate = learning_rate;
    sgd_step(set, opts);
    return loss;
}

}  // namespace rlst
