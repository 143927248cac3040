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
#include "rlst/rl_trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rlst/error.hpp"
#include "rlst/log.hpp"
#include "rlst/ops.hpp"
#include "rlst/optimizer.hpp"
#include "rlst/semantic.hpp"
#include "rlst/tape.hpp"

namespace rlst {

void ScoreWeights::check() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(eta > 0.0)) {
        throw ConfigError("score weights: alpha, beta and eta must be positive");
    }
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw ConfigError("score weights: gamma must lie in (0, 1)");
    }
    if (rollouts < 1) {
        throw ConfigError("score weights: rollouts must be at least 1");
    }
}

void EvaluatorParams::check() const {
    if (style == nullptr) {
        throw ConfigError("evaluators: style discriminator missing");
    }
    if (semantic_embeddings == nullptr) {
        throw ConfigError("evaluators: semantic embeddings missing");
    }
    if (fluency == nullptr) {
        throw ConfigError("evaluators: language model missing");
    }
}

void RlUpdateOptions::check() const {
    if (!(generator_lr > 0.0) || !(discriminator_lr > 0.0)) {
        throw ConfigError("update options: learning rates must be positive");
    }
    if (beam_width < 1) {
        throw ConfigError("update options: beam width must be at least 1");
    }
}

namespace {

void check_reference(const Sentence& reference, std::size_t vocab_size) {
    if (!reference.framed) {
        throw UsageError("action scores: reference must be framed");
    }
    if (reference.tokens.size() < 2 || reference.tokens.front() != kBosIndex ||
        reference.tokens.back() != kEosIndex) {
        throw UsageError("action scores: reference must run BOS to EOS");
    }
    // Interior BOS or padding is tolerated: an untrained policy can emit
    // them, and the trainer must score what it produced.
    for (std::size_t i = 0; i < reference.tokens.size(); ++i) {
        if (reference.tokens[i] >= vocab_size) {
            throw UsageError("action scores: reference token out of range");
        }
        if (reference.tokens[i] == kEosIndex &&
            i + 1 < reference.tokens.size()) {
            throw UsageError("action scores: end marker inside the reference");
        }
    }
}

/// Index t - 1 holds the sampled completions of the reference prefix ending
/// at token t; the final timestep holds the reference itself once. Seeds
/// come from `rng` with timesteps ascending and samples ascending inside a
/// timestep; the final timestep draws none.
std::vector<std::vector<Sentence>> collect_rollouts(
        const Sentence& source, const Sentence& reference,
        const GeneratorParams& generator, std::size_t rollout_count,
        Rng& rng) {
    const std::size_t horizon = reference.tokens.size() - 1;
    // One token more than the beam budget so a completion can re-append the
    // EOS of a truncated reference.
    const std::size_t budget = max_decode_length(source) + 1;
    std::vector<std::vector<Sentence>> lists(horizon);
    for (std::size_t t = 1; t < horizon; ++t) {
        const auto prefix =
            std::span<const std::size_t>(reference.tokens).first(t + 1);
        lists[t - 1].reserve(rollout_count);
        for (std::size_t n = 0; n < rollout_count; ++n) {
            lists[t - 1].push_back(multinomial_rollout(
                prefix, source, generator, budget, rng.next()));
        }
    }
    lists[horizon - 1].push_back(reference);
    return lists;
}

std::optional<double> finite_or_empty(double value) {
    if (std::isfinite(value)) return value;
    return std::nullopt;
}

/// One sentence's module scores; a missing value marks a failed evaluator.
struct ModuleSample {
    std::optional<double> style;
    std::optional<double> semantic;
    std::optional<double> fluency;
};

double max_embedding_norm(const Tensor& embeddings) {
    double best = 0.0;
    for (std::size_t r = 0; r < embeddings.rows(); ++r) {
        const double* row = embeddings.row(r);
        double sq = 0.0;
        for (std::size_t c = 0; c < embeddings.cols(); ++c) sq += row[c] * row[c];
        best = std::max(best, sq);
    }
    return std::sqrt(best);
}

void merge_worst(std::optional<double>& worst, const std::optional<double>& v) {
    if (!v) return;
    if (!worst || *v < *worst) worst = *v;
}

void log_substitution(const char* module, std::size_t failures,
                      std::size_t total, bool floored) {
    if (failures == 0) return;
    log_message(LogLevel::warn,
                std::string("action scores: ") + module + " evaluator failed on " +
                    std::to_string(failures) + " of " + std::to_string(total) +
                    " sentences; substituted " +
                    (floored ? "its floor" : "the worst observed score"));
}

/// Scores every rolled-out sentence with all three modules, then combines.
/// A failed module contributes its worst score observed in this call, or
/// its floor when it never succeeded.
std::vector<double> combine_scores(
        const Sentence& source, const std::vector<std::vector<Sentence>>& lists,
        const EvaluatorParams& evaluators, const ScoreWeights& weights,
        ModuleScores* reference_scores) {
    std::vector<std::vector<ModuleSample>> samples(lists.size());
    std::size_t total = 0;
    std::size_t style_failures = 0;
    std::size_t semantic_failures = 0;
    std::size_t fluency_failures = 0;
    std::optional<double> worst_style;
    std::optional<double> worst_semantic;
    std::optional<double> worst_fluency;
    for (std::size_t i = 0; i < lists.size(); ++i) {
        samples[i].reserve(lists[i].size());
        for (const Sentence& sentence : lists[i]) {
            ModuleSample sample;
            try {
                sample.style =
                    finite_or_empty(style_score(sentence, *evaluators.style));
            } catch (const std::exception&) {
            }
            try {
                sample.semantic = finite_or_empty(
                    semantic_score(sentence, source, *evaluators.semantic_embeddings,
                                   evaluators.stopwords)
                        .value);
            } catch (const std::exception&) {
            }
            try {
                sample.fluency =
                    finite_or_empty(fluency_score(sentence, *evaluators.fluency));
            } catch (const std::exception&) {
            }
            ++total;
            if (!sample.style) ++style_failures;
            if (!sample.semantic) ++semantic_failures;
            if (!sample.fluency) ++fluency_failures;
            merge_worst(worst_style, sample.style);
            merge_worst(worst_semantic, sample.semantic);
            merge_worst(worst_fluency, sample.fluency);
            samples[i].push_back(sample);
        }
    }

    // Hard floors for a module that never produced a score.
    const double style_fill = worst_style.value_or(kScoreFloor);
    const double semantic_fill = worst_semantic.value_or(
        -2.0 * max_embedding_norm(*evaluators.semantic_embeddings));
    const double fluency_fill = worst_fluency.value_or(std::log(kProbFloor));
    log_substitution("style", style_failures, total, !worst_style);
    log_substitution("semantic", semantic_failures, total, !worst_semantic);
    log_substitution("fluency", fluency_failures, total, !worst_fluency);

    std::vector<double> f(lists.size(), 0.0);
    for (std::size_t i = 0; i < lists.size(); ++i) {
        double sum = 0.0;
        for (const ModuleSample& sample : samples[i]) {
            const double s = sample.style.value_or(style_fill);
            const double m = sample.semantic.value_or(semantic_fill);
            const double l = sample.fluency.value_or(fluency_fill);
            sum += weights.alpha * s + weights.beta * m + weights.eta * l;
        }
        f[i] = sum / static_cast<double>(samples[i].size());
    }
    if (reference_scores != nullptr) {
        const ModuleSample& last = samples.back().back();
        reference_scores->style = last.style.value_or(style_fill);
        reference_scores->semantic = last.semantic.value_or(semantic_fill);
        reference_scores->fluency = last.fluency.value_or(fluency_fill);
    }
    return f;
}

/// True when the discriminator can score the sentence: a well-formed frame
/// around at least one content token.
bool discriminator_scoreable(const Sentence& sentence, std::size_t vocab_size) {
    if (sentence.tokens.size() < 3) return false;
    try {
        validate_sentence(sentence, vocab_size);
    } catch (const UsageError&) {
        return false;
    }
    return sentence.framed;
}

using EstimateFn = std::function<std::vector<double>(const Sentence& source,
                                                     const Sentence& reference)>;

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

/// Shared policy-gradient core: beam references, action scores through
/// `estimate`, shaped rewards, discounted returns, one averaged clipped
/// step over the surviving episodes. Fills everything in the report except
/// the discriminator loss and the wall clock.
RlStepReport policy_core(std::span<const Sentence> sources,
                         ParameterSet& generator_set,
                         const GeneratorParams& generator,
                         const EstimateFn& estimate, double gamma,
                         const RlUpdateOptions& options,
                         std::vector<ActionScoreTrace>* traces,
                         std::vector<Sentence>* references_out) {
    if (sources.empty()) {
        throw UsageError("reinforce update: empty source batch");
    }
    options.check();

    // Episode gradients are merged here so one bad episode cannot poison
    // the batch through the shared tensor gradients.
    std::vector<std::vector<double>> sums(generator_set.size());
    for (std::size_t i = 0; i < generator_set.size(); ++i) {
        sums[i].assign(generator_set.entry(i).tensor.values().size(), 0.0);
    }

    RlStepReport report;
    double loss_sum = 0.0;
    std::size_t survivors = 0;
    for (std::size_t s = 0; s < sources.size(); ++s) {
        const Sentence& source = sources[s];
        const BeamResult ref = beam_search(source, generator, options.beam_width,
                                           max_decode_length(source));
        if (references_out != nullptr) references_out->push_back(ref.sentence);

        const std::vector<double> f = estimate(source, ref.sentence);
        const std::vector<double> r = shape_rewards(f);
        std::vector<double> q = discounted_returns(r, gamma);
        if (options.center_returns) {
            double mean = 0.0;
            for (const double v : q) mean += v;
            mean /= static_cast<double>(q.size());
            for (double& v : q) v -= mean;
        }

        Tape tape;
        TapedGenerator taped = TapedGenerator::begin(tape, generator, source);
        Tape::Var loss = tape.scalar(0.0);
        std::vector<double> logp;
        logp.reserve(q.size());
        const std::vector<std::size_t>& tokens = ref.sentence.tokens;
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            const Tape::Var probs = taped.step(tokens[t - 1]);
            const Tape::Var lp = tape.log_pick(probs, tokens[t]);
            logp.push_back(tape.scalar_value(lp));
            loss = tape.add(loss, tape.scale(lp, -q[t - 1]));
        }
        if (traces != nullptr) traces->push_back({ref.sentence, f, r, q, logp});

        const double value = tape.scalar_value(loss);
        if (!std::isfinite(value)) {
            log_message(LogLevel::warn,
                        "reinforce update: skipped episode " + std::to_string(s) +
                            ", non-finite loss");
            ++report.skipped;
            continue;
        }
        tape.backward(loss);
        bool bad = false;
        for (std::size_t i = 0; i < generator_set.size() && !bad; ++i) {
            const Tensor& tensor = generator_set.entry(i).tensor;
            if (!tensor.has_grad()) continue;
            for (const double g : tensor.grad()) {
                if (!std::isfinite(g)) {
                    bad = true;
                    break;
                }
            }
        }
        if (bad) {
            generator_set.zero_grads();
            log_message(LogLevel::warn,
                        "reinforce update: skipped episode " + std::to_string(s) +
                            ", non-finite gradient");
            ++report.skipped;
            continue;
        }
        for (std::size_t i = 0; i < generator_set.size(); ++i) {
            const ParameterSet::Entry& entry = generator_set.entry(i);
            if (!entry.trainable || !entry.tensor.has_grad()) continue;
            const std::vector<double>& g = entry.tensor.grad();
            for (std::size_t k = 0; k < g.size(); ++k) sums[i][k] += g[k];
        }
        generator_set.zero_grads();
        loss_sum += value;
        ++survivors;
    }

    if (survivors > 0) {
        // The applied gradient averages the surviving episodes, matching
        // the reported loss.
        const double inv = 1.0 / static_cast<double>(survivors);
        for (std::size_t i = 0; i < generator_set.size(); ++i) {
            ParameterSet::Entry& entry = generator_set.entry(i);
            if (!entry.trainable) continue;
            std::vector<double>& g = entry.tensor.grad();
            for (std::size_t k = 0; k < g.size(); ++k) g[k] = sums[i][k] * inv;
        }
        SgdOptions sgd;
        sgd.learning_rate = options.generator_lr;
        sgd_step(generator_set, sgd);
        report.generator_loss = loss_sum * inv;
        report.reward_estimate = -report.generator_loss;
    }
    return report;
}

}  // namespace

std::vector<double> estimate_action_scores(const Sentence& source,
                                           const Sentence& reference,
                                           const GeneratorParams& generator,
                                           const SentenceScorer& scorer,
                                           std::size_t rollout_count, Rng& rng) {
    if (!scorer) throw UsageError("action scores: scorer must be callable");
    if (rollout_count < 1) {
        throw ConfigError("action scores: rollouts must be at least 1");
    }
    check_reference(reference, generator.vocab_size());
    const auto lists =
        collect_rollouts(source, reference, generator, rollout_count, rng);
    std::vector<double> f(lists.size(), 0.0);
    for (std::size_t i = 0; i < lists.size(); ++i) {
        double sum = 0.0;
        for (const Sentence& sentence : lists[i]) sum += scorer(sentence, source);
        f[i] = sum / static_cast<double>(lists[i].size());
    }
    return f;
}

std::vector<double> estimate_action_scores(const Sentence& source,
                                           const Sentence& reference,
                                           const GeneratorParams& generator,
                                           const EvaluatorParams& evaluators,
                                           const ScoreWeights& weights, Rng& rng,
                                           ModuleScores* reference_scores) {
    evaluators.check();
    weights.check();
    check_reference(reference, generator.vocab_size());
    const auto lists =
        collect_rollouts(source, reference, generator, weights.rollouts, rng);
    return combine_scores(source, lists, evaluators, weights, reference_scores);
}

std::vector<double> shape_rewards(std::span<const double> f) {
    if (f.empty()) throw UsageError("shape rewards: empty score sequence");
    std::vector<double> r(f.size());
    r[0] = f[0];
    for (std::size_t i = 1; i < f.size(); ++i) r[i] = f[i] - f[i - 1];
    return r;
}

std::vector<double> discounted_returns(std::span<const double> rewards,
                                       double gamma) {
    if (rewards.empty()) {
        throw UsageError("discounted returns: empty reward sequence");
    }
    if (!(gamma > 0.0) || !(gamma <= 1.0)) {
        throw ConfigError("discounted returns: gamma must lie in (0, 1]");
    }
    std::vector<double> q(rewards.size());
    q.back() = rewards.back();
    for (std::size_t i = rewards.size() - 1; i-- > 0;) {
        q[i] = rewards[i] + gamma * q[i + 1];
    }
    return q;
}

RlStepReport reinforce_policy_update(std::span<const Sentence> sources,
                                     ParameterSet& generator_set,
                                     const GeneratorParams& generator,
                                     const SentenceScorer& scorer,
                                     const ScoreWeights& weights,
                                     const RlUpdateOptions& options, Rng& rng,
                                     std::vector<ActionScoreTrace>* traces) {
    const auto start = std::chrono::steady_clock::now();
    if (!scorer) throw UsageError("reinforce update: scorer must be callable");
    weights.check();
    const EstimateFn estimate = [&](const Sentence& src, const Sentence& ref) {
        return estimate_action_scores(src, ref, generator, scorer,
                                      weights.rollouts, rng);
    };
    RlStepReport report = policy_core(sources, generator_set, generator, estimate,
                                      weights.gamma, options, traces, nullptr);
    report.seconds = elapsed_seconds(start);
    return report;
}

RlStepReport reinforce_update(std::span<const Sentence> sources,
                              std::span<const Sentence> human_targets,
                              ParameterSet& generator_set,
                              const GeneratorParams& generator,
                              ParameterSet& discriminator_set,
                              const EvaluatorParams& evaluators,
                              const ScoreWeights& weights,
                              const RlUpdateOptions& options, Rng& rng,
                              std::vector<ActionScoreTrace>* traces) {
    const auto start = std::chrono::steady_clock::now();
    evaluators.check();
    weights.check();
    if (human_targets.size() != sources.size()) {
        throw UsageError(
            "reinforce update: human batch size must match the source batch");
    }
    ModuleScores sums;
    const EstimateFn estimate = [&](const Sentence& src, const Sentence& ref) {
        ModuleScores scores;
        std::vector<double> f = estimate_action_scores(src, ref, generator,
                                                       evaluators, weights, rng,
                                                       &scores);
        sums.style += scores.style;
        sums.semantic += scores.semantic;
        sums.fluency += scores.fluency;
        return f;
    };
    std::vector<Sentence> references;
    references.reserve(sources.size());
    RlStepReport report =
        policy_core(sources, generator_set, generator, estimate, weights.gamma,
                    options, traces, &references);
    const double count = static_cast<double>(sources.size());
    report.style_mean = sums.style / count;
    report.semantic_mean = sums.semantic / count;
    report.fluency_mean = sums.fluency / count;
    // The references were produced and scored against the pre-update
    // snapshot; only now may the discriminator move. Its batch keeps the
    // pairs whose reference it can score, so one degenerate reference does
    // not abort the step.
    std::vector<Sentence> model_batch;
    std::vector<Sentence> human_batch;
    for (std::size_t i = 0; i < references.size(); ++i) {
        if (!discriminator_scoreable(references[i],
                                     evaluators.style->vocab_size())) {
            continue;
        }
        model_batch.push_back(references[i]);
        human_batch.push_back(human_targets[i]);
    }
    if (model_batch.empty()) {
        log_message(LogLevel::warn,
                    "reinforce update: no scoreable reference, "
                    "discriminator step skipped");
    } else {
        report.discriminator_loss =
            adversarial_step(human_batch, model_batch, discriminator_set,
                             *evaluators.style, options.discriminator_lr);
    }
    report.seconds = elapsed_seconds(start);
    return report;
}

}  // namespace rlst
