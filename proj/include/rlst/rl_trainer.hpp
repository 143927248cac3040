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
#include <functional>
#include <span>
#include <vector>

#include "rlst/discriminator.hpp"
#include "rlst/generator.hpp"
#include "rlst/language_model.hpp"
#include "rlst/param_set.hpp"
#include "rlst/rng.hpp"
#include "rlst/sentence.hpp"
#include "rlst/tensor.hpp"

namespace rlst {

/// Mixing weights of the combined sentence score, the return discount, and
/// the rollout count per intermediate timestep. All three evaluator scores
/// are higher-is-better, so the combination is a plain weighted sum.
struct ScoreWeights {
    double alpha = 1.0;        ///< style weight
    double beta = 0.5;         ///< semantic weight
    double eta = 0.5;          ///< fluency weight
    double gamma = 0.9;        ///< return discount, in (0, 1)
    std::size_t rollouts = 8;  ///< samples per intermediate timestep

    /// ConfigError unless alpha, beta, eta > 0, 0 < gamma < 1, rollouts >= 1.
    void check() const;
};

/// Borrowed evaluator parameters for the combined sentence score. Every
/// pointer must outlive the call it is passed to; stopwords are forwarded
/// to the semantic scorer.
struct EvaluatorParams {
    const DiscriminatorParams* style = nullptr;
    const Tensor* semantic_embeddings = nullptr;
    const LmParams* fluency = nullptr;
    std::vector<std::size_t> stopwords;

    /// ConfigError if any evaluator pointer is null.
    void check() const;
};

/// Complete-sentence reward, higher is better. Tests may substitute
/// arbitrary stubs for the combined evaluator score; values are used as
/// given, with no substitution on failure.
using SentenceScorer =
    std::function<double(const Sentence& candidate, const Sentence& source)>;

/// The three module scores of one complete sentence.
struct ModuleScores {
    double style = 0.0;
    double semantic = 0.0;
    double fluency = 0.0;
};

/// Per-episode diagnostics. All four sequences share the reference's
/// predicted length T' = reference.tokens.size() - 1; entry t - 1 belongs
/// to the timestep that chose reference.tokens[t]. q holds the returns the
/// update actually used, so it is mean-centered when centering is enabled.
struct ActionScoreTrace {
    Sentence reference;
    std::vector<double> f;     ///< mean rollout score per timestep
    std::vector<double> r;     ///< shaped rewards
    std::vector<double> q;     ///< discounted returns
    std::vector<double> logp;  ///< log-likelihood of each reference token
};

/// Outcome of one batched policy update.
struct RlStepReport {
    /// Mean over surviving episodes of the realized surrogate objective
    /// sum_t ln P(y_t | s_t) * Q_t, whose gradient is the policy gradient.
    double reward_estimate = 0.0;
    double generator_loss = 0.0;      ///< exactly -reward_estimate
    double discriminator_loss = 0.0;  ///< pre-update adversarial loss
    double style_mean = 0.0;          ///< mean reference style score
    double semantic_mean = 0.0;       ///< mean reference semantic score
    double fluency_mean = 0.0;        ///< mean reference fluency score
    double seconds = 0.0;             ///< wall-clock time of the update
    std::size_t skipped = 0;          ///< episodes dropped, non-finite grads
};

/// Knobs of one policy update.
struct RlUpdateOptions {
    double generator_lr = 1e-3;
    double discriminator_lr = 1e-3;
    std::size_t beam_width = 8;
    /// Subtract each episode's mean return from its per-timestep returns.
    /// Off by default; the plain estimator uses the returns as they are.
    bool center_returns = false;

    /// ConfigError unless both rates are positive and beam_width >= 1.
    void check() const;
};

/// Per-timestep action scores of a beam reference: for t in 1..T'-1 draws
/// `rollout_count` multinomial completions of the reference prefix ending at
/// token t and averages their scores; the final timestep scores the
/// reference itself once (every completion of a finished sentence is the
/// sentence). Rollout seeds are drawn from `rng` with `next()`, timesteps
/// ascending and samples ascending within a timestep; the final timestep
/// consumes none. The rollout length budget exceeds the beam budget by one
/// token so completions can reproduce a truncated reference exactly.
/// UsageError on a malformed reference.
std::vector<double> estimate_action_scores(const Sentence& source,
                                           const Sentence& reference,
                                           const GeneratorParams& generator,
                                           const SentenceScorer& scorer,
                                           std::size_t rollout_count,
                                           Rng& rng);

/// As above with the combined evaluator score alpha * style +
/// beta * semantic + eta * fluency, semantic always against `source`.
/// A module that fails on a sentence (throws, or returns a non-finite
/// value) contributes that module's worst score observed in this call; a
/// module that fails on every sentence contributes its floor (the style
/// clamp floor, minus twice the largest embedding norm, the log of the
/// probability floor). Substitutions are logged at warn level. When
/// `reference_scores` is given it receives the reference's own module
/// scores from the final timestep.
std::vector<double> estimate_action_scores(const Sentence& source,
                                           const Sentence& reference,
                                           const GeneratorParams& generator,
                                           const EvaluatorParams& evaluators,
                                           const ScoreWeights& weights,
                                           Rng& rng,
                                           ModuleScores* reference_scores = nullptr);

/// Turns per-timestep action scores into shaped rewards: r_1 = f_1 and
/// r_t = f_t - f_{t-1} after, so the rewards telescope to the final score.
/// UsageError on an empty sequence.
std::vector<double> shape_rewards(std::span<const double> f);

/// Discounted returns by the backward recursion Q_t = r_t + gamma * Q_{t+1}
/// with Q_{T'} = r_{T'}. Requires 0 < gamma <= 1; gamma = 1 is admitted for
/// testing only (ScoreWeights::check stays strict). UsageError on an empty
/// sequence, ConfigError on a gamma out of range.
std::vector<double> discounted_returns(std::span<const double> rewards,
                                       double gamma);

/// One policy-gradient update of the generator over a source batch with an
/// injected sentence scorer and no discriminator step. For each source:
/// beam reference, action scores, shaped rewards, discounted returns, then
/// the episode gradient of -sum_t ln P(y_t | s_t) * Q_t over the reference's
/// actions. Episode gradients are averaged over the episodes that survive
/// (non-finite loss or gradient skips the episode with a warning), matching
/// the reported loss, then applied with one clipped step. A batch with no
/// survivors leaves the generator untouched. When `traces` is given it
/// receives one entry per source in order, skipped episodes included.
/// UsageError on an empty batch.
RlStepReport reinforce_policy_update(std::span<const Sentence> sources,
                                     ParameterSet& generator_set,
                                     const GeneratorParams& generator,
                                     const SentenceScorer& scorer,
                                     const ScoreWeights& weights,
                                     const RlUpdateOptions& options,
                                     Rng& rng,
                                     std::vector<ActionScoreTrace>* traces = nullptr);

/// One full training step: the policy update above with the combined
/// evaluator score, then one adversarial discriminator step whose model
/// samples are the batch's beam references and whose human samples are
/// `human_targets` (same size as `sources`, UsageError otherwise). All
/// scoring happens against the pre-update snapshot of every model; the
/// discriminator is the only evaluator the step may change. The report's
/// module means average the references' own scores over the whole batch.
RlStepReport reinforce_update(std::span<const Sentence> sources,
                              std::span<const Sentence> human_targets,
                              ParameterSet& generator_set,
                              const GeneratorParams& generator,
                              ParameterSet& discriminator_set,
                              const EvaluatorParams& evaluators,
                              const ScoreWeights& weights,
                              const RlUpdateOptions& options,
                              Rng& rng,
                              std::vector<ActionScoreTrace>* traces = nullptr);

}  // namespace rlst
