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
#include <vector>

#include "rlst/sentence.hpp"
#include "rlst/tensor.hpp"
#include "rlst/transport.hpp"

namespace rlst {

/// Normalized bag of words. support holds strictly ascending vocabulary
/// indices; weights are positive and sum to 1 within 1e-12.
struct WordDistribution {
    std::vector<std::size_t> support;
    std::vector<double> weights;
};

/// Counts tokens into a WordDistribution with ascending support. The same
/// token multiset always yields the identical distribution, so every score
/// built on it is exactly order-invariant.
WordDistribution word_distribution(std::span<const std::size_t> tokens);

/// Throws UsageError unless d satisfies the WordDistribution invariants.
/// An empty support is rejected here.
void validate_distribution(const WordDistribution& d);

/// Euclidean distance between embedding rows i and j. Exactly symmetric and
/// exactly zero for identical rows. Throws UsageError on an out-of-range
/// index.
double ground_distance(std::size_t i, std::size_t j, const Tensor& embeddings);

/// Exact minimum-cost transport plan between a and b under ground_distance.
/// The arguments are solved in a canonical orientation and the plan is
/// transposed back, so wmd_plan(a, b) and wmd_plan(b, a) give bitwise equal
/// costs. flows is |a.support| x |b.support|.
TransportPlan wmd_plan(const WordDistribution& a, const WordDistribution& b,
                       const Tensor& embeddings);

/// Word mover's distance: the total cost of wmd_plan.
double wmd(const WordDistribution& a, const WordDistribution& b,
           const Tensor& embeddings);

/// Semantic reward with its fallback marker. degenerate is set when a side
/// was empty after stopword filtering and the unfiltered tokens were scored
/// instead.
struct SemanticScore {
    double value = 0.0;
    bool degenerate = false;
};

/// Content-preservation reward: -wmd between the two bags of words divided
/// by the generated sentence's content-token count. BOS and EOS are always
/// excluded; stopwords only when given. Zero exactly when the distributions
/// coincide; otherwise negative, higher is better. Throws UsageError when a
/// sentence has no content tokens at all.
SemanticScore semantic_score(const Sentence& generated, const Sentence& source,
                             const Tensor& embeddings,
                             std::span<const std::size_t> stopwords = {});

}  // namespace rlst
