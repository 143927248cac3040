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
#include "rlst/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "rlst/error.hpp"

namespace rlst {

namespace {

constexpr double kWeightSumTol = 1e-12;

bool is_frame_token(std::size_t t) {
    return t == kBosIndex || t == kEosIndex;
}

/// Content tokens with the BOS/EOS frame and any stray frame markers removed.
std::vector<std::size_t> frame_free_tokens(const Sentence& s) {
    std::vector<std::size_t> kept;
    for (std::size_t t : s.content()) {
        if (!is_frame_token(t)) kept.push_back(t);
    }
    return kept;
}

std::vector<std::size_t> without_stopwords(
    const std::vector<std::size_t>& tokens,
    std::span<const std::size_t> stopwords) {
    std::vector<std::size_t> kept;
    for (std::size_t t : tokens) {
        if (std::find(stopwords.begin(), stopwords.end(), t) ==
            stopwords.end()) {
            kept.push_back(t);
        }
    }
    return kept;
}

void check_indices(const WordDistribution& d, const Tensor& embeddings) {
    for (std::size_t i : d.support) {
        if (i >= embeddings.rows()) {
            throw UsageError("semantic: support index outside embedding table");
        }
    }
}

}  // namespace

WordDistribution word_distribution(std::span<const std::size_t> tokens) {
    std::map<std::size_t, std::size_t> counts;
    for (std::size_t t : tokens) ++counts[t];
    WordDistribution d;
    d.support.reserve(counts.size());
    d.weights.reserve(counts.size());
    const double total = static_cast<double>(tokens.size());
    for (const auto& [index, count] : counts) {
        d.support.push_back(index);
        d.weights.push_back(static_cast<double>(count) / total);
    }
    return d;
}

void validate_distribution(const WordDistribution& d) {
    if (d.support.empty()) {
        throw UsageError("semantic: empty word distribution");
    }
    if (d.support.size() != d.weights.size()) {
        throw UsageError("semantic: support and weights lengths differ");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < d.support.size(); ++k) {
        if (k > 0 && d.support[k] <= d.support[k - 1]) {
            throw UsageError("semantic: support must be strictly ascending");
        }
        if (!(d.weights[k] > 0.0)) {
            throw UsageError("semantic: non-positive weight");
        }
        sum += d.weights[k];
    }
    if (std::abs(sum - 1.0) > kWeightSumTol) {
        throw UsageError("semantic: weights do not sum to 1");
    }
}

double ground_distance(std::size_t i, std::size_t j,
                       const Tensor& embeddings) {
    if (i >= embeddings.rows() || j >= embeddings.rows()) {
        throw UsageError("semantic: embedding index out of range");
    }
    const double* a = embeddings.row(i);
    const double* b = embeddings.row(j);
    double sum = 0.0;
    for (std::size_t k = 0; k < embeddings.cols(); ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

TransportPlan wmd_plan(const WordDistribution& a, const WordDistribution& b,
                       const Tensor& embeddings) {
    validate_distribution(a);
    validate_distribution(b);
    check_indices(a, embeddings);
    check_indices(b, embeddings);

    // canonical orientation: the lexicographically smaller distribution
    // supplies, so both argument orders run the identical solve
    const bool swapped = std::tie(b.support, b.weights) <
                         std::tie(a.support, a.weights);
    const WordDistribution& lo = swapped ? b : a;
    const WordDistribution& hi = swapped ? a : b;

    const std::size_t m = lo.support.size();
    const std::size_t n = hi.support.size();
    Tensor cost({m, n});
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            cost.at(r, c) =
                ground_distance(lo.support[r], hi.support[c], embeddings);
        }
    }
    TransportPlan plan = solve_transport(lo.weights, hi.weights, cost);
    if (swapped) {
        Tensor back({n, m});
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                back.at(c, r) = plan.flows.at(r, c);
            }
        }
        plan.flows = std::move(back);
    }
    return plan;
}

double wmd(const WordDistribution& a, const WordDistribution& b,
           const Tensor& embeddings) {
    return wmd_plan(a, b, embeddings).total_cost;
}

SemanticScore semantic_score(const Sentence& generated, const Sentence& source,
                             const Tensor& embeddings,
                             std::span<const std::size_t> stopwords) {
    const std::vector<std::size_t> g_all = frame_free_tokens(generated);
    const std::vector<std::size_t> s_all = frame_free_tokens(source);
    std::vector<std::size_t> g = without_stopwords(g_all, stopwords);
    std::vector<std::size_t> s = without_stopwords(s_all, stopwords);

    SemanticScore out;
    if (g.empty()) {
        g = g_all;
        out.degenerate = true;
    }
    if (s.empty()) {
        s = s_all;
        out.degenerate = true;
    }
    const double distance =
        wmd(word_distribution(g), word_distribution(s), embeddings);
    out.value =
        distance == 0.0 ? 0.0 : -distance / static_cast<double>(g.size());
    return out;
}

}  // namespace rlst
