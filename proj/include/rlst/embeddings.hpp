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

#include <string>
#include <utility>
#include <vector>

#include "rlst/corpus.hpp"
#include "rlst/rng.hpp"
#include "rlst/tensor.hpp"
#include "rlst/vocab.hpp"

namespace rlst {

/// Pre-trained word vectors: text format, one token per line — surface form
/// followed by dim space-separated decimals.
struct EmbeddingFile {
    std::size_t dim = 0;
    std::vector<std::pair<std::string, std::vector<double>>> entries;

    const std::vector<double>* find(const std::string& form) const;
};

EmbeddingFile load_embedding_file(const std::string& path);
void write_embedding_file(const std::string& path, const EmbeddingFile& emb);

/// (vocab size x dim) table aligned to vocabulary indices. Tokens absent
/// from the file get seeded uniform(-0.08, 0.08) rows; the PAD row is zero.
Tensor build_embedding_matrix(const Vocabulary& vocab,
                              const EmbeddingFile& file, Rng& rng);

/// Embeddings for the synthetic marker task. Every token shares a global
/// direction (so pooled sentence vectors of related sentences stay close)
/// plus a token-specific direction orthogonal to it; paired markers reuse
/// most of each other's specific direction. All vectors unit-norm except PAD.
///
/// pair_cosine is the resulting cosine between paired marker vectors.
EmbeddingFile make_synthetic_embeddings(const SyntheticSpec& spec,
                                        std::size_t dim, Rng& rng,
                                        double shared_weight = 0.6,
                                        double pair_cosine = 0.85);

}  // namespace rlst
