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
#include <string_view>
#include <vector>

#include "rlst/rng.hpp"

namespace rlst {

/// Whitespace split plus ASCII lowercasing. Corpora arrive pre-tokenized;
/// no further normalization, so misspellings survive as-is.
std::vector<std::string> tokenize(std::string_view line);

/// Single-space join; inverse of tokenize on lowercase pre-tokenized input.
std::string detokenize(const std::vector<std::string>& tokens);

/// One style, one split, as surface-token sentences.
struct RawSplit {
    std::vector<std::vector<std::string>> sentences;
    std::size_t blank_lines_skipped = 0;
};

/// Reads one sentence per line; lowercases and tokenizes. Throws IoError on
/// a missing or empty file or invalid UTF-8, naming the line.
RawSplit read_sentence_file(const std::string& path);

struct SplitPaths {
    std::string train, dev, test;
};

/// Train/dev/test sentence lists for the two styles of one task.
struct StyleCorpus {
    std::string source_name, target_name;
    RawSplit source_train, source_dev, source_test;
    RawSplit target_train, target_dev, target_test;
    std::string provenance;

    /// All sentences of both styles' train splits (vocabulary construction).
    std::vector<std::vector<std::string>> all_train_sentences() const;
};

StyleCorpus load_corpus(const SplitPaths& source, const SplitPaths& target,
                        std::string source_name = "source",
                        std::string target_name = "target");

/// Synthetic marker task: both styles share a content vocabulary; each
/// sentence carries exactly one style marker at a random position, and the
/// ground-truth transfer swaps that marker for its counterpart.
struct SyntheticSpec {
    std::size_t content_vocab = 50;
    std::vector<std::string> markers_a = {"aa0", "aa1"};
    std::vector<std::string> markers_b = {"bb0", "bb1"};
    std::size_t train_count = 2000;
    std::size_t dev_count = 200;
    std::size_t test_count = 200;
    std::size_t min_len = 4;   // total tokens including the marker
    std::size_t max_len = 9;
};

/// Content token surface form for index k (0-based).
std::string synthetic_content_form(std::size_t k);

/// Validates marker-set disjointness and builds all six splits. Style A is
/// the source style, B the target.
StyleCorpus make_synthetic_task(Rng& rng, const SyntheticSpec& spec);

/// Marker-swapped counterpart of one synthetic sentence. a_to_b selects the
/// direction. Usage error if the sentence carries no marker of that side.
std::vector<std::string> ground_truth_transfer(
    const std::vector<std::string>& tokens, const SyntheticSpec& spec,
    bool a_to_b);

/// Writes one sentence per line. Parent directory must exist.
void write_sentence_file(const std::string& path,
                         const std::vector<std::vector<std::string>>& sentences);

/// Tab-separated (source, ground-truth-transfer) pairs for a split.
void write_oracle_file(const std::string& path,
                       const std::vector<std::vector<std::string>>& sentences,
                       const SyntheticSpec& spec, bool a_to_b);

}  // namespace rlst
