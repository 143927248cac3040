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

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rlst/sentence.hpp"

namespace rlst {

/// Surface-form <-> index bijection with reserved entries PAD, UNK, BOS, EOS
/// at indices 0..3. Non-reserved entries are ordered by descending corpus
/// frequency, ties broken lexicographically, so construction is deterministic.
class Vocabulary {
public:
    Vocabulary();

    /// Counts tokens over the sentences, drops those below min_frequency,
    /// keeps at most max_size non-reserved entries (0 = unlimited).
    static Vocabulary build(
        const std::vector<std::vector<std::string>>& sentences,
        std::size_t min_frequency = 1, std::size_t max_size = 0);

    std::size_t size() const { return forms_.size(); }

    /// Index of a surface form; UNK for unknown forms.
    std::size_t index(std::string_view form) const;
    bool contains(std::string_view form) const;

    /// Surface form at an index; usage error when out of range.
    const std::string& form(std::size_t index) const;

    /// Corpus frequency recorded at build time (0 for reserved entries).
    std::uint64_t frequency(std::size_t index) const;

    /// Adds a surface form with an explicit frequency; returns its index
    /// (existing index if already present). For synthetic task assembly.
    std::size_t add(const std::string& form, std::uint64_t freq = 0);

    /// Framed sentence from surface tokens; unknowns map to UNK.
    Sentence encode(const std::vector<std::string>& tokens, Style style) const;

    /// Surface tokens of a sentence, BOS/EOS stripped.
    std::vector<std::string> decode(const Sentence& s) const;

    /// Text sidecar: one non-reserved entry per line, "form<TAB>frequency",
    /// in index order. Reserved entries are implicit.
    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

private:
    std::vector<std::string> forms_;
    std::vector<std::uint64_t> freqs_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace rlst
