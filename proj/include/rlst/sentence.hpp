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
#include <cstdint>
#include <vector>

#include "rlst/error.hpp"

namespace rlst {

/// Reserved vocabulary indices, fixed across every model and file format.
inline constexpr std::size_t kPadIndex = 0;
inline constexpr std::size_t kUnkIndex = 1;
inline constexpr std::size_t kBosIndex = 2;
inline constexpr std::size_t kEosIndex = 3;
inline constexpr std::size_t kReservedCount = 4;

enum class Style : std::uint8_t { source, target };

/// Token-index sequence with a style label. Framed sentences begin with BOS
/// and end with EOS exactly once each.
struct Sentence {
    std::vector<std::size_t> tokens;
    Style style = Style::source;
    bool framed = false;

    std::size_t length() const { return tokens.size(); }

    /// Tokens between the BOS/EOS frame (the sentence itself when unframed).
    std::vector<std::size_t> content() const {
        if (!framed) return tokens;
        return std::vector<std::size_t>(tokens.begin() + 1, tokens.end() - 1);
    }
};

/// Wraps content indices in BOS/EOS.
inline Sentence frame(std::vector<std::size_t> content, Style style) {
    Sentence s;
    s.tokens.reserve(content.size() + 2);
    s.tokens.push_back(kBosIndex);
    s.tokens.insert(s.tokens.end(), content.begin(), content.end());
    s.tokens.push_back(kEosIndex);
    s.style = style;
    s.framed = true;
    return s;
}

/// Enforces the Sentence invariants against a vocabulary size.
inline void validate_sentence(const Sentence& s, std::size_t vocab_size) {
    if (s.tokens.empty()) throw UsageError("sentence: empty token sequence");
    for (std::size_t t : s.tokens) {
        if (t >= vocab_size) throw UsageError("sentence: token index out of range");
    }
    if (s.framed) {
        if (s.tokens.size() < 2 || s.tokens.front() != kBosIndex ||
            s.tokens.back() != kEosIndex) {
            throw UsageError("sentence: framed sentence must be BOS ... EOS");
        }
        for (std::size_t i = 1; i + 1 < s.tokens.size(); ++i) {
            if (s.tokens[i] == kBosIndex || s.tokens[i] == kEosIndex) {
                throw UsageError("sentence: interior BOS/EOS marker");
            }
        }
    }
}

}  // namespace rlst
