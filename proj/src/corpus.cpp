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
#include "rlst/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include "rlst/error.hpp"

namespace rlst {

namespace {

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        std::size_t len;
        if (c < 0x80) len = 1;
        else if ((c & 0xE0) == 0xC0) len = 2;
        else if ((c & 0xF0) == 0xE0) len = 3;
        else if ((c & 0xF8) == 0xF0) len = 4;
        else return false;
        if (i + len > s.size()) return false;
        for (std::size_t j = 1; j < len; ++j) {
            if ((static_cast<unsigned char>(s[i + j]) & 0xC0) != 0x80) {
                return false;
            }
        }
        i += len;
    }
    return true;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : line) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) {
                tokens.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.push_back(static_cast<char>(
                std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

RawSplit read_sentence_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);

    RawSplit split;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!valid_utf8(line)) {
            throw IoError(path + ": invalid UTF-8 at line " +
                          std::to_string(line_no));
        }
        auto tokens = tokenize(line);
        if (tokens.empty()) {
            ++split.blank_lines_skipped;
            continue;
        }
        split.sentences.push_back(std::move(tokens));
    }
    if (split.sentences.empty()) {
        throw IoError(path + ": no sentences (empty file) at line " +
                      std::to_string(line_no));
    }
    return split;
}

std::vector<std::vector<std::string>> StyleCorpus::all_train_sentences() const {
    std::vector<std::vector<std::string>> all = source_train.sentences;
    all.insert(all.end(), target_train.sentences.begin(),
               target_train.sentences.end());
    return all;
}

StyleCorpus load_corpus(const SplitPaths& source, const SplitPaths& target,
                        std::string source_name, std::string target_name) {
    StyleCorpus c;
    c.source_name = std::move(source_name);
    c.target_name = std::move(target_name);
    c.source_train = read_sentence_file(source.train);
    c.source_dev = read_sentence_file(source.dev);
    c.source_test = read_sentence_file(source.test);
    c.target_train = read_sentence_file(target.train);
    c.target_dev = read_sentence_file(target.dev);
    c.target_test = read_sentence_file(target.test);
    c.provenance = source.train + " | " + target.train;
    return c;
}

std::string synthetic_content_form(std::size_t k) {
    return "w" + std::to_string(k);
}

namespace {

void check_synthetic_spec(const SyntheticSpec& spec) {
    if (spec.markers_a.empty() || spec.markers_b.empty()) {
        throw UsageError("synthetic task: marker sets must be non-empty");
    }
    if (spec.markers_a.size() != spec.markers_b.size()) {
        throw UsageError("synthetic task: marker sets must pair up 1:1");
    }
    if (spec.min_len < 2 || spec.max_len < spec.min_len) {
        throw UsageError("synthetic task: bad length range");
    }
    std::unordered_set<std::string> seen;
    for (std::size_t k = 0; k < spec.content_vocab; ++k) {
        seen.insert(synthetic_content_form(k));
    }
    for (const auto& m : spec.markers_a) {
        if (!seen.insert(m).second) {
            throw UsageError("synthetic task: marker overlaps: " + m);
        }
    }
    for (const auto& m : spec.markers_b) {
        if (!seen.insert(m).second) {
            throw UsageError("synthetic task: marker overlaps: " + m);
        }
    }
}

std::vector<std::string> synth_sentence(Rng& rng, const SyntheticSpec& spec,
                                        const std::vector<std::string>& markers) {
    const std::size_t len =
        spec.min_len + rng.below(spec.max_len - spec.min_len + 1);
    std::vector<std::string> tokens;
    tokens.reserve(len);
    for (std::size_t i = 0; i + 1 < len; ++i) {
        tokens.push_back(synthetic_content_form(rng.below(spec.content_vocab)));
    }
    const auto& marker = markers[rng.below(markers.size())];
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(rng.below(len)),
                  marker);
    return tokens;
}

RawSplit synth_split(Rng& rng, const SyntheticSpec& spec,
                     const std::vector<std::string>& markers,
                     std::size_t count) {
    RawSplit split;
    split.sentences.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        split.sentences.push_back(synth_sentence(rng, spec, markers));
    }
    return split;
}

}  // namespace

StyleCorpus make_synthetic_task(Rng& rng, const SyntheticSpec& spec) {
    check_synthetic_spec(spec);
    StyleCorpus c;
    c.source_name = "a";
    c.target_name = "b";
    c.provenance = "synthetic";
    c.source_train = synth_split(rng, spec, spec.markers_a, spec.train_count);
    c.source_dev = synth_split(rng, spec, spec.markers_a, spec.dev_count);
    c.source_test = synth_split(rng, spec, spec.markers_a, spec.test_count);
    c.target_train = synth_split(rng, spec, spec.markers_b, spec.train_count);
    c.target_dev = synth_split(rng, spec, spec.markers_b, spec.dev_count);
    c.target_test = synth_split(rng, spec, spec.markers_b, spec.test_count);
    return c;
}

std::vector<std::string> ground_truth_transfer(
    const std::vector<std::string>& tokens, const SyntheticSpec& spec,
    bool a_to_b) {
    const auto& from = a_to_b ? spec.markers_a : spec.markers_b;
    const auto& to = a_to_b ? spec.markers_b : spec.markers_a;
    std::vector<std::string> out = tokens;
    bool swapped = false;
    for (auto& tok : out) {
        auto it = std::find(from.begin(), from.end(), tok);
        if (it != from.end()) {
            tok = to[static_cast<std::size_t>(it - from.begin())];
            swapped = true;
        }
    }
    if (!swapped) {
        throw UsageError("ground_truth_transfer: sentence carries no marker");
    }
    return out;
}

void write_sentence_file(
    const std::string& path,
    const std::vector<std::vector<std::string>>& sentences) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const auto& s : sentences) out << detokenize(s) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void write_oracle_file(const std::string& path,
                       const std::vector<std::vector<std::string>>& sentences,
                       const SyntheticSpec& spec, bool a_to_b) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const auto& s : sentences) {
        out << detokenize(s) << '\t'
            << detokenize(ground_truth_transfer(s, spec, a_to_b)) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace rlst
