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
#include "rlst/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "rlst/error.hpp"

namespace rlst {

namespace {

const char* const kReservedForms[kReservedCount] = {"<pad>", "<unk>", "<bos>",
                                                    "<eos>"};

bool is_reserved_form(const std::string& form) {
    for (const char* r : kReservedForms) {
        if (form == r) return true;
    }
    return false;
}

}  // namespace

Vocabulary::Vocabulary() {
    for (std::size_t i = 0; i < kReservedCount; ++i) {
        forms_.emplace_back(kReservedForms[i]);
        freqs_.push_back(0);
        index_[forms_.back()] = i;
    }
}

Vocabulary Vocabulary::build(
    const std::vector<std::vector<std::string>>& sentences,
    std::size_t min_frequency, std::size_t max_size) {
    // ordered map: lexicographic tie-break falls out of the iteration order
    std::map<std::string, std::uint64_t> counts;
    for (const auto& sent : sentences) {
        for (const auto& tok : sent) ++counts[tok];
    }

    std::vector<std::pair<std::string, std::uint64_t>> entries;
    for (const auto& [form, count] : counts) {
        if (count < min_frequency) continue;
        if (is_reserved_form(form)) continue;
        entries.emplace_back(form, count);
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) {
                         return a.second > b.second;
                     });
    if (max_size > 0 && entries.size() > max_size) entries.resize(max_size);

    Vocabulary v;
    for (auto& [form, count] : entries) v.add(form, count);
    return v;
}

std::size_t Vocabulary::index(std::string_view form) const {
    auto it = index_.find(std::string(form));
    return it == index_.end() ? kUnkIndex : it->second;
}

bool Vocabulary::contains(std::string_view form) const {
    return index_.count(std::string(form)) != 0;
}

const std::string& Vocabulary::form(std::size_t index) const {
    if (index >= forms_.size()) {
        throw UsageError("Vocabulary::form: index out of range");
    }
    return forms_[index];
}

std::uint64_t Vocabulary::frequency(std::size_t index) const {
    if (index >= freqs_.size()) {
        throw UsageError("Vocabulary::frequency: index out of range");
    }
    return freqs_[index];
}

std::size_t Vocabulary::add(const std::string& form, std::uint64_t freq) {
    auto it = index_.find(form);
    if (it != index_.end()) return it->second;
    forms_.push_back(form);
    freqs_.push_back(freq);
    index_[form] = forms_.size() - 1;
    return forms_.size() - 1;
}

Sentence Vocabulary::encode(const std::vector<std::string>& tokens,
                            Style style) const {
    std::vector<std::size_t> ids;
    ids.reserve(tokens.size());
    for (const auto& tok : tokens) ids.push_back(index(tok));
    return frame(std::move(ids), style);
}

std::vector<std::string> Vocabulary::decode(const Sentence& s) const {
    std::vector<std::string> out;
    for (std::size_t t : s.content()) out.push_back(form(t));
    return out;
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open vocabulary for writing: " + path);
    for (std::size_t i = kReservedCount; i < forms_.size(); ++i) {
        out << forms_[i] << '\t' << freqs_[i] << '\n';
    }
    if (!out) throw IoError("vocabulary write failed: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vocabulary: " + path);
    Vocabulary v;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw IoError("vocabulary line " + std::to_string(line_no) +
                          " missing tab: " + path);
        }
        v.add(line.substr(0, tab),
              std::stoull(line.substr(tab + 1)));
    }
    return v;
}

}  // namespace rlst
