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

#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlst/error.hpp"
#include "rlst/tensor.hpp"

namespace rlst {

/// Ordered collection of named tensors. Iteration follows insertion order so
/// optimizer updates and checkpoints are reproducible. Entry addresses are
/// stable; model structs keep raw pointers into the set.
class ParameterSet {
public:
    struct Entry {
        std::string name;
        Tensor tensor;
        bool trainable = true;
    };

    Tensor& add(std::string name, Tensor tensor, bool trainable = true) {
        if (index_.count(name)) {
            throw ConfigError("ParameterSet: duplicate name '" + name + "'");
        }
        index_[name] = entries_.size();
        entries_.push_back(Entry{std::move(name), std::move(tensor), trainable});
        return entries_.back().tensor;
    }

    Tensor* find(const std::string& name) {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &entries_[it->second].tensor;
    }
    const Tensor* find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &entries_[it->second].tensor;
    }

    Tensor& get(const std::string& name) {
        Tensor* t = find(name);
        if (!t) throw ConfigError("ParameterSet: unknown name '" + name + "'");
        return *t;
    }

    std::size_t size() const { return entries_.size(); }
    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }
    Entry& entry(std::size_t i) { return entries_[i]; }
    const Entry& entry(std::size_t i) const { return entries_[i]; }

    void zero_grads() {
        for (Entry& e : entries_) e.tensor.zero_grad();
    }

    /// Total number of scalar values across all entries.
    std::size_t value_count() const {
        std::size_t n = 0;
        for (const Entry& e : entries_) n += e.tensor.size();
        return n;
    }

private:
    std::deque<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace rlst
