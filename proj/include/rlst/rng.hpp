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
#include <random>
#include <span>
#include <vector>

#include "rlst/error.hpp"

namespace rlst {

/// Seeded PRNG with platform-independent derived values. All floating-point
/// draws are built from raw 64-bit outputs rather than std distributions, so
/// identical seeds give identical streams on every build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n) {
        if (n == 0) throw UsageError("Rng::below: n must be positive");
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    /// Sample an index from a probability vector by CDF walk. Assumes the
    /// weights sum to ~1; rounding residue falls on the last index.
    std::size_t multinomial(std::span<const double> probs) {
        if (probs.empty()) throw UsageError("Rng::multinomial: empty distribution");
        const double u = uniform();
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            cum += probs[i];
            if (u < cum) return i;
        }
        return probs.size() - 1;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    /// Derive an independent stream for a tagged purpose. Deterministic in
    /// (seed, tag); forks of the same Rng with distinct tags do not collide.
    Rng fork(std::uint64_t tag) const {
        std::uint64_t x = seed_ + 0x9e3779b97f4a7c15ULL * (tag + 1);
        // splitmix64 finalizer
        x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27; x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return Rng(x);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace rlst
