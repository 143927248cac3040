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
#include "rlst/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rlst/error.hpp"

namespace rlst {
namespace kernel {

void softmax(const double* logits, double* probs, std::size_t n) {
    double mx = logits[0];
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
    for (std::size_t i = 0; i < n; ++i) probs[i] = std::exp(logits[i] - mx);
    // Sum in ascending value order: equal multisets of exponentials produce
    // the identical sum regardless of their original arrangement.
    std::vector<double> sorted(probs, probs + n);
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (double v : sorted) total += v;
    for (std::size_t i = 0; i < n; ++i) {
        probs[i] /= total;
        // exp underflow for widely spread logits; keep entries positive
        if (probs[i] == 0.0) probs[i] = std::numeric_limits<double>::min();
    }
}

void weighted_sum(const std::vector<const double*>& rows,
                  const double* weights, double* out, std::size_t dim) {
    std::vector<double> terms(rows.size());
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t s = 0; s < rows.size(); ++s) {
            terms[s] = weights[s] * rows[s][i];
        }
        std::sort(terms.begin(), terms.end());
        double acc = 0.0;
        for (double t : terms) acc += t;
        out[i] = acc;
    }
}

}  // namespace kernel

std::vector<double> softmax(std::span<const double> logits) {
    if (logits.empty()) throw UsageError("softmax: empty input");
    std::vector<double> probs(logits.size());
    kernel::softmax(logits.data(), probs.data(), logits.size());
    return probs;
}

double cross_entropy(std::span<const double> predicted, std::size_t target_index) {
    if (target_index >= predicted.size()) {
        throw UsageError("cross_entropy: target index out of range");
    }
    return -std::log(std::max(predicted[target_index], kProbFloor));
}

}  // namespace rlst
