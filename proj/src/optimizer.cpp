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
#include "rlst/optimizer.hpp"

#include <cmath>

#include "rlst/error.hpp"

namespace rlst {

double sgd_step(ParameterSet& params, const SgdOptions& opts) {
    double sq_sum = 0.0;
    for (const auto& entry : params) {
        if (!entry.trainable || !entry.tensor.has_grad()) continue;
        for (double g : entry.tensor.grad()) {
            if (!std::isfinite(g)) {
                throw NumericalError("non-finite gradient in parameter '" +
                                     entry.name + "'");
            }
            sq_sum += g * g;
        }
    }
    const double norm = std::sqrt(sq_sum);

    double scale = opts.learning_rate;
    if (opts.clip_norm > 0.0 && norm > opts.clip_norm) {
        scale *= opts.clip_norm / norm;
    }

    for (auto& entry : params) {
        if (!entry.trainable || !entry.tensor.has_grad()) continue;
        auto& vals = entry.tensor.values();
        auto& grads = entry.tensor.grad();
        for (std::size_t i = 0; i < vals.size(); ++i) {
            vals[i] -= scale * grads[i];
            grads[i] = 0.0;
        }
    }
    return norm;
}

}  // namespace rlst
