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
#include "rlst/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rlst/error.hpp"
#include "rlst/rng.hpp"

namespace rlst {

namespace {

struct Coord {
    std::size_t entry;
    std::size_t index;
};

}  // namespace

double grad_check(const LossFn& loss_fn, ParameterSet& params, double step,
                  std::size_t sample_count, std::uint64_t seed) {
    if (step <= 0.0) throw UsageError("grad_check: step must be positive");

    params.zero_grads();
    const double base = loss_fn(params, true);
    if (!std::isfinite(base)) {
        throw NumericalError("grad_check: non-finite loss at base point");
    }

    std::vector<std::vector<double>> analytic(params.size());
    for (std::size_t e = 0; e < params.size(); ++e) {
        auto& entry = params.entry(e);
        if (entry.tensor.has_grad()) analytic[e] = entry.tensor.grad();
        else analytic[e].assign(entry.tensor.size(), 0.0);
    }

    std::vector<Coord> coords;
    for (std::size_t e = 0; e < params.size(); ++e) {
        const auto& entry = params.entry(e);
        if (!entry.trainable) continue;
        for (std::size_t i = 0; i < entry.tensor.size(); ++i) {
            coords.push_back({e, i});
        }
    }
    if (sample_count > 0 && sample_count < coords.size()) {
        Rng rng(seed);
        // partial Fisher-Yates: the first sample_count slots become the sample
        for (std::size_t i = 0; i < sample_count; ++i) {
            std::size_t j = i + static_cast<std::size_t>(
                                    rng.below(coords.size() - i));
            std::swap(coords[i], coords[j]);
        }
        coords.resize(sample_count);
    }

    double worst = 0.0;
    for (const Coord& c : coords) {
        auto& entry = params.entry(c.entry);
        double& v = entry.tensor.values()[c.index];
        const double saved = v;

        v = saved + step;
        const double f_plus = loss_fn(params, false);
        v = saved - step;
        const double f_minus = loss_fn(params, false);
        v = saved;

        if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
            throw NumericalError("grad_check: non-finite loss perturbing '" +
                                 entry.name + "'[" + std::to_string(c.index) +
                                 "]");
        }

        const double fd = (f_plus - f_minus) / (2.0 * step);
        const double an = analytic[c.entry][c.index];
        const double diff = std::fabs(an - fd);
        const double mag = std::max(std::fabs(an), std::fabs(fd));
        const double err = mag < 1e-8 ? diff : diff / mag;
        worst = std::max(worst, err);
    }

    params.zero_grads();
    return worst;
}

}  // namespace rlst
