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
#include <functional>

#include "rlst/param_set.hpp"

namespace rlst {

/// Scalar loss over the parameter set. When with_grad is true the call must
/// also accumulate gradients into the set; when false it must leave gradients
/// untouched. Must be deterministic across calls.
using LossFn = std::function<double(ParameterSet&, bool with_grad)>;

/// Compares the analytic gradient against central differences on
/// sample_count randomly chosen trainable coordinates (all of them when
/// sample_count is 0 or exceeds the total). Returns the worst relative
/// error, falling back to absolute error when both the analytic and the
/// finite-difference value are below 1e-8 in magnitude. Throws
/// NumericalError identifying the coordinate if a perturbed loss is
/// non-finite. Gradients are zeroed on exit.
double grad_check(const LossFn& loss_fn, ParameterSet& params, double step,
                  std::size_t sample_count, std::uint64_t seed = 0);

}  // namespace rlst
