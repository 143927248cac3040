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

#include "rlst/param_set.hpp"

namespace rlst {

struct SgdOptions {
    double learning_rate = 0.01;
    double clip_norm = 5.0;  ///< global norm ceiling; <= 0 disables clipping
};

/// One SGD step over every trainable entry of the set.  The global gradient
/// norm is taken across all trainable entries together; if it exceeds
/// clip_norm the step is rescaled by clip_norm / norm.  Gradients are zeroed
/// afterward; non-trainable entries are untouched.  Throws NumericalError
/// naming the offending entry if any gradient is non-finite.
/// Returns the pre-clip global gradient norm.
double sgd_step(ParameterSet& params, const SgdOptions& opts);

}  // namespace rlst
