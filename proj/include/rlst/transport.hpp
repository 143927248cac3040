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

#include <span>

#include "rlst/tensor.hpp"

namespace rlst {

/// Optimal flows for a balanced transportation problem. flows has the cost
/// matrix shape; row sums equal the supplies and column sums the demands.
struct TransportPlan {
    Tensor flows;
    double total_cost = 0.0;
};

/// Reduced costs above -kReducedCostTol count as nonnegative, so the simplex
/// stops instead of chasing rounding noise.
inline constexpr double kReducedCostTol = 1e-11;

/// Supply and demand totals may differ by at most this before the problem is
/// rejected as unbalanced.
inline constexpr double kBalanceTol = 1e-9;

/// Solves min sum_ij f_ij c_ij subject to row sums = supply, column sums =
/// demand, f >= 0, by the transportation simplex with Bland's entering rule.
/// Supply and demand entries must be strictly positive and the totals
/// balanced. Throws UsageError on empty, non-positive, or unbalanced input,
/// ConfigError when the cost shape is not supply x demand, NumericalError on
/// non-finite input or a failed pivot sequence.
TransportPlan solve_transport(std::span<const double> supply,
                              std::span<const double> demand,
                              const Tensor& cost);

}  // namespace rlst
