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

#include <string>
#include <vector>

#include "rlst/param_set.hpp"
#include "rlst/rng.hpp"
#include "rlst/tape.hpp"
#include "rlst/tensor.hpp"

namespace rlst {

/// Gated recurrent unit parameters: update gate, reset gate, and candidate
/// state, each with an input weight (hidden x input), a recurrent weight
/// (hidden x hidden), and a bias (hidden).
///
/// Gate convention: the update gate weights the candidate,
///   h' = (1 - z) * h + z * n,
/// so a strongly negative update-gate bias keeps the previous state.
struct GruParams {
    Tensor* update_w = nullptr;
    Tensor* update_u = nullptr;
    Tensor* update_b = nullptr;
    Tensor* reset_w = nullptr;
    Tensor* reset_u = nullptr;
    Tensor* reset_b = nullptr;
    Tensor* cand_w = nullptr;
    Tensor* cand_u = nullptr;
    Tensor* cand_b = nullptr;

    /// Allocate all nine tensors inside `set` under `prefix.` names,
    /// weights uniform(-0.08, 0.08), biases zero.
    static GruParams create(ParameterSet& set, const std::string& prefix,
                            std::size_t hidden, std::size_t input, Rng& rng);

    /// Wire pointers to tensors previously created under `prefix.`.
    static GruParams bind(ParameterSet& set, const std::string& prefix);

    std::size_t hidden_dim() const { return update_b->size(); }
    std::size_t input_dim() const { return update_w->cols(); }

    void check_dims() const;
};

/// One GRU step on plain values. prev_state and out may not alias.
void gru_forward(const GruParams& p, const double* prev_state,
                 const double* input, double* out);

/// One GRU step with explicit vectors; validates dimensions.
std::vector<double> gru_step(const GruParams& p,
                             const std::vector<double>& prev_state,
                             const std::vector<double>& input);

/// GRU step on the tape. The params vars come from GruTapeVars so one tape
/// can reuse them across timesteps.
struct GruTapeVars {
    Tape::Var update_w, update_u, update_b;
    Tape::Var reset_w, reset_u, reset_b;
    Tape::Var cand_w, cand_u, cand_b;

    static GruTapeVars bind(Tape& tape, const GruParams& p);
};

Tape::Var gru_step(Tape& tape, const GruTapeVars& p, Tape::Var prev_state,
                   Tape::Var input);

}  // namespace rlst
