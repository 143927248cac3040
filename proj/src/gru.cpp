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
#include "rlst/gru.hpp"

#include "rlst/error.hpp"
#include "rlst/ops.hpp"

namespace rlst {

GruParams GruParams::create(ParameterSet& set, const std::string& prefix,
                            std::size_t hidden, std::size_t input, Rng& rng) {
    GruParams p;
    auto mat = [&](const char* name, std::size_t r, std::size_t c) {
        return &set.add(prefix + "." + name, Tensor::uniform({r, c}, rng));
    };
    auto bias = [&](const char* name) {
        return &set.add(prefix + "." + name, Tensor::vector(hidden));
    };
    p.update_w = mat("update_w", hidden, input);
    p.update_u = mat("update_u", hidden, hidden);
    p.update_b = bias("update_b");
    p.reset_w = mat("reset_w", hidden, input);
    p.reset_u = mat("reset_u", hidden, hidden);
    p.reset_b = bias("reset_b");
    p.cand_w = mat("cand_w", hidden, input);
    p.cand_u = mat("cand_u", hidden, hidden);
    p.cand_b = bias("cand_b");
    return p;
}

GruParams GruParams::bind(ParameterSet& set, const std::string& prefix) {
    GruParams p;
    p.update_w = &set.get(prefix + ".update_w");
    p.update_u = &set.get(prefix + ".update_u");
    p.update_b = &set.get(prefix + ".update_b");
    p.reset_w = &set.get(prefix + ".reset_w");
    p.reset_u = &set.get(prefix + ".reset_u");
    p.reset_b = &set.get(prefix + ".reset_b");
    p.cand_w = &set.get(prefix + ".cand_w");
    p.cand_u = &set.get(prefix + ".cand_u");
    p.cand_b = &set.get(prefix + ".cand_b");
    p.check_dims();
    return p;
}

void GruParams::check_dims() const {
    const std::size_t h = hidden_dim();
    const std::size_t in = input_dim();
    auto chk = [&](const Tensor* t, std::size_t r, std::size_t c) {
        if (t->rank() != 2 || t->rows() != r || t->cols() != c) {
            throw ConfigError("GruParams: inconsistent weight shape");
        }
    };
    chk(update_w, h, in);
    chk(reset_w, h, in);
    chk(cand_w, h, in);
    chk(update_u, h, h);
    chk(reset_u, h, h);
    chk(cand_u, h, h);
    if (reset_b->size() != h || cand_b->size() != h) {
        throw ConfigError("GruParams: inconsistent bias size");
    }
}

void gru_forward(const GruParams& p, const double* prev_state,
                 const double* input, double* out) {
    const std::size_t h = p.hidden_dim();
    const std::size_t in = p.input_dim();
    std::vector<double> z(h), r(h), n(h), tmp(h);

    // evaluation order matches the tape path: (Wx + Uh) + b
    auto gate = [&](const Tensor* w, const Tensor* u, const Tensor* b,
                    double* dst) {
        kernel::matvec(w->data(), input, dst, h, in);
        kernel::matvec(u->data(), prev_state, tmp.data(), h, h);
        for (std::size_t i = 0; i < h; ++i) dst[i] = (dst[i] + tmp[i]) + (*b)[i];
    };

    gate(p.update_w, p.update_u, p.update_b, z.data());
    kernel::sigmoid(z.data(), z.data(), h);
    gate(p.reset_w, p.reset_u, p.reset_b, r.data());
    kernel::sigmoid(r.data(), r.data(), h);

    // candidate sees the reset-gated previous state
    kernel::matvec(p.cand_w->data(), input, n.data(), h, in);
    for (std::size_t i = 0; i < h; ++i) tmp[i] = r[i] * prev_state[i];
    std::vector<double> un(h);
    kernel::matvec(p.cand_u->data(), tmp.data(), un.data(), h, h);
    for (std::size_t i = 0; i < h; ++i) n[i] = (n[i] + un[i]) + (*p.cand_b)[i];
    kernel::tanh(n.data(), n.data(), h);

    for (std::size_t i = 0; i < h; ++i) {
        out[i] = prev_state[i] + z[i] * (n[i] - prev_state[i]);
    }
}

std::vector<double> gru_step(const GruParams& p,
                             const std::vector<double>& prev_state,
                             const std::vector<double>& input) {
    if (prev_state.size() != p.hidden_dim() || input.size() != p.input_dim()) {
        throw ConfigError("gru_step: dimension mismatch");
    }
    std::vector<double> out(p.hidden_dim());
    gru_forward(p, prev_state.data(), input.data(), out.data());
    return out;
}

GruTapeVars GruTapeVars::bind(Tape& tape, const GruParams& p) {
    GruTapeVars v;
    v.update_w = tape.param(*p.update_w);
    v.update_u = tape.param(*p.update_u);
    v.update_b = tape.param(*p.update_b);
    v.reset_w = tape.param(*p.reset_w);
    v.reset_u = tape.param(*p.reset_u);
    v.reset_b = tape.param(*p.reset_b);
    v.cand_w = tape.param(*p.cand_w);
    v.cand_u = tape.param(*p.cand_u);
    v.cand_b = tape.param(*p.cand_b);
    return v;
}

Tape::Var gru_step(Tape& tape, const GruTapeVars& p, Tape::Var prev_state,
                   Tape::Var input) {
    auto z = tape.sigmoid(tape.add(
        tape.add(tape.matvec(p.update_w, input), tape.matvec(p.update_u, prev_state)),
        p.update_b));
    auto r = tape.sigmoid(tape.add(
        tape.add(tape.matvec(p.reset_w, input), tape.matvec(p.reset_u, prev_state)),
        p.reset_b));
    auto n = tape.tanh(tape.add(
        tape.add(tape.matvec(p.cand_w, input),
                 tape.matvec(p.cand_u, tape.mul(r, prev_state))),
        p.cand_b));
    return tape.add(prev_state, tape.mul(z, tape.sub(n, prev_state)));
}

}  // namespace rlst
