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
#include "rlst/tape.hpp"

#include <algorithm>
#include <cmath>

#include "rlst/error.hpp"
#include "rlst/ops.hpp"

namespace rlst {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw ConfigError(msg);
}

}  // namespace

Tape::Var Tape::input(Tensor value) {
    Node n;
    n.val = std::move(value);
    n.op = Op::input;
    return push(std::move(n));
}

Tape::Var Tape::input_vector(std::vector<double> values) {
    const std::size_t n = values.size();
    return input(Tensor({n}, std::move(values)));
}

Tape::Var Tape::scalar(double value) {
    return input(Tensor({1}, {value}));
}

Tape::Var Tape::param(Tensor& t) {
    Node n;
    n.val = t;  // snapshot; gradients flush into t.grad() on backward
    n.op = Op::param;
    n.bound = &t;
    return push(std::move(n));
}

Tape::Var Tape::row(Var table, std::size_t r) {
    const Tensor& t = nodes_[table].val;
    require(t.rank() == 2, "Tape::row: table must be rank 2");
    if (r >= t.rows()) throw UsageError("Tape::row: row index out of range");
    Node n;
    n.val = Tensor({t.cols()},
                   std::vector<double>(t.row(r), t.row(r) + t.cols()));
    n.op = Op::row;
    n.a = table;
    n.index = r;
    return push(std::move(n));
}

Tape::Var Tape::matvec(Var w, Var x) {
    const Tensor& W = nodes_[w].val;
    const Tensor& X = nodes_[x].val;
    require(W.rank() == 2 && X.rank() == 1 && W.cols() == X.size(),
            "Tape::matvec: dimension mismatch");
    Node n;
    n.val = Tensor({W.rows()});
    kernel::matvec(W.data(), X.data(), n.val.data(), W.rows(), W.cols());
    n.op = Op::matvec;
    n.a = w;
    n.b = x;
    return push(std::move(n));
}

Tape::Var Tape::add(Var a, Var b) {
    const Tensor& A = nodes_[a].val;
    const Tensor& B = nodes_[b].val;
    require(A.size() == B.size(), "Tape::add: size mismatch");
    Node n;
    n.val = A;
    for (std::size_t i = 0; i < B.size(); ++i) n.val[i] += B[i];
    n.op = Op::add;
    n.a = a;
    n.b = b;
    return push(std::move(n));
}

Tape::Var Tape::sub(Var a, Var b) {
    const Tensor& A = nodes_[a].val;
    const Tensor& B = nodes_[b].val;
    require(A.size() == B.size(), "Tape::sub: size mismatch");
    Node n;
    n.val = A;
    for (std::size_t i = 0; i < B.size(); ++i) n.val[i] -= B[i];
    n.op = Op::sub;
    n.a = a;
    n.b = b;
    return push(std::move(n));
}

Tape::Var Tape::mul(Var a, Var b) {
    const Tensor& A = nodes_[a].val;
    const Tensor& B = nodes_[b].val;
    require(A.size() == B.size(), "Tape::mul: size mismatch");
    Node n;
    n.val = A;
    for (std::size_t i = 0; i < B.size(); ++i) n.val[i] *= B[i];
    n.op = Op::mul;
    n.a = a;
    n.b = b;
    return push(std::move(n));
}

Tape::Var Tape::scale(Var a, double s) {
    Node n;
    n.val = nodes_[a].val;
    for (std::size_t i = 0; i < n.val.size(); ++i) n.val[i] *= s;
    n.op = Op::scale;
    n.a = a;
    n.coeff = s;
    return push(std::move(n));
}

Tape::Var Tape::sigmoid(Var x) {
    Node n;
    n.val = Tensor({nodes_[x].val.size()});
    kernel::sigmoid(nodes_[x].val.data(), n.val.data(), n.val.size());
    n.op = Op::sigmoid_;
    n.a = x;
    return push(std::move(n));
}

Tape::Var Tape::tanh(Var x) {
    Node n;
    n.val = Tensor({nodes_[x].val.size()});
    kernel::tanh(nodes_[x].val.data(), n.val.data(), n.val.size());
    n.op = Op::tanh_;
    n.a = x;
    return push(std::move(n));
}

Tape::Var Tape::concat(Var a, Var b) {
    const Tensor& A = nodes_[a].val;
    const Tensor& B = nodes_[b].val;
    Node n;
    std::vector<double> v;
    v.reserve(A.size() + B.size());
    v.insert(v.end(), A.values().begin(), A.values().end());
    v.insert(v.end(), B.values().begin(), B.values().end());
    n.val = Tensor({A.size() + B.size()}, std::move(v));
    n.op = Op::concat;
    n.a = a;
    n.b = b;
    return push(std::move(n));
}

Tape::Var Tape::dot(Var a, Var b) {
    const Tensor& A = nodes_[a].val;
    const Tensor& B = nodes_[b].val;
    require(A.size() == B.size(), "Tape::dot: size mismatch");
    Node n;
    n.val = Tensor({1}, {kernel::dot(A.data(), B.data(), A.size())});
    n.op = Op::dot;
    n.a = a;
    n.b = b;
    return push(std::move(n));
}

Tape::Var Tape::softmax(Var logits) {
    const Tensor& L = nodes_[logits].val;
    if (L.size() == 0) throw UsageError("Tape::softmax: empty input");
    Node n;
    n.val = Tensor({L.size()});
    kernel::softmax(L.data(), n.val.data(), L.size());
    n.op = Op::softmax_;
    n.a = logits;
    return push(std::move(n));
}

Tape::Var Tape::log_pick(Var probs, std::size_t index) {
    const Tensor& P = nodes_[probs].val;
    if (index >= P.size()) throw UsageError("Tape::log_pick: index out of range");
    Node n;
    n.val = Tensor({1}, {std::log(std::max(P[index], kProbFloor))});
    n.op = Op::log_pick;
    n.a = probs;
    n.index = index;
    return push(std::move(n));
}

Tape::Var Tape::weighted_sum(const std::vector<Var>& vecs, Var weights) {
    require(!vecs.empty(), "Tape::weighted_sum: no vectors");
    const Tensor& W = nodes_[weights].val;
    require(W.size() == vecs.size(), "Tape::weighted_sum: weight count mismatch");
    const std::size_t dim = nodes_[vecs[0]].val.size();
    std::vector<const double*> rows(vecs.size());
    for (std::size_t s = 0; s < vecs.size(); ++s) {
        const Tensor& V = nodes_[vecs[s]].val;
        require(V.size() == dim, "Tape::weighted_sum: vector size mismatch");
        rows[s] = V.data();
    }
    Node n;
    n.val = Tensor({dim});
    kernel::weighted_sum(rows, W.data(), n.val.data(), dim);
    n.op = Op::weighted_sum;
    n.b = weights;
    n.extra = vecs;
    return push(std::move(n));
}

Tape::Var Tape::clamp(Var x, double lo, double hi) {
    require(lo < hi, "Tape::clamp: empty interval");
    Node n;
    n.val = nodes_[x].val;
    for (std::size_t i = 0; i < n.val.size(); ++i) {
        n.val[i] = std::clamp(n.val[i], lo, hi);
    }
    n.op = Op::clamp_;
    n.a = x;
    n.coeff = lo;
    n.coeff2 = hi;
    return push(std::move(n));
}

std::vector<double>& Tape::adj(Var v) {
    Node& n = nodes_[v];
    if (n.adj.empty()) n.adj.assign(n.val.size(), 0.0);
    return n.adj;
}

void Tape::backward(Var seed, double seed_value) {
    require(nodes_[seed].val.size() == 1, "Tape::backward: seed must be scalar");
    adj(seed)[0] += seed_value;
    for (Var v = seed; v >= 0; --v) {
        if (!nodes_[v].adj.empty()) backprop(v);
    }
}

void Tape::backprop(Var v) {
    Node& n = nodes_[v];
    const std::vector<double>& g = n.adj;
    switch (n.op) {
        case Op::input:
            break;
        case Op::param: {
            std::vector<double>& acc = n.bound->grad();
            for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
            break;
        }
        case Op::row: {
            std::vector<double>& pa = adj(n.a);
            const std::size_t cols = n.val.size();
            for (std::size_t i = 0; i < cols; ++i) pa[n.index * cols + i] += g[i];
            break;
        }
        case Op::matvec: {
            const Tensor& W = nodes_[n.a].val;
            const Tensor& X = nodes_[n.b].val;
            std::vector<double>& wa = adj(n.a);
            std::vector<double>& xa = adj(n.b);
            const std::size_t rows = W.rows(), cols = W.cols();
            for (std::size_t r = 0; r < rows; ++r) {
                const double gr = g[r];
                const double* wr = W.data() + r * cols;
                double* war = wa.data() + r * cols;
                for (std::size_t c = 0; c < cols; ++c) {
                    war[c] += gr * X[c];
                    xa[c] += gr * wr[c];
                }
            }
            break;
        }
        case Op::add: {
            std::vector<double>& aa = adj(n.a);
            std::vector<double>& ba = adj(n.b);
            for (std::size_t i = 0; i < g.size(); ++i) {
                aa[i] += g[i];
                ba[i] += g[i];
            }
            break;
        }
        case Op::sub: {
            std::vector<double>& aa = adj(n.a);
            std::vector<double>& ba = adj(n.b);
            for (std::size_t i = 0; i < g.size(); ++i) {
                aa[i] += g[i];
                ba[i] -= g[i];
            }
            break;
        }
        case Op::mul: {
            const Tensor& A = nodes_[n.a].val;
            const Tensor& B = nodes_[n.b].val;
            std::vector<double>& aa = adj(n.a);
            std::vector<double>& ba = adj(n.b);
            for (std::size_t i = 0; i < g.size(); ++i) {
                aa[i] += g[i] * B[i];
                ba[i] += g[i] * A[i];
            }
            break;
        }
        case Op::scale: {
            std::vector<double>& aa = adj(n.a);
            for (std::size_t i = 0; i < g.size(); ++i) aa[i] += g[i] * n.coeff;
            break;
        }
        case Op::sigmoid_: {
            std::vector<double>& aa = adj(n.a);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double y = n.val[i];
                aa[i] += g[i] * y * (1.0 - y);
            }
            break;
        }
        case Op::tanh_: {
            std::vector<double>& aa = adj(n.a);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double y = n.val[i];
                aa[i] += g[i] * (1.0 - y * y);
            }
            break;
        }
        case Op::clamp_: {
            const Tensor& X = nodes_[n.a].val;
            std::vector<double>& aa = adj(n.a);
            for (std::size_t i = 0; i < g.size(); ++i) {
                // subgradient: zero at and beyond the bounds
                if (X[i] > n.coeff && X[i] < n.coeff2) aa[i] += g[i];
            }
            break;
        }
        case Op::concat: {
            std::vector<double>& aa = adj(n.a);
            std::vector<double>& ba = adj(n.b);
            const std::size_t na = aa.size();
            for (std::size_t i = 0; i < na; ++i) aa[i] += g[i];
            for (std::size_t i = 0; i < ba.size(); ++i) ba[i] += g[na + i];
            break;
        }
        case Op::dot: {
            const Tensor& A = nodes_[n.a].val;
            const Tensor& B = nodes_[n.b].val;
            std::vector<double>& aa = adj(n.a);
            std::vector<double>& ba = adj(n.b);
            const double gs = g[0];
            for (std::size_t i = 0; i < A.size(); ++i) {
                aa[i] += gs * B[i];
                ba[i] += gs * A[i];
            }
            break;
        }
        case Op::softmax_: {
            std::vector<double>& aa = adj(n.a);
            double gdotp = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) gdotp += g[i] * n.val[i];
            for (std::size_t i = 0; i < g.size(); ++i) {
                aa[i] += n.val[i] * (g[i] - gdotp);
            }
            break;
        }
        case Op::log_pick: {
            const Tensor& P = nodes_[n.a].val;
            if (P[n.index] >= kProbFloor) {
                adj(n.a)[n.index] += g[0] / P[n.index];
            }
            break;
        }
        case Op::weighted_sum: {
            const Tensor& W = nodes_[n.b].val;
            std::vector<double>& wa = adj(n.b);
            for (std::size_t s = 0; s < n.extra.size(); ++s) {
                const Tensor& V = nodes_[n.extra[s]].val;
                std::vector<double>& va = adj(n.extra[s]);
                double acc = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    acc += g[i] * V[i];
                    va[i] += W[s] * g[i];
                }
                wa[s] += acc;
            }
            break;
        }
    }
}

}  // namespace rlst
