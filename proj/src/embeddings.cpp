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
#include "rlst/embeddings.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "rlst/error.hpp"
#include "rlst/ops.hpp"

namespace rlst {

const std::vector<double>* EmbeddingFile::find(const std::string& form) const {
    for (const auto& [tok, vec] : entries) {
        if (tok == form) return &vec;
    }
    return nullptr;
}

EmbeddingFile load_embedding_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embedding file: " + path);

    EmbeddingFile emb;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string form;
        ss >> form;
        std::vector<double> vec;
        double v;
        while (ss >> v) vec.push_back(v);
        if (form.empty() || vec.empty()) {
            throw IoError(path + ": malformed embedding at line " +
                          std::to_string(line_no));
        }
        if (emb.dim == 0) emb.dim = vec.size();
        if (vec.size() != emb.dim) {
            throw IoError(path + ": dimension mismatch at line " +
                          std::to_string(line_no));
        }
        if (!seen.insert(form).second) {
            throw IoError(path + ": duplicate token at line " +
                          std::to_string(line_no));
        }
        emb.entries.emplace_back(std::move(form), std::move(vec));
    }
    if (emb.entries.empty()) throw IoError(path + ": empty embedding file");
    return emb;
}

void write_embedding_file(const std::string& path, const EmbeddingFile& emb) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.precision(17);
    for (const auto& [form, vec] : emb.entries) {
        out << form;
        for (double v : vec) out << ' ' << v;
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

Tensor build_embedding_matrix(const Vocabulary& vocab,
                              const EmbeddingFile& file, Rng& rng) {
    if (file.dim == 0) throw ConfigError("embedding file has no dimension");
    Tensor table({vocab.size(), file.dim});
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        if (i == kPadIndex) continue;  // PAD row stays zero
        const std::vector<double>* vec = file.find(vocab.form(i));
        if (vec) {
            std::copy(vec->begin(), vec->end(), table.row(i));
        } else {
            for (std::size_t d = 0; d < file.dim; ++d) {
                table.row(i)[d] = rng.uniform(-0.08, 0.08);
            }
        }
    }
    return table;
}

namespace {

double norm(const std::vector<double>& v) {
    return std::sqrt(kernel::dot(v.data(), v.data(), v.size()));
}

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void scale_to_unit(std::vector<double>& v) {
    const double n = norm(v);
    if (n == 0.0) throw NumericalError("synthetic embeddings: zero vector");
    for (double& x : v) x /= n;
}

std::vector<double> random_unit(Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    scale_to_unit(v);
    return v;
}

/// Random unit vector orthogonal to every vector in basis (all unit).
std::vector<double> random_unit_orthogonal(
    Rng& rng, std::size_t dim,
    const std::vector<const std::vector<double>*>& basis) {
    for (int attempt = 0; attempt < 16; ++attempt) {
        std::vector<double> v = random_unit(rng, dim);
        for (const auto* b : basis) {
            axpy(v, -kernel::dot(v.data(), b->data(), dim), *b);
        }
        if (norm(v) > 1e-6) {
            scale_to_unit(v);
            return v;
        }
    }
    throw NumericalError("synthetic embeddings: could not orthogonalize");
}

}  // namespace

EmbeddingFile make_synthetic_embeddings(const SyntheticSpec& spec,
                                        std::size_t dim, Rng& rng,
                                        double shared_weight,
                                        double pair_cosine) {
    if (dim < 3) throw UsageError("synthetic embeddings: dim must be >= 3");
    if (shared_weight <= 0.0 || shared_weight >= 1.0) {
        throw UsageError("synthetic embeddings: shared_weight in (0,1)");
    }
    if (spec.markers_a.size() != spec.markers_b.size()) {
        throw UsageError("synthetic embeddings: marker sets must pair up");
    }

    const double sg = shared_weight;
    const double st = std::sqrt(1.0 - sg * sg);
    // cos(v_a, v_b) = sg^2 + st^2 * rho  =>  rho for the specific parts
    const double rho = (pair_cosine - sg * sg) / (st * st);
    if (rho <= 0.0 || rho >= 1.0) {
        throw UsageError("synthetic embeddings: pair_cosine out of range");
    }

    std::vector<double> g(dim, 1.0);
    scale_to_unit(g);

    auto compose = [&](const std::vector<double>& u) {
        std::vector<double> v(dim, 0.0);
        axpy(v, sg, g);
        axpy(v, st, u);
        return v;
    };

    EmbeddingFile emb;
    emb.dim = dim;

    auto add_plain = [&](const std::string& form) {
        emb.entries.emplace_back(
            form, compose(random_unit_orthogonal(rng, dim, {&g})));
    };

    add_plain("<unk>");
    add_plain("<bos>");
    add_plain("<eos>");
    for (std::size_t k = 0; k < spec.content_vocab; ++k) {
        add_plain(synthetic_content_form(k));
    }
    for (std::size_t m = 0; m < spec.markers_a.size(); ++m) {
        std::vector<double> ua = random_unit_orthogonal(rng, dim, {&g});
        std::vector<double> w = random_unit_orthogonal(rng, dim, {&g, &ua});
        std::vector<double> ub(dim, 0.0);
        axpy(ub, rho, ua);
        axpy(ub, std::sqrt(1.0 - rho * rho), w);
        emb.entries.emplace_back(spec.markers_a[m], compose(ua));
        emb.entries.emplace_back(spec.markers_b[m], compose(ub));
    }
    return emb;
}

}  // namespace rlst
