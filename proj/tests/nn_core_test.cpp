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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "rlst/checkpoint.hpp"
#include "rlst/error.hpp"
#include "rlst/grad_check.hpp"
#include "rlst/gru.hpp"
#include "rlst/ops.hpp"
#include "rlst/optimizer.hpp"
#include "rlst/param_set.hpp"
#include "rlst/rng.hpp"
#include "rlst/tape.hpp"
#include "rlst/tensor.hpp"

using namespace rlst;

namespace {

std::filesystem::path temp_file(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / "rlst_nn_core_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("tensor shape and value contracts") {
    SUBCASE("values length must match shape") {
        CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0, 3.0}), ConfigError);
    }
    SUBCASE("zero dimension rejected") {
        CHECK_THROWS_AS(Tensor({3, 0}), ConfigError);
    }
    SUBCASE("row-major addressing") {
        Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
        CHECK(t.at(1, 0) == 4.0);
        CHECK(t.row(1)[2] == 6.0);
        CHECK(t.rows() == 2);
        CHECK(t.cols() == 3);
    }
    SUBCASE("uniform init stays in bounds") {
        Rng rng(1);
        Tensor t = Tensor::uniform({10, 10}, rng);
        for (double v : t.values()) {
            CHECK(v >= -0.08);
            CHECK(v < 0.08);
        }
    }
    SUBCASE("grad lazily allocated with identical length") {
        Tensor t({4});
        CHECK(!t.has_grad());
        CHECK(t.grad().size() == 4);
        CHECK(t.has_grad());
    }
}

TEST_CASE("parameter set naming and iteration order") {
    ParameterSet set;
    set.add("b", Tensor::vector(2));
    set.add("a", Tensor::vector(3));
    set.add("c", Tensor::matrix(2, 2));

    SUBCASE("duplicate names rejected") {
        CHECK_THROWS_AS(set.add("a", Tensor::vector(1)), ConfigError);
    }
    SUBCASE("unknown name rejected") {
        CHECK_THROWS_AS(set.get("missing"), ConfigError);
    }
    SUBCASE("iteration follows insertion order") {
        std::vector<std::string> names;
        for (const auto& e : set) names.push_back(e.name);
        CHECK(names == std::vector<std::string>{"b", "a", "c"});
    }
    SUBCASE("entry addresses are stable under growth") {
        Tensor* first = &set.get("b");
        for (int i = 0; i < 200; ++i) {
            set.add("extra" + std::to_string(i), Tensor::vector(1));
        }
        CHECK(first == &set.get("b"));
    }
    SUBCASE("value_count sums entry sizes") {
        CHECK(set.value_count() == 2 + 3 + 4);
    }
}

TEST_CASE("rng determinism and stream forking") {
    SUBCASE("identical seeds give identical streams") {
        Rng a(5), b(5);
        for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    }
    SUBCASE("uniform stays in [0, 1)") {
        Rng r(17);
        for (int i = 0; i < 1000; ++i) {
            double u = r.uniform();
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
        }
    }
    SUBCASE("below stays in range") {
        Rng r(17);
        for (int i = 0; i < 1000; ++i) CHECK(r.below(10) < 10);
        CHECK_THROWS_AS(r.below(0), UsageError);
    }
    SUBCASE("forks are deterministic and tag-separated") {
        Rng a(99), b(99);
        CHECK(a.fork(3).next() == b.fork(3).next());
        CHECK(a.fork(3).next() != a.fork(4).next());
        // forking does not disturb the parent stream
        Rng c(99);
        (void)c.fork(7);
        CHECK(c.next() == b.next());
    }
    SUBCASE("multinomial matches its distribution") {
        Rng r(23);
        std::vector<double> probs = {0.25, 0.25, 0.5};
        std::vector<int> counts(3, 0);
        const int n = 40000;
        for (int i = 0; i < n; ++i) ++counts[r.multinomial(probs)];
        for (int k = 0; k < 3; ++k) {
            CHECK(std::fabs(double(counts[k]) / n - probs[k]) < 0.01);
        }
        CHECK_THROWS_AS(r.multinomial(std::span<const double>{}), UsageError);
    }
}

TEST_CASE("softmax value contracts") {
    SUBCASE("uniform logits give uniform probabilities") {
        auto p = softmax(std::vector<double>{0.0, 0.0, 0.0});
        CHECK(p[0] == 1.0 / 3.0);
        CHECK(p[1] == 1.0 / 3.0);
        CHECK(p[2] == 1.0 / 3.0);
    }
    SUBCASE("extreme logits stay finite") {
        auto p = softmax(std::vector<double>{1000.0, 0.0});
        CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::isfinite(p[0]));
        CHECK(std::isfinite(p[1]));
    }
    SUBCASE("log-integer logits give rational probabilities") {
        auto p = softmax(std::vector<double>{std::log(1.0), std::log(2.0),
                                             std::log(3.0)});
        CHECK(std::fabs(p[0] - 1.0 / 6.0) < 1e-12);
        CHECK(std::fabs(p[1] - 2.0 / 6.0) < 1e-12);
        CHECK(std::fabs(p[2] - 3.0 / 6.0) < 1e-12);
    }
    SUBCASE("entries positive and summing to one for logits up to 1e3") {
        Rng rng(31);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> logits(7);
            for (auto& v : logits) v = rng.uniform(-1e3, 1e3);
            auto p = softmax(logits);
            double sum = 0.0;
            for (double v : p) {
                CHECK(v > 0.0);
                sum += v;
            }
            CHECK(std::fabs(sum - 1.0) <= 1e-12);
        }
    }
    SUBCASE("empty input rejected") {
        CHECK_THROWS_AS(softmax(std::span<const double>{}), UsageError);
    }
    SUBCASE("permutation equivariance is exact") {
        Rng rng(47);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> logits(9);
            for (auto& v : logits) v = rng.uniform(-5.0, 5.0);
            auto base = softmax(logits);

            std::vector<std::size_t> perm(logits.size());
            for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
            rng.shuffle(perm);

            std::vector<double> permuted(logits.size());
            for (std::size_t i = 0; i < perm.size(); ++i) {
                permuted[i] = logits[perm[i]];
            }
            auto p = softmax(permuted);
            for (std::size_t i = 0; i < perm.size(); ++i) {
                CHECK(p[i] == base[perm[i]]);  // bitwise
            }
        }
    }
}

TEST_CASE("cross entropy value contracts") {
    SUBCASE("certain prediction costs nothing") {
        CHECK(cross_entropy(std::vector<double>{1.0, 0.0, 0.0}, 0) == 0.0);
    }
    SUBCASE("uniform over eight costs ln 8") {
        std::vector<double> p(8, 0.125);
        CHECK(cross_entropy(p, 3) == doctest::Approx(std::log(8.0)).epsilon(1e-12));
    }
    SUBCASE("even coin costs ln 2") {
        CHECK(cross_entropy(std::vector<double>{0.5, 0.5}, 1) ==
              doctest::Approx(std::log(2.0)).epsilon(1e-12));
    }
    SUBCASE("probability floor keeps the loss finite") {
        double v = cross_entropy(std::vector<double>{0.0, 1.0}, 0);
        CHECK(std::isfinite(v));
        CHECK(v == -std::log(kProbFloor));
    }
    SUBCASE("out-of-range target rejected") {
        CHECK_THROWS_AS(cross_entropy(std::vector<double>{0.5, 0.5}, 2),
                        UsageError);
    }
}

TEST_CASE("gru step value contracts") {
    SUBCASE("zero params and zero state give zero output") {
        ParameterSet set;
        Rng rng(1);
        GruParams p = GruParams::create(set, "g", 3, 2, rng);
        for (auto& e : set) std::fill(e.tensor.values().begin(),
                                      e.tensor.values().end(), 0.0);
        auto out = gru_step(p, {0.0, 0.0, 0.0}, {0.3, -0.7});
        for (double v : out) CHECK(v == 0.0);
    }
    SUBCASE("output dimension equals hidden dimension") {
        ParameterSet set;
        Rng rng(2);
        GruParams p = GruParams::create(set, "g", 4, 3, rng);
        auto out = gru_step(p, {0.1, 0.2, 0.3, 0.4}, {1.0, -1.0, 0.5});
        CHECK(out.size() == 4);
        for (double v : out) {
            CHECK(v > -1.0);
            CHECK(v < 1.0);
        }
    }
    SUBCASE("dimension mismatch rejected") {
        ParameterSet set;
        Rng rng(2);
        GruParams p = GruParams::create(set, "g", 4, 3, rng);
        CHECK_THROWS_AS(gru_step(p, {0.1, 0.2}, {1.0, -1.0, 0.5}), ConfigError);
        CHECK_THROWS_AS(gru_step(p, {0.1, 0.2, 0.3, 0.4}, {1.0}), ConfigError);
    }
    SUBCASE("tape path reproduces the plain path bit-for-bit") {
        ParameterSet set;
        Rng rng(42);
        GruParams p = GruParams::create(set, "g", 5, 4, rng);
        std::vector<double> prev = {0.1, -0.2, 0.3, 0.05, -0.4};
        std::vector<double> in = {0.5, -0.4, 0.2, 0.9};
        auto plain = gru_step(p, prev, in);

        Tape tape;
        GruTapeVars vars = GruTapeVars::bind(tape, p);
        auto h = gru_step(tape, vars, tape.input_vector(prev),
                          tape.input_vector(in));
        const Tensor& taped = tape.value(h);
        REQUIRE(taped.size() == plain.size());
        for (std::size_t i = 0; i < plain.size(); ++i) {
            CHECK(taped[i] == plain[i]);
        }
    }
}

TEST_CASE("gru blend weight under negative update bias") {
    // With zero update-gate weights the blend weight on the previous state is
    // 1 - sigmoid(bias). The candidate is pinned to -1 so the weight can be
    // recovered from the output: out = (1-z)*1 + z*(-1).
    for (double bias : {-6.0, -8.0}) {
        ParameterSet set;
        Rng rng(3);
        GruParams p = GruParams::create(set, "g", 1, 1, rng);
        std::fill(p.update_w->values().begin(), p.update_w->values().end(), 0.0);
        std::fill(p.update_u->values().begin(), p.update_u->values().end(), 0.0);
        (*p.update_b)[0] = bias;
        std::fill(p.cand_w->values().begin(), p.cand_w->values().end(), 0.0);
        std::fill(p.cand_u->values().begin(), p.cand_u->values().end(), 0.0);
        (*p.cand_b)[0] = -20.0;  // tanh(-20) rounds to -1

        auto out = gru_step(p, {1.0}, {0.7});
        const double blend_on_prev = (1.0 + out[0]) / 2.0;
        CHECK(blend_on_prev >= 0.99);
    }
}

TEST_CASE("gradient check oracle") {
    SUBCASE("quadratic loss is exact to finite differences") {
        ParameterSet set;
        set.add("w", Tensor({2, 2}, {1.0, -2.0, 3.0, 0.5}));
        LossFn loss = [](ParameterSet& ps, bool with_grad) {
            Tape tape;
            auto w = tape.param(ps.get("w"));
            auto l = tape.dot(w, w);
            if (with_grad) tape.backward(l);
            return tape.scalar_value(l);
        };
        CHECK(grad_check(loss, set, 1e-5, 0) <= 1e-7);
    }
    SUBCASE("constant loss reports zero error") {
        ParameterSet set;
        set.add("w", Tensor({3}, {1.0, 2.0, 3.0}));
        LossFn loss = [](ParameterSet&, bool) { return 3.14; };
        CHECK(grad_check(loss, set, 1e-5, 0) == 0.0);
    }
    SUBCASE("non-finite loss names the coordinate") {
        ParameterSet set;
        set.add("w", Tensor({1}, {1.0}));
        LossFn loss = [](ParameterSet& ps, bool) {
            double v = ps.get("w")[0];
            return v > 1.0 ? std::numeric_limits<double>::quiet_NaN() : v;
        };
        CHECK_THROWS_AS(grad_check(loss, set, 1e-5, 0), NumericalError);
    }
    SUBCASE("sampling is a subset of the full check") {
        ParameterSet set;
        Rng rng(11);
        set.add("w", Tensor::uniform({6, 6}, rng, -1.0, 1.0));
        LossFn loss = [](ParameterSet& ps, bool with_grad) {
            Tape tape;
            auto w = tape.param(ps.get("w"));
            auto s = tape.sigmoid(w);
            auto l = tape.dot(s, s);
            if (with_grad) tape.backward(l);
            return tape.scalar_value(l);
        };
        CHECK(grad_check(loss, set, 1e-5, 10, 5) <= 1e-6);
    }
    SUBCASE("softmax and log pick chain") {
        ParameterSet set;
        Rng rng(7);
        set.add("logits", Tensor::uniform({5}, rng, -1.0, 1.0));
        LossFn loss = [](ParameterSet& ps, bool with_grad) {
            Tape tape;
            auto lv = tape.param(ps.get("logits"));
            auto p = tape.softmax(lv);
            auto lp = tape.log_pick(p, 2);
            if (with_grad) tape.backward(lp);
            return tape.scalar_value(lp);
        };
        CHECK(grad_check(loss, set, 1e-5, 0) <= 1e-6);
    }
    SUBCASE("attention-style composite") {
        // scores from dots, softmax weights, context blend: every tape op in
        // the decode path appears at least once.
        ParameterSet set;
        Rng rng(13);
        set.add("a0", Tensor::uniform({3}, rng, -1.0, 1.0));
        set.add("a1", Tensor::uniform({3}, rng, -1.0, 1.0));
        set.add("q", Tensor::uniform({3}, rng, -1.0, 1.0));
        LossFn loss = [](ParameterSet& ps, bool with_grad) {
            Tape tape;
            auto a0 = tape.param(ps.get("a0"));
            auto a1 = tape.param(ps.get("a1"));
            auto q = tape.param(ps.get("q"));
            auto scores = tape.concat(tape.dot(q, a0), tape.dot(q, a1));
            auto w = tape.softmax(scores);
            auto ctx = tape.weighted_sum({a0, a1}, w);
            auto mixed = tape.tanh(tape.sub(tape.scale(ctx, 1.5), q));
            auto l = tape.dot(mixed, mixed);
            if (with_grad) tape.backward(l);
            return tape.scalar_value(l);
        };
        CHECK(grad_check(loss, set, 1e-5, 0) <= 1e-6);
    }
    SUBCASE("gru composite from seed 42 matches finite differences") {
        ParameterSet set;
        Rng rng(42);
        GruParams::create(set, "gru", 4, 3, rng);
        const std::vector<double> prev = {0.1, -0.2, 0.3, 0.05};
        const std::vector<double> in = {0.5, -0.4, 0.2};
        LossFn loss = [&](ParameterSet& ps, bool with_grad) {
            GruParams p = GruParams::bind(ps, "gru");
            Tape tape;
            GruTapeVars vars = GruTapeVars::bind(tape, p);
            auto h = gru_step(tape, vars, tape.input_vector(prev),
                              tape.input_vector(in));
            auto l = tape.dot(h, h);
            if (with_grad) tape.backward(l);
            return tape.scalar_value(l);
        };
        CHECK(grad_check(loss, set, 1e-5, 0, 1) <= 1e-4);
    }
    SUBCASE("embedding row lookups receive gradients") {
        ParameterSet set;
        Rng rng(19);
        set.add("table", Tensor::uniform({4, 3}, rng, -1.0, 1.0));
        LossFn loss = [](ParameterSet& ps, bool with_grad) {
            Tape tape;
            auto table = tape.param(ps.get("table"));
            auto r1 = tape.row(table, 1);
            auto r3 = tape.row(table, 3);
            auto l = tape.dot(tape.add(r1, r3), r1);
            if (with_grad) tape.backward(l);
            return tape.scalar_value(l);
        };
        CHECK(grad_check(loss, set, 1e-5, 0) <= 1e-6);
    }
}

TEST_CASE("sgd step value contracts") {
    SUBCASE("plain step without clipping") {
        ParameterSet set;
        Tensor& w = set.add("w", Tensor({1}, {1.0}));
        w.grad()[0] = 0.5;
        double norm = sgd_step(set, {.learning_rate = 0.1, .clip_norm = 0.0});
        CHECK(w[0] == 0.95);
        CHECK(norm == 0.5);
        CHECK(w.grad()[0] == 0.0);
    }
    SUBCASE("global norm clipping rescales the step") {
        ParameterSet set;
        Tensor& w = set.add("w", Tensor({2}, {1.0, 1.0}));
        w.grad()[0] = 6.0;
        w.grad()[1] = 8.0;
        double norm = sgd_step(set, {.learning_rate = 0.1, .clip_norm = 1.0});
        CHECK(norm == 10.0);  // pre-clip norm reported
        CHECK(w[0] == doctest::Approx(1.0 - 0.1 * 0.6).epsilon(1e-15));
        CHECK(w[1] == doctest::Approx(1.0 - 0.1 * 0.8).epsilon(1e-15));
    }
    SUBCASE("zero gradients leave parameters unchanged") {
        ParameterSet set;
        Tensor& w = set.add("w", Tensor({2}, {1.25, -0.5}));
        w.grad();
        double norm = sgd_step(set, {.learning_rate = 0.1, .clip_norm = 5.0});
        CHECK(norm == 0.0);
        CHECK(w[0] == 1.25);
        CHECK(w[1] == -0.5);
    }
    SUBCASE("non-trainable entries untouched") {
        ParameterSet set;
        Tensor& frozen = set.add("frozen", Tensor({1}, {2.0}), false);
        frozen.grad()[0] = 1.0;
        Tensor& live = set.add("live", Tensor({1}, {2.0}));
        live.grad()[0] = 1.0;
        sgd_step(set, {.learning_rate = 0.5, .clip_norm = 0.0});
        CHECK(frozen[0] == 2.0);
        CHECK(live[0] == 1.5);
    }
    SUBCASE("non-finite gradient aborts and names the entry") {
        ParameterSet set;
        Tensor& w = set.add("bad_entry", Tensor({1}, {1.0}));
        w.grad()[0] = std::numeric_limits<double>::infinity();
        try {
            sgd_step(set, {.learning_rate = 0.1, .clip_norm = 5.0});
            FAIL("expected NumericalError");
        } catch (const NumericalError& e) {
            CHECK(std::string(e.what()).find("bad_entry") != std::string::npos);
        }
        CHECK(w[0] == 1.0);  // aborted before any update
    }
}

TEST_CASE("optimizer determinism over 100 steps") {
    auto run = []() {
        ParameterSet set;
        Rng init(9);
        set.add("w", Tensor::uniform({4, 4}, init));
        set.add("b", Tensor::uniform({4}, init));
        Rng grads(123);
        for (int step = 0; step < 100; ++step) {
            for (auto& e : set) {
                for (auto& g : e.tensor.grad()) g = grads.uniform(-2.0, 2.0);
            }
            sgd_step(set, {.learning_rate = 0.05, .clip_norm = 5.0});
        }
        std::vector<double> out;
        for (const auto& e : set) {
            out.insert(out.end(), e.tensor.values().begin(),
                       e.tensor.values().end());
        }
        return out;
    };
    auto a = run();
    auto b = run();
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

TEST_CASE("checkpoint container") {
    ParameterSet params;
    Rng rng(77);
    params.add("enc.w", Tensor::uniform({3, 4}, rng, -1.0, 1.0));
    params.add("enc.b", Tensor::uniform({3}, rng, -1.0, 1.0));
    params.add("emb", Tensor::uniform({5, 2}, rng, -1.0, 1.0));

    SUBCASE("round trip preserves names, shapes, and bits") {
        auto path = temp_file("roundtrip.ckpt");
        save_checkpoint(path.string(), params);
        ParameterSet loaded = read_checkpoint(path.string());
        REQUIRE(loaded.size() == params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            const auto& a = params.entry(i);
            const auto& b = loaded.entry(i);
            CHECK(a.name == b.name);
            CHECK(a.tensor.shape() == b.tensor.shape());
            REQUIRE(a.tensor.size() == b.tensor.size());
            CHECK(std::memcmp(a.tensor.data(), b.tensor.data(),
                              a.tensor.size() * sizeof(double)) == 0);
        }
    }
    SUBCASE("identical sets produce byte-identical files") {
        auto p1 = temp_file("bytes1.ckpt");
        auto p2 = temp_file("bytes2.ckpt");
        save_checkpoint(p1.string(), params);
        save_checkpoint(p2.string(), params);
        std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
        std::vector<char> b1((std::istreambuf_iterator<char>(f1)), {});
        std::vector<char> b2((std::istreambuf_iterator<char>(f2)), {});
        CHECK(b1 == b2);
        CHECK(!b1.empty());
    }
    SUBCASE("load fills an architecture-matched set") {
        auto path = temp_file("load.ckpt");
        save_checkpoint(path.string(), params);
        ParameterSet arch;
        arch.add("enc.w", Tensor::matrix(3, 4));
        arch.add("enc.b", Tensor::vector(3));
        arch.add("emb", Tensor::matrix(5, 2));
        load_checkpoint(path.string(), arch);
        CHECK(arch.get("enc.b").values() == params.get("enc.b").values());
    }
    SUBCASE("shape mismatch rejected") {
        auto path = temp_file("mismatch.ckpt");
        save_checkpoint(path.string(), params);
        ParameterSet arch;
        arch.add("enc.w", Tensor::matrix(4, 3));
        arch.add("enc.b", Tensor::vector(3));
        arch.add("emb", Tensor::matrix(5, 2));
        CHECK_THROWS_AS(load_checkpoint(path.string(), arch), ConfigError);
    }
    SUBCASE("flipped value byte fails the checksum") {
        auto path = temp_file("corrupt.ckpt");
        save_checkpoint(path.string(), params);
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        f.seekg(0, std::ios::end);
        auto size = static_cast<std::streamoff>(f.tellg());
        f.seekp(size - 9);  // inside the last value, before the checksum
        char byte;
        f.seekg(size - 9);
        f.read(&byte, 1);
        byte = static_cast<char>(byte ^ 0x40);
        f.seekp(size - 9);
        f.write(&byte, 1);
        f.close();
        CHECK_THROWS_AS(read_checkpoint(path.string()), IoError);
    }
    SUBCASE("bad magic rejected") {
        auto path = temp_file("magic.ckpt");
        std::ofstream out(path, std::ios::binary);
        out.write("NOPE!", 5);
        out.close();
        CHECK_THROWS_AS(read_checkpoint(path.string()), IoError);
    }
    SUBCASE("missing file rejected") {
        CHECK_THROWS_AS(read_checkpoint(temp_file("absent.ckpt").string()),
                        IoError);
    }
}
