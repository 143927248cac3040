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
#include <cstdio>
#include <vector>

#include "rlst/discriminator.hpp"
#include "rlst/generator.hpp"
#include "rlst/language_model.hpp"
#include "rlst/param_set.hpp"
#include "rlst/rng.hpp"
#include "rlst/semantic.hpp"
#include "rlst/sentence.hpp"
#include "rlst/tensor.hpp"

using namespace rlst;

// Drives the pipeline end to end: pretrains a tiny generator, beam-decodes,
// scores the decode with the semantic scorer and a discriminator, and runs
// one adversarial update. Exits loudly on any thrown error.
int main() {
    ParameterSet gset;
    Rng grng(5);
    GeneratorParams gen = GeneratorParams::create(gset, {12, 8, 12}, grng);
    const Sentence src = frame({4, 7, 5}, Style::source);
    std::vector<Sentence> batch = {src};
    double loss0 = 0.0, loss1 = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double l = pretrain_generator_step(batch, gset, gen, 0.5);
        if (i == 0) loss0 = l;
        loss1 = l;
    }
    const BeamResult beam = beam_search(src, gen, 4, 12);
    std::printf("pretrain loss %.4f -> %.4f\n", loss0, loss1);
    std::printf("beam tokens:");
    for (std::size_t t : beam.sentence.tokens) std::printf(" %zu", t);
    std::printf("  (normalized %.4f, truncated %d)\n", beam.normalized,
                beam.truncated);

    const Tensor emb = Tensor::uniform({12, 8}, grng);
    const SemanticScore sem = semantic_score(beam.sentence, src, emb);
    std::printf("semantic score %.6f degenerate %d\n", sem.value,
                sem.degenerate);

    ParameterSet dset;
    Rng drng(9);
    DiscriminatorParams disc =
        DiscriminatorParams::create(dset, {12, 8, 10}, drng);
    std::printf("style score %.6f\n", style_score(beam.sentence, disc));
    const double ld =
        adversarial_step({&src, 1}, {&beam.sentence, 1}, dset, disc, 1e-2);
    std::printf("adversarial L_D %.6f\n", ld);

    ParameterSet lset;
    Rng lrng(13);
    LmParams lm = LmParams::create(lset, {12, 8, 10}, lrng);
    const Sentence target = frame({4, 7, 5}, Style::target);
    std::vector<Sentence> lm_batch = {target};
    double lm0 = 0.0, lm1 = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double l = pretrain_lm_step(lm_batch, lset, lm, 0.5);
        if (i == 0) lm0 = l;
        lm1 = l;
    }
    std::printf("lm loss %.4f -> %.4f  ppl %.4f  fluency %.4f\n", lm0, lm1,
                perplexity(target, lm), fluency_score(target, lm));
    std::puts("e2e ok");
    return 0;
}
