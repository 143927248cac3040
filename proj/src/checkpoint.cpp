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
#include "rlst/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "rlst/error.hpp"

namespace rlst {

namespace {

constexpr char kMagic[5] = {'R', 'L', 'S', 'T', '1'};
constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv1a(std::uint64_t& h, const unsigned char* bytes, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= kFnvPrime;
    }
}

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

void double_bytes(double v, unsigned char b[8]) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw IoError("checkpoint truncated: " + path);
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in, const std::string& path) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) {
        throw IoError("checkpoint truncated: " + path);
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParameterSet& params) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);

    out.write(kMagic, sizeof(kMagic));
    put_u64(out, params.size());

    std::uint64_t checksum = kFnvOffset;
    for (const auto& entry : params) {
        put_u32(out, static_cast<std::uint32_t>(entry.name.size()));
        out.write(entry.name.data(),
                  static_cast<std::streamsize>(entry.name.size()));
        put_u32(out, static_cast<std::uint32_t>(entry.tensor.rank()));
        for (std::size_t d : entry.tensor.shape()) put_u64(out, d);
        for (double v : entry.tensor.values()) {
            unsigned char b[8];
            double_bytes(v, b);
            fnv1a(checksum, b, 8);
            out.write(reinterpret_cast<const char*>(b), 8);
        }
    }
    put_u64(out, checksum);
    if (!out) throw IoError("checkpoint write failed: " + path);
}

ParameterSet read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);

    char magic[sizeof(kMagic)];
    if (!in.read(magic, sizeof(magic)) ||
        std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw IoError("bad checkpoint magic: " + path);
    }

    const std::uint64_t count = get_u64(in, path);
    ParameterSet params;
    std::uint64_t checksum = kFnvOffset;
    for (std::uint64_t r = 0; r < count; ++r) {
        const std::uint32_t name_len = get_u32(in, path);
        std::string name(name_len, '\0');
        if (!in.read(name.data(), name_len)) {
            throw IoError("checkpoint truncated: " + path);
        }
        const std::uint32_t rank = get_u32(in, path);
        std::vector<std::size_t> shape(rank);
        std::size_t n = 1;
        for (std::uint32_t i = 0; i < rank; ++i) {
            shape[i] = static_cast<std::size_t>(get_u64(in, path));
            n *= shape[i];
        }
        if (rank == 0) n = 0;
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) {
            unsigned char b[8];
            if (!in.read(reinterpret_cast<char*>(b), 8)) {
                throw IoError("checkpoint truncated: " + path);
            }
            fnv1a(checksum, b, 8);
            std::uint64_t bits = 0;
            for (int j = 0; j < 8; ++j) {
                bits |= static_cast<std::uint64_t>(b[j]) << (8 * j);
            }
            std::memcpy(&values[i], &bits, 8);
        }
        params.add(std::move(name), Tensor(std::move(shape), std::move(values)));
    }

    const std::uint64_t stored = get_u64(in, path);
    if (stored != checksum) throw IoError("checkpoint checksum mismatch: " + path);
    return params;
}

void load_checkpoint(const std::string& path, ParameterSet& params) {
    ParameterSet loaded = read_checkpoint(path);
    if (loaded.size() != params.size()) {
        throw ConfigError("checkpoint entry count mismatch: " + path);
    }
    for (auto& entry : params) {
        const Tensor* src = loaded.find(entry.name);
        if (!src) {
            throw ConfigError("checkpoint missing entry '" + entry.name +
                              "': " + path);
        }
        if (src->shape() != entry.tensor.shape()) {
            throw ConfigError("checkpoint shape mismatch for '" + entry.name +
                              "': " + path);
        }
        entry.tensor.values() = src->values();
    }
}

}  // namespace rlst
