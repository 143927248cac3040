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

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "rlst/error.hpp"
#include "rlst/rng.hpp"

namespace rlst {

/// Dense row-major array of 64-bit floats with a lazily allocated gradient
/// slot of identical shape. The substrate for every parameter and activation.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), values_(count_(shape_), 0.0) {}

    Tensor(std::vector<std::size_t> shape, std::vector<double> values)
        : shape_(std::move(shape)), values_(std::move(values)) {
        if (values_.size() != count_(shape_)) {
            throw ConfigError("Tensor: values length does not match shape");
        }
    }

    static Tensor vector(std::size_t n) { return Tensor({n}); }
    static Tensor matrix(std::size_t rows, std::size_t cols) { return Tensor({rows, cols}); }

    static Tensor uniform(std::vector<std::size_t> shape, Rng& rng,
                          double lo = -0.08, double hi = 0.08) {
        Tensor t(std::move(shape));
        for (double& v : t.values_) v = rng.uniform(lo, hi);
        return t;
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return values_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t rows() const { return shape_.at(0); }
    std::size_t cols() const { return shape_.at(1); }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

    /// Pointer to row r of a rank-2 tensor.
    const double* row(std::size_t r) const { return values_.data() + r * cols(); }
    double* row(std::size_t r) { return values_.data() + r * cols(); }

    bool has_grad() const { return !grad_.empty(); }

    std::vector<double>& grad() {
        if (grad_.empty()) grad_.assign(values_.size(), 0.0);
        return grad_;
    }
    const std::vector<double>& grad() const { return grad_; }

    void zero_grad() {
        if (!grad_.empty()) std::fill(grad_.begin(), grad_.end(), 0.0);
    }

    bool all_finite() const {
        for (double v : values_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

private:
    static std::size_t count_(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) {
            if (d == 0) throw ConfigError("Tensor: zero dimension");
            n *= d;
        }
        return shape.empty() ? 0 : n;
    }

    std::vector<std::size_t> shape_;
    std::vector<double> values_;
    std::vector<double> grad_;
};

}  // namespace rlst
