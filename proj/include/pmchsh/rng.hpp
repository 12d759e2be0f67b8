// Copyright 2026 The pmchsh Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Seeded deterministic random generation for instances: uniform and
 * Gaussian draws built directly on mt19937_64 output words so that results
 * are reproducible across standard library implementations, plus random
 * operators (densities, Hermitians, isometries).
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "pmchsh/linalg.hpp"

namespace pmchsh {

/// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Splittable per-index seed derivation: seed n of a base stream is
/// splitmix64(base + n * golden ratio constant). Adding trials never
/// reshuffles earlier ones.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base + index * 0x9E3779B97F4A7C15ULL);
}

/// Deterministic generator with uniform and Gaussian draws independent of
/// the standard library's distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    Complex complex_gaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline ComplexMatrix random_gaussian_matrix(Rng& rng, Eigen::Index rows,
                                            Eigen::Index cols) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.complex_gaussian();
    return m;
}

/// Random mixed density operator (Wishart-style G G^dag / Tr), covering
/// the interior of the state space rather than only pure states.
inline ComplexMatrix random_density(Rng& rng, Eigen::Index dim) {
    ComplexMatrix g = random_gaussian_matrix(rng, dim, dim);
    ComplexMatrix w = g * g.adjoint();
    return w / w.trace().real();
}

inline ComplexMatrix random_hermitian(Rng& rng, Eigen::Index dim) {
    ComplexMatrix g = random_gaussian_matrix(rng, dim, dim);
    return 0.5 * (g + g.adjoint());
}

/// Isometry with `cols` orthonormal columns drawn from a seeded complex
/// Gaussian matrix (modified Gram-Schmidt).
inline ComplexMatrix random_isometry(Rng& rng, Eigen::Index rows,
                                     Eigen::Index cols) {
    ComplexMatrix m = random_gaussian_matrix(rng, rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < j; ++i)
            m.col(j) -= m.col(i).dot(m.col(j)) * m.col(i);
        m.col(j).normalize();
    }
    return m;
}

}  // namespace pmchsh
