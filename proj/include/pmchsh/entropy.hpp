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
 * Eve-side quantities: marginals, trace distance, conditional min entropy,
 * the CHSH min-entropy and trace-distance bounds, and the epsilon-robust
 * variant.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "pmchsh/linalg.hpp"
#include "pmchsh/scenario.hpp"

namespace pmchsh {

inline constexpr double kTsirelson = 2.8284271247461903;  // 2 sqrt(2)

/// Eve's marginals (Tr_B[rho], Tr_B[rho_p]) of the two x = 0 source states.
inline std::pair<ComplexMatrix, ComplexMatrix> eve_marginals(
    const Scenario& s, double tol = kDefaultTol) {
    require_valid(s, tol);
    return {partial_trace(s.rho, s.dim_b, s.dim_e, Subsystem::E),
            partial_trace(s.rho_p, s.dim_b, s.dim_e, Subsystem::E)};
}

/// D(a, b) = (1/2) ||a - b||_1, in [0, 1] for density operators.
inline double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    return 0.5 * trace_norm(a - b);
}

/// H_min = 1 - log2(1 + d) for an equiprobable cq-state with trace
/// distance d between Eve's conditional states.
inline double min_entropy_from_distance(double d) {
    if (d < 0.0 || d > 1.0 + 1e-12)
        throw std::invalid_argument("min_entropy_from_distance: d not in [0,1]");
    d = std::min(d, 1.0);
    return 1.0 - std::log2(1.0 + d);
}

/// Upper bound sqrt(2 - S^2/4) on Eve's trace distance; the radicand is
/// clamped at zero beyond the Tsirelson point. Radicands within 1e-13 of
/// zero snap to zero so that S values a few ulps from 2 sqrt(2) (where the
/// square root has infinite slope) do not inflate the bound.
inline double trace_distance_bound(double s_value) {
    const double radicand = 2.0 - s_value * s_value / 4.0;
    return radicand < 1e-13 ? 0.0 : std::sqrt(radicand);
}

/// Lower bound 1 - log2(1 + sqrt(2 - S^2/4)) on the conditional min
/// entropy, in bits.
inline double chsh_min_entropy_bound(double s_value) {
    return 1.0 - std::log2(1.0 + trace_distance_bound(s_value));
}

/// Robust variant tolerating a deviation epsilon from the qubit source
/// assumption: 1 - log2(1 + sqrt(2 - (S - 4 eps)^2 / 4) + eps). Reduces to
/// chsh_min_entropy_bound at epsilon = 0.
inline double robust_min_entropy_bound(double s_value, double epsilon) {
    if (epsilon < 0.0)
        throw std::invalid_argument("robust_min_entropy_bound: epsilon < 0");
    return 1.0 -
           std::log2(1.0 + trace_distance_bound(s_value - 4.0 * epsilon) +
                     epsilon);
}

/// Deviation of a scenario from an exact qubit source, measured against a
/// candidate pair of traceless unit operators:
/// eps = max((1/2)||(rho-rho') - a Z~||_1, (1/2)||(sigma-sigma') - b X~||_1).
/// Any valid candidate yields a sound (possibly loose) epsilon.
inline double qubit_deviation(const Scenario& s, const ComplexMatrix& z_tilde,
                              const ComplexMatrix& x_tilde, double alpha_t,
                              double beta_t, double tol = 1e-7) {
    for (const ComplexMatrix* cand : {&z_tilde, &x_tilde}) {
        if (std::abs(cand->trace()) > tol)
            throw std::invalid_argument("qubit_deviation: candidate not traceless");
        if (std::abs(0.5 * trace_norm(*cand) - 1.0) > tol)
            throw std::invalid_argument(
                "qubit_deviation: candidate not unit trace norm");
        EigenSystem sys = eig_hermitian(*cand, tol);
        int rank = 0;
        for (Eigen::Index i = 0; i < sys.values.size(); ++i)
            if (std::abs(sys.values(i)) > 1e-9 * std::max(1.0, trace_norm(*cand)))
                ++rank;
        if (rank > 2)
            throw std::invalid_argument("qubit_deviation: candidate rank > 2");
    }
    if (alpha_t < 0.0 || alpha_t > 1.0 || beta_t < 0.0 || beta_t > 1.0)
        throw std::invalid_argument("qubit_deviation: weights not in [0,1]");
    const double eps_z =
        0.5 * trace_norm(s.rho - s.rho_p - alpha_t * z_tilde);
    const double eps_x =
        0.5 * trace_norm(s.sigma - s.sigma_p - beta_t * x_tilde);
    return std::max(eps_z, eps_x);
}

/// Heuristic nearest-qubit candidate: truncate a difference operator to
/// its two largest-|eigenvalue| directions, remove the trace, renormalize
/// to half trace norm 1. No optimality is claimed; any valid candidate
/// yields a sound deviation, so the result is sound but not necessarily
/// minimal.
struct QubitCandidate {
    ComplexMatrix op;
    double weight = 0.0;  // half trace norm of the truncated difference
};

inline QubitCandidate nearest_qubit_candidate(const ComplexMatrix& diff,
                                              double tol = kDefaultTol) {
    EigenSystem sys = eig_hermitian(diff, tol);
    const Eigen::Index n = diff.rows();
    // Pick the two eigendirections with largest |lambda|; values are
    // sorted by value, not magnitude, so scan pairs.
    double best = -1.0;
    Eigen::Index i_best = 0, j_best = n > 1 ? n - 1 : 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double score =
                std::abs(sys.values(i)) + std::abs(sys.values(j));
            if (score > best) {
                best = score;
                i_best = i;
                j_best = j;
            }
        }
    ComplexMatrix trunc =
        sys.values(i_best) * sys.vectors.col(i_best) *
            sys.vectors.col(i_best).adjoint() +
        sys.values(j_best) * sys.vectors.col(j_best) *
            sys.vectors.col(j_best).adjoint();
    // Remove the trace within the retained two-dimensional support.
    const double tr = trunc.trace().real();
    trunc -= 0.5 * tr *
             (sys.vectors.col(i_best) * sys.vectors.col(i_best).adjoint() +
              sys.vectors.col(j_best) * sys.vectors.col(j_best).adjoint());
    QubitCandidate cand;
    cand.weight = 0.5 * trace_norm(trunc);
    if (cand.weight > tol)
        cand.op = trunc / cand.weight;
    else
        cand.op = trunc;
    return cand;
}

/// All Eve-side quantities for a scenario in one record.
struct SecrecyReport {
    double trace_distance = 0.0;
    double min_entropy = 0.0;
    double s_value = 0.0;
    double bound_rhs = 0.0;    // sqrt(2 - S^2/4), radicand clamped
    double bound_slack = 0.0;  // bound_rhs - trace_distance
    double min_entropy_bound = 0.0;
    double raw_radicand = 0.0;  // 2 - S^2/4 before clamping
};

inline SecrecyReport secrecy_report(const Scenario& s,
                                    double tol = kDefaultTol) {
    SecrecyReport r;
    auto [rho_e, rho_p_e] = eve_marginals(s, tol);
    r.trace_distance = trace_distance(rho_e, rho_p_e);
    r.min_entropy = min_entropy_from_distance(std::min(r.trace_distance, 1.0));
    r.s_value = chsh_value(s, tol);
    r.raw_radicand = 2.0 - r.s_value * r.s_value / 4.0;
    r.bound_rhs = trace_distance_bound(r.s_value);
    r.bound_slack = r.bound_rhs - r.trace_distance;
    r.min_entropy_bound = chsh_min_entropy_bound(r.s_value);
    return r;
}

}  // namespace pmchsh
