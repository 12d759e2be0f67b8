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
 * Joint block diagonalization of two Hermitian unitary observables into
 * blocks of dimension at most 2, per-block weights and CHSH contributions,
 * and numerical checks of the per-block inequalities.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmchsh/entropy.hpp"
#include "pmchsh/linalg.hpp"
#include "pmchsh/scenario.hpp"

namespace pmchsh {

/// One invariant subspace of Bob's observable pair.
struct JordanBlock {
    ComplexMatrix basis;    // dim_b x (1 or 2), orthonormal columns
    ComplexMatrix u_block;  // observable restricted to the block
    ComplexMatrix v_block;
    double gamma = 0.0;        // Bloch angle between the restrictions
    ComplexMatrix projector;   // basis basis^dag on dim_b

    Eigen::Index dim() const { return basis.cols(); }
};

/// Joint block diagonalization of two Hermitian unitaries.
///
/// Works entirely through Hermitian eigenproblems: with A = (u+v)/2 and
/// B = (u-v)/2 one has AB + BA = 0 and A^2 + B^2 = I. Eigenvectors of A
/// with eigenvalue 0 < c < 1 pair with their image under B to form
/// two-dimensional blocks with gamma = 2 arccos(c); |c| = 1 gives
/// simultaneous eigenvectors, and the kernel of A splits under B into
/// one-dimensional blocks with opposite u, v eigenvalues.
inline std::vector<JordanBlock> joint_block_diagonalize(
    const ComplexMatrix& u, const ComplexMatrix& v, double tol = 1e-8) {
    if (!is_hermitian_unitary(u, tol) || !is_hermitian_unitary(v, tol))
        throw std::invalid_argument(
            "joint_block_diagonalize: inputs must be Hermitian unitaries");
    const Eigen::Index n = u.rows();
    const ComplexMatrix a = 0.5 * (u + v);
    const ComplexMatrix b = 0.5 * (u - v);
    EigenSystem sys = eig_hermitian(a, tol);

    std::vector<JordanBlock> blocks;
    std::vector<ComplexVector> kernel;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double c = sys.values(i);
        if (std::abs(c) >= 1.0 - 1e-9) {
            // Simultaneous eigenvector of u and v.
            JordanBlock blk;
            blk.basis = sys.vectors.col(i);
            blk.u_block = blk.basis.adjoint() * u * blk.basis;
            blk.v_block = blk.basis.adjoint() * v * blk.basis;
            blk.gamma = 0.0;
            blk.projector = blk.basis * blk.basis.adjoint();
            blocks.push_back(std::move(blk));
        } else if (std::abs(c) <= 1e-9) {
            kernel.push_back(sys.vectors.col(i));
        } else if (c > 0.0) {
            // Pairing only from the positive side avoids double counting.
            ComplexVector w = sys.vectors.col(i);
            ComplexVector partner = (b * w) / std::sqrt(1.0 - c * c);
            JordanBlock blk;
            blk.basis = ComplexMatrix(n, 2);
            blk.basis.col(0) = w;
            blk.basis.col(1) = partner;
            blk.u_block = blk.basis.adjoint() * u * blk.basis;
            blk.v_block = blk.basis.adjoint() * v * blk.basis;
            blk.gamma = 2.0 * std::acos(std::clamp(c, -1.0, 1.0));
            blk.projector = blk.basis * blk.basis.adjoint();
            blocks.push_back(std::move(blk));
        }
        // c < 0 away from the kernel: partner of a positive-side vector.
    }

    if (!kernel.empty()) {
        // u = -v on the kernel of A; split it along the eigenvectors of B.
        ComplexMatrix k(n, static_cast<Eigen::Index>(kernel.size()));
        for (Eigen::Index i = 0; i < k.cols(); ++i) k.col(i) = kernel[i];
        ComplexMatrix b_k = k.adjoint() * b * k;
        EigenSystem ksys = eig_hermitian(b_k, tol);
        for (Eigen::Index i = 0; i < k.cols(); ++i) {
            JordanBlock blk;
            blk.basis = k * ksys.vectors.col(i);
            blk.u_block = blk.basis.adjoint() * u * blk.basis;
            blk.v_block = blk.basis.adjoint() * v * blk.basis;
            blk.gamma = std::numbers::pi;
            blk.projector = blk.basis * blk.basis.adjoint();
            blocks.push_back(std::move(blk));
        }
    }
    return blocks;
}

/// Reassembles an observable from its blocks; used to check reconstruction.
inline ComplexMatrix reassemble(const std::vector<JordanBlock>& blocks,
                                bool use_u) {
    if (blocks.empty()) return ComplexMatrix();
    const Eigen::Index n = blocks[0].basis.rows();
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (const JordanBlock& blk : blocks)
        out += blk.basis * (use_u ? blk.u_block : blk.v_block) *
               blk.basis.adjoint();
    return out;
}

/// Per-block weight p_k, CHSH contribution S_k, and (for two-dimensional
/// non-degenerate blocks) the W operator of the per-block inequalities.
struct BlockScores {
    double p = 0.0;
    double s = 0.0;
    std::optional<ComplexMatrix> w_op;
};

struct BlockDecomposition {
    std::vector<JordanBlock> blocks;
    std::vector<BlockScores> per_block;
};

/// W^k_B = i [U^k_B, V^k_B] / (2 sin gamma_k), embedded in dim_b and
/// sign-fixed so that (1/2) Tr[W^k_B Y_B] >= 0. Absent for
/// one-dimensional blocks and for sin gamma_k <= tol.
inline std::optional<ComplexMatrix> block_w_operator(const JordanBlock& block,
                                                     const SourceGeometry& g,
                                                     Eigen::Index dim_e,
                                                     double tol = kDefaultTol) {
    if (block.dim() != 2) return std::nullopt;
    const double sin_gamma = std::sin(block.gamma);
    if (sin_gamma <= tol) return std::nullopt;
    const ComplexMatrix comm =
        block.u_block * block.v_block - block.v_block * block.u_block;
    const ComplexMatrix w2 = Complex(0, 1) * comm / (2.0 * sin_gamma);
    ComplexMatrix w = block.basis * w2 * block.basis.adjoint();
    const Eigen::Index dim_b = block.basis.rows();
    const ComplexMatrix y_b =
        partial_trace(g.y_op, dim_b, dim_e, Subsystem::B);
    if (0.5 * (w * y_b).trace().real() < 0.0) w = -w;
    return w;
}

/// Computes p_k = (1/2) Tr[1^k_B I_B] and
/// S_k = (1/2) alpha Tr[(U^k_B + V^k_B) Z_B]
///     + (1/2) beta Tr[(U^k_B - V^k_B) X_B]
/// for every block, with Z_B, X_B, I_B the Bob marginals of the geometry.
inline BlockDecomposition block_weights_and_scores(
    const Scenario& s, const SourceGeometry& g,
    std::vector<JordanBlock> blocks) {
    const ComplexMatrix z_b =
        partial_trace(g.z_op, s.dim_b, s.dim_e, Subsystem::B);
    const ComplexMatrix x_b =
        partial_trace(g.x_op, s.dim_b, s.dim_e, Subsystem::B);
    const ComplexMatrix i_b =
        partial_trace(g.subspace_projector, s.dim_b, s.dim_e, Subsystem::B);
    BlockDecomposition d;
    d.per_block.reserve(blocks.size());
    for (const JordanBlock& blk : blocks) {
        if (blk.basis.rows() != s.dim_b)
            throw std::invalid_argument(
                "block_weights_and_scores: block dimension mismatch");
        const ComplexMatrix u_k =
            blk.basis * blk.u_block * blk.basis.adjoint();
        const ComplexMatrix v_k =
            blk.basis * blk.v_block * blk.basis.adjoint();
        BlockScores scores;
        scores.p = 0.5 * (blk.projector * i_b).trace().real();
        scores.s = 0.5 * g.alpha * ((u_k + v_k) * z_b).trace().real() +
                   0.5 * g.beta * ((u_k - v_k) * x_b).trace().real();
        scores.w_op = block_w_operator(blk, g, s.dim_e);
        d.per_block.push_back(std::move(scores));
    }
    d.blocks = std::move(blocks);
    return d;
}

/// One evaluated inequality; slack >= 0 means satisfied.
struct InequalityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
};

struct BlockCheckRecord {
    int block_index = 0;
    std::vector<InequalityCheck> checks;
};

/// Evaluates, for every block, the W-versus-S inequality, the
/// W-versus-Eve tradeoff, the tight per-block bound on S_k, and the
/// per-block distance bound, against a given Hermitian unitary on Eve's
/// space.
inline std::vector<BlockCheckRecord> check_block_inequalities(
    const Scenario& s, const SourceGeometry& g, const BlockDecomposition& d,
    const ComplexMatrix& u_e, double tol = 1e-7) {
    if (!is_hermitian_unitary(u_e, 1e-8))
        throw std::invalid_argument(
            "check_block_inequalities: u_e must be a Hermitian unitary");
    const ComplexMatrix y_b =
        partial_trace(g.y_op, s.dim_b, s.dim_e, Subsystem::B);
    const ComplexMatrix i_b =
        partial_trace(g.subspace_projector, s.dim_b, s.dim_e, Subsystem::B);
    const double min_ab2 = std::min(g.alpha * g.alpha, g.beta * g.beta);
    const double max_ab2 = std::max(g.alpha * g.alpha, g.beta * g.beta);

    std::vector<BlockCheckRecord> records;
    records.reserve(d.blocks.size());
    for (size_t k = 0; k < d.blocks.size(); ++k) {
        const JordanBlock& blk = d.blocks[k];
        const BlockScores& scores = d.per_block[k];
        const double p_k = scores.p;
        const double s_k = scores.s;
        const double t_wy =
            scores.w_op ? 0.5 * ((*scores.w_op) * y_b).trace().real() : 0.0;
        const double t_z =
            0.5 * (kron(blk.projector, u_e) * g.z_op).trace().real();
        const double q_k = 0.5 * (blk.projector * i_b).trace().real();

        BlockCheckRecord rec;
        rec.block_index = static_cast<int>(k);

        // alpha (1/2) Tr[W Y_B] >= sqrt(S_k^2/4 - p_k^2); with W absent the
        // radicand must be nonpositive, so a positive RHS flags a failure.
        const double w_floor_rhs =
            std::sqrt(std::max(0.0, s_k * s_k / 4.0 - p_k * p_k));
        const double w_floor_lhs = g.alpha * t_wy;
        rec.checks.push_back(
            {"block_w_lower_bound", w_floor_lhs, w_floor_rhs, w_floor_lhs - w_floor_rhs});

        // (1/4) Tr[W Y_B]^2 + (1/4) Tr[(1^k (x) U_E) Z]^2 <= p_k^2.
        const double tradeoff_lhs = t_wy * t_wy + t_z * t_z;
        rec.checks.push_back(
            {"block_w_eve_tradeoff", tradeoff_lhs, p_k * p_k, p_k * p_k - tradeoff_lhs});

        // S_k^2/4 <= min(a^2,b^2) (1/4)Tr[W Y_B]^2
        //          + max(a^2,b^2) (1/4)Tr[1^k I_B]^2.
        const double tight_rhs = min_ab2 * t_wy * t_wy + max_ab2 * q_k * q_k;
        rec.checks.push_back({"tight_block_bound", s_k * s_k / 4.0, tight_rhs,
                              tight_rhs - s_k * s_k / 4.0});

        // (1/2) Tr[(1^k (x) U_E) Z] <= p_k sqrt(2 - (S_k/p_k)^2/4); for
        // vanishing weight both sides must vanish.
        if (p_k <= tol) {
            const double worst = std::max(std::abs(t_z), std::abs(s_k));
            rec.checks.push_back(
                {"block_distance_bound", worst, tol, tol - worst});
        } else {
            const double ratio = s_k / p_k;
            const double rhs =
                p_k * std::sqrt(std::max(0.0, 2.0 - ratio * ratio / 4.0));
            rec.checks.push_back(
                {"block_distance_bound", t_z, rhs, rhs - t_z});
        }
        records.push_back(std::move(rec));
    }
    return records;
}

/// One link of the aggregate distance chain; slack >= 0 means the link
/// is ordered correctly.
struct ChainLink {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
};

struct AggregateChain {
    double aggregate = 0.0;  // sum_k p_k sqrt(2 - (S_k/p_k)^2/4)
    std::vector<ChainLink> links;
};

/// Aggregates the per-block distance bounds and records every link of the
/// chain D <= sum_k (1/2)Tr[(1^k (x) U_E) Z] <= aggregate <= sqrt(2-S^2/4),
/// with U_E the Helstrom sign operator of Z_E.
inline AggregateChain aggregate_distance_bound(const BlockDecomposition& d,
                                               const Scenario& s,
                                               const SourceGeometry& g) {
    const ComplexMatrix z_e =
        partial_trace(g.z_op, s.dim_b, s.dim_e, Subsystem::E);
    const ComplexMatrix u_e = sign_operator(z_e, 1e-8);
    auto [rho_e, rho_p_e] = eve_marginals(s);
    const double dist = trace_distance(rho_e, rho_p_e);

    double sum_tz = 0.0;
    double aggregate = 0.0;
    double s_total = 0.0;
    for (size_t k = 0; k < d.blocks.size(); ++k) {
        const double p_k = d.per_block[k].p;
        const double s_k = d.per_block[k].s;
        s_total += s_k;
        sum_tz +=
            0.5 * (kron(d.blocks[k].projector, u_e) * g.z_op).trace().real();
        if (p_k > 1e-12) {
            const double ratio = s_k / p_k;
            aggregate +=
                p_k * std::sqrt(std::max(0.0, 2.0 - ratio * ratio / 4.0));
        }
    }
    const double final_bound = trace_distance_bound(s_total);

    AggregateChain chain;
    chain.aggregate = aggregate;
    chain.links.push_back(
        {"distance_le_block_sum", dist, sum_tz, sum_tz - dist});
    chain.links.push_back(
        {"block_sum_le_aggregate", sum_tz, aggregate, aggregate - sum_tz});
    chain.links.push_back({"aggregate_le_concave_bound", aggregate,
                           final_bound, final_bound - aggregate});
    return chain;
}

}  // namespace pmchsh
