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
 * Full analysis of a scenario: validation, geometry, CHSH value, Eve
 * quantities, block table, bound chain, and the robust-bound evaluation.
 * Single entry point used by the CLI.
 */
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmchsh/entropy.hpp"
#include "pmchsh/jordan.hpp"
#include "pmchsh/scenario.hpp"

namespace pmchsh {

struct BlockSummary {
    int index = 0;
    int dimension = 0;
    double gamma = 0.0;
    double p = 0.0;
    double s = 0.0;
    std::vector<InequalityCheck> checks;
};

struct RobustBound {
    double epsilon = 0.0;
    double bound = 0.0;          // clamped at 0
    double bound_unclamped = 0.0;
};

struct AnalysisReport {
    std::vector<Violation> validation;
    bool qubit_assumption_satisfied = false;
    int support_dim = 0;
    std::string warning;  // set when Eq.-(2)-style certification is refused
    double s_value = 0.0;
    double alpha = 0.0, beta = 0.0, phi = 0.0;
    bool geometry_available = false;
    SecrecyReport secrecy;
    std::vector<BlockSummary> blocks;
    std::vector<ChainLink> chain;
    std::optional<RobustBound> robust;
};

/// Runs the full pipeline on a scenario. When the qubit assumption fails,
/// geometry-dependent sections are left empty and the report carries an
/// explicit warning that the min-entropy bound does not apply.
inline AnalysisReport analyze(const Scenario& s,
                              std::optional<double> epsilon = std::nullopt,
                              double tol = kDefaultTol) {
    AnalysisReport r;
    r.validation = validate(s, tol);
    if (!r.validation.empty()) return r;

    r.secrecy = secrecy_report(s, tol);
    r.s_value = r.secrecy.s_value;

    SourceGeometry g;
    try {
        g = source_geometry(s, tol);
        r.qubit_assumption_satisfied = true;
        r.support_dim = 2;
        r.geometry_available = true;
    } catch (const QubitAssumptionViolated& e) {
        r.support_dim = e.support_dim();
        r.warning = std::string(e.what()) +
                    "; the CHSH min-entropy bound does not apply";
        return r;
    } catch (const DegenerateDifference& e) {
        // The qubit assumption still holds trivially; D is at most tol and
        // only the geometry-dependent sections are unavailable.
        r.qubit_assumption_satisfied = true;
        r.support_dim = 2;
        r.warning = std::string(e.what()) +
                    "; geometry-dependent sections unavailable";
        return r;
    }

    r.alpha = g.alpha;
    r.beta = g.beta;
    r.phi = g.phi;

    auto blocks = joint_block_diagonalize(s.obs_u, s.obs_v);
    BlockDecomposition d = block_weights_and_scores(s, g, std::move(blocks));
    const ComplexMatrix z_e =
        partial_trace(g.z_op, s.dim_b, s.dim_e, Subsystem::E);
    const ComplexMatrix u_e = sign_operator(z_e, 1e-8);
    auto checks = check_block_inequalities(s, g, d, u_e);
    for (size_t k = 0; k < d.blocks.size(); ++k) {
        BlockSummary summary;
        summary.index = static_cast<int>(k);
        summary.dimension = static_cast<int>(d.blocks[k].dim());
        summary.gamma = d.blocks[k].gamma;
        summary.p = d.per_block[k].p;
        summary.s = d.per_block[k].s;
        summary.checks = std::move(checks[k].checks);
        r.blocks.push_back(std::move(summary));
    }
    r.chain = aggregate_distance_bound(d, s, g).links;

    if (epsilon) {
        RobustBound rb;
        rb.epsilon = *epsilon;
        rb.bound_unclamped = robust_min_entropy_bound(r.s_value, *epsilon);
        rb.bound = std::max(0.0, rb.bound_unclamped);
        r.robust = rb;
    }
    return r;
}

}  // namespace pmchsh
