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
 * JSON serialization. Complex numbers serialize as two-element arrays
 * [re, im]; matrices as row-major nested arrays (E fast index on the
 * Bob x Eve space). Reports carry a top-level "schema": 1 field.
 */
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmchsh/report.hpp"
#include "pmchsh/scenario.hpp"
#include "pmchsh/verify.hpp"

namespace pmchsh {

using Json = nlohmann::json;

inline Json matrix_to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("matrix: expected nonempty array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols)
            throw std::invalid_argument("matrix: ragged rows");
        for (Eigen::Index k = 0; k < cols; ++k) {
            const Json& c = j[i][k];
            if (!c.is_array() || c.size() != 2)
                throw std::invalid_argument(
                    "matrix: entries must be [re, im] pairs");
            m(i, k) = Complex(c[0].get<double>(), c[1].get<double>());
        }
    }
    return m;
}

inline Json scenario_to_json(const Scenario& s) {
    Json j;
    j["dim_b"] = s.dim_b;
    j["dim_e"] = s.dim_e;
    j["states"] = {{"rho", matrix_to_json(s.rho)},
                   {"rho_p", matrix_to_json(s.rho_p)},
                   {"sigma", matrix_to_json(s.sigma)},
                   {"sigma_p", matrix_to_json(s.sigma_p)}};
    j["observables"] = {{"u", matrix_to_json(s.obs_u)},
                        {"v", matrix_to_json(s.obs_v)}};
    return j;
}

/// Parses the scenario schema. Bob's side accepts either "observables"
/// {u, v} or "measurements" {m0: [M, M], m1: [M, M]}; POVM elements
/// convert via U_B = M_{0|y} - M_{1|y}.
inline Scenario scenario_from_json(const Json& j) {
    Scenario s;
    s.dim_b = j.at("dim_b").get<Eigen::Index>();
    s.dim_e = j.at("dim_e").get<Eigen::Index>();
    const Json& states = j.at("states");
    s.rho = matrix_from_json(states.at("rho"));
    s.rho_p = matrix_from_json(states.at("rho_p"));
    s.sigma = matrix_from_json(states.at("sigma"));
    s.sigma_p = matrix_from_json(states.at("sigma_p"));
    if (j.contains("observables")) {
        s.obs_u = matrix_from_json(j.at("observables").at("u"));
        s.obs_v = matrix_from_json(j.at("observables").at("v"));
    } else if (j.contains("measurements")) {
        const Json& meas = j.at("measurements");
        auto to_obs = [](const Json& povm) {
            if (!povm.is_array() || povm.size() != 2)
                throw std::invalid_argument(
                    "measurements: expected two POVM elements per input");
            return ComplexMatrix(matrix_from_json(povm[0]) -
                                 matrix_from_json(povm[1]));
        };
        s.obs_u = to_obs(meas.at("m0"));
        s.obs_v = to_obs(meas.at("m1"));
    } else {
        throw std::invalid_argument(
            "scenario: need either \"observables\" or \"measurements\"");
    }
    return s;
}

inline Json secrecy_to_json(const SecrecyReport& r) {
    return Json{{"trace_distance", r.trace_distance},
                {"min_entropy", r.min_entropy},
                {"s_value", r.s_value},
                {"bound_rhs", r.bound_rhs},
                {"bound_slack", r.bound_slack},
                {"min_entropy_bound", r.min_entropy_bound},
                {"raw_radicand", r.raw_radicand}};
}

inline Json checks_to_json(const std::vector<InequalityCheck>& checks) {
    Json out = Json::array();
    for (const InequalityCheck& c : checks)
        out.push_back({{"name", c.name},
                       {"lhs", c.lhs},
                       {"rhs", c.rhs},
                       {"slack", c.slack}});
    return out;
}

inline Json analysis_to_json(const AnalysisReport& r) {
    Json j;
    j["schema"] = 1;
    Json validation = Json::array();
    for (const Violation& v : r.validation)
        validation.push_back({{"what", v.what}, {"magnitude", v.magnitude}});
    j["validation"] = std::move(validation);
    j["qubit_assumption"] = {{"satisfied", r.qubit_assumption_satisfied},
                             {"support_dim", r.support_dim}};
    if (!r.warning.empty()) j["warning"] = r.warning;
    if (!r.validation.empty()) return j;
    j["s_value"] = r.s_value;
    j["secrecy"] = secrecy_to_json(r.secrecy);
    if (!r.geometry_available) return j;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    j["phi"] = r.phi;
    Json blocks = Json::array();
    for (const BlockSummary& b : r.blocks)
        blocks.push_back({{"index", b.index},
                          {"dimension", b.dimension},
                          {"gamma", b.gamma},
                          {"p", b.p},
                          {"s", b.s},
                          {"checks", checks_to_json(b.checks)}});
    j["blocks"] = std::move(blocks);
    Json chain = Json::array();
    for (const ChainLink& link : r.chain)
        chain.push_back({{"name", link.name},
                         {"lhs", link.lhs},
                         {"rhs", link.rhs},
                         {"slack", link.slack}});
    j["chain"] = std::move(chain);
    if (r.robust)
        j["robust"] = {{"epsilon", r.robust->epsilon},
                       {"bound", r.robust->bound},
                       {"bound_unclamped", r.robust->bound_unclamped}};
    return j;
}

inline Json campaign_to_json(const CampaignResult& r) {
    Json j;
    j["schema"] = 1;
    j["trials_run"] = r.trials_run;
    Json violations = Json::array();
    for (const CampaignViolation& v : r.violations)
        violations.push_back(
            {{"seed", v.seed}, {"check", v.check}, {"slack", v.slack}});
    j["violations"] = std::move(violations);
    Json worst;
    for (const auto& [name, slack] : r.worst_slack_per_check)
        worst[name] = slack;
    j["worst_slack_per_check"] = std::move(worst);
    j["runtime_seconds"] = r.runtime.count();
    return j;
}

inline Json mixture_to_json(const MixtureCheck& m) {
    return Json{{"schema", 1},         {"avg_s", m.avg_s},
                {"avg_d", m.avg_d},    {"bound", m.bound},
                {"slack", m.slack},    {"applicable", m.applicable},
                {"ok", m.ok}};
}

inline Json audit_to_json(const EqualityAudit& a) {
    Json points = Json::array();
    for (const auto& p : a.points)
        points.push_back(
            {{"f_z", p.f_z}, {"s", p.s}, {"d", p.d}, {"gap", p.gap}});
    return Json{{"schema", 1}, {"max_gap", a.max_gap}, {"points", points}};
}

}  // namespace pmchsh
