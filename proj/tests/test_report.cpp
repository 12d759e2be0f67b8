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
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "pmchsh/attacks.hpp"
#include "pmchsh/json_io.hpp"
#include "pmchsh/report.hpp"
#include "test_helpers.hpp"

using namespace pmchsh;
using namespace pmchsh::testing;

TEST_CASE("analyze the optimal attack: full sections, tight chain") {
    const AnalysisReport r = analyze(optimal_attack({0.5, 2}), 0.01);
    CHECK(r.validation.empty());
    CHECK(r.qubit_assumption_satisfied);
    CHECK(r.support_dim == 2);
    CHECK(r.warning.empty());
    CHECK(r.geometry_available);
    CHECK(r.s_value == doctest::Approx(2.0 * std::sqrt(1.25)).epsilon(1e-12));
    CHECK(r.secrecy.trace_distance ==
          doctest::Approx(std::sqrt(0.75)).epsilon(1e-11));
    CHECK_FALSE(r.blocks.empty());
    REQUIRE(r.chain.size() == 3);
    for (const ChainLink& link : r.chain) CHECK(link.slack >= -1e-7);
    REQUIRE(r.robust.has_value());
    CHECK(r.robust->epsilon == 0.01);
    CHECK(r.robust->bound ==
          doctest::Approx(robust_min_entropy_bound(r.s_value, 0.01))
              .epsilon(1e-12));
    double p_sum = 0.0;
    for (const BlockSummary& b : r.blocks) p_sum += b.p;
    CHECK(p_sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("analyze refuses to certify the BB84 counterexample") {
    const AnalysisReport r = analyze(bb84_counterexample());
    CHECK(r.validation.empty());
    CHECK_FALSE(r.qubit_assumption_satisfied);
    CHECK(r.support_dim == 3);
    CHECK_FALSE(r.warning.empty());
    CHECK(r.warning.find("does not apply") != std::string::npos);
    CHECK_FALSE(r.geometry_available);
    CHECK(r.blocks.empty());
    CHECK(r.chain.empty());
    // Raw quantities are still reported.
    CHECK(r.s_value ==
          doctest::Approx(2.0 * std::numbers::sqrt2).epsilon(1e-12));
    CHECK(r.secrecy.trace_distance == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("analyze reports validation failures and stops") {
    Scenario s = optimal_attack({0.5, 2});
    s.rho = 0.8 * s.rho;
    const AnalysisReport r = analyze(s);
    CHECK_FALSE(r.validation.empty());
    CHECK_FALSE(r.geometry_available);
}

TEST_CASE("analyze handles a degenerate source difference") {
    Scenario s = optimal_attack({0.5, 2});
    s.rho_p = s.rho;
    const AnalysisReport r = analyze(s);
    CHECK(r.validation.empty());
    CHECK(r.qubit_assumption_satisfied);
    CHECK_FALSE(r.geometry_available);
    CHECK_FALSE(r.warning.empty());
    CHECK(r.secrecy.trace_distance < 1e-12);
}

TEST_CASE("analyze clamps a negative robust bound to zero") {
    const AnalysisReport r = analyze(optimal_attack({0.0, 2}), 0.1);
    REQUIRE(r.robust.has_value());
    CHECK(r.robust->bound_unclamped < 0.0);
    CHECK(r.robust->bound == 0.0);
}

TEST_CASE("scenario JSON round-trip is exact") {
    for (std::uint64_t seed : {0ull, 5ull, 9ull}) {
        const Scenario s = random_qubit_scenario(seed, 3, 2);
        const Scenario back = scenario_from_json(scenario_to_json(s));
        CHECK(back.dim_b == s.dim_b);
        CHECK(back.dim_e == s.dim_e);
        CHECK(max_abs(back.rho - s.rho) == 0.0);
        CHECK(max_abs(back.rho_p - s.rho_p) == 0.0);
        CHECK(max_abs(back.sigma - s.sigma) == 0.0);
        CHECK(max_abs(back.sigma_p - s.sigma_p) == 0.0);
        CHECK(max_abs(back.obs_u - s.obs_u) == 0.0);
        CHECK(max_abs(back.obs_v - s.obs_v) == 0.0);
    }
}

TEST_CASE("scenario serialization is byte-identical across calls") {
    const Scenario s = random_qubit_scenario(17, 2, 3);
    CHECK(scenario_to_json(s).dump() == scenario_to_json(s).dump());
    const AnalysisReport r = analyze(s);
    CHECK(analysis_to_json(r).dump() == analysis_to_json(r).dump());
}

TEST_CASE("scenario parsing accepts a measurements POVM block") {
    const Scenario s = optimal_attack({0.5, 2});
    Json j = scenario_to_json(s);
    const Eigen::Index n = s.dim_b;
    auto povm = [&](const ComplexMatrix& obs) {
        const ComplexMatrix id = ComplexMatrix::Identity(n, n);
        return Json::array(
            {matrix_to_json(0.5 * (id + obs)), matrix_to_json(0.5 * (id - obs))});
    };
    j.erase("observables");
    j["measurements"] = {{"m0", povm(s.obs_u)}, {"m1", povm(s.obs_v)}};
    const Scenario back = scenario_from_json(j);
    CHECK(max_abs(back.obs_u - s.obs_u) < 1e-15);
    CHECK(max_abs(back.obs_v - s.obs_v) < 1e-15);
}

TEST_CASE("scenario parsing rejects malformed input") {
    const Scenario s = optimal_attack({0.5, 2});
    Json j = scenario_to_json(s);
    j.erase("observables");
    CHECK_THROWS_AS(scenario_from_json(j), std::invalid_argument);

    Json bad_entry = scenario_to_json(s);
    bad_entry["states"]["rho"][0][0] = 1.0;  // not an [re, im] pair
    CHECK_THROWS_AS(scenario_from_json(bad_entry), std::invalid_argument);

    Json missing = scenario_to_json(s);
    missing.erase("dim_b");
    CHECK_THROWS(scenario_from_json(missing));
}

TEST_CASE("analysis JSON carries the expected sections") {
    const Json j = analysis_to_json(analyze(optimal_attack({0.5, 2}), 0.02));
    CHECK(j.at("schema") == 1);
    CHECK(j.at("qubit_assumption").at("satisfied") == true);
    CHECK(j.contains("secrecy"));
    CHECK(j.contains("blocks"));
    CHECK(j.contains("chain"));
    CHECK(j.at("robust").at("epsilon") == 0.02);

    const Json refused = analysis_to_json(analyze(bb84_counterexample()));
    CHECK(refused.at("qubit_assumption").at("satisfied") == false);
    CHECK(refused.at("qubit_assumption").at("support_dim") == 3);
    CHECK(refused.contains("warning"));
    CHECK_FALSE(refused.contains("blocks"));
}

TEST_CASE("campaign and mixture JSON serialize without loss of verdict") {
    CampaignConfig cfg;
    cfg.trials = 10;
    cfg.seed = 3;
    const Json cj = campaign_to_json(run_campaign(cfg));
    CHECK(cj.at("schema") == 1);
    CHECK(cj.at("trials_run") == 10);
    CHECK(cj.at("violations").empty());

    const Json mj = mixture_to_json(mixture_check({1, 2}, {0.5, 0.5}, 2, 2));
    CHECK(mj.at("schema") == 1);
    CHECK(mj.at("ok").is_boolean());

    const Json aj = audit_to_json(equality_audit({0.0, 0.5, 1.0}));
    CHECK(aj.at("points").size() == 3);
    CHECK(aj.at("max_gap").get<double>() < 1e-9);
}
