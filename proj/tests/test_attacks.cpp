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
#include "pmchsh/entropy.hpp"
#include "test_helpers.hpp"

using namespace pmchsh;
using namespace pmchsh::testing;

TEST_CASE("optimal attack family traces the tight S-D curve") {
    for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const Scenario s = optimal_attack({f, 2});
        CHECK(validate(s).empty());
        const double s_val = chsh_value(s);
        auto [rho_e, rho_p_e] = eve_marginals(s);
        const double d = trace_distance(rho_e, rho_p_e);
        CHECK(s_val ==
              doctest::Approx(2.0 * std::sqrt(1.0 + f * f)).epsilon(1e-12));
        CHECK(d == doctest::Approx(std::sqrt(1.0 - f * f)).epsilon(1e-11));
        CHECK(std::abs(d - trace_distance_bound(s_val)) < 1e-9);
    }
}

TEST_CASE("optimal attack input validation") {
    CHECK_THROWS_AS(optimal_attack({-0.1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(optimal_attack({1.1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(optimal_attack({0.5, 1}), std::invalid_argument);
}

TEST_CASE("optimal attack satisfies the qubit assumption in larger dim_e") {
    const Scenario s = optimal_attack({0.3, 4});
    const SourceGeometry g = source_geometry(s);
    CHECK(g.alpha > 0.0);
    CHECK(chsh_value(s) ==
          doctest::Approx(2.0 * std::sqrt(1.09)).epsilon(1e-12));
}

TEST_CASE("optimal_bob_observables attains the closed-form S") {
    const Scenario s = optimal_attack({0.6, 2});
    const ComplexMatrix z_b =
        partial_trace(s.rho - s.rho_p, s.dim_b, s.dim_e, Subsystem::B);
    const ComplexMatrix x_b =
        partial_trace(s.sigma - s.sigma_p, s.dim_b, s.dim_e, Subsystem::B);
    const double expect = 0.5 * trace_norm(z_b + x_b) +
                          0.5 * trace_norm(z_b - x_b);
    CHECK(chsh_value(s) == doctest::Approx(expect).epsilon(1e-12));
    CHECK_THROWS_AS(
        optimal_bob_observables(ComplexMatrix::Zero(2, 3).eval(), x_b, 1, 1),
        std::invalid_argument);
}

TEST_CASE("BB84 counterexample hits Tsirelson with full leakage") {
    const Scenario s = bb84_counterexample();
    CHECK(validate(s).empty());
    CHECK(chsh_value(s) ==
          doctest::Approx(2.0 * std::numbers::sqrt2).epsilon(1e-12));
    auto [rho_e, rho_p_e] = eve_marginals(s);
    CHECK(trace_distance(rho_e, rho_p_e) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random qubit scenarios are valid and deterministic") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Scenario s = random_qubit_scenario(seed, 2 + seed % 3,
                                                 1 + seed % 4);
        CHECK(validate(s).empty());
        const Scenario again = random_qubit_scenario(seed, 2 + seed % 3,
                                                     1 + seed % 4);
        CHECK(max_abs(s.rho - again.rho) == 0.0);
        CHECK(max_abs(s.obs_u - again.obs_u) == 0.0);
    }
    const Scenario a = random_qubit_scenario(1, 3, 2);
    const Scenario b = random_qubit_scenario(2, 3, 2);
    CHECK(max_abs(a.rho - b.rho) > 1e-3);
    CHECK_THROWS_AS(random_qubit_scenario(0, 1, 1), std::invalid_argument);
}

TEST_CASE("perturbed scenario stays close in S and deviation") {
    const Scenario base = optimal_attack({1.0, 2});
    const SourceGeometry g = source_geometry(base);
    const double s0 = chsh_value(base);
    for (double m : {0.001, 0.01, 0.05, 0.1}) {
        const Scenario pert = perturbed_scenario(base, m, 7);
        CHECK(validate(pert).empty());
        CHECK(std::abs(chsh_value(pert) - s0) <= 4.0 * m + 1e-9);
        CHECK(qubit_deviation(pert, g.z_op, g.x_op, g.alpha, g.beta) <=
              m + 1e-9);
    }
    CHECK(max_abs(perturbed_scenario(base, 0.0, 7).rho - base.rho) == 0.0);
    CHECK_THROWS_AS(perturbed_scenario(base, 0.2, 7), std::invalid_argument);
    CHECK_THROWS_AS(perturbed_scenario(base, -0.01, 7),
                    std::invalid_argument);
}

TEST_CASE("optimize_attack approaches the analytic curve") {
    for (double target : {2.0, 2.4}) {
        const OptimizedAttack best = optimize_attack(target, 2, 6, 150, 11);
        CHECK(best.s_achieved >= target - 1e-9);
        CHECK(best.best_d <= trace_distance_bound(best.s_achieved) + 1e-6);
        CHECK(best.best_d >=
              trace_distance_bound(target) - 1e-3);
        CHECK(validate(best.scenario).empty());
        CHECK(chsh_value(best.scenario) ==
              doctest::Approx(best.s_achieved).epsilon(1e-10));
    }
}

TEST_CASE("optimize_attack is deterministic for a fixed seed") {
    const OptimizedAttack a = optimize_attack(2.3, 2, 4, 120, 5);
    const OptimizedAttack b = optimize_attack(2.3, 2, 4, 120, 5);
    CHECK(a.best_d == b.best_d);
    CHECK(a.s_achieved == b.s_achieved);
    CHECK(max_abs(a.scenario.rho - b.scenario.rho) == 0.0);
}

TEST_CASE("optimize_attack input validation") {
    CHECK_THROWS_AS(optimize_attack(1.9, 2, 4, 50, 0), std::invalid_argument);
    CHECK_THROWS_AS(optimize_attack(2.9, 2, 4, 50, 0), std::invalid_argument);
    CHECK_THROWS_AS(optimize_attack(2.2, 1, 4, 50, 0), std::invalid_argument);
    CHECK_THROWS_AS(optimize_attack(2.2, 2, 0, 50, 0), std::invalid_argument);
}
