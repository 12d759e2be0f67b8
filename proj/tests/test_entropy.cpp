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

TEST_CASE("Eve marginals of the optimal attack are the conditional states") {
    const Scenario s = optimal_attack({0.6, 2});
    auto [rho_e, rho_p_e] = eve_marginals(s);
    ComplexVector psi = basis_ket(2, 0);
    ComplexVector psi_p(2);
    psi_p(0) = 0.6;
    psi_p(1) = 0.8;
    CHECK(max_abs(rho_e - proj(psi)) < 1e-14);
    CHECK(max_abs(rho_p_e - proj(psi_p)) < 1e-14);
}

TEST_CASE("Eve marginals of a product source carry no leakage") {
    Rng rng(7);
    ComplexMatrix omega = random_density(rng, 3);
    Scenario s;
    s.dim_b = 2;
    s.dim_e = 3;
    s.rho = kron(proj(basis_ket(2, 0)), omega);
    s.rho_p = kron(proj(basis_ket(2, 1)), omega);
    ComplexVector plus(2);
    plus(0) = plus(1) = 1.0 / std::numbers::sqrt2;
    ComplexVector minus = plus;
    minus(1) = -minus(1);
    s.sigma = kron(proj(plus), omega);
    s.sigma_p = kron(proj(minus), omega);
    s.obs_u = pauli_z();
    s.obs_v = pauli_x();
    auto [rho_e, rho_p_e] = eve_marginals(s);
    CHECK(max_abs(rho_e - omega) < 1e-14);
    CHECK(max_abs(rho_p_e - omega) < 1e-14);
    CHECK(trace_distance(rho_e, rho_p_e) < 1e-14);
}

TEST_CASE("BB84 counterexample leaks everything") {
    auto [rho_e, rho_p_e] = eve_marginals(bb84_counterexample());
    CHECK(max_abs(rho_e - proj(basis_ket(2, 0))) < 1e-14);
    CHECK(max_abs(rho_p_e - proj(basis_ket(2, 1))) < 1e-14);
    CHECK(trace_distance(rho_e, rho_p_e) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("trace distance basics") {
    CHECK(trace_distance(proj(basis_ket(2, 0)), proj(basis_ket(2, 1))) ==
          doctest::Approx(1.0).epsilon(1e-14));
    Rng rng(13);
    ComplexMatrix tau = random_density(rng, 4);
    CHECK(trace_distance(tau, tau) == 0.0);
    CHECK_THROWS_AS(trace_distance(identity(2), identity(3)),
                    std::invalid_argument);
    auto [rho_e, rho_p_e] = eve_marginals(optimal_attack({0.6, 2}));
    CHECK(trace_distance(rho_e, rho_p_e) ==
          doctest::Approx(0.8).epsilon(1e-13));
}

TEST_CASE("min entropy from trace distance") {
    CHECK(min_entropy_from_distance(0.0) == 1.0);
    CHECK(min_entropy_from_distance(1.0) == 0.0);
    CHECK(min_entropy_from_distance(std::numbers::sqrt2 - 1.0) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(min_entropy_from_distance(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(min_entropy_from_distance(1.5), std::invalid_argument);
}

TEST_CASE("CHSH min entropy bound endpoints and interior") {
    CHECK(chsh_min_entropy_bound(kTsirelson) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(chsh_min_entropy_bound(2.0) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(chsh_min_entropy_bound(2.4) ==
          doctest::Approx(1.0 - std::log2(1.0 + std::sqrt(0.56)))
              .epsilon(1e-13));
}

TEST_CASE("trace distance bound endpoints") {
    CHECK(trace_distance_bound(kTsirelson) == 0.0);
    CHECK(trace_distance_bound(0.0) ==
          doctest::Approx(std::numbers::sqrt2).epsilon(1e-14));
    CHECK(trace_distance_bound(2.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("CHSH bound is monotone on [2, 2 sqrt 2]") {
    double prev = chsh_min_entropy_bound(2.0);
    for (double s = 2.0; s <= kTsirelson; s += 1e-3) {
        const double cur = chsh_min_entropy_bound(s);
        CHECK(cur >= prev - 1e-12);
        prev = cur;
    }
}

TEST_CASE("robust bound reduces to the plain bound at epsilon = 0") {
    for (int i = 0; i <= 100; ++i) {
        const double s = 2.0 + (kTsirelson - 2.0) * i / 100.0;
        CHECK(robust_min_entropy_bound(s, 0.0) == chsh_min_entropy_bound(s));
    }
    CHECK_THROWS_AS(robust_min_entropy_bound(2.5, -0.1),
                    std::invalid_argument);
}

TEST_CASE("robust bound is monotone nonincreasing in epsilon") {
    double prev = robust_min_entropy_bound(kTsirelson, 0.0);
    for (double eps = 0.0; eps <= 0.1; eps += 0.005) {
        const double cur = robust_min_entropy_bound(kTsirelson, eps);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    const double expected =
        1.0 - std::log2(1.0 +
                        std::sqrt(2.0 - std::pow(kTsirelson - 0.04, 2) / 4.0) +
                        0.01);
    CHECK(robust_min_entropy_bound(kTsirelson, 0.01) ==
          doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("qubit deviation vanishes for an exact qubit source") {
    const Scenario s = optimal_attack({0.7, 2});
    const SourceGeometry g = source_geometry(s);
    const double eps = qubit_deviation(s, g.z_op, g.x_op, g.alpha, g.beta);
    CHECK(eps < 1e-10);
}

TEST_CASE("qubit deviation bounds a constructed perturbation") {
    const Scenario base = optimal_attack({1.0, 2});
    const SourceGeometry g = source_geometry(base);
    const Scenario pert = perturbed_scenario(base, 0.01, 42);
    const double eps = qubit_deviation(pert, g.z_op, g.x_op, g.alpha, g.beta);
    CHECK(eps <= 0.01 + 1e-9);
}

TEST_CASE("qubit deviation rejects invalid candidates") {
    const Scenario s = optimal_attack({0.7, 2});
    const SourceGeometry g = source_geometry(s);
    CHECK_THROWS_AS(
        qubit_deviation(s, 2.0 * g.z_op, g.x_op, g.alpha, g.beta),
        std::invalid_argument);
    ComplexMatrix traceful = g.z_op;
    traceful(0, 0) += 0.5;
    CHECK_THROWS_AS(qubit_deviation(s, traceful, g.x_op, g.alpha, g.beta),
                    std::invalid_argument);
}

TEST_CASE("nearest qubit candidate is a valid geometry candidate") {
    // Exact rank-2 difference: the candidate recovers it exactly, with the
    // half trace norm as its weight.
    const Scenario s = optimal_attack({0.7, 2});
    const ComplexMatrix dz = s.rho - s.rho_p;
    const QubitCandidate zc = nearest_qubit_candidate(dz);
    CHECK(std::abs(zc.op.trace()) < 1e-10);
    CHECK(0.5 * trace_norm(zc.op) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(zc.weight == doctest::Approx(0.5 * trace_norm(dz)).epsilon(1e-10));
    CHECK(max_abs(zc.weight * zc.op - dz) < 1e-10);

    // Higher-rank input: the truncation keeps at most two directions, so
    // the candidate passes the deviation preconditions and reports a
    // strictly positive deviation.
    Rng rng(19);
    const ComplexMatrix h = random_hermitian(rng, 4);
    const QubitCandidate hc = nearest_qubit_candidate(h);
    CHECK(std::abs(hc.op.trace()) < 1e-10);
    CHECK(0.5 * trace_norm(hc.op) == doctest::Approx(1.0).epsilon(1e-10));
    EigenSystem sys = eig_hermitian(hc.op);
    int rank = 0;
    for (Eigen::Index i = 0; i < sys.values.size(); ++i)
        if (std::abs(sys.values(i)) > 1e-9) ++rank;
    CHECK(rank <= 2);
    CHECK(0.5 * trace_norm(h - std::min(hc.weight, 1.0) * hc.op) > 0.0);
}

TEST_CASE("secrecy report is internally consistent") {
    const Scenario s = optimal_attack({0.6, 2});
    const SecrecyReport r = secrecy_report(s);
    CHECK(r.min_entropy ==
          doctest::Approx(1.0 - std::log2(1.0 + r.trace_distance))
              .epsilon(1e-12));
    CHECK(r.bound_slack == doctest::Approx(r.bound_rhs - r.trace_distance)
                               .epsilon(1e-12));
    CHECK(r.bound_slack >= -1e-7);
    CHECK(r.trace_distance == doctest::Approx(0.8).epsilon(1e-12));
}
