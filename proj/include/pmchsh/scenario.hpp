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
 * Prepare-and-measure CHSH scenario: four source states on the Bob x Eve
 * space, Bob's two binary observables, the PM CHSH correlator, and the
 * source geometry (alpha, beta, Z, X, Y, phi) derived under the qubit
 * source assumption.
 */
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmchsh/linalg.hpp"

namespace pmchsh {

/// Four source states on the (dim_b * dim_e)-dimensional Bob x Eve space
/// (E fast index) plus Bob's two binary observables on dim_b.
///
/// State labels: input (x, a) = (0,0) -> rho, (0,1) -> rho_p,
/// (1,0) -> sigma, (1,1) -> sigma_p.
struct Scenario {
    Eigen::Index dim_b = 0;
    Eigen::Index dim_e = 0;
    ComplexMatrix rho, rho_p, sigma, sigma_p;
    ComplexMatrix obs_u, obs_v;

    Eigen::Index total_dim() const { return dim_b * dim_e; }
};

/// Derived geometry of a qubit-assumption-satisfying scenario.
struct SourceGeometry {
    double alpha = 0.0;  // (1/2) ||rho - rho'||_1
    double beta = 0.0;   // (1/2) ||sigma - sigma'||_1
    double phi = 0.0;    // angle between Z and X, in [0, pi]
    ComplexMatrix z_op, x_op, y_op;
    ComplexMatrix subspace_projector;  // identity on the source subspace
    ComplexMatrix isometry;            // (dim_b*dim_e) x 2, orthonormal cols
};

/// The combined support of rho - rho' and sigma - sigma' exceeds two
/// dimensions; the qubit source assumption does not hold.
class QubitAssumptionViolated : public std::runtime_error {
  public:
    explicit QubitAssumptionViolated(int support_dim)
        : std::runtime_error("qubit assumption violated (support dim " +
                             std::to_string(support_dim) + ")"),
          support_dim_(support_dim) {}
    int support_dim() const { return support_dim_; }

  private:
    int support_dim_;
};

/// alpha or beta vanishes: the geometry operators Z or X are undefined.
class DegenerateDifference : public std::runtime_error {
  public:
    explicit DegenerateDifference(const std::string& which)
        : std::runtime_error("degenerate state difference: " + which) {}
};

struct Violation {
    std::string what;
    double magnitude = 0.0;
};

namespace detail {

inline void check_state(const ComplexMatrix& state, Eigen::Index dim,
                        const std::string& name, double tol,
                        std::vector<Violation>& out) {
    if (state.rows() != dim || state.cols() != dim) {
        out.push_back({name + ": wrong dimension",
                       static_cast<double>(state.rows())});
        return;
    }
    const double herm = max_abs(state - state.adjoint());
    if (herm > tol) out.push_back({name + ": not Hermitian", herm});
    ComplexMatrix h = 0.5 * (state + state.adjoint());
    EigenSystem sys = eig_hermitian(h, tol);
    const double min_eig = sys.values(sys.values.size() - 1);
    if (min_eig < -tol) out.push_back({name + ": negative eigenvalue", -min_eig});
    const double trace_dev = std::abs(state.trace().real() - 1.0) +
                             std::abs(state.trace().imag());
    if (trace_dev > tol) out.push_back({name + ": trace != 1", trace_dev});
}

}  // namespace detail

/// Lists every violated Scenario invariant with its magnitude; an empty
/// result means the scenario is valid at the given tolerance.
inline std::vector<Violation> validate(const Scenario& s,
                                       double tol = kDefaultTol) {
    std::vector<Violation> out;
    if (s.dim_b < 1 || s.dim_e < 1) {
        out.push_back({"dimensions must be >= 1", 0.0});
        return out;
    }
    const Eigen::Index n = s.total_dim();
    detail::check_state(s.rho, n, "rho", tol, out);
    detail::check_state(s.rho_p, n, "rho_p", tol, out);
    detail::check_state(s.sigma, n, "sigma", tol, out);
    detail::check_state(s.sigma_p, n, "sigma_p", tol, out);
    for (const auto* obs : {&s.obs_u, &s.obs_v}) {
        const std::string name = obs == &s.obs_u ? "obs_u" : "obs_v";
        if (obs->rows() != s.dim_b || obs->cols() != s.dim_b) {
            out.push_back({name + ": wrong dimension",
                           static_cast<double>(obs->rows())});
            continue;
        }
        const double herm = max_abs(*obs - obs->adjoint());
        if (herm > tol) out.push_back({name + ": not Hermitian", herm});
        ComplexMatrix sq = (*obs) * (*obs);
        sq -= ComplexMatrix::Identity(s.dim_b, s.dim_b);
        const double unit = max_abs(sq);
        if (unit > tol) out.push_back({name + ": not unitary", unit});
    }
    return out;
}

inline void require_valid(const Scenario& s, double tol = kDefaultTol) {
    auto report = validate(s, tol);
    if (!report.empty())
        throw std::invalid_argument("invalid scenario: " + report[0].what);
}

/// PM CHSH correlator S = (1/2) sum_{abxy} (-1)^{a+b+xy} P(b|axy) with
/// P(b|axy) = Tr[(M_{b|y} (x) I_E) rho_{x,a}].
inline double chsh_value(const Scenario& s, double tol = kDefaultTol) {
    require_valid(s, tol);
    const ComplexMatrix eye_b = ComplexMatrix::Identity(s.dim_b, s.dim_b);
    const ComplexMatrix eye_e = ComplexMatrix::Identity(s.dim_e, s.dim_e);
    const ComplexMatrix* states[2][2] = {{&s.rho, &s.rho_p},
                                         {&s.sigma, &s.sigma_p}};
    const ComplexMatrix* obs[2] = {&s.obs_u, &s.obs_v};
    double total = 0.0;
    for (int x = 0; x < 2; ++x) {
        for (int a = 0; a < 2; ++a) {
            for (int y = 0; y < 2; ++y) {
                for (int b = 0; b < 2; ++b) {
                    const double bsign = b == 0 ? 1.0 : -1.0;
                    ComplexMatrix m_by =
                        0.5 * (eye_b + bsign * (*obs[y]));
                    const double p =
                        (kron(m_by, eye_e) * (*states[x][a])).trace().real();
                    const int parity = (a + b + x * y) % 2;
                    total += (parity == 0 ? 1.0 : -1.0) * p;
                }
            }
        }
    }
    return 0.5 * total;
}

namespace detail {

/// Bloch vector of a traceless 2x2 Hermitian operator.
inline Eigen::Vector3d bloch_vector(const ComplexMatrix& m) {
    Eigen::Vector3d v;
    v(0) = 0.5 * (m(0, 1) + m(1, 0)).real();
    v(1) = 0.5 * (Complex(0, 1) * (m(0, 1) - m(1, 0))).real();
    v(2) = 0.5 * (m(0, 0) - m(1, 1)).real();
    return v;
}

inline ComplexMatrix from_bloch_vector(const Eigen::Vector3d& v) {
    ComplexMatrix m(2, 2);
    m(0, 0) = v(2);
    m(1, 1) = -v(2);
    m(0, 1) = Complex(v(0), -v(1));
    m(1, 0) = Complex(v(0), v(1));
    return m;
}

}  // namespace detail

/// Derives the source geometry of a scenario: the difference magnitudes
/// alpha, beta, the unit operators Z, X, the orthogonal operator Y, the
/// angle phi, and the two-dimensional support subspace.
///
/// Throws QubitAssumptionViolated if the combined support of the two
/// difference operators exceeds two dimensions, and DegenerateDifference
/// if alpha or beta is below tol.
inline SourceGeometry source_geometry(const Scenario& s,
                                      double tol = kDefaultTol) {
    require_valid(s, tol);
    SourceGeometry g;
    const ComplexMatrix dz = s.rho - s.rho_p;
    const ComplexMatrix dx = s.sigma - s.sigma_p;
    g.alpha = 0.5 * trace_norm(dz);
    g.beta = 0.5 * trace_norm(dx);
    if (g.alpha <= tol) throw DegenerateDifference("rho - rho_p");
    if (g.beta <= tol) throw DegenerateDifference("sigma - sigma_p");

    // Combined support of the two differences. Eigenvalues below a
    // scale-aware cutoff are treated as zero.
    const Eigen::Index n = s.total_dim();
    std::vector<ComplexVector> support;
    for (const ComplexMatrix* diff : {&dz, &dx}) {
        const double cutoff = 1e-9 * std::max(1.0, trace_norm(*diff));
        EigenSystem sys = eig_hermitian(*diff, tol);
        for (Eigen::Index i = 0; i < n; ++i)
            if (std::abs(sys.values(i)) > cutoff)
                support.push_back(sys.vectors.col(i));
    }
    ComplexMatrix span(n, static_cast<Eigen::Index>(support.size()));
    for (Eigen::Index i = 0; i < span.cols(); ++i) span.col(i) = support[i];
    Eigen::JacobiSVD<ComplexMatrix> svd(span, Eigen::ComputeThinU);
    const double sv_cut = 1e-7 * std::max(1.0, svd.singularValues()(0));
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > sv_cut) ++rank;
    if (rank > 2) throw QubitAssumptionViolated(rank);

    g.isometry = svd.matrixU().leftCols(2);
    g.subspace_projector = g.isometry * g.isometry.adjoint();
    g.z_op = dz / g.alpha;
    g.x_op = dx / g.beta;

    // Express Z and X in the subspace and fix Y from the Bloch frame.
    const ComplexMatrix z2 = g.isometry.adjoint() * g.z_op * g.isometry;
    const ComplexMatrix x2 = g.isometry.adjoint() * g.x_op * g.isometry;
    Eigen::Vector3d zv = detail::bloch_vector(z2);
    Eigen::Vector3d xv = detail::bloch_vector(x2);
    Eigen::Vector3d yv = zv.cross(xv);
    const double sin_phi = yv.norm();
    const double cos_phi = zv.dot(xv);
    g.phi = std::atan2(sin_phi, cos_phi);
    if (sin_phi > 1e-8) {
        yv /= sin_phi;
    } else {
        // Z and X are (anti)parallel; Y is any unit vector orthogonal to Z.
        // Pick the fixed axis with the larger rejection norm.
        Eigen::Vector3d e1(1, 0, 0), e2(0, 1, 0);
        Eigen::Vector3d r1 = e1 - e1.dot(zv) * zv;
        Eigen::Vector3d r2 = e2 - e2.dot(zv) * zv;
        yv = r1.norm() >= r2.norm() ? r1.normalized() : r2.normalized();
    }
    g.y_op = g.isometry * detail::from_bloch_vector(yv) * g.isometry.adjoint();

    // [Z, X] = 2i sin(phi) Y with sin(phi) >= 0; flip Y if the convention
    // came out reversed.
    if (sin_phi > 1e-8) {
        ComplexMatrix comm = g.z_op * g.x_op - g.x_op * g.z_op;
        ComplexMatrix expect = Complex(0, 2) * sin_phi * g.y_op;
        if (max_abs(comm - expect) > max_abs(comm + expect)) g.y_op = -g.y_op;
    }
    return g;
}

/// CHSH value computed from Bob's observables and the source geometry,
/// S = (1/2) Tr[U_B (alpha Z_B + beta X_B) + V_B (alpha Z_B - beta X_B)].
/// Agrees with chsh_value on every scenario the geometry derives from.
inline double chsh_from_observables(const Scenario& s,
                                    const SourceGeometry& g) {
    const ComplexMatrix z_b =
        partial_trace(g.z_op, s.dim_b, s.dim_e, Subsystem::B);
    const ComplexMatrix x_b =
        partial_trace(g.x_op, s.dim_b, s.dim_e, Subsystem::B);
    if (z_b.rows() != s.obs_u.rows())
        throw std::invalid_argument(
            "chsh_from_observables: geometry/scenario mismatch");
    return 0.5 * (s.obs_u * (g.alpha * z_b + g.beta * x_b) +
                  s.obs_v * (g.alpha * z_b - g.beta * x_b))
                     .trace()
                     .real();
}

}  // namespace pmchsh
