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
 * Dense complex linear algebra on small operators: Hermitian
 * eigendecomposition, trace norm, Kronecker product, partial trace, and
 * operator validity checks. All functions are pure.
 */
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pmchsh {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Default tolerance for operator validity checks.
inline constexpr double kDefaultTol = 1e-9;

/// Subsystem tag for partial traces over a bipartite B (slow) x E (fast)
/// index layout.
enum class Subsystem { B, E };

/// Largest entrywise absolute value.
inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kDefaultTol) {
    if (m.rows() != m.cols()) return false;
    return max_abs(m - m.adjoint()) <= tol;
}

/// True iff m is Hermitian and squares to the identity, both within tol.
inline bool is_hermitian_unitary(const ComplexMatrix& m,
                                 double tol = kDefaultTol) {
    if (m.rows() != m.cols()) return false;
    if (!is_hermitian(m, tol)) return false;
    ComplexMatrix sq = m * m;
    sq -= ComplexMatrix::Identity(m.rows(), m.cols());
    return max_abs(sq) <= tol;
}

/// Kronecker product a (x) b. The second factor carries the fast index.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

/// Partial trace of an operator on the (dim_b * dim_e)-dimensional space,
/// with E as the fast index. keep selects which marginal survives.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, Eigen::Index dim_b,
                                   Eigen::Index dim_e, Subsystem keep) {
    const Eigen::Index n = dim_b * dim_e;
    if (m.rows() != n || m.cols() != n)
        throw std::invalid_argument(
            "partial_trace: operator dimension does not match dim_b*dim_e");
    if (keep == Subsystem::B) {
        ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
        for (Eigen::Index i = 0; i < dim_b; ++i)
            for (Eigen::Index j = 0; j < dim_b; ++j)
                for (Eigen::Index e = 0; e < dim_e; ++e)
                    out(i, j) += m(i * dim_e + e, j * dim_e + e);
        return out;
    }
    ComplexMatrix out = ComplexMatrix::Zero(dim_e, dim_e);
    for (Eigen::Index e = 0; e < dim_e; ++e)
        for (Eigen::Index f = 0; f < dim_e; ++f)
            for (Eigen::Index b = 0; b < dim_b; ++b)
                out(e, f) += m(b * dim_e + e, b * dim_e + f);
    return out;
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues are sorted in
/// descending order; eigenvector columns follow the same order.
struct EigenSystem {
    RealVector values;
    ComplexMatrix vectors;
};

inline EigenSystem eig_hermitian(const ComplexMatrix& m,
                                 double tol = kDefaultTol) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("eig_hermitian: matrix is not square");
    const double dev = max_abs(m - m.adjoint());
    if (dev > tol)
        throw std::invalid_argument(
            "eig_hermitian: input not Hermitian (deviation " +
            std::to_string(dev) + ")");
    // Symmetrize so the solver sees an exactly Hermitian operator.
    ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eig_hermitian: eigensolver failed");
    const Eigen::Index n = m.rows();
    EigenSystem sys;
    sys.values = RealVector(n);
    sys.vectors = ComplexMatrix(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sys.values(i) = solver.eigenvalues()(n - 1 - i);
        sys.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return sys;
}

/// Trace norm ||m||_1 = Tr sqrt(m^dag m). Hermitian inputs take the cheaper
/// sum-of-|eigenvalues| path; general square matrices go through an SVD.
inline double trace_norm(const ComplexMatrix& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("trace_norm: matrix is not square");
    if (m.size() == 0) return 0.0;
    if (is_hermitian(m, 1e-12 * std::max(1.0, max_abs(m)))) {
        EigenSystem sys = eig_hermitian(m, 1e-10 * std::max(1.0, max_abs(m)));
        return sys.values.cwiseAbs().sum();
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues().sum();
}

/// Hermitian unitary sign of a Hermitian operator: +1 on the nonnegative
/// eigenspace, -1 on the negative one. Satisfies
/// (1/2) Tr[sign_operator(m) m] = (1/2) ||m||_1.
inline ComplexMatrix sign_operator(const ComplexMatrix& m,
                                   double tol = kDefaultTol) {
    EigenSystem sys = eig_hermitian(m, tol);
    const Eigen::Index n = m.rows();
    RealVector signs(n);
    for (Eigen::Index i = 0; i < n; ++i)
        signs(i) = sys.values(i) >= 0.0 ? 1.0 : -1.0;
    return sys.vectors * signs.asDiagonal() * sys.vectors.adjoint();
}

/// Real part of Tr[a b].
inline double trace_product_real(const ComplexMatrix& a,
                                 const ComplexMatrix& b) {
    return (a * b).trace().real();
}

}  // namespace pmchsh
