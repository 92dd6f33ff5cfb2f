#pragma once

// Dense complex matrix toolkit: norms, SVD and polar factors, PSD square roots,
// commutator residuals and subspace intersections.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "corners/errors.hpp"

namespace corners {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Relative tolerances shared by the decompositions and the completion
/// constructors. All must be strictly positive.
struct Tolerances {
    double decomposition_tol = 1e-10;
    double residual_tol = 1e-10;
    double commutation_tol = 1e-10;

    void validate() const {
        if (!(decomposition_tol > 0) || !(residual_tol > 0) || !(commutation_tol > 0)) {
            throw std::invalid_argument("tolerances must be strictly positive");
        }
    }
};

/// T = left * diag(singulars) * right. Note that `right` is used as is and is
/// not adjointed: a routine returning T = W S X^* maps to right = X^*.
struct SvdFactors {
    ComplexMatrix left;
    RealVector singulars;
    ComplexMatrix right;

    ComplexMatrix reconstruct() const {
        return left * singulars.cast<Complex>().asDiagonal() * right;
    }
};

/// T = unitary_part * psd_part.
struct PolarFactors {
    ComplexMatrix unitary_part;
    ComplexMatrix psd_part;
};

inline void require_finite(const ComplexMatrix& t, std::string_view what = "matrix") {
    if (!t.allFinite()) {
        throw NonFiniteError(std::string(what) + ": non-finite entry");
    }
}

inline void require_square(const ComplexMatrix& t, std::string_view what = "matrix") {
    if (t.rows() != t.cols()) {
        throw ShapeError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(t.rows()) + "x" + std::to_string(t.cols()));
    }
}

inline void require_same_shape(const ComplexMatrix& x, const ComplexMatrix& y,
                               std::string_view what) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw ShapeError(std::string(what) + ": shape mismatch (" + std::to_string(x.rows()) +
                         "x" + std::to_string(x.cols()) + " vs " + std::to_string(y.rows()) +
                         "x" + std::to_string(y.cols()) + ")");
    }
}

inline ComplexMatrix identity(Index n) { return ComplexMatrix::Identity(n, n); }

inline double frobenius_norm(const ComplexMatrix& t) { return t.norm(); }

inline RealVector singular_values(const ComplexMatrix& t) {
    if (t.size() == 0) return RealVector(0);
    Eigen::JacobiSVD<ComplexMatrix> svd(t);
    return svd.singularValues();
}

inline double operator_norm(const ComplexMatrix& t) {
    if (t.size() == 0) return 0.0;
    return singular_values(t)(0);
}

inline SvdFactors svd(const ComplexMatrix& t) {
    require_finite(t, "svd input");
    require_square(t, "svd input");
    Eigen::JacobiSVD<ComplexMatrix> dec(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {dec.matrixU(), dec.singularValues(), dec.matrixV().adjoint()};
}

/// Polar factors gauge-fixed through the SVD: unitary = left*right and
/// psd = right^* diag(s) right, so singular inputs still get a unitary factor.
inline PolarFactors polar(const ComplexMatrix& t) {
    const SvdFactors f = svd(t);
    return {f.left * f.right,
            f.right.adjoint() * f.singulars.cast<Complex>().asDiagonal() * f.right};
}

/// ||X - X^*||_F / max(1, ||X||_F)
inline double hermitian_residual(const ComplexMatrix& x) {
    return (x - x.adjoint()).norm() / std::max(1.0, x.norm());
}

inline ComplexMatrix psd_sqrt(const ComplexMatrix& p, const Tolerances& tol = {}) {
    require_finite(p, "psd_sqrt input");
    require_square(p, "psd_sqrt input");
    const double herm = hermitian_residual(p);
    if (herm > tol.commutation_tol) {
        throw ValidationError("psd_sqrt: input is hermitian", herm, tol.commutation_tol);
    }
    if (p.size() == 0) return p;
    const ComplexMatrix sym = 0.5 * (p + p.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sym);
    RealVector lambda = eig.eigenvalues();
    const double floor = -tol.decomposition_tol * std::max(1.0, lambda.cwiseAbs().maxCoeff());
    for (Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < floor) {
            throw ValidationError("psd_sqrt: input is positive semidefinite", lambda(i), floor);
        }
        lambda(i) = std::sqrt(std::max(0.0, lambda(i)));
    }
    const ComplexMatrix& v = eig.eigenvectors();
    return v * lambda.cast<Complex>().asDiagonal() * v.adjoint();
}

/// T^* T - T T^*
inline ComplexMatrix self_commutator(const ComplexMatrix& t) {
    return t.adjoint() * t - t * t.adjoint();
}

/// ||T^*T - TT^*||_F / max(1, ||T||_F^2)
inline double normality_residual(const ComplexMatrix& t) {
    require_square(t, "normality_residual input");
    return self_commutator(t).norm() / std::max(1.0, t.squaredNorm());
}

/// ||XY - YX||_F / max(1, ||X||_F ||Y||_F)
inline double commutation_residual(const ComplexMatrix& x, const ComplexMatrix& y) {
    require_square(x, "commutation_residual");
    require_same_shape(x, y, "commutation_residual");
    return (x * y - y * x).norm() / std::max(1.0, x.norm() * y.norm());
}

/// ||X Y||_F / max(1, ||X||_F ||Y||_F); used for annihilation constraints XY = 0.
inline double product_residual(const ComplexMatrix& x, const ComplexMatrix& y) {
    return (x * y).norm() / std::max(1.0, x.norm() * y.norm());
}

/// ||N^* N - scale^2 I||_F / max(1, scale^2)
inline double unitarity_residual(const ComplexMatrix& n, double scale = 1.0) {
    require_square(n, "unitarity_residual input");
    const double s2 = scale * scale;
    return (n.adjoint() * n - s2 * identity(n.rows())).norm() / std::max(1.0, s2);
}

/// Numerical rank with cutoff max(rows, cols) * eps * s_max.
inline Index numerical_rank(const RealVector& singulars, Index rows, Index cols) {
    if (singulars.size() == 0 || singulars(0) == 0.0) return 0;
    const double cutoff = static_cast<double>(std::max(rows, cols)) *
                          std::numeric_limits<double>::epsilon() * singulars(0);
    Index r = 0;
    while (r < singulars.size() && singulars(r) > cutoff) ++r;
    return r;
}

inline Index rank(const ComplexMatrix& t) {
    return numerical_rank(singular_values(t), t.rows(), t.cols());
}

/// dim(V_1 ∩ ... ∩ V_k) where V_j is the column span of bases[j].
///
/// Each V_j is represented by an orthonormal basis of its orthogonal complement;
/// x lies in every V_j iff it is annihilated by all complement projectors, so
/// the intersection is the kernel of the stacked complement rows.
inline Index subspace_intersection_dimension(std::span<const ComplexMatrix> bases) {
    if (bases.empty()) throw ShapeError("subspace_intersection_dimension: no subspaces");
    const Index n = bases.front().rows();
    std::vector<ComplexMatrix> complements;
    Index stacked_rows = 0;
    for (const ComplexMatrix& basis : bases) {
        if (basis.rows() != n) {
            throw ShapeError("subspace_intersection_dimension: inconsistent ambient dimension (" +
                             std::to_string(basis.rows()) + " vs " + std::to_string(n) + ")");
        }
        require_finite(basis, "subspace basis");
        Index r = 0;
        ComplexMatrix u = identity(n);
        if (basis.cols() > 0) {
            Eigen::JacobiSVD<ComplexMatrix> dec(basis, Eigen::ComputeFullU);
            r = numerical_rank(dec.singularValues(), basis.rows(), basis.cols());
            u = dec.matrixU();
        }
        complements.push_back(u.rightCols(n - r).adjoint());
        stacked_rows += n - r;
    }
    if (stacked_rows == 0) return n;
    ComplexMatrix stacked(stacked_rows, n);
    Index row = 0;
    for (const ComplexMatrix& c : complements) {
        stacked.middleRows(row, c.rows()) = c;
        row += c.rows();
    }
    return n - rank(stacked);
}

}  // namespace corners
