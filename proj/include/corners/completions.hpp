#pragma once

// Constructive normal and unitary completions of [[?, B], [C, ?]].

#include <optional>
#include <string>

#include "corners/block.hpp"
#include "corners/linalg.hpp"

namespace corners {

/// Residuals certifying a completion. `unitarity_residual` is present for
/// constructions that are a scalar multiple of a unitary, measured as
/// ||N^*N - scale^2 I||_F / max(1, scale^2).
struct Certificate {
    double normality_residual = 0;
    std::optional<double> unitarity_residual;
    double scale = 1;
    double corner_b_residual = 0;  // ||N_12 - B||_F
    double corner_c_residual = 0;  // ||N_21 - C||_F
};

struct CompletionResult {
    BlockMatrix completion;
    Certificate certificate;

    ComplexMatrix matrix() const { return completion.full(); }
};

/// Hermitian parameters of the C = B^* recipes. `h_first` is H_1 in the normal
/// recipe and H_0 in the unitary one.
struct HermitianCornerParams {
    ComplexMatrix k0;
    ComplexMatrix k2;
    ComplexMatrix h_first;
    ComplexMatrix h2;

    static HermitianCornerParams zero(Index n) {
        const ComplexMatrix z = ComplexMatrix::Zero(n, n);
        return {z, z, z, z};
    }
};

enum class ConstraintMode { checked, unchecked };

namespace detail {

inline CompletionResult certify(BlockMatrix blocks, const ComplexMatrix& b, const ComplexMatrix& c,
                                std::optional<double> unitary_scale) {
    const ComplexMatrix full = blocks.full();
    Certificate cert;
    cert.normality_residual = normality_residual(full);
    if (unitary_scale) {
        cert.scale = *unitary_scale;
        cert.unitarity_residual = unitarity_residual(full, *unitary_scale);
    }
    cert.corner_b_residual = (blocks.b - b).norm();
    cert.corner_c_residual = (blocks.c - c).norm();
    return {std::move(blocks), cert};
}

inline void check(const std::string& condition, double measured, double tol) {
    if (!(measured <= tol)) throw ValidationError(condition, measured, tol);
}

inline void check_params_shape(const HermitianCornerParams& p, Index n) {
    const auto expect = [n](const ComplexMatrix& m, const char* name) {
        if (m.rows() != n || m.cols() != n) {
            throw ShapeError(std::string("parameter ") + name + ": expected " + std::to_string(n) +
                             "x" + std::to_string(n) + ", got " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
        }
        require_finite(m, name);
    };
    expect(p.k0, "K0");
    expect(p.k2, "K2");
    expect(p.h_first, "Hfirst");
    expect(p.h2, "H2");
}

inline void check_params_hermitian(const HermitianCornerParams& p, double tol) {
    check("K0 hermitian", hermitian_residual(p.k0), tol);
    check("K2 hermitian", hermitian_residual(p.k2), tol);
    check("Hfirst hermitian", hermitian_residual(p.h_first), tol);
    check("H2 hermitian", hermitian_residual(p.h2), tol);
}

}  // namespace detail

/// [[B^*, B], [B, B^*]]; normal for every square B.
inline CompletionResult symmetric_completion(const ComplexMatrix& b) {
    require_finite(b, "B");
    require_square(b, "B");
    const ComplexMatrix a = b.adjoint();
    return detail::certify(assemble(a, b, b, a), b, b, std::nullopt);
}

/// Unitary [[A, B], [B, A]] for a contraction B = U S V, A = U (i (I - S^2)^{1/2}) V.
inline CompletionResult symmetric_unitary_completion(const ComplexMatrix& b,
                                                     const Tolerances& tol = {}) {
    require_finite(b, "B");
    require_square(b, "B");
    const SvdFactors f = svd(b);
    const double norm = f.singulars.size() ? f.singulars(0) : 0.0;
    detail::check("||B|| <= 1", norm - 1.0, tol.decomposition_tol);
    const RealVector s = f.singulars.cwiseMin(1.0);
    const RealVector q = (1.0 - s.array().square()).max(0.0).sqrt().matrix();
    const ComplexMatrix a = f.left * (kI * q.cast<Complex>()).asDiagonal() * f.right;
    return detail::certify(assemble(a, b, b, a), b, b, 1.0);
}

/// ||B|| times the unitary completion of B / ||B||; its norm ||B|| is the least
/// possible since B is a submatrix.
inline CompletionResult least_norm_symmetric_completion(const ComplexMatrix& b,
                                                        const Tolerances& tol = {}) {
    require_finite(b, "B");
    require_square(b, "B");
    const double norm = operator_norm(b);
    if (norm == 0.0) {
        const ComplexMatrix z = ComplexMatrix::Zero(b.rows(), b.cols());
        return detail::certify(assemble(z, b, b, z), b, b, 0.0);
    }
    const CompletionResult unit = symmetric_unitary_completion(b / norm, tol);
    const ComplexMatrix a = norm * unit.completion.a;
    return detail::certify(assemble(a, b, b, a), b, b, norm);
}

/// Completion that is s_1 times a unitary, for corners sharing all singular values.
///
/// With B = U1 S U2 and C = V1 S V2 (S taken from B), the completion is
/// s_1 (U1 ⊕ V1) [[Q, S/s_1], [S/s_1, -Q]] (V2 ⊕ U2) where Q = (I - S^2/s_1^2)^{1/2}.
inline CompletionResult equal_singular_value_completion(const ComplexMatrix& b,
                                                        const ComplexMatrix& c,
                                                        const Tolerances& tol = {}) {
    require_finite(b, "B");
    require_finite(c, "C");
    require_square(b, "B");
    require_same_shape(b, c, "equal_singular_value_completion");
    const SvdFactors fb = svd(b);
    const SvdFactors fc = svd(c);
    const Index n = b.rows();
    const double s1 = n ? fb.singulars(0) : 0.0;
    const double gap = n ? (fb.singulars - fc.singulars).cwiseAbs().maxCoeff() : 0.0;
    detail::check("singular values of B and C agree", gap / std::max(1.0, s1),
                  tol.decomposition_tol);
    if (s1 == 0.0) {
        const ComplexMatrix z = ComplexMatrix::Zero(n, n);
        return detail::certify(assemble(z, b, c, z), b, c, 0.0);
    }
    const RealVector shat = fb.singulars / s1;
    const RealVector q = (1.0 - shat.array().square()).max(0.0).sqrt().matrix();
    const auto qd = q.cast<Complex>().asDiagonal();
    // Diagonal blocks of s1 (U1 ⊕ V1) [[Q, S], [S, -Q]] (V2 ⊕ U2); the corners
    // s1 U1 S U2 and s1 V1 S V2 are B and C up to round-off and are placed as given.
    ComplexMatrix a = s1 * fb.left * qd * fc.right;
    ComplexMatrix d = -s1 * fc.left * qd * fb.right;
    return detail::certify(assemble(std::move(a), b, c, std::move(d)), b, c, s1);
}

/// Residuals of the C = B^* normality criterion: A normal, D normal and
/// (A - A^*) B = B (D - D^*). N = [[A, B], [B^*, D]] is normal iff all vanish.
struct HermitianCornerCheck {
    double a_normality = 0;
    double d_normality = 0;
    double intertwining = 0;  // ||(A - A^*)B - B(D - D^*)||_F / max(1, ||N||_F^2)

    bool all_below(double tol) const {
        return a_normality < tol && d_normality < tol && intertwining < tol;
    }
};

inline HermitianCornerCheck hermitian_corner_normality_check(const ComplexMatrix& a,
                                                             const ComplexMatrix& b,
                                                             const ComplexMatrix& d) {
    require_square(a, "A");
    require_same_shape(a, b, "hermitian_corner_normality_check (A, B)");
    require_same_shape(a, d, "hermitian_corner_normality_check (A, D)");
    const double scale = std::max(1.0, a.squaredNorm() + 2 * b.squaredNorm() + d.squaredNorm());
    HermitianCornerCheck r;
    r.a_normality = normality_residual(a);
    r.d_normality = normality_residual(d);
    r.intertwining = ((a - a.adjoint()) * b - b * (d - d.adjoint())).norm() / scale;
    return r;
}

/// Normal N = [[H1 + i K1, B], [B^*, H2 + i K2]] with K1 = U K0 U^* for the polar
/// factorization B = U P.
inline CompletionResult hermitian_corner_completion(const ComplexMatrix& b,
                                                    const HermitianCornerParams& params,
                                                    const Tolerances& tol = {}) {
    require_finite(b, "B");
    require_square(b, "B");
    detail::check_params_shape(params, b.rows());
    const double t = tol.commutation_tol;
    detail::check_params_hermitian(params, t);
    const PolarFactors pf = polar(b);
    const ComplexMatrix& p = pf.psd_part;
    const ComplexMatrix& u = pf.unitary_part;
    detail::check("[K0, P] = 0", commutation_residual(params.k0, p), t);
    detail::check("[K2, P] = 0", commutation_residual(params.k2, p), t);
    detail::check("(K0 - K2) P = 0", product_residual(params.k0 - params.k2, p), t);
    const ComplexMatrix k1 = u * params.k0 * u.adjoint();
    detail::check("[Hfirst, K1] = 0", commutation_residual(params.h_first, k1), t);
    detail::check("[H2, K2] = 0", commutation_residual(params.h2, params.k2), t);
    ComplexMatrix a = params.h_first + kI * k1;
    ComplexMatrix d = params.h2 + kI * params.k2;
    const ComplexMatrix c = b.adjoint();
    return detail::certify(assemble(std::move(a), b, c, std::move(d)), b, c, std::nullopt);
}

/// Unitary N = [[U (H0 + i K0) U^*, B], [B^*, H2 + i K2]] for a contraction B = U P.
///
/// Besides H0^2 + K0^2 = H2^2 + K2^2 = I - P^2 and the commutation conditions,
/// the off-diagonal block of N^*N equals U[(H0 + H2)P + i(K2 - K0)P], so
/// (K0 - K2)P = 0 and (H0 + H2)P = 0 are enforced as well. ConstraintMode::unchecked
/// skips exactly these two and returns N with whatever unitarity residual results.
inline CompletionResult hermitian_corner_unitary_completion(
    const ComplexMatrix& b, const HermitianCornerParams& params, const Tolerances& tol = {},
    ConstraintMode mode = ConstraintMode::checked) {
    require_finite(b, "B");
    require_square(b, "B");
    detail::check_params_shape(params, b.rows());
    const double t = tol.commutation_tol;
    detail::check("||B|| <= 1", operator_norm(b) - 1.0, tol.decomposition_tol);
    detail::check_params_hermitian(params, t);
    const PolarFactors pf = polar(b);
    const ComplexMatrix& p = pf.psd_part;
    const ComplexMatrix& u = pf.unitary_part;
    const HermitianCornerParams& q = params;
    detail::check("[K0, P] = 0", commutation_residual(q.k0, p), t);
    detail::check("[K2, P] = 0", commutation_residual(q.k2, p), t);
    detail::check("[H0, P] = 0", commutation_residual(q.h_first, p), t);
    detail::check("[H2, P] = 0", commutation_residual(q.h2, p), t);
    detail::check("[H0, K0] = 0", commutation_residual(q.h_first, q.k0), t);
    detail::check("[H2, K2] = 0", commutation_residual(q.h2, q.k2), t);
    const ComplexMatrix defect = identity(b.rows()) - p * p;
    const auto sum_of_squares_residual = [&](const ComplexMatrix& h, const ComplexMatrix& k) {
        return (h * h + k * k - defect).norm() / std::max(1.0, defect.norm());
    };
    detail::check("H0^2 + K0^2 = I - P^2", sum_of_squares_residual(q.h_first, q.k0), t);
    detail::check("H2^2 + K2^2 = I - P^2", sum_of_squares_residual(q.h2, q.k2), t);
    if (mode == ConstraintMode::checked) {
        detail::check("(K0 - K2) P = 0", product_residual(q.k0 - q.k2, p), t);
        detail::check("(H0 + H2) P = 0", product_residual(q.h_first + q.h2, p), t);
    }
    ComplexMatrix a = u * (q.h_first + kI * q.k0) * u.adjoint();
    ComplexMatrix d = q.h2 + kI * q.k2;
    const ComplexMatrix c = b.adjoint();
    return detail::certify(assemble(std::move(a), b, c, std::move(d)), b, c, 1.0);
}

}  // namespace corners
