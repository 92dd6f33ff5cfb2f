#pragma once

// 2x2 block model N = [[A, B], [C, D]] with n x n blocks, and the necessary
// conditions that normality of N imposes on the corners B and C.

#include <cmath>
#include <cstdint>
#include <limits>

#include "corners/linalg.hpp"
#include "corners/random.hpp"

namespace corners {

struct BlockMatrix {
    ComplexMatrix a;
    ComplexMatrix b;
    ComplexMatrix c;
    ComplexMatrix d;

    Index block_size() const { return a.rows(); }

    ComplexMatrix full() const {
        const Index n = block_size();
        ComplexMatrix m(2 * n, 2 * n);
        m.topLeftCorner(n, n) = a;
        m.topRightCorner(n, n) = b;
        m.bottomLeftCorner(n, n) = c;
        m.bottomRightCorner(n, n) = d;
        return m;
    }
};

inline BlockMatrix assemble(ComplexMatrix a, ComplexMatrix b, ComplexMatrix c, ComplexMatrix d) {
    const Index n = a.rows();
    for (const ComplexMatrix* m : {&a, &b, &c, &d}) {
        if (m->rows() != n || m->cols() != n) {
            throw ShapeError("assemble: all four blocks must be " + std::to_string(n) + "x" +
                             std::to_string(n) + ", got " + std::to_string(m->rows()) + "x" +
                             std::to_string(m->cols()));
        }
    }
    return {std::move(a), std::move(b), std::move(c), std::move(d)};
}

inline BlockMatrix partition(const ComplexMatrix& m) {
    require_square(m, "partition input");
    if (m.rows() % 2 != 0) {
        throw ShapeError("partition input: expected even dimension, got " +
                         std::to_string(m.rows()));
    }
    const Index n = m.rows() / 2;
    return {m.topLeftCorner(n, n), m.topRightCorner(n, n), m.bottomLeftCorner(n, n),
            m.bottomRightCorner(n, n)};
}

struct CornerReport {
    Index block_size = 0;
    double frobenius_b = 0;   // ||B||_2
    double frobenius_c = 0;   // ||C||_2
    double norm_b = 0;        // ||B||
    double norm_c = 0;        // ||C||
    double frobenius_gap = 0; // | ||B||_2 - ||C||_2 |
    double ratio = 1;         // ||B|| / ||C||; +inf when only C vanishes, 1 when both do
    double ratio_bound = 1;   // sqrt(n)
    double normality_residual = 0;
    double singular_value_gap = 0;  // max_j |s_j(B) - s_j(C)|
};

inline double corner_ratio(double norm_b, double norm_c) {
    if (norm_c > 0) return norm_b / norm_c;
    return norm_b > 0 ? std::numeric_limits<double>::infinity() : 1.0;
}

inline CornerReport corner_report(const ComplexMatrix& m) {
    const BlockMatrix blocks = partition(m);
    const RealVector sb = singular_values(blocks.b);
    const RealVector sc = singular_values(blocks.c);
    CornerReport r;
    r.block_size = blocks.block_size();
    r.frobenius_b = sb.norm();
    r.frobenius_c = sc.norm();
    r.norm_b = sb.size() ? sb(0) : 0.0;
    r.norm_c = sc.size() ? sc(0) : 0.0;
    r.frobenius_gap = std::abs(blocks.b.norm() - blocks.c.norm());
    r.ratio = corner_ratio(r.norm_b, r.norm_c);
    r.ratio_bound = std::sqrt(static_cast<double>(r.block_size));
    r.normality_residual = normality_residual(m);
    r.singular_value_gap = sb.size() ? (sb - sc).cwiseAbs().maxCoeff() : 0.0;
    return r;
}

/// Outcome of screening N against the necessary conditions on its corners.
///
/// `frobenius_equality` and `ratio_bound` are measured for every input, but they
/// are only implied when `normal` holds; `necessary_conditions_hold` is the
/// implication "normal => both conditions". Passing the conditions says nothing
/// about normality.
struct CornerVerdict {
    CornerReport report;
    double tolerance = 0;
    double slack = 0;  // allowed violation of ||B||_2^2 = ||C||_2^2
    bool normal = false;
    bool frobenius_equality = false;
    bool ratio_bound = false;
    bool necessary_conditions_hold = false;
};

/// The slack comes from the trace of the top-left block of N^*N - NN^*, which
/// equals ||C||_2^2 - ||B||_2^2 and is bounded by sqrt(n) * ||N^*N - NN^*||_F.
inline CornerVerdict check_normal_corner_conditions(const ComplexMatrix& m, double tol = 1e-10) {
    CornerVerdict v;
    v.report = corner_report(m);
    v.tolerance = tol;
    const CornerReport& r = v.report;
    const double n = static_cast<double>(r.block_size);
    v.slack = std::sqrt(n) * tol * std::max(1.0, m.squaredNorm()) +
              64 * std::numeric_limits<double>::epsilon() * std::max(1.0, m.squaredNorm());
    v.normal = r.normality_residual <= tol;
    const double fb2 = r.frobenius_b * r.frobenius_b;
    const double fc2 = r.frobenius_c * r.frobenius_c;
    v.frobenius_equality = std::abs(fb2 - fc2) <= v.slack;
    v.ratio_bound = r.norm_b * r.norm_b <= n * r.norm_c * r.norm_c + v.slack &&
                    r.norm_c * r.norm_c <= n * r.norm_b * r.norm_b + v.slack;
    v.necessary_conditions_hold = !v.normal || (v.frobenius_equality && v.ratio_bound);
    return v;
}

/// W diag(z) W^* with Haar W and Gaussian z drawn from `rng`.
inline ComplexMatrix random_normal(Index size, Rng& rng) {
    if (size < 1) throw ShapeError("random_normal: size must be at least 1");
    const ComplexMatrix w = random_unitary(size, rng);
    const ComplexMatrix z = random_complex(size, 1, rng);
    return w * z.col(0).asDiagonal() * w.adjoint();
}

inline ComplexMatrix random_normal(Index size, std::uint64_t seed) {
    Rng rng = seeded_rng(seed);
    return random_normal(size, rng);
}

}  // namespace corners
