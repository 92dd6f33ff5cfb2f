#pragma once

// Seeded generators for test corpora and search starts. Every stream is
// derived from (seed, stream) so parallel callers never share engine state.

#include <cstdint>
#include <random>

#include "corners/linalg.hpp"

namespace corners {

using Rng = std::mt19937_64;

inline Rng seeded_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

/// Entries with independent N(0, scale^2/2) real and imaginary parts.
inline ComplexMatrix random_complex(Index rows, Index cols, Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale / std::sqrt(2.0));
    ComplexMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of R's
/// diagonal folded back into Q.
inline ComplexMatrix random_unitary(Index n, Rng& rng) {
    const ComplexMatrix z = random_complex(n, n, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ() * identity(n);
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

inline ComplexMatrix random_hermitian(Index n, Rng& rng, double scale = 1.0) {
    const ComplexMatrix z = random_complex(n, n, rng, scale);
    return 0.5 * (z + z.adjoint());
}

/// W diag(values) V for Haar W, V; `values` are used as given.
inline ComplexMatrix with_singular_values(const RealVector& values, Rng& rng) {
    const Index n = values.size();
    return random_unitary(n, rng) * values.cast<Complex>().asDiagonal() * random_unitary(n, rng);
}

inline RealVector random_uniform_vector(Index n, Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    RealVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

}  // namespace corners
