#pragma once

// Extremal corner examples and seeded multistart searches:
//  - alpha_lower_bound_search: lower bounds for sup ||B||/||C|| over normal N,
//  - feasibility_search: does [[?, B], [C, ?]] admit a normal completion?

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "corners/block.hpp"
#include "corners/completions.hpp"
#include "corners/linalg.hpp"
#include "corners/random.hpp"

namespace corners {

/// 4x4 normal matrix with rank-one B, unitary C and ||B|| = sqrt(2) ||C||.
inline BlockMatrix example_n2() {
    const double r2 = std::sqrt(2.0);
    ComplexMatrix a(2, 2), b(2, 2), c(2, 2), d(2, 2);
    a << 0, 0, 1, 0;
    b << r2, 0, 0, 0;
    c << 0, 1, 1, 0;
    d << 0, 1, 0, 0;
    return assemble(a, b, c, d);
}

/// 6x6 normal matrix with ||B|| = sqrt(3) and C the anti-identity.
inline BlockMatrix example_n3() {
    const double alpha = 2.0 / std::sqrt(3.0);
    const double lo = std::sqrt(alpha - 1.0);
    const double mid = std::sqrt(alpha);
    const double hi = std::sqrt(alpha + 1.0);
    ComplexMatrix a(3, 3), b(3, 3), c(3, 3), d(3, 3);
    a << 0, lo, 0,
         0, 0, mid,
         hi, 0, 0;
    b << std::sqrt(3.0), 0, 0,
         0, 0, 0,
         0, 0, 0;
    c << 0, 0, 1,
         0, 1, 0,
         1, 0, 0;
    d << 0, 0, hi,
         lo, 0, 0,
         0, mid, 0;
    return assemble(a, b, c, d);
}

struct SearchConfig {
    int restarts = 20;
    int max_iterations = 400;     // ascent or descent iterations per epoch
    double step_size = 1.0;       // first trial step of each backtracking search
    double penalty_weight = 1.0;  // initial penalty weight
    double penalty_growth = 10.0;
    int epochs = 6;
    std::uint64_t seed = 0;
    double convergence_tol = 1e-10;  // normality residual accepted as feasible
    bool include_known_seed = true;
    int polish_iterations = 100;
    int threads = 1;

    void validate() const {
        if (restarts < 1 || max_iterations < 1 || epochs < 1 || polish_iterations < 0 ||
            threads < 1) {
            throw std::invalid_argument("search config: counts must be at least 1");
        }
        if (!(step_size > 0) || !(penalty_weight > 0) || !(convergence_tol > 0)) {
            throw std::invalid_argument("search config: step, penalty and tolerance must be positive");
        }
        if (!(penalty_growth > 1)) {
            throw std::invalid_argument("search config: penalty_growth must exceed 1");
        }
    }
};

struct RestartRecord {
    int restart = 0;
    double objective = 0;  // alpha: final ratio; feasibility: final normality residual
    double normality_residual = 0;
    bool feasible = false;
};

struct SearchResult {
    bool found = false;  // at least one restart ended below convergence_tol
    double best_ratio = 0;
    BlockMatrix witness;
    double witness_normality_residual = 0;
    int best_restart = -1;
    std::vector<RestartRecord> per_restart_history;
};

struct FeasibilityReport {
    double min_residual = 0;
    ComplexMatrix witness_a;
    ComplexMatrix witness_d;
    int restarts_below_tol = 0;
    double gradient_check_error = 0;
    int best_restart = -1;
    std::vector<RestartRecord> per_restart_history;
};

namespace detail {

/// ||N^*N - NN^*||_F^2
inline double commutator_energy(const ComplexMatrix& n) { return self_commutator(n).squaredNorm(); }

/// Gradient of commutator_energy with respect to (Re N, Im N), packed as a
/// complex matrix: 4 (N G - G N) with G = N^*N - NN^*.
inline ComplexMatrix commutator_energy_gradient(const ComplexMatrix& n) {
    const ComplexMatrix g = self_commutator(n);
    return 4.0 * (n * g - g * n);
}

struct TopSingular {
    double value = 0;
    ComplexMatrix gradient;  // u v^*, the gradient of s_1 when s_1 is simple
};

inline TopSingular top_singular(const ComplexMatrix& t) {
    Eigen::JacobiSVD<ComplexMatrix> dec(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {dec.singularValues()(0), dec.matrixU().col(0) * dec.matrixV().col(0).adjoint()};
}

inline double top_singular_value(const ComplexMatrix& t) {
    return Eigen::JacobiSVD<ComplexMatrix>(t).singularValues()(0);
}

/// sum_j max(0, s_j(C) - 1)^2. Zero iff ||C|| <= 1, and unlike the same penalty
/// on s_1 alone it stays differentiable when the top singular values of C cluster.
inline double contraction_excess(const ComplexMatrix& c) {
    const RealVector s = singular_values(c);
    return (s.array() - 1.0).max(0.0).square().sum();
}

/// U diag(2 max(0, s - 1)) V, the gradient of contraction_excess.
inline ComplexMatrix contraction_excess_gradient(const ComplexMatrix& c) {
    const SvdFactors f = svd(c);
    const RealVector w = 2.0 * (f.singulars.array() - 1.0).max(0.0).matrix();
    return f.left * w.cast<Complex>().asDiagonal() * f.right;
}

/// s_1(B) - mu ||N^*N - NN^*||_F^2 - mu sum_j max(0, s_j(C) - 1)^2
inline double penalized_ratio(const ComplexMatrix& n, Index bs, double mu) {
    const double sb = top_singular_value(n.topRightCorner(bs, bs));
    return sb - mu * commutator_energy(n) - mu * contraction_excess(n.bottomLeftCorner(bs, bs));
}

inline ComplexMatrix penalized_ratio_gradient(const ComplexMatrix& n, Index bs, double mu) {
    ComplexMatrix grad = -mu * commutator_energy_gradient(n);
    grad.topRightCorner(bs, bs) += top_singular(n.topRightCorner(bs, bs)).gradient;
    grad.bottomLeftCorner(bs, bs) -= mu * contraction_excess_gradient(n.bottomLeftCorner(bs, bs));
    return grad;
}

/// Backtracking line search along `direction` from `step`, halving until the
/// Armijo condition f(x + t d) >= f(x) + 1e-4 t <grad, d> holds (for ascent).
/// Returns false when no step is accepted.
inline bool armijo_step(ComplexMatrix& x, double& fx, const ComplexMatrix& direction, double slope,
                        double step, const std::function<double(const ComplexMatrix&)>& f) {
    constexpr double kArmijo = 1e-4;
    for (double t = step; t > 1e-20; t *= 0.5) {
        ComplexMatrix y = x + t * direction;
        const double fy = f(y);
        if (std::isfinite(fy) && fy >= fx + kArmijo * t * slope) {
            x = std::move(y);
            fx = fy;
            return true;
        }
    }
    return false;
}

/// Plain gradient ascent with Armijo backtracking. Stops on iteration cap, on a
/// rejected line search or when relative progress stalls.
inline double gradient_ascent(ComplexMatrix& x, int max_iterations, double step,
                              const std::function<double(const ComplexMatrix&)>& f,
                              const std::function<ComplexMatrix(const ComplexMatrix&)>& grad) {
    double fx = f(x);
    int stalled = 0;
    for (int it = 0; it < max_iterations; ++it) {
        const ComplexMatrix g = grad(x);
        const double slope = g.squaredNorm();
        if (slope < 1e-30) break;
        const double before = fx;
        if (!armijo_step(x, fx, g, slope, step, f)) break;
        stalled = (fx - before <= 1e-15 * std::max(1.0, std::abs(before))) ? stalled + 1 : 0;
        if (stalled >= 5) break;
    }
    return fx;
}

using EntryList = std::span<const std::pair<Index, Index>>;

/// (Re, Im) of the listed entries, interleaved.
inline Eigen::VectorXd pack(const ComplexMatrix& x, EntryList free) {
    Eigen::VectorXd v(2 * static_cast<Index>(free.size()));
    for (std::size_t k = 0; k < free.size(); ++k) {
        const Complex z = x(free[k].first, free[k].second);
        v(2 * static_cast<Index>(k)) = z.real();
        v(2 * static_cast<Index>(k) + 1) = z.imag();
    }
    return v;
}

inline void add_packed(ComplexMatrix& x, const Eigen::VectorXd& delta, EntryList free, double t = 1.0) {
    for (std::size_t k = 0; k < free.size(); ++k) {
        x(free[k].first, free[k].second) +=
            t * Complex(delta(2 * static_cast<Index>(k)), delta(2 * static_cast<Index>(k) + 1));
    }
}

/// (Re G, Im G) in column-major order.
inline Eigen::VectorXd flatten(const ComplexMatrix& g) {
    const Index mm = g.size();
    Eigen::VectorXd r(2 * mm);
    r.head(mm) = Eigen::Map<const Eigen::VectorXcd>(g.data(), mm).real();
    r.tail(mm) = Eigen::Map<const Eigen::VectorXcd>(g.data(), mm).imag();
    return r;
}

/// Jacobian of flatten(N^*N - NN^*) with respect to the packed free entries.
/// The map is quadratic in N, so each column is the exact directional derivative
/// dG = E^*N + N^*E - EN^* - NE^* for E = w e_i e_j^T, w in {1, i}.
inline Eigen::MatrixXd commutator_jacobian(const ComplexMatrix& n, EntryList free) {
    const Index m = n.rows();
    const ComplexMatrix nh = n.adjoint();
    Eigen::MatrixXd jac(2 * m * m, 2 * static_cast<Index>(free.size()));
    ComplexMatrix dg(m, m);
    for (std::size_t k = 0; k < free.size(); ++k) {
        const auto [i, j] = free[k];
        for (int part = 0; part < 2; ++part) {
            const Complex w = part == 0 ? Complex(1, 0) : kI;
            dg.setZero();
            dg.row(j) += std::conj(w) * n.row(i);
            dg.col(j) += w * nh.col(i);
            dg.row(i) -= w * nh.row(j);
            dg.col(i) -= std::conj(w) * n.col(j);
            jac.col(2 * static_cast<Index>(k) + part) = flatten(dg);
        }
    }
    return jac;
}

/// Levenberg-Marquardt on flatten(N^*N - NN^*) over the listed free entries of N.
/// Returns the final commutator energy.
inline double polish_normality(ComplexMatrix& n, EntryList free, int max_iterations) {
    double energy = commutator_energy(n);
    double lambda = 1e-3;
    for (int it = 0; it < max_iterations && energy > 0; ++it) {
        const Eigen::VectorXd r = flatten(self_commutator(n));
        const Eigen::MatrixXd jac = commutator_jacobian(n, free);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;
        const double diag_scale = std::max(1e-300, jtj.diagonal().maxCoeff());
        bool accepted = false;
        while (lambda < 1e16) {
            Eigen::MatrixXd lhs = jtj;
            lhs.diagonal().array() += lambda * diag_scale;
            const Eigen::VectorXd delta = lhs.ldlt().solve(-jtr);
            ComplexMatrix trial = n;
            add_packed(trial, delta, free);
            const double e = commutator_energy(trial);
            if (std::isfinite(e) && e < energy) {
                n = std::move(trial);
                accepted = (energy - e) > 1e-14 * energy;
                energy = e;
                lambda = std::max(lambda / 3.0, 1e-15);
                break;
            }
            lambda *= 4.0;
        }
        if (!accepted) break;
    }
    return energy;
}

/// Ascent on the penalized ratio along the direction (2 mu J^T J + lambda I)^{-1} g,
/// where g is the (sub)gradient and J the commutator Jacobian: the Gauss-Newton
/// curvature of the penalty removes the 1/mu step-size collapse of plain gradient
/// ascent. Steps are Armijo-backtracked by halving from `step`; lambda shrinks
/// after full steps and grows after halvings.
inline double preconditioned_ascent(ComplexMatrix& x, Index bs, double mu, int max_iterations,
                                    double step, EntryList free) {
    constexpr double kArmijo = 1e-4;
    double fx = penalized_ratio(x, bs, mu);
    double lambda = 1.0;
    int stalled = 0;
    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::VectorXd g = pack(penalized_ratio_gradient(x, bs, mu), free);
        if (g.squaredNorm() < 1e-30) break;
        const Eigen::MatrixXd jac = commutator_jacobian(x, free);
        Eigen::MatrixXd h = 2.0 * mu * (jac.transpose() * jac);
        h.diagonal().array() += lambda;
        const Eigen::VectorXd dir = h.ldlt().solve(g);
        const double slope = g.dot(dir);
        if (!(slope > 0)) break;
        const double before = fx;
        bool accepted = false;
        double t = step;
        for (; t > 1e-20; t *= 0.5) {
            ComplexMatrix y = x;
            add_packed(y, dir, free, t);
            const double fy = penalized_ratio(y, bs, mu);
            if (std::isfinite(fy) && fy >= fx + kArmijo * t * slope) {
                x = std::move(y);
                fx = fy;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        lambda = t >= step ? std::max(lambda * 0.5, 1e-8) : std::min(lambda * 2.0, 1e8);
        stalled = (fx - before <= 1e-15 * std::max(1.0, std::abs(before))) ? stalled + 1 : 0;
        if (stalled >= 5) break;
    }
    return fx;
}

inline std::vector<std::pair<Index, Index>> all_entries(Index m) {
    std::vector<std::pair<Index, Index>> out;
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < m; ++i) out.emplace_back(i, j);
    return out;
}

inline std::vector<std::pair<Index, Index>> diagonal_block_entries(Index bs) {
    std::vector<std::pair<Index, Index>> out;
    for (Index j = 0; j < bs; ++j)
        for (Index i = 0; i < bs; ++i) out.emplace_back(i, j);
    for (Index j = 0; j < bs; ++j)
        for (Index i = 0; i < bs; ++i) out.emplace_back(bs + i, bs + j);
    return out;
}

/// Runs body(k) for k in [0, count). Each k writes only its own result slot, so
/// the outcome does not depend on the number of workers.
inline void for_each_restart(int count, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || count <= 1) {
        for (int k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    const int workers = std::min(threads, count);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int k = next++; k < count; k = next++) body(k);
        });
    }
}

inline constexpr std::uint64_t kGradientCheckStream = 0xC0FFEE;

}  // namespace detail

/// f(A, D) = ||N^*N - NN^*||_F^2 for N = [[A, B], [C, D]]. Equals
/// ||G11||^2 + 2||G12||^2 + ||G22||^2 since the commutator is hermitian.
inline double feasibility_objective(const ComplexMatrix& b, const ComplexMatrix& c,
                                    const ComplexMatrix& a, const ComplexMatrix& d) {
    return detail::commutator_energy(assemble(a, b, c, d).full());
}

/// Analytic gradient of feasibility_objective with respect to (Re, Im) of A and
/// D, each packed as a complex matrix.
inline std::pair<ComplexMatrix, ComplexMatrix> feasibility_gradient(const ComplexMatrix& b,
                                                                    const ComplexMatrix& c,
                                                                    const ComplexMatrix& a,
                                                                    const ComplexMatrix& d) {
    const Index n = a.rows();
    const ComplexMatrix g = detail::commutator_energy_gradient(assemble(a, b, c, d).full());
    return {g.topLeftCorner(n, n), g.bottomRightCorner(n, n)};
}

/// Max deviation between the analytic gradient and central differences over
/// all 4n^2 real coordinates of (A, D), relative to max(1, |analytic|_inf).
inline double gradient_check(const ComplexMatrix& b, const ComplexMatrix& c, const ComplexMatrix& a,
                             const ComplexMatrix& d, double h) {
    if (!(h >= 1e-7 && h <= 1e-3)) {
        throw std::invalid_argument("gradient_check: step must lie in [1e-7, 1e-3]");
    }
    const auto [ga, gd] = feasibility_gradient(b, c, a, d);
    const double scale = std::max({1.0, ga.cwiseAbs().maxCoeff(), gd.cwiseAbs().maxCoeff()});
    const Index n = a.rows();
    double worst = 0;
    for (int block = 0; block < 2; ++block) {
        const ComplexMatrix& analytic = block == 0 ? ga : gd;
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i)
                for (int part = 0; part < 2; ++part) {
                    const Complex e = part == 0 ? Complex(h, 0) : Complex(0, h);
                    ComplexMatrix ap = a, am = a, dp = d, dm = d;
                    if (block == 0) {
                        ap(i, j) += e;
                        am(i, j) -= e;
                    } else {
                        dp(i, j) += e;
                        dm(i, j) -= e;
                    }
                    const double fd = (feasibility_objective(b, c, ap, dp) -
                                       feasibility_objective(b, c, am, dm)) / (2 * h);
                    const double an = part == 0 ? analytic(i, j).real() : analytic(i, j).imag();
                    worst = std::max(worst, std::abs(an - fd) / scale);
                }
    }
    return worst;
}

/// Seeded multistart penalty ascent for a lower bound on sup ||B|| / ||C||.
///
/// Each restart maximizes s_1(B) - mu ||N^*N - NN^*||_F^2 - mu sum_j max(0, s_j(C) - 1)^2
/// over all entries of N while mu grows geometrically, then minimizes the
/// commutator alone. Only restarts ending with normality residual below
/// convergence_tol compete; ties go to the lowest restart index.
inline SearchResult alpha_lower_bound_search(Index n, const SearchConfig& config) {
    if (n < 1) throw std::invalid_argument("alpha_lower_bound_search: n must be at least 1");
    config.validate();
    const Index m = 2 * n;
    const auto free = detail::all_entries(m);

    struct Outcome {
        ComplexMatrix x;
        double ratio = 0;
        double residual = 0;
        bool feasible = false;
    };
    std::vector<Outcome> outcomes(static_cast<std::size_t>(config.restarts));

    detail::for_each_restart(config.restarts, config.threads, [&](int k) {
        Rng rng = seeded_rng(config.seed, static_cast<std::uint64_t>(k));
        ComplexMatrix x;
        if (config.include_known_seed && k == 0 && (n == 2 || n == 3)) {
            x = (n == 2 ? example_n2() : example_n3()).full() + random_complex(m, m, rng, 1e-3);
        } else {
            x = random_complex(m, m, rng, 1.0 / std::sqrt(static_cast<double>(m)));
            x /= std::max(1e-12, detail::top_singular_value(x.bottomLeftCorner(n, n)));
        }
        double mu = config.penalty_weight;
        for (int epoch = 0; epoch < config.epochs; ++epoch, mu *= config.penalty_growth) {
            detail::preconditioned_ascent(x, n, mu, config.max_iterations, config.step_size, free);
        }
        detail::polish_normality(x, free, config.polish_iterations);

        Outcome& out = outcomes[static_cast<std::size_t>(k)];
        const double nc = operator_norm(x.bottomLeftCorner(n, n));
        out.residual = normality_residual(x);
        out.ratio = nc > 0 ? operator_norm(x.topRightCorner(n, n)) / nc : 0.0;
        out.feasible = std::isfinite(out.ratio) && nc > 1e-8 && out.residual <= config.convergence_tol;
        out.x = std::move(x);
    });

    SearchResult result;
    for (int k = 0; k < config.restarts; ++k) {
        const Outcome& o = outcomes[static_cast<std::size_t>(k)];
        result.per_restart_history.push_back({k, o.ratio, o.residual, o.feasible});
        if (o.feasible && (!result.found || o.ratio > result.best_ratio)) {
            result.found = true;
            result.best_ratio = o.ratio;
            result.best_restart = k;
        }
    }
    if (result.found) {
        const ComplexMatrix& w = outcomes[static_cast<std::size_t>(result.best_restart)].x;
        result.witness = partition(w);
        result.witness_normality_residual = normality_residual(w);
    }
    return result;
}

/// Seeded multistart minimization of feasibility_objective over (A, D).
///
/// Structured starts come first when they apply: the symmetric completion for
/// B = C, the scaled-unitary completion for equal singular values, and A = D = 0
/// for C = B^*. The remaining restarts start from Gaussian (A, D). Each restart
/// runs Armijo gradient descent followed by a Levenberg-Marquardt polish.
inline FeasibilityReport feasibility_search(const ComplexMatrix& b, const ComplexMatrix& c,
                                            const SearchConfig& config) {
    require_finite(b, "B");
    require_finite(c, "C");
    require_square(b, "B");
    require_same_shape(b, c, "feasibility_search");
    config.validate();
    const Index n = b.rows();
    const Tolerances tol;

    std::vector<std::pair<ComplexMatrix, ComplexMatrix>> structured;
    const double corner_scale = std::max(1.0, std::max(b.norm(), c.norm()));
    if ((b - c).norm() <= tol.residual_tol * corner_scale) {
        const CompletionResult s = symmetric_completion(b);
        structured.emplace_back(s.completion.a, s.completion.d);
    }
    try {
        const CompletionResult s = equal_singular_value_completion(b, c, tol);
        structured.emplace_back(s.completion.a, s.completion.d);
    } catch (const ValidationError&) {
    }
    if ((b.adjoint() - c).norm() <= tol.residual_tol * corner_scale) {
        structured.emplace_back(ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n));
    }

    const double start_scale =
        std::max(1e-3, (b.norm() + c.norm()) / (2.0 * std::sqrt(static_cast<double>(n))));
    const auto free = detail::diagonal_block_entries(n);

    struct Outcome {
        ComplexMatrix x;
        double residual = 0;
    };
    std::vector<Outcome> outcomes(static_cast<std::size_t>(config.restarts));

    detail::for_each_restart(config.restarts, config.threads, [&](int k) {
        ComplexMatrix x(2 * n, 2 * n);
        if (static_cast<std::size_t>(k) < structured.size()) {
            const auto& [a, d] = structured[static_cast<std::size_t>(k)];
            x = assemble(a, b, c, d).full();
        } else {
            Rng rng = seeded_rng(config.seed, static_cast<std::uint64_t>(k));
            constexpr double kScales[] = {0.5, 1.0, 2.0};
            const double s = start_scale * kScales[k % 3];
            x = assemble(random_complex(n, n, rng, s), b, c, random_complex(n, n, rng, s)).full();
        }
        const auto f = [](const ComplexMatrix& y) { return -detail::commutator_energy(y); };
        const auto g = [n](const ComplexMatrix& y) {
            ComplexMatrix grad = -detail::commutator_energy_gradient(y);
            grad.topRightCorner(n, n).setZero();
            grad.bottomLeftCorner(n, n).setZero();
            return grad;
        };
        detail::gradient_ascent(x, config.max_iterations, config.step_size, f, g);
        detail::polish_normality(x, free, config.polish_iterations);
        Outcome& out = outcomes[static_cast<std::size_t>(k)];
        out.residual = normality_residual(x);
        out.x = std::move(x);
    });

    FeasibilityReport report;
    for (int k = 0; k < config.restarts; ++k) {
        const Outcome& o = outcomes[static_cast<std::size_t>(k)];
        const bool below = o.residual <= config.convergence_tol;
        report.per_restart_history.push_back({k, o.residual, o.residual, below});
        report.restarts_below_tol += below ? 1 : 0;
        if (report.best_restart < 0 || o.residual < report.min_residual) {
            report.best_restart = k;
            report.min_residual = o.residual;
        }
    }
    const ComplexMatrix& w = outcomes[static_cast<std::size_t>(report.best_restart)].x;
    report.witness_a = w.topLeftCorner(n, n);
    report.witness_d = w.bottomRightCorner(n, n);
    report.min_residual = normality_residual(assemble(report.witness_a, b, c, report.witness_d).full());

    Rng rng = seeded_rng(config.seed, detail::kGradientCheckStream);
    const ComplexMatrix ca = random_complex(n, n, rng, start_scale);
    const ComplexMatrix cd = random_complex(n, n, rng, start_scale);
    report.gradient_check_error = gradient_check(b, c, ca, cd, 1e-5);
    return report;
}

}  // namespace corners
