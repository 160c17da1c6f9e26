#pragma once

#include "kbandit/common.hpp"

#include <variant>
#include <vector>

namespace kbandit {

// ---------------------------------------------------------------------------
// Kernel specifications
// ---------------------------------------------------------------------------

struct SquaredExponential {
    double lengthscale = 1.0;
};

/// Half-integer Matern kernel; smoothness must be one of 0.5, 1.5, 2.5
/// (the standard closed forms).
struct Matern {
    double smoothness = 0.5;
    double lengthscale = 1.0;
};

/// Normalized linear kernel k(x, y) = <x, y> / d so that k(x, x) <= 1 on
/// [0, 1]^d.
struct Linear {};

/// Kernel with a prescribed Gram spectrum on a fixed action set. The Gram
/// matrix is Q diag(mu) Q^T for a seeded random orthogonal Q; eigenvalues
/// are rescaled if necessary so that all diagonal entries stay <= 1.
/// It has no pointwise closed form; it exists so that tests can impose
/// exact polynomial or exponential spectra.
struct FiniteRank {
    std::vector<double> eigenvalues;  // non-increasing, all >= 0
    std::uint64_t seed = 0;
};

using KernelSpec = std::variant<SquaredExponential, Matern, Linear, FiniteRank>;

/// Throws InputError if the spec violates its invariants (non-positive
/// lengthscale, unsupported Matern smoothness, unsorted or negative
/// FiniteRank spectrum).
void validate(const KernelSpec& spec);

/// Evaluates k(x, y). FiniteRank kernels are Gram-level constructs and
/// reject pointwise evaluation with an InputError.
double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y);

// ---------------------------------------------------------------------------
// Action sets
// ---------------------------------------------------------------------------

/// Finite action set in [0, 1]^d; one point per row, pairwise distinct.
struct ActionSet {
    Matrix points;  // N x d

    Index size() const { return points.rows(); }
    Index dim() const { return points.cols(); }
};

ActionSet make_action_set(Matrix points);

/// Uniform grid on [0, 1]^d with n_per_axis points per axis, endpoints
/// included (the single point 0.5 when n_per_axis = 1).
ActionSet grid_actions(Index d, Index n_per_axis, Index max_points = 200000);

// ---------------------------------------------------------------------------
// Gram context
// ---------------------------------------------------------------------------

/// Kernel + action set + Gram matrix + symmetric square root. The rows of
/// `sqrt` are explicit feature coordinates: Phi(x_i) = sqrt.row(i), so that
/// <Phi(x_i), Phi(x_j)> = K_ij. `eigenvalues` holds the spectrum of K in
/// non-increasing order. Immutable after construction and safe to share
/// across threads.
struct GramContext {
    KernelSpec kernel;
    ActionSet actions;
    Matrix gram;         // N x N, symmetric PSD
    Matrix sqrt;         // symmetric, sqrt * sqrt = gram
    Vector eigenvalues;  // non-increasing

    Index size() const { return gram.rows(); }
    Eigen::Ref<const Vector> feature(Index i) const { return sqrt.row(i).transpose(); }
};

/// Assembles the Gram matrix and its symmetric square root. Eigenvalues in
/// [-1e-10 * ||K||, 0) are clamped to zero; anything more negative signals a
/// broken kernel and throws NumericError.
GramContext build_gram(const KernelSpec& spec, const ActionSet& actions);

/// Dumps the Gram matrix row-major as CSV with header `i,j,value`.
void write_gram_csv(const GramContext& ctx, const std::string& path);

}  // namespace kbandit
