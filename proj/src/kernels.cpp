#include "kbandit/kernels.hpp"

#include "kbandit/csv.hpp"
#include "kbandit/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace kbandit {

namespace {

bool is_half_integer_smoothness(double nu) {
    return nu == 0.5 || nu == 1.5 || nu == 2.5;
}

double matern_halfinteger(double r, double nu, double lengthscale) {
    const double s = r / lengthscale;
    if (nu == 0.5) return std::exp(-s);
    if (nu == 1.5) {
        const double a = std::sqrt(3.0) * s;
        return (1.0 + a) * std::exp(-a);
    }
    const double a = std::sqrt(5.0) * s;
    return (1.0 + a + a * a / 3.0) * std::exp(-a);
}

Matrix random_orthogonal(Index n, std::uint64_t seed) {
    Matrix g(n, n);
    auto rng = CounterRng::keyed(seed, 0, /*stream=*/2);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) g(i, j) = rng.next_gaussian();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    // Canonical column signs so the factorization is unique.
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

Matrix finite_rank_gram(const FiniteRank& fr, Index n) {
    Vector mu = Vector::Zero(n);
    const Index m = std::min<Index>(n, static_cast<Index>(fr.eigenvalues.size()));
    for (Index j = 0; j < m; ++j) mu[j] = fr.eigenvalues[static_cast<std::size_t>(j)];
    // Normalize so diagonal entries cannot exceed 1: K_ii <= mu_max.
    if (m > 0 && mu[0] > 1.0) mu /= mu[0];
    const Matrix q = random_orthogonal(n, fr.seed);
    Matrix k = q * mu.asDiagonal() * q.transpose();
    return ((k + k.transpose()) * 0.5).eval();
}

}  // namespace

void validate(const KernelSpec& spec) {
    if (const auto* se = std::get_if<SquaredExponential>(&spec)) {
        if (!(se->lengthscale > 0.0)) throw InputError("kernel lengthscale must be positive");
    } else if (const auto* ma = std::get_if<Matern>(&spec)) {
        if (!(ma->lengthscale > 0.0)) throw InputError("kernel lengthscale must be positive");
        if (!is_half_integer_smoothness(ma->smoothness))
            throw InputError("Matern smoothness must be 0.5, 1.5 or 2.5");
    } else if (const auto* fr = std::get_if<FiniteRank>(&spec)) {
        for (std::size_t j = 0; j < fr->eigenvalues.size(); ++j) {
            if (fr->eigenvalues[j] < 0.0)
                throw InputError("FiniteRank eigenvalues must be non-negative");
            if (j > 0 && fr->eigenvalues[j] > fr->eigenvalues[j - 1])
                throw InputError("FiniteRank eigenvalues must be non-increasing");
        }
    }
}

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y) {
    if (x.size() != y.size()) throw InputError("eval_kernel: point dimensions differ");
    validate(spec);
    if (const auto* se = std::get_if<SquaredExponential>(&spec)) {
        const double sq = (x - y).squaredNorm();
        return std::exp(-sq / (2.0 * se->lengthscale * se->lengthscale));
    }
    if (const auto* ma = std::get_if<Matern>(&spec)) {
        return matern_halfinteger((x - y).norm(), ma->smoothness, ma->lengthscale);
    }
    if (std::holds_alternative<Linear>(spec)) {
        if (x.size() == 0) throw InputError("eval_kernel: empty point");
        return x.dot(y) / static_cast<double>(x.size());
    }
    throw InputError("FiniteRank kernels have no pointwise form; use build_gram");
}

ActionSet make_action_set(Matrix points) {
    if (points.rows() < 1 || points.cols() < 1)
        throw InputError("action set needs at least one point of dimension >= 1");
    if ((points.array() < 0.0).any() || (points.array() > 1.0).any())
        throw InputError("action coordinates must lie in [0, 1]");
    for (Index i = 0; i < points.rows(); ++i)
        for (Index j = i + 1; j < points.rows(); ++j)
            if ((points.row(i) - points.row(j)).norm() == 0.0)
                throw InputError("action points must be pairwise distinct");
    return ActionSet{std::move(points)};
}

ActionSet grid_actions(Index d, Index n_per_axis, Index max_points) {
    if (d < 1 || n_per_axis < 1) throw InputError("grid_actions: d and n_per_axis must be >= 1");
    double total = 1.0;
    for (Index k = 0; k < d; ++k) total *= static_cast<double>(n_per_axis);
    if (total > static_cast<double>(max_points))
        throw InputError("grid_actions: n_per_axis^d exceeds the configured cap");

    const Index n = static_cast<Index>(total);
    Vector axis(n_per_axis);
    if (n_per_axis == 1) {
        axis[0] = 0.5;
    } else {
        for (Index i = 0; i < n_per_axis; ++i)
            axis[i] = static_cast<double>(i) / static_cast<double>(n_per_axis - 1);
    }
    Matrix points(n, d);
    for (Index idx = 0; idx < n; ++idx) {
        Index rem = idx;
        for (Index k = d - 1; k >= 0; --k) {
            points(idx, k) = axis[rem % n_per_axis];
            rem /= n_per_axis;
        }
    }
    return ActionSet{std::move(points)};
}

GramContext build_gram(const KernelSpec& spec, const ActionSet& actions) {
    validate(spec);
    const Index n = actions.size();
    Matrix k(n, n);
    if (const auto* fr = std::get_if<FiniteRank>(&spec)) {
        k = finite_rank_gram(*fr, n);
    } else {
        for (Index i = 0; i < n; ++i) {
            k(i, i) = eval_kernel(spec, actions.points.row(i).transpose(),
                                  actions.points.row(i).transpose());
            for (Index j = i + 1; j < n; ++j) {
                const double v = eval_kernel(spec, actions.points.row(i).transpose(),
                                             actions.points.row(j).transpose());
                k(i, j) = v;
                k(j, i) = v;
            }
        }
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    if (es.info() != Eigen::Success) throw NumericError("build_gram: eigendecomposition failed");
    Vector evals = es.eigenvalues();  // ascending
    const double norm = std::max(std::abs(evals[0]), std::abs(evals[n - 1]));
    if (evals[0] < -1e-10 * std::max(norm, 1.0))
        throw NumericError("build_gram: Gram matrix is not PSD (broken kernel?)");
    evals = evals.cwiseMax(0.0);

    const Matrix& v = es.eigenvectors();
    Matrix s = v * evals.cwiseSqrt().asDiagonal() * v.transpose();
    s = ((s + s.transpose()) * 0.5).eval();

    Vector descending = evals.reverse();
    return GramContext{spec, actions, std::move(k), std::move(s), std::move(descending)};
}

void write_gram_csv(const GramContext& ctx, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << "i,j,value\n";
    for (Index i = 0; i < ctx.size(); ++i)
        for (Index j = 0; j < ctx.size(); ++j)
            out << i << ',' << j << ',' << csv::fmt(ctx.gram(i, j)) << '\n';
}

}  // namespace kbandit
