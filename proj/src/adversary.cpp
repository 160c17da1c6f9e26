#include "kbandit/adversary.hpp"

#include "kbandit/csv.hpp"
#include "kbandit/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <limits>

namespace kbandit {

namespace {

/// Minimum-norm coefficients reproducing a target loss vector on the
/// action set: alpha = K^+ target, dropping eigendirections below a
/// relative floor. The floor is generous (1e-8) so coefficient magnitudes
/// stay small enough for the Gram quadratic form to be evaluated well
/// within the 1e-10 norm-ball tolerance; targets are realized exactly only
/// within the well-conditioned span.
class GramPseudoInverse {
public:
    explicit GramPseudoInverse(const GramContext& ctx) : es_(ctx.gram) {
        if (es_.info() != Eigen::Success)
            throw NumericError("adversary: Gram eigendecomposition failed");
        const double floor = 1e-8 * std::max(es_.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
        inv_ = Vector::Zero(es_.eigenvalues().size());
        for (Index j = 0; j < inv_.size(); ++j)
            if (es_.eigenvalues()[j] > floor) inv_[j] = 1.0 / es_.eigenvalues()[j];
    }

    Vector apply(const Vector& target) const {
        return es_.eigenvectors() *
               (inv_.asDiagonal() * (es_.eigenvectors().transpose() * target));
    }

private:
    Eigen::SelfAdjointEigenSolver<Matrix> es_;
    Vector inv_;
};

void check_index(Index i, Index n, const char* what) {
    if (i < 0 || i >= n) throw InputError(std::string(what) + ": action index out of range");
}

}  // namespace

double rkhs_norm(const Vector& alpha, const GramContext& ctx) {
    if (alpha.size() != ctx.size()) throw InputError("rkhs_norm: coefficient size mismatch");
    const double sq = alpha.dot(ctx.gram * alpha);
    if (sq < -1e-12) throw NumericError("rkhs_norm: negative quadratic form (PSD violation)");
    return std::sqrt(std::max(0.0, sq));
}

Vector rescale_to_ball(const Vector& alpha, const GramContext& ctx, double B) {
    if (!(B > 0.0)) throw InputError("rescale_to_ball: B must be positive");
    Vector scaled = alpha;
    // The recomputed quadratic form can sit a few ulps above B after one
    // shrink; iterate until the same evaluation the callers use lands
    // inside the ball.
    for (int pass = 0; pass < 4; ++pass) {
        const double norm = rkhs_norm(scaled, ctx);
        if (norm <= B) return scaled;
        scaled *= B / norm;
    }
    return scaled;
}

LossSequence generate(const AdversarySpec& spec, const GramContext& ctx, Index T) {
    if (T < 1) throw InputError("adversary: horizon must be >= 1");
    const Index n = ctx.size();
    Matrix alphas = Matrix::Zero(T, n);
    double B = 1.0;

    if (const auto* ro = std::get_if<RankOne>(&spec)) {
        if (static_cast<Index>(ro->anchor_schedule.size()) != T)
            throw InputError("RankOne: anchor schedule length differs from horizon");
        for (Index t = 0; t < T; ++t) {
            const Index z = ro->anchor_schedule[static_cast<std::size_t>(t)];
            check_index(z, n, "RankOne");
            alphas(t, z) = 1.0;  // w_t = Phi(z_t), norm sqrt(k(z,z)) <= 1
        }
        B = 1.0;
    } else if (const auto* rr = std::get_if<RandomRKHS>(&spec)) {
        if (!(rr->B > 0.0)) throw InputError("RandomRKHS: B must be positive");
        B = rr->B;
        for (Index t = 0; t < T; ++t) {
            auto rng = CounterRng::keyed(rr->seed, static_cast<std::uint64_t>(t), 3);
            Vector a(n);
            for (Index j = 0; j < n; ++j) a[j] = rng.next_gaussian();
            alphas.row(t) = rescale_to_ball(a, ctx, B).transpose();
        }
    } else if (const auto* sw = std::get_if<Switching>(&spec)) {
        if (!(sw->B > 0.0)) throw InputError("Switching: B must be positive");
        B = sw->B;
        Index t = 0;
        for (const auto& seg : sw->segments) {
            if (seg.length < 1) throw InputError("Switching: segment length must be >= 1");
            check_index(seg.target, n, "Switching");
            const double kzz = ctx.gram(seg.target, seg.target);
            const double scale = kzz > 0.0 ? -B / std::sqrt(kzz) : 0.0;
            for (Index s = 0; s < seg.length; ++s, ++t) {
                if (t >= T) throw InputError("Switching: segment lengths exceed horizon");
                alphas(t, seg.target) = scale;
            }
        }
        if (t != T) throw InputError("Switching: segment lengths do not sum to horizon");
    } else if (const auto* bg = std::get_if<BestArmGap>(&spec)) {
        if (!(bg->B > 0.0)) throw InputError("BestArmGap: B must be positive");
        if (!(bg->gap > 0.0 && bg->gap < 1.0)) throw InputError("BestArmGap: gap must be in (0,1)");
        check_index(bg->best, n, "BestArmGap");
        B = bg->B;
        // Excess-loss profile over the best arm, shaped by correlation
        // distance and normalized so the non-best arms sit `gap` above the
        // best arm on average (exactly `gap` when n = 2).
        Vector profile = Vector::Zero(n);
        const double kbb = ctx.gram(bg->best, bg->best);
        bool shaped = kbb > 0.0;
        if (shaped) {
            for (Index i = 0; i < n; ++i) {
                if (i == bg->best) continue;
                const double kii = ctx.gram(i, i);
                profile[i] = kii > 0.0
                                 ? 1.0 - ctx.gram(i, bg->best) / std::sqrt(kii * kbb)
                                 : 1.0;
                if (profile[i] <= 1e-6) shaped = false;  // degenerate geometry
            }
        }
        if (!shaped) profile = Vector::Ones(n);
        profile[bg->best] = 0.0;
        if (n > 1) {
            const double mean_excess = profile.sum() / static_cast<double>(n - 1);
            profile *= bg->gap / mean_excess;
        }

        const GramPseudoInverse pinv(ctx);
        const Vector alpha_profile = pinv.apply(profile);
        const Vector alpha_const = pinv.apply(Vector::Ones(n));
        for (Index t = 0; t < T; ++t) {
            auto rng = CounterRng::keyed(bg->seed, static_cast<std::uint64_t>(t), 4);
            const double offset = (rng.next_unit() - 0.5) * 0.5 * bg->gap;
            alphas.row(t) =
                rescale_to_ball(alpha_profile + offset * alpha_const, ctx, B).transpose();
        }
    }

    Matrix losses = alphas * ctx.gram;  // row t = (K alpha_t)^T
    return LossSequence{std::move(alphas), std::move(losses), B};
}

void write_losses_csv(const LossSequence& seq, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << "t,action_index,loss\n";
    for (Index t = 0; t < seq.horizon(); ++t)
        for (Index i = 0; i < seq.n_actions(); ++i)
            out << (t + 1) << ',' << i << ',' << csv::fmt(seq.losses(t, i)) << '\n';
}

LossSequence read_losses_csv(const std::string& path, const GramContext& ctx, double B) {
    const auto rows = csv::read_numeric(path);
    if (rows.empty()) throw InputError(path + ": no loss rows");
    Index T = 0;
    const Index n = ctx.size();
    for (const auto& row : rows) {
        if (row.size() != 3) throw InputError(path + ": expected 3 fields per row");
        T = std::max(T, static_cast<Index>(row[0]));
    }
    if (T < 1) throw InputError(path + ": horizon must be >= 1");
    Matrix losses = Matrix::Constant(T, n, std::numeric_limits<double>::quiet_NaN());
    for (const auto& row : rows) {
        const Index t = static_cast<Index>(row[0]) - 1;
        const Index i = static_cast<Index>(row[1]);
        if (t < 0 || t >= T) throw InputError(path + ": round index out of range");
        check_index(i, n, "loss CSV");
        if (!std::isnan(losses(t, i))) throw InputError(path + ": duplicate (t, action) entry");
        losses(t, i) = row[2];
    }
    if (!losses.allFinite()) throw InputError(path + ": incomplete loss table");

    const GramPseudoInverse pinv(ctx);
    Matrix alphas(T, n);
    for (Index t = 0; t < T; ++t) {
        const Vector alpha = pinv.apply(losses.row(t).transpose());
        const double residual = (ctx.gram * alpha - losses.row(t).transpose()).cwiseAbs().maxCoeff();
        if (residual > 1e-7)
            throw InputError(path + ": losses not representable in the kernel span");
        if (rkhs_norm(alpha, ctx) > B + 1e-6)
            throw InputError(path + ": imported losses exceed the RKHS norm bound B");
        alphas.row(t) = alpha.transpose();
    }
    return LossSequence{std::move(alphas), std::move(losses), B};
}

}  // namespace kbandit
