#pragma once

#include "kbandit/rkhs.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace kbandit {

// ---------------------------------------------------------------------------
// Adversary specifications (all oblivious: fixed before interaction)
// ---------------------------------------------------------------------------

/// w_t = Phi(z_t) for a per-round anchor action z_t; the rank-one
/// restriction of prior work.
struct RankOne {
    std::vector<Index> anchor_schedule;  // length T
};

/// Seeded standard-normal coefficient vectors, rescaled into the B-ball
/// only when they leave it.
struct RandomRKHS {
    double B = 1.0;
    std::uint64_t seed = 0;
};

/// Piecewise rank-one: within each segment the target action carries the
/// lowest loss (w_t = -B Phi(z) / ||Phi(z)||, sign-flipping losses away
/// from the usual rank-one direction).
struct Switching {
    struct Segment {
        Index length = 0;
        Index target = 0;
    };
    std::vector<Segment> segments;  // lengths sum to T
    double B = 1.0;
};

/// Every round, the best arm's loss sits exactly `gap` below all other
/// arms, on top of a seeded common offset; coefficients are the minimum-
/// norm interpolant of that profile, rescaled into the B-ball if needed.
struct BestArmGap {
    Index best = 0;
    double gap = 0.5;  // in (0, 1)
    double B = 1.0;
    std::uint64_t seed = 0;
};

using AdversarySpec = std::variant<RankOne, RandomRKHS, Switching, BestArmGap>;

// ---------------------------------------------------------------------------
// Loss sequences
// ---------------------------------------------------------------------------

/// Oblivious loss sequence as RKHS coefficient vectors: w_t = sum_j
/// alpha_{t,j} Phi(x_j), so losses(t, i) = (K alpha_t)_i and
/// ||w_t||_H = sqrt(alpha_t^T K alpha_t) <= B.
struct LossSequence {
    Matrix alphas;  // T x N coefficient rows
    Matrix losses;  // T x N, row t = K alpha_t
    double B = 1.0;

    Index horizon() const { return losses.rows(); }
    Index n_actions() const { return losses.cols(); }
};

/// Materializes the full sequence for a horizon; deterministic in
/// (spec, ctx, T).
LossSequence generate(const AdversarySpec& spec, const GramContext& ctx, Index T);

/// Shrinks alpha onto the RKHS ball of radius B when its norm exceeds B;
/// identity otherwise. Throws NumericError if alpha^T K alpha is negative
/// beyond rounding.
Vector rescale_to_ball(const Vector& alpha, const GramContext& ctx, double B);

/// RKHS norm sqrt(alpha^T K alpha) of a coefficient vector.
double rkhs_norm(const Vector& alpha, const GramContext& ctx);

/// CSV replay format `t,action_index,loss` (t is 1-based).
void write_losses_csv(const LossSequence& seq, const std::string& path);

/// Rebuilds a sequence from the CSV replay format. Coefficients are
/// recovered as minimum-norm interpolants; losses outside the feature span
/// (not reproducible by any RKHS element on this action set) are rejected.
LossSequence read_losses_csv(const std::string& path, const GramContext& ctx, double B);

}  // namespace kbandit
