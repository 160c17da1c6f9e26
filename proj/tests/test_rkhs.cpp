#include "kbandit/rkhs.hpp"
#include "kbandit/rng.hpp"
#include "kbandit/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace kbandit;

namespace {

GramContext identity_ctx2() {
    // Two actions with exactly orthonormal unit features.
    return build_gram(FiniteRank{{1.0, 1.0}, 3}, grid_actions(1, 2));
}

GramContext unit_ctx1() { return build_gram(SquaredExponential{1.0}, grid_actions(1, 1)); }

}  // namespace

TEST_CASE("distribution invariants") {
    const Distribution u = Distribution::uniform(4);
    CHECK(u.weights().sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(u[2] == doctest::Approx(0.25));
    const Distribution pm = Distribution::point_mass(3, 1);
    CHECK(pm[1] == 1.0);
    CHECK(pm[0] == 0.0);
    Vector neg(2);
    neg << 0.5, -0.5;
    CHECK_THROWS_AS(Distribution::from_weights(neg), InputError);
    CHECK_THROWS_AS(Distribution::from_weights(Vector::Zero(2)), InputError);
}

TEST_CASE("covariance of simple distributions") {
    const GramContext ctx = identity_ctx2();
    // Uniform over orthonormal features: explicit sum of outer products
    // gives diag(1/2, 1/2).
    const CovarianceOperator sigma = covariance(ctx, Distribution::uniform(2));
    CHECK((sigma.matrix - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);

    // Point mass: single-term expectation Phi(x0) Phi(x0)^T.
    const CovarianceOperator pm = covariance(ctx, Distribution::point_mass(2, 0));
    const Vector phi = ctx.feature(0);
    CHECK((pm.matrix - phi * phi.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

    // A zero-weight action contributes nothing.
    Vector w(2);
    w << 1.0, 0.0;
    const CovarianceOperator z = covariance(ctx, Distribution::from_weights(w));
    CHECK((z.matrix - pm.matrix).cwiseAbs().maxCoeff() <= 1e-15);

    CHECK(sigma.matrix.trace() <= 1.0 + 1e-12);
}

TEST_CASE("scalar resolvent closed form") {
    const GramContext ctx = unit_ctx1();
    const RegularizedResolvent res(ctx, Distribution::point_mass(1, 0), 1.0);
    // Phi^T (Sigma + I)^-1 Phi = 1 / (1 + 1); the dual route
    // (k - kt^T (Kt + lambda)^-1 kt) / lambda gives (1 - 1/2) / 1.
    CHECK(res.bilinear(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.weighted_norm(0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("resolvent large-lambda limit") {
    const GramContext ctx = identity_ctx2();
    const RegularizedResolvent res(ctx, Distribution::uniform(2), 1e6);
    CHECK(res.bilinear(0, 0) == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(res.weighted_norm(0) == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("resolvent with diagonal covariance") {
    const GramContext ctx = identity_ctx2();
    const RegularizedResolvent res(ctx, Distribution::uniform(2), 0.5);
    // Sigma = diag(1/2): Phi^T (diag(1/2) + 1/2)^-1 Phi = 1.
    CHECK(res.bilinear(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.bilinear(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.bilinear(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero feature gives zero weighted norm") {
    // Linear kernel with the origin in the action set: Phi(0) = 0.
    Matrix pts(2, 1);
    pts << 0.0, 1.0;
    const GramContext ctx = build_gram(Linear{}, make_action_set(pts));
    const RegularizedResolvent res(ctx, Distribution::uniform(2), 0.3);
    CHECK(res.weighted_norm(0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("effective dimension") {
    const GramContext ctx = identity_ctx2();
    const CovarianceOperator sigma = covariance(ctx, Distribution::uniform(2));
    CHECK(effective_dim(sigma, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(effective_dim(sigma, 1e9) <= 1e-8);
    const CovarianceOperator zero{Matrix::Zero(2, 2)};
    CHECK(effective_dim(zero, 0.7) == doctest::Approx(0.0));
}

TEST_CASE("d_star_estimate basics") {
    const GramContext one = unit_ctx1();
    const DStarEstimate est1 = d_star_estimate(one, 1.0, 10);
    CHECK(est1.value == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(est1.distribution[0] == doctest::Approx(1.0));

    const GramContext ctx = identity_ctx2();
    const DStarEstimate est2 = d_star_estimate(ctx, 0.5, 100);
    CHECK(est2.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(est2.distribution[0] == doctest::Approx(0.5).epsilon(1e-6));

    for (std::uint64_t s = 1; s <= 5; ++s) {
        const GramContext rc = random_context(s, 10);
        const DStarEstimate est = d_star_estimate(rc, 0.3, 200);
        CHECK(est.value <= static_cast<double>(rc.size()) + 1e-9);
        CHECK(est.value >= 0.0);
    }
}

TEST_CASE("info gain greedy closed forms") {
    const GramContext one = unit_ctx1();
    // Single unit action picked twice at T lambda = 1: rank-one determinant
    // lemma gives log(1 + 2).
    CHECK(info_gain_greedy(one, 2, 0.5) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(info_gain_greedy(one, 1, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    bool relaxed = false;
    info_gain_greedy(one, 4, 0.05, &relaxed);
    CHECK(relaxed);
    info_gain_greedy(one, 4, 0.5, &relaxed);
    CHECK(!relaxed);

    // Zero kernel: nothing to gain.
    const GramContext zero = build_gram(FiniteRank{{0.0}, 1}, grid_actions(1, 3));
    CHECK(info_gain_greedy(zero, 5, 1.0) == doctest::Approx(0.0));

    // Monotone in T.
    const GramContext rc = random_context(9, 8);
    double prev = 0.0;
    for (Index T : {1, 2, 4, 8, 16}) {
        const double v = info_gain_greedy(rc, T, 1.0);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

TEST_CASE("max info gain") {
    const GramContext one = unit_ctx1();
    CHECK(max_info_gain(one, 1) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
    const GramContext ctx = identity_ctx2();
    // Orthogonal picks alternate: (1/2) log det(diag(2, 2)) = log 2.
    CHECK(max_info_gain(ctx, 2) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const GramContext zero = build_gram(FiniteRank{{0.0}, 1}, grid_actions(1, 2));
    CHECK(max_info_gain(zero, 1) == doctest::Approx(0.0));
    CHECK_THROWS_AS(max_info_gain(one, 0), InputError);
}

TEST_CASE("bias operator") {
    const GramContext one = unit_ctx1();
    const RegularizedResolvent res(one, Distribution::point_mass(1, 0), 1.0);
    Vector alpha(1);
    alpha << 1.0;
    // lambda * bilinear * alpha = 1 * 1/2 * 1.
    CHECK(res.bias_operator_apply(alpha)[0] == doctest::Approx(0.5).epsilon(1e-12));

    // lambda -> 0 with a full-support distribution: bias vanishes.
    const GramContext ctx = identity_ctx2();
    const RegularizedResolvent tiny(ctx, Distribution::uniform(2), 1e-8);
    Vector a2(2);
    a2 << 0.7, -0.3;
    CHECK(tiny.bias_operator_apply(a2).cwiseAbs().maxCoeff() <= 1e-6);

    CHECK(res.bias_operator_apply(Vector::Zero(1)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dual and primal bilinear routes agree on random instances") {
    for (std::uint64_t s = 100; s < 130; ++s) {
        const GramContext ctx = random_context(s, 20);
        const Distribution p = random_distribution(s, ctx.size());
        auto rng = CounterRng::keyed(s, 7, 1);
        const double lambda = 1e-4 * std::exp(rng.next_unit() * std::log(1e5));
        const RegularizedResolvent res(ctx, p, lambda);
        const Matrix primal = bilinear_matrix_primal(ctx, p, lambda);
        CHECK((res.bilinear_matrix() - primal).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("resolvent shrinkage bounds") {
    for (std::uint64_t s = 200; s < 215; ++s) {
        const GramContext ctx = random_context(s, 12);
        const Index n = ctx.size();
        const Distribution q = random_distribution(s, n);
        auto rng = CounterRng::keyed(s, 8, 1);
        const double lambda = 0.01 + rng.next_unit();
        const double gamma = 0.1 + 0.8 * rng.next_unit();
        const Distribution nu_g = random_distribution(s + 1000, n);
        const Distribution p = Distribution::from_weights(
            (1.0 - gamma) * q.weights() + gamma * nu_g.weights());

        const RegularizedResolvent res(ctx, p, lambda);
        for (Index i = 0; i < n; ++i)
            CHECK(res.bilinear(i, i) <= ctx.gram(i, i) / lambda + 1e-9);

        // (Sigma_p + lambda I)^-1 <= (1/gamma)(Sigma(nu_G) + (lambda/gamma) I)^-1
        // as a matrix inequality, checked through the eigenvalues of the
        // difference of the explicit primal inverses.
        Matrix mp = ctx.sqrt.transpose() * p.weights().asDiagonal() * ctx.sqrt;
        mp.diagonal().array() += lambda;
        Matrix mg = ctx.sqrt.transpose() * nu_g.weights().asDiagonal() * ctx.sqrt;
        mg.diagonal().array() += lambda / gamma;
        const Matrix diff = mg.inverse() / gamma - mp.inverse();
        Eigen::SelfAdjointEigenSolver<Matrix> es(((diff + diff.transpose()) * 0.5).eval(),
                                                 Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("leverage second moment bounded by effective dimension") {
    const CheckResult r = check_leverage(7777, 60, 15, 1e-9);
    CHECK(r.pass);
}

TEST_CASE("effective dimension bounded by greedy info gain") {
    const CheckResult r = check_infogain(8888, 30, {16, 64}, 1e-9);
    CHECK(r.pass);
}

TEST_CASE("eigendecay bounds on imposed spectra") {
    const CheckResult r = check_eigendecay(9999, 10, 1e-9);
    CHECK(r.pass);
}
