#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "support.hpp"
#include "xxz/golden.hpp"
#include "xxz/hamiltonians.hpp"
#include "xxz/operators.hpp"
#include "xxz/scalars.hpp"

using namespace xxz;
using namespace xxz::test;

namespace {

using Mat = Eigen::MatrixXcd;

Mat printed_r(cplx u, cplx eta) {
    Mat r = Mat::Zero(4, 4);
    r(0, 0) = r(3, 3) = std::sinh(u + eta);
    r(1, 1) = r(2, 2) = std::sinh(u);
    r(1, 2) = r(2, 1) = std::sinh(eta);
    return r;
}

Mat printed_k(cplx u, cplx alpha, cplx beta, cplx theta) {
    Mat k(2, 2);
    k(0, 0) = 2.0 * (std::sinh(alpha) * std::cosh(beta) * std::cosh(u) + std::cosh(alpha) * std::sinh(beta) * std::sinh(u));
    k(1, 1) = 2.0 * (std::sinh(alpha) * std::cosh(beta) * std::cosh(u) - std::cosh(alpha) * std::sinh(beta) * std::sinh(u));
    k(0, 1) = std::exp(theta) * std::sinh(2.0 * u);
    k(1, 0) = std::exp(-theta) * std::sinh(2.0 * u);
    return k;
}

/// Two-qubit operator `op` (index 2a + b) placed on qubits (first, second) of an
/// n-qubit register, by explicit matrix elements.
Mat place_pair(const Mat& op, int first, int second, int nbits) {
    const Eigen::Index dim = Eigen::Index{1} << nbits;
    Mat out = Mat::Zero(dim, dim);
    for (Eigen::Index x = 0; x < dim; ++x)
        for (Eigen::Index y = 0; y < dim; ++y) {
            const Eigen::Index mask = (Eigen::Index{1} << first) | (Eigen::Index{1} << second);
            if ((x & ~mask) != (y & ~mask)) continue;
            const int xa = (x >> first) & 1, xb = (x >> second) & 1;
            const int ya = (y >> first) & 1, yb = (y >> second) & 1;
            out(x, y) = op(2 * xa + xb, 2 * ya + yb);
        }
    return out;
}

Mat place_one(const Mat& op, int bit, int nbits) {
    const Eigen::Index dim = Eigen::Index{1} << nbits;
    Mat out = Mat::Zero(dim, dim);
    for (Eigen::Index x = 0; x < dim; ++x)
        for (Eigen::Index y = 0; y < dim; ++y) {
            const Eigen::Index mask = Eigen::Index{1} << bit;
            if ((x & ~mask) != (y & ~mask)) continue;
            out(x, y) = op((x >> bit) & 1, (y >> bit) & 1);
        }
    return out;
}

/// t(u) by brute force on aux (x) quantum space: aux is the top bit, site k is bit k.
Mat transfer_oracle(cplx u, const ModelParams& p) {
    const int nb = p.n + 1;
    const int aux = p.n;
    const cplx eta = p.eta();
    const Mat r = printed_r(u, eta);
    const Eigen::Index full = Eigen::Index{1} << nb;
    // T = R_0N ... R_01 and T^ = R_01 ... R_0N
    Mat t = Mat::Identity(full, full);
    for (int site = p.n - 1; site >= 0; --site) t = t * place_pair(r, aux, site, nb);
    Mat th = Mat::Identity(full, full);
    for (int site = 0; site < p.n; ++site) th = th * place_pair(r, aux, site, nb);
    const Mat kp = printed_k(-u - eta, -p.alpha_plus, -p.beta_plus, p.theta_plus);
    const Mat km = printed_k(u, p.alpha_minus, p.beta_minus, p.theta_minus);
    const Mat prod = place_one(kp, aux, nb) * t * place_one(km, aux, nb) * th;
    const Eigen::Index dim = Eigen::Index{1} << p.n;
    return prod.topLeftCorner(dim, dim) + prod.bottomRightCorner(dim, dim);
}

ModelParams random_half(std::mt19937_64& rng, int n, int r = 1, int q = 3) {
    return random_params(rng, BoundaryCase::Case2AlphaAlpha, n, 1, r, q);
}

}  // namespace

// --- R --------------------------------------------------------------------

TEST(RMatrix, MatchesPrintedEntries) {
    const ModelParams p = golden::table1_params();
    const cplx u{0.3, -0.2};
    EXPECT_LT((Mat(r_matrix(u, p)) - printed_r(u, p.eta())).norm(), 1e-15);
}

TEST(RMatrix, PermutationAtZero) {
    const ModelParams p = golden::table1_params();
    Mat perm = Mat::Zero(4, 4);
    perm(0, 0) = perm(3, 3) = perm(1, 2) = perm(2, 1) = 1.0;
    EXPECT_LT((Mat(r_matrix(0.0, p)) - std::sinh(p.eta()) * perm).norm(), 1e-15);
}

TEST(RMatrix, UnitarityAndYangBaxterAt100Points) {
    std::mt19937_64 rng(21);
    const ModelParams p = golden::table1_params();
    for (int k = 0; k < 100; ++k) {
        const cplx u = random_u(rng), v = random_u(rng);
        const Mat uni = Mat(r_matrix(u, p)) * Mat(r_matrix(-u, p));
        EXPECT_LT((uni + xi(u, p) * Mat::Identity(4, 4)).norm(), 1e-12 * std::max(1.0, std::abs(xi(u, p))));
        // qubits: 1 = bit 2, 2 = bit 1, 3 = bit 0
        const Mat a = place_pair(Mat(r_matrix(u - v, p)), 2, 1, 3);
        const Mat b = place_pair(Mat(r_matrix(u, p)), 2, 0, 3);
        const Mat c = place_pair(Mat(r_matrix(v, p)), 1, 0, 3);
        const Mat lhs = a * b * c, rhs = c * b * a;
        EXPECT_LT((lhs - rhs).norm(), 1e-12 * std::max(1.0, lhs.norm()));
    }
}

// --- K --------------------------------------------------------------------

TEST(KMatrix, ScalarAtZero) {
    std::mt19937_64 rng(22);
    for (int k = 0; k < 100; ++k) {
        const ModelParams p = random_half(rng, 2);
        const Mat2 k0 = k_minus(0.0, p);
        const cplx want = 2.0 * std::sinh(p.alpha_minus) * std::cosh(p.beta_minus);
        EXPECT_LT((Mat(k0) - want * Mat::Identity(2, 2)).norm(), 1e-13 * std::max(1.0, std::abs(want)));
    }
}

TEST(KMatrix, QuarterPeriod) {
    const ModelParams p = golden::table1_params();
    const Mat2 k = k_minus(cplx(0, pi / 2), p);
    EXPECT_LT(std::abs(k(0, 1)), 1e-15);
    EXPECT_LT(std::abs(k(1, 0)), 1e-15);
    const cplx i{0, 1};
    EXPECT_LT(std::abs(k(0, 0) - 2.0 * i * std::cosh(p.alpha_minus) * std::sinh(p.beta_minus)), 1e-14);
    EXPECT_LT(std::abs(k(1, 1) + 2.0 * i * std::cosh(p.alpha_minus) * std::sinh(p.beta_minus)), 1e-14);
}

TEST(KMatrix, Table1AgainstHighPrecision) {
    const ModelParams p = golden::table1_params();
    const auto lp = oracle::lift(p);
    const mpc u(0.3);
    const Mat2 k = k_minus(0.3, p);
    const mpc k11 = 2 * (sinh(lp.am) * cosh(lp.bm) * cosh(u) + cosh(lp.am) * sinh(lp.bm) * sinh(u));
    const mpc k22 = 2 * (sinh(lp.am) * cosh(lp.bm) * cosh(u) - cosh(lp.am) * sinh(lp.bm) * sinh(u));
    const mpc k12 = exp(lp.tm) * sinh(2 * u);
    const mpc k21 = exp(-lp.tm) * sinh(2 * u);
    EXPECT_LT(rel_err(k(0, 0), to_double(k11)), 1e-14);
    EXPECT_LT(rel_err(k(1, 1), to_double(k22)), 1e-14);
    EXPECT_LT(rel_err(k(0, 1), to_double(k12)), 1e-14);
    EXPECT_LT(rel_err(k(1, 0), to_double(k21)), 1e-14);
}

TEST(KMatrix, PlusIsTheSubstitutedMinus) {
    const ModelParams p = golden::table2_params();
    const cplx u{0.2, 0.4};
    const Mat want = printed_k(-u - p.eta(), -p.alpha_plus, -p.beta_plus, p.theta_plus);
    EXPECT_LT((Mat(k_plus(u, p)) - want).norm(), 1e-14);
}

// --- transfer matrix ------------------------------------------------------

TEST(Transfer, MatchesBruteForceConstruction) {
    std::mt19937_64 rng(23);
    for (int n : {1, 2, 3, 4}) {
        const ModelParams p = random_half(rng, n, 2, 5);
        for (int k = 0; k < 3; ++k) {
            const cplx u = random_u(rng);
            const Mat want = transfer_oracle(u, p);
            EXPECT_LT((transfer_half(u, p) - want).norm(), 1e-12 * want.norm()) << "n=" << n;
        }
    }
}

TEST(Transfer, ProportionalToIdentityAtZero) {
    const Mat t0 = transfer_half(0.0, golden::table1_params());
    EXPECT_LT((t0 - t0(0, 0) * Mat::Identity(t0.rows(), t0.cols())).norm(), 1e-12 * t0.norm());
}

TEST(Transfer, CommutesAt20Pairs) {
    std::mt19937_64 rng(24);
    for (const ModelParams& p : {golden::table1_params(), random_half(rng, 3), random_half(rng, 4, 2, 5)})
        for (int k = 0; k < 20; ++k) EXPECT_LT(commutator_residual(random_u(rng), random_u(rng), p), 1e-10);
}

TEST(Transfer, TwoPiIPeriodic) {
    std::mt19937_64 rng(25);
    const ModelParams p = golden::table1_params();
    for (int k = 0; k < 5; ++k) {
        const cplx u = random_u(rng);
        const Mat a = transfer_half(u, p);
        EXPECT_LT((transfer_half(u + cplx(0, 2 * pi), p) - a).norm(), 1e-12 * a.norm());
    }
}

TEST(Transfer, SizeGuard) {
    ModelParams p = golden::table1_params();
    p.n = max_transfer_sites + 1;
    try {
        transfer_half(0.1, p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionTooLarge);
    }
}

// --- derivative -----------------------------------------------------------

TEST(TransferDerivative, HamiltonianIdentityTable1N3) {
    ModelParams p = golden::table1_params();
    p.n = 3;
    EXPECT_LT(derivative_identity_residual(p), 1e-8);
}

TEST(TransferDerivative, HamiltonianIdentityRandomN2) {
    std::mt19937_64 rng(26);
    for (const auto& cp : supported_case_parities())
        EXPECT_LT(derivative_identity_residual(random_params(rng, cp.bc, 2, 1, cp.r, cp.q)), 1e-8) << cp.label();
}

TEST(TransferDerivative, ConstantFamilyHasZeroDerivative) {
    const Mat c = Mat::Random(4, 4);
    const Mat d = richardson_derivative0([&](double) { return c; });
    EXPECT_LT(d.norm(), 1e-12);
}

TEST(TransferDerivative, StepHalvingAgrees) {
    const ModelParams p = golden::table1_params();
    auto f = [&](double u) { return transfer_half(cplx(u, 0.0), p); };
    const Mat d1 = detail::central_difference4(f, 1e-3);
    const Mat d2 = detail::central_difference4(f, 5e-4);
    EXPECT_LT((d1 - d2).norm() / d2.norm(), 1e-7);
    // an analytic family: d/du of exp(u) A is A
    const Mat a = Mat::Random(3, 3);
    const Mat da = richardson_derivative0([&](double u) { return Mat(std::exp(u) * a); });
    EXPECT_LT((da - a).norm(), 1e-10 * a.norm());
}

TEST(TransferDerivative, UnstableFamilyIsReported) {
    // oscillation on the scale of the step makes the two estimates disagree
    auto f = [](double u) { return Mat(Mat::Identity(2, 2) * std::sin(3e3 * u)); };
    try {
        richardson_derivative0(f);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DerivativeUnstable);
    }
}

// --- functional relation --------------------------------------------------

TEST(FunctionalRelation, QThreeBothParities) {
    std::mt19937_64 rng(27);
    for (int r : {1, 2})
        for (BoundaryCase bc : {BoundaryCase::Case1AlphaBeta, BoundaryCase::Case2AlphaAlpha, BoundaryCase::Case3BetaBeta}) {
            if (bc == BoundaryCase::Case3BetaBeta && r == 2) continue;
            const ModelParams p = random_params(rng, bc, 2, 1, r, 3);
            EXPECT_LT(functional_relation_operator_residual(0.2, p), 1e-9);
        }
}

TEST(FunctionalRelation, QFiveTable1Boundaries) {
    ModelParams p = golden::table1_params();
    p.n = 2;
    EXPECT_LT(functional_relation_operator_residual(0.1, p), 1e-9);
}

TEST(FunctionalRelation, SumCompositionIsRejected) {
    ModelParams p = golden::table1_params();
    p.n = 2;
    const double r = functional_relation_operator_residual(0.1, p, [&](cplx v) { return f0(v, p) + f1(v, p); });
    EXPECT_GT(r, 1e-2);
}

TEST(FunctionalRelation, RestrictedToPrintedOrders) {
    const ModelParams p = case2_params({2, 1, 1, 7}, {0, 0.4}, {0, 0.8}, 0.1);
    try {
        functional_relation_operator_residual(0.1, p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnsupportedQ);
    }
}
