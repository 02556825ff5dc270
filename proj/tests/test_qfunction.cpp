#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "oracle.hpp"
#include "support.hpp"
#include "xxz/bethe_solver.hpp"
#include "xxz/golden.hpp"
#include "xxz/operators.hpp"
#include "xxz/qfunction.hpp"

using namespace xxz;
using namespace xxz::test;

namespace {

BetheState table1_row(std::size_t i) { return BetheState(golden::table1_params(), golden::table1_levels()[i].roots); }

BetheState refined_table1_row(std::size_t i) {
    const NewtonResult nr = newton_solve(table1_row(i));
    EXPECT_TRUE(nr.converged);
    return nr.state;
}

/// Eigenvalue branches of t(u) in the eigenbasis of t(u0), computed here
/// rather than through the solver's branch tracker.
struct Branches {
    Eigen::MatrixXcd v, vinv;
    ModelParams p;
    explicit Branches(const ModelParams& mp) : p(mp) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(transfer_half(cplx(0.23, 0.41), p));
        v = es.eigenvectors();
        vinv = v.inverse();
    }
    cplx at(cplx u, Eigen::Index i) const { return (vinv * transfer_half(u, p) * v)(i, i); }
};

}  // namespace

// --- BetheState -----------------------------------------------------------

TEST(BetheState, RootCountPerCase) {
    std::mt19937_64 rng(1);
    for (int two_s : {1, 2})
        for (int n : {2, 3}) {
            EXPECT_EQ(expected_root_count(random_params(rng, BoundaryCase::Case1AlphaBeta, n, two_s, 1, 3)),
                      two_s * n + 3 - 1);
            EXPECT_EQ(expected_root_count(random_params(rng, BoundaryCase::Case2AlphaAlpha, n, two_s, 1, 3)),
                      two_s * n + 3 + 1);
            EXPECT_EQ(expected_root_count(random_params(rng, BoundaryCase::Case3BetaBeta, n, two_s, 1, 3)),
                      two_s * n + 3 - 1);
        }
}

TEST(BetheState, WrongRootCountIsRejected) {
    auto roots = golden::table1_levels()[0].roots;
    roots.pop_back();
    EXPECT_THROW(BetheState(golden::table1_params(), roots), Error);
}

TEST(BetheState, RootsAreReducedIntoTheStrip) {
    auto roots = golden::table1_levels()[0].roots;
    roots[0] += cplx(0.0, 6.0 * pi);
    const BetheState s(golden::table1_params(), roots);
    for (cplx u : s.roots()) {
        EXPECT_GT(u.imag(), -pi);
        EXPECT_LE(u.imag(), pi);
    }
    EXPECT_LT(std::abs(s.roots()[0] - golden::table1_levels()[0].roots[0]), 1e-12);
}

TEST(BetheState, ShiftPerCase) {
    const ModelParams c2 = golden::table1_params();
    EXPECT_LT(std::abs(BetheState::crossing_shift(c2) + 4.0 * c2.eta()), 1e-15);
    const ModelParams c3 = case3_params({2, 1, 1, 3}, 0.2, 0.3, 0.1);
    EXPECT_EQ(BetheState::crossing_shift(c3), c3.eta());
}

// --- Q --------------------------------------------------------------------

TEST(QEval, VanishesAtRoots) {
    const BetheState s = table1_row(2);
    for (cplx u : s.roots()) EXPECT_LT(std::abs(q_eval(u, s)), 1e-14);
}

TEST(QEval, CrossingSymmetry) {
    std::mt19937_64 rng(2);
    for (std::size_t row : {0u, 5u, 11u}) {
        const BetheState s = table1_row(row);
        const cplx c = static_cast<double>(s.params().q - 1) * s.params().eta();
        for (int k = 0; k < 20; ++k) {
            const cplx u = random_u(rng);
            EXPECT_LT(rel_err(q_eval(-u + c, s), q_eval(u, s)), 1e-12);
        }
    }
}

TEST(QEval, ProductOfCoshDifferences) {
    std::mt19937_64 rng(3);
    std::vector<BetheState> states{table1_row(0)};
    const ModelParams c3 = case3_params({2, 1, 1, 3}, {0.3, 0.1}, {0.2, -0.4}, 0.1);
    std::vector<cplx> r3;
    for (int j = 0; j < expected_root_count(c3); ++j) r3.push_back(random_u(rng));
    states.emplace_back(c3, r3);
    for (const auto& s : states) {
        const cplx half_sigma = 0.5 * s.shift();
        for (int k = 0; k < 20; ++k) {
            const cplx u = random_u(rng);
            cplx prod = std::pow(2.0, -s.size());
            for (cplx uj : s.roots()) prod *= std::cosh(u + half_sigma) - std::cosh(uj + half_sigma);
            EXPECT_LT(rel_err(q_eval(u, s), prod), 1e-12);
        }
    }
}

TEST(QLogDerivative, MatchesFiniteDifference) {
    const BetheState s = refined_table1_row(0);
    for (cplx u : {cplx(0.2), cplx(0.31, -0.47), cplx(-0.6, 0.2)}) {
        const double h = 1e-5;
        auto logq = [&](cplx v) { return std::log(q_eval(v, s)); };
        const cplx fd = (logq(u + h) - logq(u - h)) / (2.0 * h);
        EXPECT_LT(std::abs(q_log_derivative(u, s) - fd) / std::max(1.0, std::abs(fd)), 1e-8);
    }
}

TEST(QLogDerivative, PoleAtReflectedRoot) {
    const BetheState s = table1_row(0);
    try {
        q_log_derivative(-s.roots()[0] - s.shift(), s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PoleAtRoot);
    }
}

// --- h --------------------------------------------------------------------

TEST(HFunction, Table1AgainstPrintedFormula) {
    const ModelParams p = golden::table1_params();
    const cplx u{0.1, 0.2};
    const cplx want = to_double(oracle::h_tilde(to_mp(u), oracle::lift(p)));
    EXPECT_LT(rel_err(h_tilde(u, p), want), 1e-13);
    EXPECT_EQ(h_fn(u, p), h_tilde(u, p));  // s = 1/2: no rescaling
}

TEST(HFunction, EveryCaseParityAgainstPrintedFormula) {
    std::mt19937_64 rng(4);
    for (const auto& cp : supported_case_parities())
        for (int two_s : {1, 2})
            for (int n : {1, 2, 3}) {
                const ModelParams p = random_params(rng, cp.bc, n, two_s, cp.r, cp.q);
                const auto lp = oracle::lift(p);
                for (int k = 0; k < 4; ++k) {
                    const cplx u = random_u(rng);
                    EXPECT_LT(rel_err(h_tilde(u, p), to_double(oracle::h_tilde(to_mp(u), lp))), 1e-11)
                        << cp.label() << " two_s=" << two_s << " n=" << n;
                    EXPECT_LT(rel_err(h_fn(u, p), to_double(oracle::h(to_mp(u), lp))), 1e-11);
                }
            }
}

TEST(HFunction, Case3EvenRRefuses) {
    const ModelParams p = case3_params({2, 1, 2, 5}, 0.2, 0.3, 0.1);
    try {
        h_fn(0.1, p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnsupportedCase);
    }
}

class HConditions : public ::testing::TestWithParam<CaseParity> {};

TEST_P(HConditions, HoldAtFiftyPoints) {
    const CaseParity cp = GetParam();
    std::mt19937_64 rng(7);
    for (int two_s : {1, 2}) {
        const ModelParams p = random_params(rng, cp.bc, 2, two_s, cp.r, cp.q);
        for (int k = 0; k < 50; ++k) {
            const cplx u = random_u(rng);
            EXPECT_LT(cond0_residual(u, p), 1e-12);
            EXPECT_LT(std::abs(cond1_residual(u, p)), 1e-9);
            EXPECT_LT(std::abs(cond2_residual(u, p)), 1e-8);
            EXPECT_LT(std::abs(quadratic_residual(u, p)), 1e-8);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(All, HConditions, ::testing::ValuesIn(supported_case_parities()),
                         [](const auto& info) { return info.param.label(); });

TEST(HConditions, Cond1AgainstIndependentDelta) {
    // both sides through the 50-digit transcriptions
    std::mt19937_64 rng(8);
    for (const auto& cp : supported_case_parities()) {
        const ModelParams p = random_params(rng, cp.bc, 2, 1, cp.r, cp.q);
        const auto lp = oracle::lift(p);
        const mpc u = to_mp(random_u(rng));
        const mpc shift = mpc(p.q + 1) * lp.eta;
        const mpc second = cp.bc == BoundaryCase::Case3BetaBeta ? -u - lp.eta : -u - shift;
        const cplx lhs = to_double(oracle::h(u + shift, lp) * oracle::h(second, lp));
        EXPECT_LT(rel_err(lhs, to_double(oracle::delta(u, lp))), 1e-12) << cp.label();
    }
}

// --- T-Q and Bethe equations ---------------------------------------------

TEST(LambdaTQ, Table1Row1IsATransferEigenvalue) {
    const BetheState s = refined_table1_row(0);
    const ModelParams& p = s.params();
    for (cplx u : {cplx(0.13, 0.27), cplx(-0.4, 0.1)}) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(transfer_half(u, p), false);
        const cplx lam = lambda_tq(u, s);
        double best = 1e300;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            best = std::min(best, std::abs(es.eigenvalues()(i) - lam));
        EXPECT_LT(best, 1e-6 * std::max(1.0, std::abs(lam)));
    }
}

TEST(LambdaTQ, Periodic) {
    const BetheState s = refined_table1_row(3);
    const cplx u{0.21, -0.33};
    EXPECT_LT(rel_err(lambda_tq(u + cplx(0, 2 * pi), s), lambda_tq(u, s)), 1e-10);
}

TEST(LambdaTQ, FiniteNearARoot) {
    const BetheState s = refined_table1_row(0);
    const cplx uj = s.roots()[0];
    std::vector<cplx> vals;
    for (double radius : {1e-4, 1e-5, 1e-6})
        for (int k = 0; k < 4; ++k) vals.push_back(lambda_tq(uj + radius * std::polar(1.0, 0.7 + k * pi / 2), s));
    double spread = 0.0;
    for (cplx v : vals) spread = std::max(spread, std::abs(v - vals.back()));
    EXPECT_LT(spread, 1e-2 * std::max(1.0, std::abs(vals.back())));
}

/// Indices of roots whose partner sits exactly (q-1) eta away: both terms of
/// their Bethe equation vanish together, so the normalized residual is 0/0.
std::vector<bool> exact_string_members(const BetheState& s, double tol) {
    const cplx c = static_cast<double>(s.params().q - 1) * s.params().eta();
    std::vector<bool> out(s.roots().size(), false);
    for (std::size_t a = 0; a < s.roots().size(); ++a)
        for (std::size_t b = 0; b < s.roots().size(); ++b)
            if (a != b && strip_distance(s.roots()[a] + c, s.roots()[b]) < tol) out[a] = out[b] = true;
    return out;
}

TEST(BetheResiduals, PrintedRefinedAndPerturbed) {
    const BetheState printed = table1_row(0);
    const BetheState refined = refined_table1_row(0);
    const auto strings = exact_string_members(printed, 1e-5);
    // row 1 carries one exact 2-string; everything else is well conditioned
    EXPECT_EQ(std::count(strings.begin(), strings.end(), true), 2);
    const auto rp = bethe_residuals(printed);
    const auto rr = bethe_residuals(refined);
    for (std::size_t j = 0; j < rp.size(); ++j) {
        if (strings[j]) continue;
        // six printed digits leave up to ~3e-3 here (roots near 0.314i and 1.572i)
        EXPECT_LT(std::abs(rp[j]), 1e-2) << "root " << j;
        EXPECT_LT(std::abs(rr[j]), 1e-10) << "root " << j;
    }
    // the printed digits are where the refined roots are
    EXPECT_LT(root_set_distance(printed.roots(), refined.roots(), printed.shift()), 1e-5);
    // the string pair itself is certified through Lambda instead
    EXPECT_LT(root_error_estimate(refined), 1e-5);

    // perturb a free (unpinned) root
    const auto pins = pinned_points(refined.params());
    std::vector<cplx> roots = refined.roots();
    std::size_t j = 0;
    while (nearest_pin(roots[j], pins, pin_snap_radius) || strings[j]) ++j;
    roots[j] += 0.1;
    EXPECT_GT(max_abs(bethe_residuals(BetheState(refined.params(), roots))), 1e-2);
}

TEST(BetheResiduals, PrintedRowsWithoutStrings) {
    for (std::size_t row = 2; row < golden::table1_levels().size(); ++row) {
        const BetheState s = table1_row(row);
        const auto strings = exact_string_members(s, 1e-5);
        if (std::count(strings.begin(), strings.end(), true)) continue;
        EXPECT_LT(max_abs(bethe_residuals(newton_solve(s).state)), 1e-10) << "row " << row;
    }
}

TEST(ZProduct, MatchesOracleProduct) {
    const ModelParams p = golden::table2_params();
    const auto lp = oracle::lift(p);
    const cplx u{0.27, 0.11};
    mpc z(1);
    for (int j = 0; j < p.q; ++j) z *= oracle::h(to_mp(u) + mpc(2 * j) * lp.eta, lp);
    EXPECT_LT(rel_err(z_product(u, p), to_double(z)), 1e-11);
}

// --- det M ----------------------------------------------------------------

TEST(DetM, ConfigTiesPToQ) {
    const DetMConfig cfg(golden::table1_params());
    EXPECT_EQ(cfg.p + 1, cfg.params.q);
    DetMConfig bad = cfg;
    bad.p = 3;
    EXPECT_THROW(det_m_matrix(0.1, bad, [](cplx) { return cplx(1.0); }), Error);
}

TEST(DetM, VanishesForTQEigenvalues) {
    for (std::size_t row : {0u, 7u, 15u}) {
        const BetheState s = refined_table1_row(row);
        const DetMConfig cfg(s.params(), LambdaSource::FromTQ);
        for (cplx u : {cplx(0.11, 0.3), cplx(-0.25, -0.2)})
            EXPECT_LT(std::abs(det_m_residual(u, cfg, [&](cplx v) { return lambda_tq_unrescaled(v, s); })), 1e-8);
    }
}

TEST(DetM, VanishesForDiagonalizedEigenvalues) {
    const ModelParams p = golden::table1_params();
    const Branches br(p);
    const DetMConfig cfg(p, LambdaSource::FromDiagonalization);
    for (Eigen::Index i = 0; i < br.v.cols(); ++i)
        for (cplx u : {cplx(0.11, 0.3), cplx(-0.25, -0.2)})
            EXPECT_LT(std::abs(det_m_residual(u, cfg, [&](cplx v) { return br.at(v, i); })), 1e-7) << "branch " << i;
}

TEST(DetM, RandomLambdaIsOrderOne) {
    std::mt19937_64 rng(9);
    const ModelParams p = golden::table1_params();
    const DetMConfig cfg(p);
    const Branches br(p);
    for (int k = 0; k < 5; ++k) {
        const cplx u = random_u(rng);
        // random values on the scale of the true eigenvalues
        const double scale = std::abs(br.at(u, 0));
        auto lam = [&](cplx) { return scale * random_cplx(rng, 1.0, 1.0); };
        EXPECT_GT(std::abs(det_m_residual(u, cfg, lam)), 1e-3);
    }
}

TEST(DetM, SpinOneFromTQ) {
    const ModelParams p = golden::table2_params();
    const DetMConfig cfg(p);
    for (const auto& level : golden::table2_levels()) {
        const NewtonResult nr = newton_solve(BetheState(p, level.roots));
        ASSERT_TRUE(nr.converged);
        EXPECT_LT(std::abs(det_m_residual(cplx(0.17, 0.29), cfg,
                                          [&](cplx v) { return lambda_tq_unrescaled(v, nr.state); })),
                  1e-8);
    }
}
