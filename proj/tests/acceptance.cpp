// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "support.hpp"
#include "xxz/bethe_solver.hpp"
#include "xxz/golden.hpp"
#include "xxz/hamiltonians.hpp"
#include "xxz/operators.hpp"
#include "xxz/spectrum.hpp"

using namespace xxz;
using namespace xxz::test;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

/// Spectrum reproduction shared by criteria 1 and 2.
Verdict reproduce(const ModelParams& p, const std::vector<golden::GoldenLevel>& printed, double printed_tol,
                  double time_limit) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunRecord rec = completeness_report(p);
    std::vector<cplx> bethe, table;
    for (const auto& l : rec.levels) bethe.push_back(l.energy);
    for (const auto& g : printed) table.push_back(g.energy);
    const double vs_printed = match_spectra(bethe, table).max_pair_deviation;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Verdict v;
    v.pass = rec.levels.size() == printed.size() && rec.unmatched.empty() && vs_printed < printed_tol &&
             rec.max_deviation < 1e-6 && secs < time_limit;
    v.detail = std::to_string(rec.levels.size()) + " levels, vs printed " + fmt(vs_printed) + " (< " +
               fmt(printed_tol) + "), vs diagonalization " + fmt(rec.max_deviation) + " (< 1e-6), " + fmt(secs) +
               " s (< " + fmt(time_limit) + ")";
    return v;
}

Verdict criterion1() {
    return reproduce(golden::table1_params(), golden::table1_levels(), golden::table1_tolerance, 10.0);
}

Verdict criterion2() {
    return reproduce(golden::table2_params(), golden::table2_levels(), golden::table2_tolerance, 10.0);
}

Verdict criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(301);
    double worst = 0.0;
    int configs = 0;
    for (int n : {2, 3})
        for (const auto& cp : supported_case_parities()) {
            const ModelParams p = random_params(rng, cp.bc, n, 1, cp.r, cp.q);
            for (int k = 0; k < 10; ++k) worst = std::max(worst, functional_relation_operator_residual(random_u(rng), p));
            ++configs;
        }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {worst < 1e-9 && secs < 30.0, std::to_string(configs) + " configs x 10 u, max residual " + fmt(worst) +
                                             " (< 1e-9), " + fmt(secs) + " s (< 30)"};
}

Verdict criterion4() {
    std::mt19937_64 rng(401);
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, quad = 0.0;
    int configs = 0;
    for (const auto& cp : supported_case_parities())
        for (int two_s : {1, 2}) {
            const ModelParams p = random_params(rng, cp.bc, 1 + configs % 3, two_s, cp.r, cp.q);
            for (int k = 0; k < 50; ++k) {
                const cplx u = random_u(rng);
                c0 = std::max(c0, cond0_residual(u, p));
                c1 = std::max(c1, std::abs(cond1_residual(u, p)));
                c2 = std::max(c2, std::abs(cond2_residual(u, p)));
                quad = std::max(quad, std::abs(quadratic_residual(u, p)));
            }
            ++configs;
        }
    const double worst = std::max({c0, c1, c2, quad});
    return {worst < 1e-8, std::to_string(configs) + " case/parity/spin configs x 50 u: periodicity " + fmt(c0) +
                              ", h-delta " + fmt(c1) + ", z-sum " + fmt(c2) + ", z-quadratic " + fmt(quad) +
                              " (all < 1e-8)"};
}

Verdict criterion5() {
    std::mt19937_64 rng(501);
    const auto cps = supported_case_parities();
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        const CaseParity& cp = cps[static_cast<std::size_t>(3 * k) % cps.size()];
        const ModelParams p = random_params(rng, cp.bc, 1 + k % 4, 1, cp.r, cp.q);
        worst = std::max(worst, derivative_identity_residual(p));
    }
    return {worst < 1e-8, "5 configs, N = 1..4, max ||H - c1 t'(0) - c2|| / ||H|| = " + fmt(worst) + " (< 1e-8)"};
}

/// s = 1 targets continued from the built-in chain; kept clear of the pin
/// degeneracy at Im alpha_+ = 0.673 and the Hamiltonian singularity at 0.898.
ModelParams spin1_target(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> re(-0.15, 0.15), im(0.30, 0.55), b(-0.2, 0.2);
    ModelParams p = golden::table2_params();
    p.alpha_plus = cplx(re(rng), im(rng));
    p.beta_minus = cplx(0.651 + b(rng), b(rng));
    return p;
}

Verdict criterion6() {
    std::mt19937_64 rng(601);
    const auto cps = supported_case_parities();

    // det M with Lambda from diagonalized t(u)
    double detm = 0.0;
    std::vector<ModelParams> half;
    for (int k = 0; k < 8; ++k) {
        const CaseParity& cp = cps[static_cast<std::size_t>(k) % cps.size()];
        half.push_back(random_params(rng, cp.bc, 2 + k % 3, 1, cp.r, cp.q));
    }
    std::vector<ModelParams> detm_configs = half;
    detm_configs.push_back(golden::table1_params());
    for (const ModelParams& p : detm_configs) {
        const TransferBranches br(p);
        const DetMConfig dc(p, LambdaSource::FromDiagonalization);
        for (Eigen::Index i = 0; i < br.size(); ++i)
            for (int k = 0; k < 3; ++k) {
                const cplx u = random_u(rng);
                auto lam = [&](cplx v) { return br.values(v).first(i); };
                detm = std::max(detm, std::abs(det_m_residual(u, dc, lam)));
            }
    }

    // completeness: 8 s = 1/2 configs by the transfer route, 2 s = 1 by continuation
    std::vector<ModelParams> configs = half;
    configs.push_back(spin1_target(rng));
    configs.push_back(spin1_target(rng));
    double worst = 0.0;
    int complete = 0;
    std::string failures;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        try {
            const RunRecord rec = completeness_report(configs[i]);
            worst = std::max(worst, rec.max_deviation);
            if (rec.unmatched.empty() && rec.max_deviation < 1e-6)
                ++complete;
            else
                failures += " config " + std::to_string(i) + " max dev " + fmt(rec.max_deviation) + ";";
        } catch (const IncompleteMatchError& e) {
            failures += " config " + std::to_string(i) + ": " + std::to_string(e.record().unmatched.size()) +
                        " unmatched;";
        } catch (const Error& e) {
            failures += " config " + std::to_string(i) + ": " + e.what() + ";";
        }
    }
    Verdict v;
    v.pass = detm < 1e-7 && complete == static_cast<int>(configs.size());
    v.detail = "det M max " + fmt(detm) + " (< 1e-7) over " + std::to_string(detm_configs.size()) +
               " configs; completeness " + std::to_string(complete) + "/" + std::to_string(configs.size()) +
               " configs, max deviation " + fmt(worst) + " (< 1e-6)" + failures;
    return v;
}

Verdict criterion7() {
    std::mt19937_64 rng(701);
    std::ostringstream out;
    bool pass = true;
    auto check = [&](const std::string& name, double value, double bound) {
        out << name << " " << fmt(value) << " (< " << fmt(bound) << ")" << (value < bound ? "" : " FAIL") << "; ";
        pass = pass && value < bound;
    };

    // R-matrix unitarity and Yang-Baxter on random anisotropies
    double uni = 0.0, ybe = 0.0;
    for (int k = 0; k < 50; ++k) {
        ModelParams p;
        p.r = 1 + k % 4;
        p.q = 5;
        const cplx u = random_u(rng), v = random_u(rng);
        const Mat4 a = r_matrix(u, p), b = r_matrix(-u, p);
        uni = std::max(uni, (a * b + xi(u, p) * Mat4::Identity()).norm() / std::max(1.0, std::abs(xi(u, p))));
        auto on = [](const Mat4& r, int first, int second) {
            DenseMatrix out = DenseMatrix::Zero(8, 8);
            for (int x = 0; x < 8; ++x)
                for (int y = 0; y < 8; ++y) {
                    const int mask = (1 << first) | (1 << second);
                    if ((x & ~mask) != (y & ~mask)) continue;
                    out(x, y) = r(2 * ((x >> first) & 1) + ((x >> second) & 1), 2 * ((y >> first) & 1) + ((y >> second) & 1));
                }
            return out;
        };
        const DenseMatrix r12 = on(r_matrix(u - v, p), 2, 1), r13 = on(r_matrix(u, p), 2, 0), r23 = on(r_matrix(v, p), 1, 0);
        const DenseMatrix lhs = r12 * r13 * r23, rhs = r23 * r13 * r12;
        ybe = std::max(ybe, (lhs - rhs).norm() / std::max(1.0, lhs.norm()));
    }
    check("R unitarity", uni, 1e-12);
    check("Yang-Baxter", ybe, 1e-12);

    // transfer matrices commute
    double comm = 0.0;
    for (const auto& cp : supported_case_parities()) {
        const ModelParams p = random_params(rng, cp.bc, 3, 1, cp.r, cp.q);
        for (int k = 0; k < 3; ++k) comm = std::max(comm, commutator_residual(random_u(rng), random_u(rng), p));
    }
    check("commutativity", comm, 1e-10);

    // Q crossing and product forms for random root sets
    double cross = 0.0, prod = 0.0;
    for (const auto& cp : supported_case_parities()) {
        const ModelParams p = random_params(rng, cp.bc, 2, 1, cp.r, cp.q);
        std::vector<cplx> roots(static_cast<std::size_t>(expected_root_count(p)));
        for (auto& r : roots) r = random_cplx(rng, 1.0, 3.0);
        const BetheState s(p, roots);
        const cplx half_sigma = 0.5 * s.shift();
        for (int k = 0; k < 10; ++k) {
            const cplx u = random_u(rng);
            const cplx q = q_eval(u, s);
            cross = std::max(cross, std::abs(q_eval(-u - s.shift(), s) - q) / std::max(1e-300, std::abs(q)));
            cplx chd{1.0, 0.0};
            for (cplx r : s.roots()) chd *= 0.5 * (std::cosh(u + half_sigma) - std::cosh(r + half_sigma));
            prod = std::max(prod, std::abs(chd - q) / std::abs(q));
            prod = std::max(prod, std::abs(q_product(s).value(u) - q) / std::abs(q));
        }
    }
    check("Q crossing", cross, 1e-12);
    check("Q product form", prod, 1e-12);

    // damped Newton never increases the merit, on kicked solutions of a fresh config
    {
        const ModelParams p = random_params(rng, BoundaryCase::Case2AlphaAlpha, 3, 1, 1, 3);
        const auto levels = bethe_levels_from_transfer(p, NewtonOptions{});
        const auto pins = pinned_points(p);
        std::normal_distribution<double> kick(0.0, 0.03);
        int increases = 0, runs = 0;
        for (const auto& l : levels) {
            if (!l) continue;
            std::vector<cplx> u = l->state.roots();
            for (cplx& x : u) {
                bool pinned = false;
                for (cplx pp : pins) pinned = pinned || strip_distance(x, pp) < pin_snap_radius;
                if (!pinned) x += cplx(kick(rng), kick(rng));
            }
            const NewtonResult r = newton_solve(BetheState(p, u));
            for (std::size_t k = 1; k < r.merit_history.size(); ++k)
                if (!(r.merit_history[k] < r.merit_history[k - 1])) ++increases;
            ++runs;
        }
        out << "Newton damping " << runs << " runs, " << increases << " non-decreasing steps; ";
        pass = pass && runs > 0 && increases == 0;
    }

    // matcher equals brute force
    double gap = 0.0;
    for (int n = 1; n <= 6; ++n)
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<cplx> a(n), b(n);
            for (auto& x : a) x = random_cplx(rng, 1.0, 1.0);
            for (auto& x : b) x = random_cplx(rng, 1.0, 1.0);
            std::vector<int> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            double best = std::numeric_limits<double>::infinity();
            do {
                double c = 0.0;
                for (int j = 0; j < n; ++j) c += std::abs(a[j] - b[perm[j]]);
                best = std::min(best, c);
            } while (std::next_permutation(perm.begin(), perm.end()));
            gap = std::max(gap, std::abs(match_spectra(a, b).total_cost - best));
        }
    check("matcher vs brute force", gap, 1e-12);
    return {pass, out.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"Table 1 reproduction", criterion1},
        {"Table 2 reproduction", criterion2},
        {"operator functional relation", criterion3},
        {"h-condition suite", criterion4},
        {"derivative identity", criterion5},
        {"det M and completeness", criterion6},
        {"property suites", criterion7},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                    v.detail.c_str());
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
