#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "xxz/core.hpp"
#include "xxz/golden.hpp"
#include "xxz/hamiltonians.hpp"
#include "xxz/operators.hpp"
#include "xxz/qfunction.hpp"
#include "xxz/record.hpp"
#include "xxz/spectrum.hpp"

namespace xxz {

// ---------------------------------------------------------------------------
// Root bookkeeping
// ---------------------------------------------------------------------------

/// Representative of {u, -u - shift} modulo 2 i pi: smaller |Im|, then larger Re.
inline cplx canonical_root(cplx u, cplx shift) {
    const cplx a = wrap_strip(u);
    const cplx b = wrap_strip(-u - shift);
    constexpr double tie = 1e-9;
    if (std::abs(a.imag()) < std::abs(b.imag()) - tie) return a;
    if (std::abs(b.imag()) < std::abs(a.imag()) - tie) return b;
    return a.real() >= b.real() ? a : b;
}

inline std::vector<cplx> canonical_roots(const std::vector<cplx>& roots, cplx shift) {
    std::vector<cplx> out;
    for (cplx u : roots) out.push_back(canonical_root(u, shift));
    return out;
}

/// Largest pairing distance between two root multisets up to reflection and
/// 2 i pi periodicity. Distances are measured on the cylinder.
inline double root_set_distance(const std::vector<cplx>& a, const std::vector<cplx>& b, cplx shift) {
    if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "root sets differ in size");
    const std::size_t n = a.size();
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost[i][j] = std::min(strip_distance(a[i], b[j]), strip_distance(a[i], -b[j] - shift));
    const auto perm = detail::hungarian(cost);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, cost[i][perm[i]]);
    return worst;
}

// ---------------------------------------------------------------------------
// Newton refinement
// ---------------------------------------------------------------------------

struct NewtonOptions {
    int max_iter = 50;
    double tol = 1e-10;
    /// A full Newton step below step_tol * (1 + max|u|) also counts as
    /// converged. Near-exact strings put a floor of about eps/gap under the
    /// normalized residual while the roots themselves are fully determined.
    double step_tol = 1e-12;
    int max_halvings = 40;
};

struct NewtonResult {
    BetheState state;
    bool converged = false;
    bool step_converged = false;
    int iterations = 0;
    int damped_steps = 0;
    /// ||G|| before the first step and after each accepted step.
    std::vector<double> merit_history;
    std::vector<cplx> residuals;
    std::vector<int> pinned;  // indices of frozen roots
};

class NewtonFailure : public Error {
public:
    explicit NewtonFailure(NewtonResult best)
        : Error(ErrorKind::NoConvergence,
                "Newton refinement stopped at max residual " + std::to_string(max_abs(best.residuals))),
          best_(std::move(best)) {}
    const NewtonResult& best() const { return best_; }

private:
    NewtonResult best_;
};

namespace detail {

/// Log-form Bethe equations G_j = log(-A_j / B_j) for the free roots and
/// their Jacobian; A_j = h~(u_j) Q(u_j + c), B_j = h~(m(u_j)) Q(u_j - c).
struct BetheSystem {
    ModelParams p;
    HyperbolicProduct ht;
    cplx c;
    cplx sigma;

    explicit BetheSystem(const ModelParams& mp)
        : p(mp), ht(h_tilde_product(mp)), c(static_cast<double>(mp.q - 1) * mp.eta()),
          sigma(BetheState::crossing_shift(mp)) {}

    Eigen::VectorXcd residual(const std::vector<cplx>& u, const std::vector<int>& free) const {
        Eigen::VectorXcd g(static_cast<Eigen::Index>(free.size()));
        for (std::size_t a = 0; a < free.size(); ++a) {
            const cplx uj = u[free[a]];
            cplx acc = ht.log_value(uj) - ht.log_value(mirror(uj, p)) + cplx(0.0, pi);
            for (cplx ul : u) {
                acc += std::log(std::sinh(0.5 * (uj + c - ul))) + std::log(std::sinh(0.5 * (uj + c + ul + sigma)));
                acc -= std::log(std::sinh(0.5 * (uj - c - ul))) + std::log(std::sinh(0.5 * (uj - c + ul + sigma)));
            }
            g(static_cast<Eigen::Index>(a)) = wrap_strip(acc);
        }
        return g;
    }

    Eigen::MatrixXcd jacobian(const std::vector<cplx>& u, const std::vector<int>& free) const {
        const auto nf = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(nf, nf);
        std::vector<int> column(u.size(), -1);
        for (std::size_t a = 0; a < free.size(); ++a) column[free[a]] = static_cast<int>(a);
        auto coth = [](cplx z) { return std::cosh(z) / std::sinh(z); };
        for (std::size_t a = 0; a < free.size(); ++a) {
            const int j = free[a];
            const cplx uj = u[j];
            // h~(u_j) / h~(-u_j + ...): both pieces carry +d/du_j
            cplx diag = ht.log_derivative(uj) + ht.log_derivative(mirror(uj, p));
            for (std::size_t l = 0; l < u.size(); ++l) {
                const cplx ul = u[l];
                const cplx a1 = 0.5 * coth(0.5 * (uj + c - ul));
                const cplx a2 = 0.5 * coth(0.5 * (uj + c + ul + sigma));
                const cplx b1 = 0.5 * coth(0.5 * (uj - c - ul));
                const cplx b2 = 0.5 * coth(0.5 * (uj - c + ul + sigma));
                if (static_cast<int>(l) == j) {
                    diag += 2.0 * (a2 - b2);  // the u_j - u_j factors are constant
                    continue;
                }
                diag += (a1 + a2) - (b1 + b2);
                if (column[l] >= 0) jac(static_cast<Eigen::Index>(a), column[l]) += (-a1 + a2) - (-b1 + b2);
            }
            jac(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) += diag;
        }
        return jac;
    }
};

}  // namespace detail

/// Size of the Newton correction |J^-1 G|_inf at a state: an estimate of how
/// far the free roots are from an exact solution.
inline double root_error_estimate(const BetheState& s) {
    const ModelParams& p = s.params();
    const detail::BetheSystem sys(p);
    const auto pins = pinned_points(p);
    std::vector<int> free;
    for (std::size_t j = 0; j < s.roots().size(); ++j) {
        if (auto pin = nearest_pin(s.roots()[j], pins, pin_snap_radius)) {
            if (strip_distance(*pin, s.roots()[j]) > 0.0) return strip_distance(*pin, s.roots()[j]);
            continue;
        }
        free.push_back(static_cast<int>(j));
    }
    if (free.empty()) return 0.0;
    const Eigen::VectorXcd g = sys.residual(s.roots(), free);
    const Eigen::VectorXcd step = sys.jacobian(s.roots(), free).colPivHouseholderQr().solve(g);
    return step.allFinite() ? step.cwiseAbs().maxCoeff() : std::numeric_limits<double>::infinity();
}

/// Damped Newton on the Bethe equations. Roots within `pin_snap_radius` of a
/// pinned point are snapped onto it and frozen. Never throws on stagnation;
/// see `newton_refine` for the throwing form.
inline NewtonResult newton_solve(const BetheState& seed, const NewtonOptions& opt = {}) {
    const ModelParams& p = seed.params();
    const detail::BetheSystem sys(p);
    const auto pins = pinned_points(p);

    std::vector<cplx> u = seed.roots();
    std::vector<int> free, pinned;
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (auto pin = nearest_pin(u[j], pins, pin_snap_radius)) {
            u[j] = *pin;
            pinned.push_back(static_cast<int>(j));
        } else {
            free.push_back(static_cast<int>(j));
        }
    }

    NewtonResult res{BetheState(p, u), false, false, 0, 0, {}, {}, pinned};
    auto merit_of = [](const Eigen::VectorXcd& g) { return g.size() ? g.cwiseAbs().maxCoeff() : 0.0; };
    Eigen::VectorXcd g = sys.residual(u, free);
    double merit = merit_of(g);
    res.merit_history.push_back(merit);

    while (merit >= opt.tol && res.iterations < opt.max_iter) {
        const Eigen::MatrixXcd jac = sys.jacobian(u, free);
        const Eigen::VectorXcd step = jac.colPivHouseholderQr().solve(-g);
        if (!step.allFinite()) break;
        double size = 0.0;
        for (cplx x : u) size = std::max(size, std::abs(x));
        const bool tiny = step.cwiseAbs().maxCoeff() < opt.step_tol * (1.0 + size);
        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= opt.max_halvings; ++halving) {
            std::vector<cplx> trial = u;
            for (std::size_t a = 0; a < free.size(); ++a) trial[free[a]] += lambda * step(static_cast<Eigen::Index>(a));
            const Eigen::VectorXcd gt = sys.residual(trial, free);
            const double mt = merit_of(gt);
            if (std::isfinite(mt) && mt < merit) {
                u = std::move(trial);
                g = gt;
                merit = mt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
            ++res.damped_steps;
        }
        ++res.iterations;
        if (accepted) res.merit_history.push_back(merit);
        if (tiny) {
            res.step_converged = true;
            break;
        }
        if (!accepted) break;
    }

    for (auto& x : u) x = wrap_strip(x);
    res.state = BetheState(p, u);
    res.residuals = bethe_residuals(res.state);
    res.converged = merit < opt.tol || res.step_converged;
    return res;
}

inline BetheState newton_refine(const BetheState& seed, int max_iter = 50, double tol = 1e-10) {
    NewtonOptions opt;
    opt.max_iter = max_iter;
    opt.tol = tol;
    NewtonResult r = newton_solve(seed, opt);
    if (!r.converged) throw NewtonFailure(std::move(r));
    return r.state;
}

// ---------------------------------------------------------------------------
// Transfer-matrix eigenvalue branches and Q extraction
// ---------------------------------------------------------------------------

inline constexpr cplx branch_reference_point{0.31, 0.17};

/// Analytic eigenvalue branches of the commuting family t(u): diagonalize at
/// a generic u0 once, then read Lambda_i(u) off (V^-1 t(u) V)_ii.
class TransferBranches {
public:
    explicit TransferBranches(const ModelParams& p, cplx u0 = branch_reference_point) : p_(p) {
        if (p.two_s != 1) throw Error(ErrorKind::UnsupportedCase, "transfer-matrix branches need s = 1/2");
        const Eigendecomposition ed = eigendecompose(transfer_half(u0, p));
        v_ = ed.vectors;
        vinv_ = v_.partialPivLu().inverse();
    }

    Eigen::Index size() const { return v_.cols(); }

    /// All branch values at u, plus the largest off-diagonal leak (relative).
    std::pair<Eigen::VectorXcd, double> values(cplx u) const {
        const DenseMatrix w = vinv_ * transfer_half(u, p_) * v_;
        const Eigen::VectorXcd d = w.diagonal();
        DenseMatrix off = w;
        off.diagonal().setZero();
        return {d, off.norm() / std::max(w.norm(), 1e-300)};
    }

private:
    ModelParams p_;
    DenseMatrix v_;
    DenseMatrix vinv_;
};

/// Sample points for the extraction system: a jittered circle away from the
/// origin, deterministic so runs are reproducible.
inline std::vector<cplx> extraction_points(const ModelParams& p) {
    const int m = expected_root_count(p);
    const int k = 3 * (m + 2);
    std::vector<cplx> out;
    constexpr double golden = 0.6180339887498949;
    for (int i = 0; i < k; ++i) {
        const double jitter = std::fmod((i + 1) * golden, 1.0);
        out.push_back(cplx(0.1, 0.0) + 0.6 * std::exp(cplx(0.0, 2.0 * pi * (i + jitter) / k)));
    }
    return out;
}

struct ExtractionResult {
    BetheState state;
    double singular_ratio;  // smallest / second smallest
};

/// Q(u) from samples of one eigenvalue branch Lambda~(u): the T-Q relation is
/// linear in the coefficients of Q as a polynomial in x = cosh(u + sigma/2).
inline ExtractionResult q_polynomial_from_samples(const ModelParams& p, const std::vector<cplx>& us,
                                                  const std::vector<cplx>& lambdas) {
    require_supported(p);
    const int m = expected_root_count(p);
    if (us.size() != lambdas.size() || static_cast<int>(us.size()) < m + 2)
        throw Error(ErrorKind::InvalidParams, "need at least M + 2 samples");
    const HyperbolicProduct ht = h_tilde_product(p);
    const cplx c = static_cast<double>(p.q - 1) * p.eta();
    const cplx half_sigma = 0.5 * BetheState::crossing_shift(p);

    Eigen::MatrixXcd a(static_cast<Eigen::Index>(us.size()), m + 1);
    for (std::size_t k = 0; k < us.size(); ++k) {
        const cplx u = us[k];
        const cplx x0 = std::cosh(u + half_sigma);
        const cplx xp = std::cosh(u + c + half_sigma);
        const cplx xm = std::cosh(u - c + half_sigma);
        const cplx h1 = ht.value(u);
        const cplx h2 = ht.value(mirror(u, p));
        cplx p0{1.0}, pp{1.0}, pm{1.0};
        double scale = 0.0;
        for (int j = 0; j <= m; ++j) {
            const cplx e = lambdas[k] * p0 - h1 * pp - h2 * pm;
            a(static_cast<Eigen::Index>(k), j) = e;
            scale = std::max(scale, std::abs(e));
            p0 *= x0;
            pp *= xp;
            pm *= xm;
        }
        if (scale > 0) a.row(static_cast<Eigen::Index>(k)) /= scale;
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double ratio = s(m) / std::max(s(m - 1), 1e-300);
    if (ratio > 0.1)
        throw Error(ErrorKind::RankDeficiency,
                    "null direction not isolated (singular value ratio " + std::to_string(ratio) + ")");
    const Eigen::VectorXcd coef = svd.matrixV().col(m);
    const cplx lead = coef(m);
    if (std::abs(lead) < 1e-12 * coef.norm())
        throw Error(ErrorKind::RankDeficiency, "Q polynomial has lower degree than M");

    // companion matrix of the monic polynomial
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(m, m);
    for (int j = 0; j < m; ++j) comp(0, j) = -coef(m - 1 - j) / lead;
    for (int j = 1; j < m; ++j) comp(j, j - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "companion eigenvalues failed");

    std::vector<cplx> roots;
    for (int j = 0; j < m; ++j) {
        cplx x = es.eigenvalues()(j);
        // two Newton polishing steps on the monic polynomial
        for (int it = 0; it < 2; ++it) {
            cplx val = 1.0, der = 0.0;
            for (int k = m - 1; k >= 0; --k) {
                der = der * x + val;
                val = val * x + coef(k) / lead;
            }
            if (std::abs(der) > 0) x -= val / der;
        }
        roots.push_back(canonical_root(std::acosh(x) - half_sigma, 2.0 * half_sigma));
    }
    return {BetheState(p, roots), ratio};
}

template <class F>
ExtractionResult q_polynomial_from_lambda(const ModelParams& p, const F& lambda_samples) {
    const auto us = extraction_points(p);
    std::vector<cplx> ls;
    ls.reserve(us.size());
    for (cplx u : us) ls.push_back(lambda_samples(u));
    return q_polynomial_from_samples(p, us, ls);
}

// ---------------------------------------------------------------------------
// Energies
// ---------------------------------------------------------------------------

enum class EnergyMethod { ClosedFormHalfOddR, ClosedFormOneEvenR, GenericDerivative };

inline std::string_view to_string(EnergyMethod m) {
    switch (m) {
        case EnergyMethod::ClosedFormHalfOddR: return "closed_form_half_odd_r";
        case EnergyMethod::ClosedFormOneEvenR: return "closed_form_one_even_r";
        case EnergyMethod::GenericDerivative: return "generic_derivative";
    }
    return "?";
}

struct EnergyBreakdown {
    cplx sum_term{};
    cplx boundary_term{};
    cplx constant_term{};
    cplx total{};
    EnergyMethod method = EnergyMethod::GenericDerivative;
    /// The generic route, when a closed form was used as primary.
    std::optional<cplx> cross_check;
};

inline constexpr double method_agreement_tol = 1e-7;

namespace detail {

/// The two T-Q terms of Lambda~ as products in u.
inline std::pair<HyperbolicProduct, HyperbolicProduct> tq_products(const BetheState& s,
                                                                    const HyperbolicProduct& ht) {
    const ModelParams& p = s.params();
    const cplx c = static_cast<double>(p.q - 1) * p.eta();
    const HyperbolicProduct q = q_product(s);
    const HyperbolicProduct qinv = q.inverse();
    const bool beta_case = p.bcase == BoundaryCase::Case3BetaBeta;
    HyperbolicProduct t1 = ht;
    t1.times(q.substituted(1.0, c)).times(qinv).simplify();
    HyperbolicProduct t2 = ht.substituted(-1.0, beta_case ? -p.eta() : c);
    t2.times(q.substituted(1.0, -c)).times(qinv).simplify();
    return {t1, t2};
}

/// The fusion term C(u) of the spin-1 eigenvalue.
inline HyperbolicProduct spin_one_c_product(const ModelParams& p) {
    const cplx eta = p.eta();
    const cplx off = -0.5 * eta + eta;  // the boundary factors sit at u - eta/2
    HyperbolicProduct c(-16.0);
    c.sinh(2.0, -eta).sinh(2.0, 3.0 * eta).sinh(1.0, -eta, 2 * p.n).sinh(1.0, 2.0 * eta, 2 * p.n);
    c.sinh(1.0, off + p.alpha_minus).sinh(1.0, off - p.alpha_minus);
    c.cosh(1.0, off + p.beta_minus).cosh(1.0, off - p.beta_minus);
    c.sinh(1.0, off + p.alpha_plus).sinh(1.0, off - p.alpha_plus);
    c.cosh(1.0, off + p.beta_plus).cosh(1.0, off - p.beta_plus);
    return c.simplify();
}

inline cplx generic_energy_half(const BetheState& s) {
    const ModelParams& p = s.params();
    const auto [t1, t2] = tq_products(s, h_tilde_product(p));
    const EnergyConstants k = energy_constants(p, SpinTag::Half);
    return k.c1 * (t1.derivative(0.0) + t2.derivative(0.0)) + k.c2;
}

inline cplx generic_energy_one(const BetheState& s) {
    const ModelParams& p = s.params();
    const cplx eta = p.eta();
    const auto [l1, l2] = tq_products(s, h_tilde2_product(p));
    // L(v) = l1(v) - l2(v): sinh(2v + eta) flips sign under v -> m(v)
    auto lval = [&](cplx v) { return l1.value(v) - l2.value(v); };
    auto lder = [&](cplx v) { return l1.derivative(v) - l2.derivative(v); };
    const cplx dlam = lval(-0.5 * eta) * lder(0.5 * eta) + lder(-0.5 * eta) * lval(0.5 * eta) +
                      spin_one_c_product(p).derivative(0.0);
    const EnergyConstants k = energy_constants(p, SpinTag::One);
    return k.c1 * dlam + k.c2;
}

inline EnergyBreakdown closed_form_half_odd_r(const BetheState& s) {
    const ModelParams& p = s.params();
    const cplx eta = p.eta();
    const cplx sh_e = std::sinh(eta), ch_e = std::cosh(eta);
    cplx sum{};
    for (cplx u : s.roots()) sum += 1.0 / (std::sinh(0.5 * u) * std::cosh(0.5 * (u + eta)));
    const double sgn = parity_sign(p.n);
    auto coth = [](cplx z) { return std::cosh(z) / std::sinh(z); };
    EnergyBreakdown e;
    e.method = EnergyMethod::ClosedFormHalfOddR;
    e.sum_term = 0.5 * sh_e * std::cosh(0.5 * eta) * sum;
    e.boundary_term = 0.5 * sh_e *
                      (-coth(p.alpha_minus) + sgn * coth(p.alpha_plus) -
                       sgn * std::tanh(0.5 * (p.alpha_plus - sgn * eta)) + std::tanh(0.5 * (p.alpha_minus + eta)));
    e.constant_term = 0.5 * static_cast<double>(p.n) * ch_e - 0.5 * ch_e;
    e.total = e.sum_term + e.boundary_term + e.constant_term;
    return e;
}

inline EnergyBreakdown closed_form_one_even_r(const BetheState& s) {
    const ModelParams& p = s.params();
    const cplx eta = p.eta();
    cplx sum{};
    for (cplx u : s.roots()) sum += 1.0 / (std::sinh(0.5 * (u + 1.5 * eta)) * std::sinh(0.5 * (u - 0.5 * eta)));
    const HyperbolicProduct h2 = h_tilde2_product(p);
    HyperbolicProduct a = h2.substituted(1.0, 0.5 * eta);
    a.times(h2.substituted(1.0, -0.5 * eta));
    HyperbolicProduct b = h2.substituted(-1.0, (p.q - 0.5) * eta);
    b.times(h2.substituted(1.0, 0.5 * eta));
    const HyperbolicProduct c = spin_one_c_product(p);
    const EnergyConstants k = energy_constants(p, SpinTag::One);
    EnergyBreakdown e;
    e.method = EnergyMethod::ClosedFormOneEvenR;
    e.sum_term = 0.5 * std::sinh(2.0 * eta) * std::sinh(eta) * sum;
    e.boundary_term = k.c1 * (a.derivative(0.0) + b.derivative(0.0) - c.derivative(0.0));
    e.constant_term = k.c2;
    e.total = e.sum_term + e.boundary_term + e.constant_term;
    return e;
}

}  // namespace detail

inline bool has_closed_form(const ModelParams& p) {
    if (p.two_s == 1) return p.bcase == BoundaryCase::Case2AlphaAlpha && p.odd_r();
    if (p.two_s == 2) return p.bcase == BoundaryCase::Case1AlphaBeta && !p.odd_r();
    return false;
}

namespace detail {
inline EnergyBreakdown energy_breakdown(const BetheState& s);
}

/// Energy of the level described by a solved Bethe state. The state must
/// satisfy the Bethe equations to `residual_bound`, or have its roots fixed
/// to `root_bound` when a near-exact string limits the residual.
inline EnergyBreakdown energy_from_roots(const BetheState& s, double residual_bound = 1e-8,
                                         double root_bound = 1e-10) {
    const ModelParams& p = s.params();
    if (p.two_s > 2) throw Error(ErrorKind::UnsupportedCase, "energies are available for s = 1/2 and s = 1");
    const double worst = max_abs(bethe_residuals(s));
    if (!(worst < residual_bound) && !(root_error_estimate(s) < root_bound))
        throw Error(ErrorKind::NoConvergence, "Bethe residual " + std::to_string(worst) + " above " +
                                                  std::to_string(residual_bound));
    return detail::energy_breakdown(s);
}

namespace detail {

inline EnergyBreakdown energy_breakdown(const BetheState& s) {
    const ModelParams& p = s.params();
    const cplx generic = p.two_s == 1 ? detail::generic_energy_half(s) : detail::generic_energy_one(s);
    if (!has_closed_form(p)) {
        EnergyBreakdown e;
        e.method = EnergyMethod::GenericDerivative;
        e.total = e.sum_term = generic;  // no separate boundary/constant split on this route
        return e;
    }
    EnergyBreakdown e = p.two_s == 1 ? detail::closed_form_half_odd_r(s) : detail::closed_form_one_even_r(s);
    e.cross_check = generic;
    if (std::abs(e.total - generic) > method_agreement_tol * std::max(1.0, std::abs(generic)))
        throw Error(ErrorKind::MethodDisagreement, "closed form and derivative route differ by " +
                                                       std::to_string(std::abs(e.total - generic)));
    return e;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Homotopy in the boundary parameters
// ---------------------------------------------------------------------------

struct HomotopyOptions {
    int steps = 8;
    int max_bisections = 10;
    /// A step that moves some root further than this is retried at half size.
    double max_root_move = 0.1;
    /// Paths whose pin degeneracy drops below this are rerouted.
    double degeneracy_margin = 0.05;
    /// -1 picks the route automatically; 0 forces the straight path and
    /// k >= 1 forces detour k - 1 of detour_shifts().
    int route = -1;
    NewtonOptions newton{};
};

/// Shifts of the free parameters tried, in order, as detours.
inline std::vector<cplx> detour_shifts() {
    std::vector<cplx> out;
    for (double mag : {0.1, 0.2, 0.4})
        for (double sign : {1.0, -1.0})
            for (cplx dir : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) out.push_back(sign * mag * dir);
    return out;
}

namespace detail {

inline ModelParams interpolate_params(const ModelParams& a, const ModelParams& b, double t) {
    ModelParams p = b;
    auto mix = [t](cplx x, cplx y) { return (1.0 - t) * x + t * y; };
    p.alpha_minus = mix(a.alpha_minus, b.alpha_minus);
    p.alpha_plus = mix(a.alpha_plus, b.alpha_plus);
    p.beta_minus = mix(a.beta_minus, b.beta_minus);
    p.beta_plus = mix(a.beta_plus, b.beta_plus);
    p.theta_minus = mix(a.theta_minus, b.theta_minus);
    p.theta_plus = mix(a.theta_plus, b.theta_plus);
    return p;
}

inline bool same_chain(const ModelParams& a, const ModelParams& b) {
    return a.n == b.n && a.two_s == b.two_s && a.r == b.r && a.q == b.q && a.bcase == b.bcase &&
           (a.bcase != BoundaryCase::Case1AlphaBeta ||
            (a.free_alpha_side == b.free_alpha_side && a.free_beta_side == b.free_beta_side));
}

}  // namespace detail

namespace detail {

/// Adds `delta` to every free boundary parameter; fixed ones stay put so the
/// shifted point still obeys the constraint of its case.
inline ModelParams shift_free(const ModelParams& p, cplx delta) {
    ModelParams out = p;
    switch (p.bcase) {
        case BoundaryCase::Case1AlphaBeta:
            (p.free_alpha_side == Side::Minus ? out.alpha_minus : out.alpha_plus) += delta;
            (p.free_beta_side == Side::Minus ? out.beta_minus : out.beta_plus) += delta;
            break;
        case BoundaryCase::Case2AlphaAlpha:
            out.alpha_minus += delta;
            out.alpha_plus += delta;
            break;
        case BoundaryCase::Case3BetaBeta:
            out.beta_minus += delta;
            out.beta_plus += delta;
            break;
    }
    return out;
}

inline double path_degeneracy(const ModelParams& a, const ModelParams& b, int samples = 64) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k < samples; ++k)
        best = std::min(best, pin_degeneracy(interpolate_params(a, b, static_cast<double>(k) / samples)));
    return best;
}

/// Straight-line leg; each step is refined, failed steps are bisected.
inline NewtonResult follow_segment(const BetheState& solved, const ModelParams& target, const HomotopyOptions& opt) {
    const ModelParams start = solved.params();
    auto step_to = [&](const BetheState& from, const ModelParams& to) {
        const auto old_pins = pinned_points(from.params());
        const auto new_pins = pinned_points(to);
        std::vector<cplx> roots = from.roots();
        for (auto& u : roots) {
            if (!nearest_pin(u, old_pins, pin_snap_radius)) continue;
            double best = std::numeric_limits<double>::infinity();
            cplx target_pin = u;
            for (cplx pin : new_pins)
                if (strip_distance(u, pin) < best) {
                    best = strip_distance(u, pin);
                    target_pin = pin;
                }
            u = target_pin;
        }
        return newton_solve(BetheState(to, roots), opt.newton);
    };

    BetheState current = solved;
    double t = 0.0;
    double dt = 1.0 / opt.steps;
    int bisections = 0;
    NewtonResult last{solved, true, false, 0, 0, {}, bethe_residuals(solved), {}};
    while (t < 1.0 - 1e-12) {
        const double t_next = std::min(1.0, t + dt);
        ModelParams mid = interpolate_params(start, target, t_next);
        if (t_next >= 1.0) mid = target;
        NewtonResult r = step_to(current, mid);
        const bool jumped =
            r.converged && root_set_distance(current.roots(), r.state.roots(), current.shift()) > opt.max_root_move;
        if (!r.converged || jumped) {
            if (++bisections > opt.max_bisections) throw NewtonFailure(std::move(r));
            dt *= 0.5;
            continue;
        }
        current = r.state;
        t = t_next;
        last = std::move(r);
    }
    return last;
}

}  // namespace detail

/// Carries a solved state at `solved.params()` to `target` by continuation
/// of the boundary parameters, refining at every step. Pinned roots jump to
/// the nearest pin of the new parameters.
///
/// Where a pin meets its mirror image (or another pin) the continued root set
/// can turn spurious, so a straight path that passes close to such a point is
/// replaced by a detour shifting the free parameters off the real slice.
inline NewtonResult continue_state(const BetheState& solved, const ModelParams& target,
                                   const HomotopyOptions& opt = {}) {
    const ModelParams start = solved.params();
    if (!detail::same_chain(start, target))
        throw Error(ErrorKind::InvalidParams, "homotopy needs the same chain, case and free sides");
    require_supported(target);

    const auto shifts = detour_shifts();
    auto detour = [&](cplx delta) {
        const ModelParams a = detail::shift_free(start, delta);
        const ModelParams b = detail::shift_free(target, delta);
        NewtonResult r = detail::follow_segment(solved, a, opt);
        r = detail::follow_segment(r.state, b, opt);
        return detail::follow_segment(r.state, target, opt);
    };
    if (opt.route == 0) return detail::follow_segment(solved, target, opt);
    if (opt.route > 0) {
        if (opt.route > static_cast<int>(shifts.size())) throw Error(ErrorKind::InvalidParams, "no such route");
        return detour(shifts[static_cast<std::size_t>(opt.route - 1)]);
    }

    const double ends = std::min(pin_degeneracy(start), pin_degeneracy(target));
    auto clear = [&](const ModelParams& a, const ModelParams& b) {
        const double d = detail::path_degeneracy(a, b);
        return d >= opt.degeneracy_margin || d >= 0.5 * ends;
    };
    if (clear(start, target)) return detail::follow_segment(solved, target, opt);
    for (cplx delta : shifts) {
        const ModelParams a = detail::shift_free(start, delta);
        const ModelParams b = detail::shift_free(target, delta);
        if (clear(start, a) && clear(a, b) && clear(b, target)) return detour(delta);
    }
    return detail::follow_segment(solved, target, opt);
}

// ---------------------------------------------------------------------------
// Completeness
// ---------------------------------------------------------------------------

struct CompletenessOptions {
    NewtonOptions newton{};
    double match_tol = 1e-6;
    /// Seeds for s = 1: solved or near-solved root sets at `seed_params`.
    std::vector<std::vector<cplx>> seeds;
    std::optional<ModelParams> seed_params;
};

class IncompleteMatchError : public Error {
public:
    explicit IncompleteMatchError(RunRecord partial)
        : Error(ErrorKind::IncompleteMatch,
                std::to_string(partial.unmatched.size()) + " level(s) without a Bethe counterpart"),
          record_(std::move(partial)) {}
    const RunRecord& record() const { return record_; }

private:
    RunRecord record_;
};

/// A level found on the Bethe side.
struct BetheLevel {
    BetheState state;
    EnergyBreakdown energy;
    double max_residual;
};

namespace detail {

inline std::vector<cplx> hamiltonian_energies(const ModelParams& p, double* max_eig_residual = nullptr) {
    const DenseMatrix h = p.two_s == 1 ? hamiltonian_half(p) : hamiltonian_one(p);
    SpectrumReport rep = full_spectrum(h);
    if (max_eig_residual) {
        *max_eig_residual = 0.0;
        for (double r : rep.residual_norms) *max_eig_residual = std::max(*max_eig_residual, r);
    }
    return rep.eigenvalues;
}

}  // namespace detail

/// Points for certifying extracted roots, disjoint from extraction_points.
inline std::vector<cplx> check_points(const ModelParams& p) {
    const int k = expected_root_count(p) + 4;
    std::vector<cplx> out;
    for (int i = 0; i < k; ++i) out.push_back(cplx(-0.05, 0.02) + 0.37 * std::exp(cplx(0.0, 2.0 * pi * (i + 0.3) / k)));
    return out;
}

inline constexpr double tq_agreement_tol = 1e-9;

/// max_k |Lambda~_TQ(u_k) - lambda_k| / max_k |lambda_k|.
inline double tq_branch_mismatch(const BetheState& s, const std::vector<cplx>& us, const std::vector<cplx>& lambdas) {
    const HyperbolicProduct ht = h_tilde_product(s.params());
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < us.size(); ++k) {
        const auto [a, b] = detail::tq_terms(us[k], s, ht);
        worst = std::max(worst, std::abs(a + b - lambdas[k]));
        scale = std::max(scale, std::abs(lambdas[k]));
    }
    return worst / std::max(scale, 1e-300);
}

/// s = 1/2: one Bethe state per eigenvalue branch of t(u). A branch that
/// cannot be extracted or refined yields nullopt in its slot.
inline std::vector<std::optional<BetheLevel>> bethe_levels_from_transfer(const ModelParams& p,
                                                                         const NewtonOptions& nopt,
                                                                         std::vector<std::string>* notes = nullptr) {
    require_supported(p);
    const TransferBranches branches(p);
    const auto us = extraction_points(p);
    std::vector<Eigen::VectorXcd> samples;
    double leak = 0.0;
    for (cplx u : us) {
        auto [vals, off] = branches.values(u);
        samples.push_back(std::move(vals));
        leak = std::max(leak, off);
    }
    if (notes && leak > 1e-8) notes->push_back("eigenvector leak " + std::to_string(leak) + " across samples");
    const auto cps = check_points(p);
    std::vector<Eigen::VectorXcd> check;
    for (cplx u : cps) check.push_back(branches.values(u).first);

    std::vector<std::optional<BetheLevel>> out(static_cast<std::size_t>(branches.size()));
    for (Eigen::Index i = 0; i < branches.size(); ++i) {
        try {
            std::vector<cplx> ls;
            for (const auto& v : samples) ls.push_back(v(i));
            const ExtractionResult ex = q_polynomial_from_samples(p, us, ls);
            const NewtonResult nr = newton_solve(ex.state, nopt);
            std::optional<EnergyBreakdown> e;
            std::string refused;
            try {
                if (!nr.converged) throw NewtonFailure(nr);
                e = energy_from_roots(nr.state);
            } catch (const Error& err) {
                refused = err.message();
            }
            if (e) {
                out[static_cast<std::size_t>(i)] = BetheLevel{nr.state, *e, max_abs(nr.residuals)};
                continue;
            }
            // Exact strings (two roots c apart) make every Bethe equation of
            // the pair 0/0, so Newton stalls. The roots are then accepted only
            // if the T-Q eigenvalue reproduces the branch at fresh points.
            std::vector<cplx> cl;
            for (const auto& v : check) cl.push_back(v(i));
            const double m_newton = tq_branch_mismatch(nr.state, cps, cl);
            const double m_extracted = tq_branch_mismatch(ex.state, cps, cl);
            const BetheState& best = m_newton <= m_extracted ? nr.state : ex.state;
            const double mismatch = std::min(m_newton, m_extracted);
            if (!(mismatch <= tq_agreement_tol))
                throw Error(ErrorKind::NoConvergence, refused + "; T-Q mismatch " + std::to_string(mismatch));
            out[static_cast<std::size_t>(i)] =
                BetheLevel{best, detail::energy_breakdown(best), max_abs(bethe_residuals(best))};
            if (notes)
                notes->push_back("branch " + std::to_string(i) + ": roots certified by T-Q agreement " +
                                 std::to_string(mismatch) + " (" + refused + ")");
        } catch (const Error& err) {
            if (notes) notes->push_back("branch " + std::to_string(i) + ": " + err.what());
        }
    }
    return out;
}

/// s = 1 (or any s with seeds): refine the given seeds, continuing them from
/// `seed_params` when it differs from the target.
///
/// With `accept`, a continued level whose energy it rejects is continued
/// again along the other routes, and the first accepted one is kept. This
/// only chooses between Bethe solutions; every energy still comes from roots.
inline std::vector<std::optional<BetheLevel>> bethe_levels_from_seeds(
    const ModelParams& p, const std::vector<std::vector<cplx>>& seeds, const ModelParams& seed_params,
    const NewtonOptions& nopt, std::vector<std::string>* notes = nullptr,
    const std::function<bool(cplx)>& accept = {}) {
    require_supported(p);
    std::vector<std::optional<BetheLevel>> out(seeds.size());
    const bool moving = !(params_to_json(seed_params) == params_to_json(p));
    const int routes = moving && accept ? static_cast<int>(detour_shifts().size()) : 0;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        std::string last_error;
        for (int attempt = 0; attempt <= routes; ++attempt) {
            try {
                NewtonResult at_seed = newton_solve(BetheState(seed_params, seeds[i]), nopt);
                if (!at_seed.converged) throw NewtonFailure(at_seed);
                HomotopyOptions hopt;
                hopt.newton = nopt;
                // auto first, then straight, then each detour
                hopt.route = attempt == 0 ? -1 : attempt - 1;
                const NewtonResult nr = continue_state(at_seed.state, p, hopt);
                const EnergyBreakdown e = energy_from_roots(nr.state);
                BetheLevel level{nr.state, e, max_abs(nr.residuals)};
                if (!out[i]) out[i] = level;
                if (!accept || accept(e.total)) {
                    out[i] = std::move(level);
                    if (attempt > 0 && notes)
                        notes->push_back("seed " + std::to_string(i) + ": rerouted (route " +
                                         std::to_string(hopt.route) + ")");
                    last_error.clear();
                    break;
                }
                last_error = "continued energy is off the spectrum on every route";
            } catch (const Error& err) {
                last_error = err.what();
            }
        }
        if (!last_error.empty() && notes) notes->push_back("seed " + std::to_string(i) + ": " + last_error);
    }
    return out;
}

/// Default seeds: the built-in spin-1 levels when the chain matches theirs.
inline std::pair<std::vector<std::vector<cplx>>, ModelParams> default_seeds(const ModelParams& p) {
    const ModelParams ref = golden::table2_params();
    if (!detail::same_chain(p, ref))
        throw Error(ErrorKind::UnsupportedCase,
                    "no seeds for this chain; supply seeds (s = 1 levels are continued from known solutions)");
    std::vector<std::vector<cplx>> seeds;
    for (const auto& level : golden::table2_levels()) seeds.push_back(level.roots);
    return {seeds, ref};
}

inline RunRecord completeness_report(const ModelParams& p, const CompletenessOptions& opt = {}) {
    require_supported(p);
    if (p.hilbert_dim() > max_spectrum_dim) throw Error(ErrorKind::DimensionTooLarge, "(2s+1)^N above 1024");
    const auto t0 = std::chrono::steady_clock::now();

    RunRecord rec;
    rec.command = "completeness";
    rec.config_echo = json{{"params", params_to_json(p)}};
    double eig_res = 0.0;
    const std::vector<cplx> diag = detail::hamiltonian_energies(p, &eig_res);
    rec.residuals["max_eigen_residual"] = eig_res;

    std::vector<std::optional<BetheLevel>> levels;
    if (p.two_s == 1 && opt.seeds.empty()) {
        levels = bethe_levels_from_transfer(p, opt.newton, &rec.notes);
    } else {
        auto seeds = opt.seeds;
        ModelParams sp = opt.seed_params.value_or(p);
        if (seeds.empty()) std::tie(seeds, sp) = default_seeds(p);
        const double tol = opt.match_tol;
        auto on_spectrum = [&diag, tol](cplx e) {
            for (cplx d : diag)
                if (std::abs(d - e) <= tol) return true;
            return false;
        };
        levels = bethe_levels_from_seeds(p, seeds, sp, opt.newton, &rec.notes, on_spectrum);
    }

    std::vector<cplx> bethe_e;
    std::vector<const BetheLevel*> found;
    for (const auto& l : levels)
        if (l) {
            bethe_e.push_back(l->energy.total);
            found.push_back(&*l);
        }

    // pad the Bethe side so every diagonalized level gets a partner; pads
    // are far away and show up as unmatched
    const std::size_t dim = diag.size();
    std::vector<cplx> padded = bethe_e;
    double far = 1.0;
    for (cplx e : diag) far = std::max(far, std::abs(e));
    while (padded.size() < dim) padded.push_back(cplx(1e6 * far, 0.0));
    if (padded.size() > dim)
        throw Error(ErrorKind::InvalidParams, "more Bethe levels than Hilbert space dimension");
    const SpectrumReport match = match_spectra(diag, padded);

    rec.pairing = match.pairing;
    double worst_res = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        LevelRecord lr;
        lr.index = static_cast<int>(i);
        lr.reference = diag[i];
        const int j = match.pairing[i];
        if (j < static_cast<int>(found.size())) {
            const BetheLevel& bl = *found[static_cast<std::size_t>(j)];
            lr.energy = bl.energy.total;
            lr.deviation = std::abs(bl.energy.total - diag[i]);
            lr.roots = canonical_roots(bl.state.roots(), bl.state.shift());
            lr.max_residual = bl.max_residual;
            lr.method = std::string(to_string(bl.energy.method));
            worst_res = std::max(worst_res, bl.max_residual);
            rec.max_deviation = std::max(rec.max_deviation, lr.deviation);
            if (lr.deviation > opt.match_tol) rec.unmatched.push_back(lr.index);
        } else {
            lr.energy = diag[i];
            lr.deviation = std::numeric_limits<double>::infinity();
            lr.method = "unmatched";
            rec.unmatched.push_back(lr.index);
        }
        rec.levels.push_back(std::move(lr));
    }
    // JSON has no infinity; unmatched levels are listed separately
    for (auto& l : rec.levels)
        if (!std::isfinite(l.deviation)) l.deviation = -1.0;
    rec.residuals["max_bethe_residual"] = worst_res;
    rec.meta.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!rec.unmatched.empty()) {
        rec.status = "incomplete";
        throw IncompleteMatchError(std::move(rec));
    }
    return rec;
}

}  // namespace xxz
