#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "xxz/core.hpp"
#include "xxz/hyperbolic_product.hpp"
#include "xxz/scalars.hpp"

namespace xxz {

// ---------------------------------------------------------------------------
// h(u) and h~(u)
// ---------------------------------------------------------------------------

namespace detail {

/// sinh(u) + sinh(b) = 2 sinh((u+b)/2) cosh((u-b)/2)
inline void sinh_plus_sinh(HyperbolicProduct& h, cplx b) {
    h.scale(2.0).sinh(0.5, 0.5 * b).cosh(0.5, -0.5 * b);
}

/// cosh(u) + sign*cosh(b)
inline void cosh_pm_cosh(HyperbolicProduct& h, int sign, cplx b) {
    if (sign > 0)
        h.scale(2.0).cosh(0.5, 0.5 * b).cosh(0.5, -0.5 * b);
    else
        h.scale(2.0).sinh(0.5, 0.5 * b).sinh(0.5, -0.5 * b);
}

/// cosh((u + a + eta)/2) / cosh((u - a - eta)/2)
inline void half_cosh_ratio(HyperbolicProduct& h, cplx a, cplx eta) {
    h.cosh(0.5, 0.5 * (a + eta)).cosh(0.5, -0.5 * (a + eta), -1);
}

}  // namespace detail

/// h~(u): the rescaled h function of the case/parity selected by `p`.
///
/// The sums sinh u +- i cosh(beta) and cosh u +- i sinh(beta) that appear in
/// the printed forms are factorized exactly (i cosh b = sinh(b + i pi/2),
/// i sinh b = cosh(b + i pi/2)) so that h~ stays a pure product.
inline HyperbolicProduct h_tilde_product(const ModelParams& p) {
    require_supported(p);
    const cplx eta = p.eta();
    const int eps = p.sign_2sn();
    const bool odd = p.odd_r();
    const cplx half_pi_i{0.0, pi / 2};

    // case 3 is odd-r only (require_supported)
    HyperbolicProduct h(odd ? 4.0 * eps : -4.0);
    h.sinh(1.0, (p.spin() + 0.5) * eta, 2 * p.n);
    h.sinh(2.0, 2.0 * eta).sinh(2.0, eta, -1);

    switch (p.bcase) {
        case BoundaryCase::Case1AlphaBeta: {
            const cplx alpha = p.free_alpha_side == Side::Minus ? p.alpha_minus : p.alpha_plus;
            const cplx beta = p.free_beta_side == Side::Minus ? p.beta_minus : p.beta_plus;
            const int sgn = odd ? eps : -1;  // sinh u + sgn * i cosh(beta)
            h.cosh(1.0, 0.0).cosh(1.0, -eta);
            detail::sinh_plus_sinh(h, static_cast<double>(sgn) * (beta + half_pi_i));
            h.sinh(1.0, -alpha);
            detail::half_cosh_ratio(h, alpha, eta);
            break;
        }
        case BoundaryCase::Case2AlphaAlpha: {
            h.cosh(1.0, eta).cosh(1.0, -eta);
            const cplx ap = odd ? static_cast<double>(eps) * p.alpha_plus : -p.alpha_plus;
            // odd r: sinh(u + eps a+) ... cosh((u - eps a+ + eta)/2)/cosh((u + eps a+ - eta)/2)
            // even r: the same with eps a+ -> -a+
            h.sinh(1.0, ap).sinh(1.0, -p.alpha_minus);
            detail::half_cosh_ratio(h, p.alpha_minus, eta);
            detail::half_cosh_ratio(h, -ap, eta);
            break;
        }
        case BoundaryCase::Case3BetaBeta: {
            h.sinh(1.0, -eta).sinh(1.0, eta);
            detail::cosh_pm_cosh(h, -1, p.beta_minus + half_pi_i);  // cosh u - i sinh(beta-)
            detail::cosh_pm_cosh(h, eps, p.beta_plus + half_pi_i);  // cosh u + eps i sinh(beta+)
            break;
        }
    }
    return h.simplify();
}

/// h(u) = h~(u) g(u)^{2N}
inline HyperbolicProduct h_product(const ModelParams& p) {
    HyperbolicProduct h = h_tilde_product(p);
    h.times(g_rescale_product(p));
    return h.simplify();
}

/// sinh(2u + eta) h~(u), with the sinh(2u+eta) denominator cancelled exactly.
inline HyperbolicProduct h_tilde2_product(const ModelParams& p) {
    HyperbolicProduct h = h_tilde_product(p);
    h.sinh(2.0, p.eta());
    return h.simplify();
}

inline cplx h_fn(cplx u, const ModelParams& p) { return h_product(p).value(u); }
inline cplx h_tilde(cplx u, const ModelParams& p) { return h_tilde_product(p).value(u); }

/// Argument of the second T-Q term: -u + (q-1) eta, or -u - eta in case 3.
inline cplx mirror(cplx u, const ModelParams& p) {
    const cplx eta = p.eta();
    return p.bcase == BoundaryCase::Case3BetaBeta ? -u - eta : -u + static_cast<double>(p.q - 1) * eta;
}

inline int expected_root_count(const ModelParams& p) {
    const int base = p.two_s * p.n;
    return p.bcase == BoundaryCase::Case2AlphaAlpha ? base + p.q + 1 : base + p.q - 1;
}

// ---------------------------------------------------------------------------
// Bethe states and Q(u)
// ---------------------------------------------------------------------------

/// M Bethe roots for one level together with the model they belong to.
class BetheState {
public:
    BetheState(ModelParams params, std::vector<cplx> roots) : params_(params), roots_(std::move(roots)) {
        require_supported(params_);
        const int m = expected_root_count(params_);
        if (static_cast<int>(roots_.size()) != m)
            throw Error(ErrorKind::InvalidParams, "expected " + std::to_string(m) + " Bethe roots, got " +
                                                      std::to_string(roots_.size()));
        for (auto& u : roots_) u = wrap_strip(u);
    }

    const ModelParams& params() const { return params_; }
    const std::vector<cplx>& roots() const { return roots_; }
    int size() const { return static_cast<int>(roots_.size()); }

    /// Crossing shift sigma in Q(u) = prod sinh((u-u_j)/2) sinh((u+u_j+sigma)/2).
    cplx shift() const { return crossing_shift(params_); }

    static cplx crossing_shift(const ModelParams& p) {
        return p.bcase == BoundaryCase::Case3BetaBeta ? p.eta() : -static_cast<double>(p.q - 1) * p.eta();
    }

    /// Reflection partner of a root: the other zero of its Q factor.
    cplx partner(cplx u) const { return wrap_strip(-u - shift()); }

private:
    ModelParams params_;
    std::vector<cplx> roots_;
};

inline HyperbolicProduct q_product(const BetheState& s) {
    HyperbolicProduct q;
    const cplx sigma = s.shift();
    for (cplx uj : s.roots()) q.sinh(0.5, -0.5 * uj).sinh(0.5, 0.5 * (uj + sigma));
    return q;
}

inline cplx q_eval(cplx u, const BetheState& s) {
    const cplx sigma = s.shift();
    cplx v{1.0, 0.0};
    for (cplx uj : s.roots()) v *= std::sinh(0.5 * (u - uj)) * std::sinh(0.5 * (u + uj + sigma));
    return v;
}

/// Q'(u)/Q(u)
inline cplx q_log_derivative(cplx u, const BetheState& s) {
    const cplx sigma = s.shift();
    cplx acc{};
    for (cplx uj : s.roots()) {
        const cplx a = std::sinh(0.5 * (u - uj));
        const cplx b = std::sinh(0.5 * (u + uj + sigma));
        if (std::abs(a) < 1e-14 || std::abs(b) < 1e-14)
            throw Error(ErrorKind::PoleAtRoot, "q_log_derivative evaluated at a zero of Q");
        acc += 0.5 * (std::cosh(0.5 * (u - uj)) / a + std::cosh(0.5 * (u + uj + sigma)) / b);
    }
    return acc;
}

/// Zeros of Q on the strip: each root and its reflection partner.
inline std::vector<cplx> q_zeros(const BetheState& s) {
    std::vector<cplx> z;
    z.reserve(2 * s.roots().size());
    for (cplx uj : s.roots()) {
        z.push_back(uj);
        z.push_back(s.partner(uj));
    }
    return z;
}

// ---------------------------------------------------------------------------
// Pinned roots
// ---------------------------------------------------------------------------

/// Points where h~(u) and h~(mirror(u)) vanish together.
///
/// A root sitting exactly on such a point satisfies its Bethe equation as
/// 0 = 0; its position is fixed by analyticity instead. These roots are
/// frozen during Newton refinement and their residual is the distance to
/// the point.
inline std::vector<cplx> pinned_points(const ModelParams& p) {
    const HyperbolicProduct ht = h_tilde_product(p);
    std::vector<cplx> out;
    for (cplx z : ht.factor_zeros()) {
        if (ht.zero_order(z) <= 0) continue;
        if (ht.zero_order(mirror(z, p)) <= 0) continue;
        out.push_back(wrap_strip(z));
    }
    return out;
}

/// The pin within `radius` of u (on the cylinder), if any.
inline std::optional<cplx> nearest_pin(cplx u, const std::vector<cplx>& pins, double radius) {
    for (cplx pin : pins)
        if (strip_distance(u, pin) < radius) return pin;
    return std::nullopt;
}

inline constexpr double pin_snap_radius = 1e-3;

/// How close the pinned set is to degenerating: the smallest distance, modulo
/// i*pi, between a pin and its mirror image or between two distinct pins.
/// Continuation through a zero of this quantity can land on spurious root sets.
inline double pin_degeneracy(const ModelParams& p) {
    auto dist_mod_ipi = [](cplx a, cplx b) {
        const cplx d = a - b;
        return std::abs(cplx(d.real(), std::remainder(d.imag(), pi)));
    };
    const auto pins = pinned_points(p);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pins.size(); ++i) {
        best = std::min(best, dist_mod_ipi(pins[i], mirror(pins[i], p)));
        for (std::size_t j = i + 1; j < pins.size(); ++j) {
            const double d = dist_mod_ipi(pins[i], pins[j]);
            if (d > 1e-9) best = std::min(best, d);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// T-Q eigenvalues and Bethe residuals
// ---------------------------------------------------------------------------

namespace detail {

/// The two T-Q terms h~(u)Q(u+c)/Q(u) and h~(m(u))Q(u-c)/Q(u) without pole guards.
inline std::pair<cplx, cplx> tq_terms(cplx u, const BetheState& s, const HyperbolicProduct& ht) {
    const ModelParams& p = s.params();
    const cplx c = static_cast<double>(p.q - 1) * p.eta();
    const cplx q0 = q_eval(u, s);
    return {ht.value(u) * q_eval(u + c, s) / q0, ht.value(mirror(u, p)) * q_eval(u - c, s) / q0};
}

}  // namespace detail

inline std::vector<cplx> bethe_residuals(const BetheState& s);

/// Rescaled eigenvalue Lambda~(u) from the T-Q relation.
///
/// Within `guard` of a zero of Q the value is the mean over a small circle,
/// valid when the Bethe equations hold and the pole cancels.
inline cplx lambda_tq(cplx u, const BetheState& s, double guard = 1e-8) {
    const HyperbolicProduct ht = h_tilde_product(s.params());
    double nearest = std::numeric_limits<double>::infinity();
    for (cplx z : q_zeros(s)) nearest = std::min(nearest, strip_distance(u, z));
    if (nearest >= guard) {
        auto [a, b] = detail::tq_terms(u, s, ht);
        return a + b;
    }
    double worst = 0.0;
    for (cplx r : bethe_residuals(s)) worst = std::max(worst, std::abs(r));
    if (worst > 1e-6) throw Error(ErrorKind::PoleAtRoot, "lambda_tq at a zero of Q of an unsolved state");
    constexpr int points = 32;
    constexpr double radius = 1e-3;
    cplx acc{};
    for (int k = 0; k < points; ++k) {
        const cplx v = u + radius * std::exp(cplx(0.0, 2.0 * pi * (k + 0.5) / points));
        auto [a, b] = detail::tq_terms(v, s, ht);
        acc += a + b;
    }
    return acc / static_cast<double>(points);
}

/// Unrescaled Lambda^{(1/2,s)}(u) = g(u)^{2N} Lambda~(u).
inline cplx lambda_tq_unrescaled(cplx u, const BetheState& s) {
    return g_rescale(u, s.params()) * lambda_tq(u, s);
}

/// Per-root residual of the Bethe equations, normalized by the dominant term.
/// Pinned roots report their offset from the pin instead.
inline std::vector<cplx> bethe_residuals(const BetheState& s) {
    const ModelParams& p = s.params();
    const HyperbolicProduct ht = h_tilde_product(p);
    const auto pins = pinned_points(p);
    const cplx c = static_cast<double>(p.q - 1) * p.eta();
    std::vector<cplx> out;
    out.reserve(s.roots().size());
    for (cplx uj : s.roots()) {
        if (auto pin = nearest_pin(uj, pins, pin_snap_radius)) {
            out.push_back(wrap_strip(uj - *pin));
            continue;
        }
        const cplx a = ht.value(uj) * q_eval(uj + c, s);
        const cplx b = ht.value(mirror(uj, p)) * q_eval(uj - c, s);
        const double scale = std::max(std::abs(a), std::abs(b));
        out.push_back(scale > 0 ? (a + b) / scale : cplx{});
    }
    return out;
}

inline double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (cplx x : v) m = std::max(m, std::abs(x));
    return m;
}

// ---------------------------------------------------------------------------
// Scalar functional relation: z-product and quadratic
// ---------------------------------------------------------------------------

/// z(u) = prod_{j=0}^{q-1} h(u + 2 j eta)
inline cplx z_product(cplx u, const ModelParams& p) {
    const HyperbolicProduct h = h_product(p);
    const cplx eta = p.eta();
    cplx z{1.0, 0.0};
    for (int j = 0; j < p.q; ++j) z *= h.value(u + 2.0 * j * eta);
    return z;
}

/// The crossed partner product of z(u) entering the second condition.
inline cplx z_partner_product(cplx u, const ModelParams& p) {
    const HyperbolicProduct h = h_product(p);
    const cplx eta = p.eta();
    const bool beta_case = p.bcase == BoundaryCase::Case3BetaBeta;
    cplx z{1.0, 0.0};
    for (int j = 0; j < p.q; ++j) z *= h.value(beta_case ? -u - (2.0 * j + 1.0) * eta : -u - 2.0 * j * eta);
    return z;
}

/// z^2 - z f + prod_j delta(u + (2j-1) eta), relative to the largest term.
inline cplx quadratic_residual(cplx u, const ModelParams& p) {
    const cplx z = z_product(u, p);
    const cplx f = f_total(u, p);
    const cplx eta = p.eta();
    const HyperbolicProduct d = delta_product(p);
    cplx prod{1.0, 0.0};
    for (int j = 0; j < p.q; ++j) prod *= d.value(u + (2.0 * j - 1.0) * eta);
    const double scale = std::max({std::abs(z * z), std::abs(z * f), std::abs(prod)});
    return (z * z - z * f + prod) / scale;
}

// ---------------------------------------------------------------------------
// Conditions on h(u)
// ---------------------------------------------------------------------------

namespace detail {

inline cplx relative_gap(cplx lhs, cplx rhs) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
    return (lhs - rhs) / scale;
}

}  // namespace detail

/// Periodicity: the larger of |h(u + 2 i pi) - h(u)| and |h(u + 2 q eta) - h(u)|, relative.
inline double cond0_residual(cplx u, const ModelParams& p) {
    const HyperbolicProduct h = h_product(p);
    const cplx hu = h.value(u);
    const cplx a = h.value(u + cplx(0.0, 2.0 * pi));
    const cplx b = h.value(u + 2.0 * static_cast<double>(p.q) * p.eta());
    return std::max(std::abs(detail::relative_gap(a, hu)), std::abs(detail::relative_gap(b, hu)));
}

/// h(u + (q+1) eta) h(-u - (q+1) eta) = delta(u); in case 3 the second
/// argument is -u - eta.
inline cplx cond1_residual(cplx u, const ModelParams& p) {
    const HyperbolicProduct h = h_product(p);
    const cplx eta = p.eta();
    const cplx shift = static_cast<double>(p.q + 1) * eta;
    const cplx second = p.bcase == BoundaryCase::Case3BetaBeta ? -u - eta : -u - shift;
    return detail::relative_gap(h.value(u + shift) * h.value(second), delta_s(u, p));
}

/// z(u) + (crossed product) = f(u)
inline cplx cond2_residual(cplx u, const ModelParams& p) {
    return detail::relative_gap(z_product(u, p) + z_partner_product(u, p), f_total(u, p));
}

// ---------------------------------------------------------------------------
// det M
// ---------------------------------------------------------------------------

enum class LambdaSource { FromTQ, FromDiagonalization };

struct DetMConfig {
    ModelParams params;
    int p = 2;  // q - 1
    LambdaSource lambda_source = LambdaSource::FromTQ;

    explicit DetMConfig(const ModelParams& mp, LambdaSource src = LambdaSource::FromTQ)
        : params(mp), p(mp.q - 1), lambda_source(src) {}
};

/// The q x q matrix whose vanishing determinant is the functional relation.
/// `lambda` must return the unrescaled eigenvalue Lambda^{(1/2,s)}.
inline Eigen::MatrixXcd det_m_matrix(cplx u, const DetMConfig& cfg, const std::function<cplx(cplx)>& lambda) {
    const ModelParams& mp = cfg.params;
    if (cfg.p + 1 != mp.q) throw Error(ErrorKind::InvalidParams, "DetMConfig: p + 1 must equal q");
    const HyperbolicProduct h = h_product(mp);
    const cplx eta = mp.eta();
    const int q = mp.q;
    const bool beta_case = mp.bcase == BoundaryCase::Case3BetaBeta;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(q, q);
    for (int k = 0; k < q; ++k) {
        const cplx uk = u + static_cast<double>(k) * cfg.p * eta;
        m(k, k) = lambda(uk);
        m(k, (k + 1) % q) -= h.value(uk);
        // the left neighbour: -h(-u_k + p eta) or, in case 3, -h(-u_k - eta)
        const cplx left_arg = beta_case ? -uk - eta : -uk + static_cast<double>(cfg.p) * eta;
        m(k, (k + q - 1) % q) -= h.value(left_arg);
    }
    return m;
}

/// det M normalized by the product of row norms (Hadamard bound), so that
/// the result lies in [0, 1] in magnitude.
inline cplx det_m_residual(cplx u, const DetMConfig& cfg, const std::function<cplx(cplx)>& lambda) {
    const Eigen::MatrixXcd m = det_m_matrix(u, cfg, lambda);
    double bound = 1.0;
    for (int k = 0; k < m.rows(); ++k) bound *= m.row(k).norm();
    return m.partialPivLu().determinant() / bound;
}

}  // namespace xxz
