#pragma once

#include <cmath>

#include "xxz/core.hpp"
#include "xxz/hyperbolic_product.hpp"

namespace xxz {

namespace detail {
inline constexpr double pole_tol = 1e-12;
}

/// xi(u) = sinh(u + eta) sinh(u - eta)
inline cplx xi(cplx u, const ModelParams& p) {
    const cplx eta = p.eta();
    return std::sinh(u + eta) * std::sinh(u - eta);
}

/// delta^{(s)} from the fusion hierarchy as a factor list.
inline HyperbolicProduct delta_product(const ModelParams& p) {
    const cplx eta = p.eta();
    const int pw = 2 * p.n;
    HyperbolicProduct d(16.0);
    for (int k = 0; k < p.two_s; ++k) {
        // xi(u + (s - k + 1/2) eta) = sinh(u + (s-k+3/2) eta) sinh(u + (s-k-1/2) eta)
        const double shift = 0.5 * (p.two_s - 2 * k + 1);
        d.sinh(1.0, (shift + 1.0) * eta, pw).sinh(1.0, (shift - 1.0) * eta, pw);
    }
    d.sinh(2.0, 0.0).sinh(2.0, 4.0 * eta).sinh(2.0, eta, -1).sinh(2.0, 3.0 * eta, -1);
    d.sinh(1.0, p.alpha_minus + eta).sinh(1.0, -p.alpha_minus + eta);
    d.cosh(1.0, p.beta_minus + eta).cosh(1.0, -p.beta_minus + eta);
    d.sinh(1.0, p.alpha_plus + eta).sinh(1.0, -p.alpha_plus + eta);
    d.cosh(1.0, p.beta_plus + eta).cosh(1.0, -p.beta_plus + eta);
    return d.simplify();
}

inline cplx delta_s(cplx u, const ModelParams& p) {
    const cplx eta = p.eta();
    if (std::abs(std::sinh(2.0 * u + eta)) < detail::pole_tol ||
        std::abs(std::sinh(2.0 * u + 3.0 * eta)) < detail::pole_tol)
        throw Error(ErrorKind::PoleAtDenominator, "delta_s: sinh(2u+eta) sinh(2u+3eta) vanishes");
    return delta_product(p).value(u);
}

inline HyperbolicProduct f0_product(const ModelParams& p) {
    const int pw = 2 * p.two_s * p.n;  // 4sN
    const double scale = std::pow(2.0, -2.0 * p.two_s * (p.q - 1) * p.n);
    if (p.odd_r()) {
        const bool half_odd = p.two_s % 2 == 1;
        HyperbolicProduct out(detail::parity_sign(p.n + 1) * scale);
        out.times(half_odd ? HypKind::Sinh : HypKind::Cosh, static_cast<double>(p.q), 0.0, pw);
        return out;
    }
    HyperbolicProduct out(detail::parity_sign(p.n + 2) * scale);
    out.sinh(static_cast<double>(p.q), 0.0, pw);
    return out;
}

inline cplx f0(cplx u, const ModelParams& p) { return f0_product(p).value(u); }

inline cplx f1(cplx u, const ModelParams& p) {
    const double q = p.q;
    const cplx chq = std::cosh(q * u);
    const cplx shq = std::sinh(q * u);
    const cplx t1 = std::sinh(q * p.alpha_minus) * std::cosh(q * p.beta_minus) * std::sinh(q * p.alpha_plus) *
                    std::cosh(q * p.beta_plus) * chq * chq;
    const cplx t2 = std::cosh(q * p.alpha_minus) * std::sinh(q * p.beta_minus) * std::cosh(q * p.alpha_plus) *
                    std::sinh(q * p.beta_plus) * shq * shq;
    const cplx t3 = std::cosh(q * (p.theta_minus - p.theta_plus)) * shq * shq * chq * chq;

    cplx bracket;
    if (!p.odd_r())
        bracket = t1 - t2 + t3;
    else if (p.two_s % 2 == 1)
        bracket = t1 - t2 - static_cast<double>(detail::parity_sign(p.n)) * t3;
    else
        bracket = t1 - t2 - t3;
    return static_cast<double>(detail::parity_sign(p.n + 1)) * std::pow(2.0, 5 - 2 * p.q) * bracket;
}

/// Right-hand side of the q-th order functional relation, f = f0 * f1.
inline cplx f_total(cplx u, const ModelParams& p) { return f0(u, p) * f1(u, p); }

/// g(u)^{2N} = [prod_{k=1}^{2s-1} sinh(u + (s-k+1/2) eta)]^{2N}; 1 for s = 1/2.
inline HyperbolicProduct g_rescale_product(const ModelParams& p) {
    const cplx eta = p.eta();
    HyperbolicProduct g;
    for (int k = 1; k <= p.two_s - 1; ++k) g.sinh(1.0, 0.5 * (p.two_s - 2 * k + 1) * eta, 2 * p.n);
    return g;
}

inline cplx g_rescale(cplx u, const ModelParams& p) { return g_rescale_product(p).value(u); }

/// gamma(u) = sinh(2u) sinh(2u+2eta) / [sinh(u) sinh(u+eta)]^{2N}
inline cplx gamma_rescale(cplx u, const ModelParams& p) {
    const cplx eta = p.eta();
    if (std::abs(std::sinh(u)) < detail::pole_tol || std::abs(std::sinh(u + eta)) < detail::pole_tol)
        throw Error(ErrorKind::PoleAtDenominator, "gamma_rescale: sinh(u) sinh(u+eta) vanishes");
    HyperbolicProduct g;
    g.sinh(2.0, 0.0).sinh(2.0, 2.0 * eta).sinh(1.0, 0.0, -2 * p.n).sinh(1.0, eta, -2 * p.n);
    return g.value(u);
}

}  // namespace xxz
