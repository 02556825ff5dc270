#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "xxz/core.hpp"
#include "xxz/operators.hpp"

namespace xxz {

enum class SpinTag { Half, One };

inline std::string_view to_string(SpinTag t) { return t == SpinTag::Half ? "half" : "one"; }

namespace spin_ops {

inline DenseMatrix pauli_x() {
    DenseMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline DenseMatrix pauli_y() {
    DenseMatrix m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}
inline DenseMatrix pauli_z() {
    DenseMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline DenseMatrix sz1() {
    DenseMatrix m = DenseMatrix::Zero(3, 3);
    m(0, 0) = 1;
    m(2, 2) = -1;
    return m;
}
inline DenseMatrix splus1() {
    DenseMatrix m = DenseMatrix::Zero(3, 3);
    m(0, 1) = m(1, 2) = std::sqrt(2.0);
    return m;
}
inline DenseMatrix sminus1() { return splus1().transpose(); }
inline DenseMatrix sx1() { return 0.5 * (splus1() + sminus1()); }
inline DenseMatrix sy1() { return cplx(0, -0.5) * (splus1() - sminus1()); }

}  // namespace spin_ops

namespace detail {

/// A two-site operator (index s_n + d*s_{n+1}) placed on sites n, n+1.
inline DenseMatrix embed_bond(const DenseMatrix& bond, int d, int site, int n_sites) {
    const auto right = ipow_ll(d, site);
    const auto left = ipow_ll(d, n_sites - site - 2);
    return kron(kron(DenseMatrix::Identity(left, left), bond), DenseMatrix::Identity(right, right));
}

inline void require_dim(const ModelParams& p, long long limit = 4096) {
    if (p.hilbert_dim() > limit)
        throw Error(ErrorKind::DimensionTooLarge, "Hilbert space dimension " + std::to_string(p.hilbert_dim()) +
                                                      " exceeds " + std::to_string(limit));
}

inline void require_nonzero(cplx v, const char* what) {
    if (!(std::abs(v) > 1e-12) || !std::isfinite(std::abs(v)))
        throw Error(ErrorKind::BoundarySingularity, what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// s = 1/2
// ---------------------------------------------------------------------------

inline DenseMatrix hamiltonian_half(const ModelParams& p) {
    using namespace spin_ops;
    if (p.n < 1) throw Error(ErrorKind::InvalidParams, "n must be positive");
    detail::require_dim(p);
    const cplx eta = p.eta();
    detail::require_nonzero(std::sinh(p.alpha_minus), "sinh(alpha_minus) = 0");
    detail::require_nonzero(std::sinh(p.alpha_plus), "sinh(alpha_plus) = 0");
    detail::require_nonzero(std::cosh(p.beta_minus), "cosh(beta_minus) = 0");
    detail::require_nonzero(std::cosh(p.beta_plus), "cosh(beta_plus) = 0");

    const DenseMatrix x = pauli_x(), y = pauli_y(), z = pauli_z();
    const DenseMatrix bond = 0.5 * (kron(x, x) + kron(y, y) + std::cosh(eta) * kron(z, z));
    const auto dim = static_cast<Eigen::Index>(p.hilbert_dim());
    DenseMatrix h = DenseMatrix::Zero(dim, dim);
    for (int site = 0; site + 1 < p.n; ++site) h += detail::embed_bond(bond, 2, site, p.n);

    auto boundary = [&](cplx alpha, cplx beta, cplx theta, double z_sign) -> DenseMatrix {
        const cplx cz = z_sign * std::tanh(beta) / std::tanh(alpha);
        const cplx cxy = 1.0 / (std::sinh(alpha) * std::cosh(beta));
        return cz * z + cxy * (std::cosh(theta) * x + I * std::sinh(theta) * y);
    };
    const cplx half_sh = 0.5 * std::sinh(eta);
    h += half_sh * site_operator(boundary(p.alpha_minus, p.beta_minus, p.theta_minus, 1.0), 0, p.n);
    h += half_sh * site_operator(boundary(p.alpha_plus, p.beta_plus, p.theta_plus, -1.0), p.n - 1, p.n);
    return h;
}

// ---------------------------------------------------------------------------
// s = 1
// ---------------------------------------------------------------------------

/// Site-1 boundary coefficients a_0..a_8, or b_0..b_8 after the substitution.
using BoundaryCoefficients = std::array<cplx, 9>;

struct BoundaryCoefficientSet {
    BoundaryCoefficients a;
    BoundaryCoefficients b;
    cplx a0;
};

namespace detail {

inline BoundaryCoefficients boundary_coefficients_one(cplx alpha, cplx beta, cplx theta, cplx eta) {
    const cplx den = std::sinh(alpha - 0.5 * eta) * std::sinh(alpha + 0.5 * eta) * std::cosh(beta - 0.5 * eta) *
                     std::cosh(beta + 0.5 * eta);
    require_nonzero(den, "a0 denominator vanishes");
    const cplx a0 = 1.0 / den;
    const cplx sh_e = std::sinh(eta), sh_2e = std::sinh(2.0 * eta);
    const cplx ch32 = std::pow(std::cosh(eta), 1.5);  // principal branch
    const cplx plus = std::cosh(beta) * std::sinh(alpha) * std::cosh(0.5 * eta) +
                      std::cosh(alpha) * std::sinh(beta) * std::sinh(0.5 * eta);
    const cplx minus = std::cosh(beta) * std::sinh(alpha) * std::cosh(0.5 * eta) -
                       std::cosh(alpha) * std::sinh(beta) * std::sinh(0.5 * eta);
    BoundaryCoefficients a;
    a[0] = a0;
    a[1] = 0.25 * a0 * (std::cosh(2.0 * alpha) - std::cosh(2.0 * beta) + std::cosh(eta)) * sh_2e * sh_e;
    a[2] = 0.25 * a0 * std::sinh(2.0 * alpha) * std::sinh(2.0 * beta) * sh_2e;
    a[3] = -0.125 * a0 * std::exp(2.0 * theta) * sh_2e * sh_e;
    a[4] = -0.125 * a0 * std::exp(-2.0 * theta) * sh_2e * sh_e;
    a[5] = a0 * std::exp(theta) * plus * sh_e * ch32;
    a[6] = a0 * std::exp(-theta) * plus * sh_e * ch32;
    a[7] = -a0 * std::exp(theta) * minus * sh_e * ch32;
    a[8] = -a0 * std::exp(-theta) * minus * sh_e * ch32;
    return a;
}

/// a1 (Sz)^2 + a2 Sz + a3 (S+)^2 + a4 (S-)^2 + a5 S+Sz + a6 Sz S- + a7 Sz S+ + a8 S- Sz
inline DenseMatrix boundary_site_one(const BoundaryCoefficients& a) {
    using namespace spin_ops;
    const DenseMatrix z = sz1(), sp = splus1(), sm = sminus1();
    return a[1] * z * z + a[2] * z + a[3] * sp * sp + a[4] * sm * sm + a[5] * sp * z + a[6] * z * sm +
           a[7] * z * sp + a[8] * sm * z;
}

}  // namespace detail

inline BoundaryCoefficientSet boundary_coefficients(const ModelParams& p) {
    const cplx eta = p.eta();
    BoundaryCoefficientSet out;
    out.a = detail::boundary_coefficients_one(p.alpha_minus, p.beta_minus, p.theta_minus, eta);
    out.b = detail::boundary_coefficients_one(p.alpha_plus, -p.beta_plus, p.theta_plus, eta);
    out.a0 = out.a[0];
    return out;
}

inline DenseMatrix hamiltonian_one(const ModelParams& p) {
    using namespace spin_ops;
    if (p.n < 2) throw Error(ErrorKind::InvalidParams, "the spin-1 Hamiltonian needs n >= 2");
    detail::require_dim(p);
    const cplx eta = p.eta();
    const auto coeffs = boundary_coefficients(p);

    const DenseMatrix x = sx1(), y = sy1(), z = sz1(), id = DenseMatrix::Identity(3, 3);
    const DenseMatrix zz = kron(z, z);
    const DenseMatrix perp = kron(x, x) + kron(y, y);
    const DenseMatrix sigma = perp + zz;
    const DenseMatrix z2_left = kron(id, z * z);
    const DenseMatrix z2_right = kron(z * z, id);
    const cplx sh_e = std::sinh(eta);
    const cplx sh_half = std::sinh(0.5 * eta);
    const DenseMatrix bond = sigma - sigma * sigma + 2.0 * sh_e * sh_e * (zz + z2_left + z2_right - zz * zz) -
                             4.0 * sh_half * sh_half * (perp * zz + zz * perp);

    const auto dim = static_cast<Eigen::Index>(p.hilbert_dim());
    DenseMatrix h = DenseMatrix::Zero(dim, dim);
    for (int site = 0; site + 1 < p.n; ++site) h += detail::embed_bond(bond, 3, site, p.n);
    h += site_operator(detail::boundary_site_one(coeffs.a), 0, p.n);
    h += site_operator(detail::boundary_site_one(coeffs.b), p.n - 1, p.n);
    return h;
}

// ---------------------------------------------------------------------------
// Energy constants
// ---------------------------------------------------------------------------

struct EnergyConstants {
    cplx c1;
    cplx c2;
    SpinTag spin_tag;
};

inline EnergyConstants energy_constants(const ModelParams& p, SpinTag tag) {
    const cplx eta = p.eta();
    const cplx sh_e = std::sinh(eta), ch_e = std::cosh(eta);
    const double n = p.n;
    const cplx am = p.alpha_minus, ap = p.alpha_plus, bm = p.beta_minus, bp = p.beta_plus;
    if (tag == SpinTag::Half) {
        const cplx den = 16.0 * std::sinh(am) * std::cosh(bm) * std::sinh(ap) * std::cosh(bp) *
                         detail::ipow(sh_e, 2 * p.n - 1) * ch_e;
        detail::require_nonzero(den, "c1 denominator vanishes");
        return {-1.0 / den, -(sh_e * sh_e + n * ch_e * ch_e) / (2.0 * ch_e), tag};
    }

    const cplx half = 0.5 * eta;
    const cplx sh_2e = std::sinh(2.0 * eta), sh_3e = std::sinh(3.0 * eta);
    const cplx den1 = 16.0 * detail::ipow(sh_2e * sh_e, 2 * p.n) * sh_3e * std::sinh(am - half) *
                      std::sinh(am + half) * std::cosh(bm - half) * std::cosh(bm + half) * std::sinh(ap - half) *
                      std::sinh(ap + half) * std::cosh(bp - half) * std::cosh(bp + half);
    detail::require_nonzero(den1, "c1 denominator vanishes");
    const cplx c1 = ch_e / den1;

    auto ch = [](cplx v) { return std::cosh(v); };
    const cplx a0 = boundary_coefficients(p).a0;
    const cplx b = 2.0 * (-ch(2.0 * bm) - ch_e * ch_e * ch_e + ch(2.0 * am) * (1.0 + ch(2.0 * bm) * ch_e));
    const cplx d = -4.0 * sh_3e * std::sinh(ap + half) * std::sinh(ap - half) * std::cosh(bp + half) *
                   std::cosh(bp - half);
    detail::require_nonzero(d, "d vanishes");
    const cplx c2e = ch(2.0 * eta), c3e = ch(3.0 * eta), c4e = ch(4.0 * eta);
    const cplx c2ap = ch(2.0 * ap), c2bp = ch(2.0 * bp);

    const cplx term_b = -0.25 * a0 * b * ch_e;
    const cplx bulk = -(n - 1.0) * (4.0 + c2e) + 2.0 * n * ch_e * ch_e;
    const cplx term_sh = -sh_e / (2.0 * d) *
                         (-2.0 * c2ap * (ch_e * (3.0 + 7.0 * c2e + c4e) + c2bp * (4.0 + 5.0 * c2e + 2.0 * c4e)) +
                          2.0 * ch_e * (c2bp * (3.0 + 7.0 * c2e + c4e) + ch_e * (5.0 + 3.0 * c2e + 3.0 * c4e)));
    const cplx term_sh2 = -sh_2e / (2.0 * d) *
                          (c2bp * (2.0 + 4.0 * ch_e * c3e) + ch_e * (5.0 * c2e + c4e) -
                           2.0 * c2ap * (1.0 + c2e + c2bp * (ch_e + 2.0 * c3e) + c4e));
    return {c1, term_b + bulk + term_sh + term_sh2, tag};
}

/// ||H - c1 t'(0) - c2||_F / ||H||_F for s = 1/2.
inline double derivative_identity_residual(const ModelParams& p, SpinTag tag = SpinTag::Half) {
    if (tag != SpinTag::Half || p.two_s != 1)
        throw Error(ErrorKind::UnsupportedCase, "the operator derivative identity is available for s = 1/2");
    const DenseMatrix h = hamiltonian_half(p);
    const DenseMatrix dt = transfer_derivative0(p);
    const EnergyConstants c = energy_constants(p, SpinTag::Half);
    const DenseMatrix diff = h - c.c1 * dt - c.c2 * DenseMatrix::Identity(h.rows(), h.cols());
    return diff.norm() / h.norm();
}

}  // namespace xxz
