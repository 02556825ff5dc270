#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "xxz/core.hpp"
#include "xxz/scalars.hpp"

namespace xxz {

using DenseMatrix = Eigen::MatrixXcd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

inline constexpr int max_transfer_sites = 12;

// ---------------------------------------------------------------------------
// Local operator algebra on (C^d)^{\otimes N}, site 0 = least significant digit
// ---------------------------------------------------------------------------

inline long long ipow_ll(int base, int e) {
    long long v = 1;
    for (int i = 0; i < e; ++i) v *= base;
    return v;
}

/// Kronecker product with `a` on the slow index.
inline DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// `op` acting on `site` of an n-site chain of local dimension d (little-endian).
inline DenseMatrix site_operator(const DenseMatrix& op, int site, int n_sites) {
    const auto d = static_cast<int>(op.rows());
    const auto right = ipow_ll(d, site);
    const auto left = ipow_ll(d, n_sites - site - 1);
    return kron(kron(DenseMatrix::Identity(left, left), op), DenseMatrix::Identity(right, right));
}

/// L_site * X for a 2x2 local operator, without forming the full matrix.
inline DenseMatrix apply_local_left(const Mat2& l, int site, const DenseMatrix& x) {
    const long long bit = 1LL << site;
    DenseMatrix y(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const int s = (i & bit) ? 1 : 0;
        const Eigen::Index i0 = i & ~bit;
        const Eigen::Index i1 = i | bit;
        y.row(i) = l(s, 0) * x.row(i0) + l(s, 1) * x.row(i1);
    }
    return y;
}

/// X * L_site for a 2x2 local operator.
inline DenseMatrix apply_local_right(const DenseMatrix& x, const Mat2& l, int site) {
    const long long bit = 1LL << site;
    DenseMatrix y(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const int s = (j & bit) ? 1 : 0;
        const Eigen::Index j0 = j & ~bit;
        const Eigen::Index j1 = j | bit;
        y.col(j) = x.col(j0) * l(0, s) + x.col(j1) * l(1, s);
    }
    return y;
}

// ---------------------------------------------------------------------------
// R and K matrices
// ---------------------------------------------------------------------------

/// Bulk R-matrix on C^2 (x) C^2, basis index 2*a + b.
inline Mat4 r_matrix(cplx u, const ModelParams& p) {
    const cplx eta = p.eta();
    const cplx a = std::sinh(u + eta);
    const cplx b = std::sinh(u);
    const cplx c = std::sinh(eta);
    Mat4 r = Mat4::Zero();
    r(0, 0) = a;
    r(1, 1) = b;
    r(1, 2) = c;
    r(2, 1) = c;
    r(2, 2) = b;
    r(3, 3) = a;
    return r;
}

namespace detail {

inline Mat2 k_matrix(cplx u, cplx alpha, cplx beta, cplx theta) {
    const cplx diag_a = std::sinh(alpha) * std::cosh(beta) * std::cosh(u);
    const cplx diag_b = std::cosh(alpha) * std::sinh(beta) * std::sinh(u);
    Mat2 k;
    k(0, 0) = 2.0 * (diag_a + diag_b);
    k(1, 1) = 2.0 * (diag_a - diag_b);
    k(0, 1) = std::exp(theta) * std::sinh(2.0 * u);
    k(1, 0) = std::exp(-theta) * std::sinh(2.0 * u);
    return k;
}

/// Auxiliary-space blocks of R_{0n}(u): block(a, b) is an operator on site n.
inline std::array<Mat2, 4> r_blocks(cplx u, cplx eta) {
    const cplx a = std::sinh(u + eta);
    const cplx b = std::sinh(u);
    const cplx c = std::sinh(eta);
    Mat2 b00, b01, b10, b11;
    b00 << a, 0, 0, b;
    b11 << b, 0, 0, a;
    b01 << 0, 0, c, 0;  // |down><up|
    b10 << 0, c, 0, 0;  // |up><down|
    return {b00, b01, b10, b11};
}

}  // namespace detail

inline Mat2 k_minus(cplx u, const ModelParams& p) {
    return detail::k_matrix(u, p.alpha_minus, p.beta_minus, p.theta_minus);
}

/// K+(u) = K-(-u - eta) with (alpha-, beta-, theta-) -> (-alpha+, -beta+, theta+).
inline Mat2 k_plus(cplx u, const ModelParams& p) {
    return detail::k_matrix(-u - p.eta(), -p.alpha_plus, -p.beta_plus, p.theta_plus);
}

// ---------------------------------------------------------------------------
// Transfer matrix
// ---------------------------------------------------------------------------

/// t(u) = tr_0 K+_0(u) T_0(u) K-_0(u) T^_0(u) on 2^N states.
///
/// Monodromies are kept as 2x2 auxiliary blocks of 2^N x 2^N operators and
/// built by folding in one site at a time: T = R_{0N}...R_{01} (left fold),
/// T^ = R_{01}...R_{0N} (right fold).
inline DenseMatrix transfer_half(cplx u, const ModelParams& p) {
    if (p.n > max_transfer_sites)
        throw Error(ErrorKind::DimensionTooLarge, "transfer_half supports at most " +
                                                      std::to_string(max_transfer_sites) + " sites");
    const Eigen::Index dim = Eigen::Index{1} << p.n;
    const auto rb = detail::r_blocks(u, p.eta());
    const DenseMatrix id = DenseMatrix::Identity(dim, dim);
    const DenseMatrix zero = DenseMatrix::Zero(dim, dim);

    std::array<DenseMatrix, 4> t{id, zero, zero, id};  // block (a,b) at 2a+b
    std::array<DenseMatrix, 4> th{id, zero, zero, id};
    for (int site = 0; site < p.n; ++site) {
        std::array<DenseMatrix, 4> nt, nth;
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c) {
                nt[2 * a + c] = apply_local_left(rb[2 * a + 0], site, t[0 + c]) +
                                apply_local_left(rb[2 * a + 1], site, t[2 + c]);
                nth[2 * a + c] = apply_local_right(th[2 * a + 0], rb[0 + c], site) +
                                 apply_local_right(th[2 * a + 1], rb[2 + c], site);
            }
        t = std::move(nt);
        th = std::move(nth);
    }

    const Mat2 kp = k_plus(u, p);
    const Mat2 km = k_minus(u, p);
    // Y^{ad} = sum_{b,c} K+_{ab} T^{bc} K-_{cd}; t = sum_{a,d} Y^{ad} T^^{da}
    DenseMatrix out = DenseMatrix::Zero(dim, dim);
    for (int a = 0; a < 2; ++a)
        for (int d = 0; d < 2; ++d) {
            DenseMatrix y = DenseMatrix::Zero(dim, dim);
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) {
                    const cplx w = kp(a, b) * km(c, d);
                    if (w != cplx{}) y += w * t[2 * b + c];
                }
            out.noalias() += y * th[2 * d + a];
        }
    return out;
}

namespace detail {

/// Fourth-order central difference of a matrix-valued function at 0.
template <class F>
DenseMatrix central_difference4(const F& f, double h) {
    return (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
}

}  // namespace detail

/// d/du of an operator family at u = 0: fourth-order central differences at
/// step h and h/2 combined by Richardson extrapolation; the two raw estimates
/// must agree within `agreement`.
template <class F>
DenseMatrix richardson_derivative0(const F& f, double h = 1e-3, double agreement = 1e-7) {
    const DenseMatrix d1 = detail::central_difference4(f, h);
    const DenseMatrix d2 = detail::central_difference4(f, 0.5 * h);
    const double scale = std::max(d2.norm(), 1e-300);
    if ((d1 - d2).norm() / scale > agreement)
        throw Error(ErrorKind::DerivativeUnstable, "step-halving estimates disagree");
    return (16.0 * d2 - d1) / 15.0;
}

inline DenseMatrix transfer_derivative0(const ModelParams& p) {
    return richardson_derivative0([&](double u) { return transfer_half(cplx(u, 0.0), p); });
}

/// ||[t(u), t(v)]|| / (||t(u)|| ||t(v)||)
inline double commutator_residual(cplx u, cplx v, const ModelParams& p) {
    const DenseMatrix a = transfer_half(u, p);
    const DenseMatrix b = transfer_half(v, p);
    return (a * b - b * a).norm() / (a.norm() * b.norm());
}

/// Operator form of the q = 3 and q = 5 functional relations for s = 1/2.
/// Returns ||LHS - rhs(u) * 1||_F / ||t(u) t(u+eta) ... t(u+(q-1)eta)||_F.
template <class Rhs>
double functional_relation_operator_residual(cplx u, const ModelParams& p, const Rhs& rhs) {
    if (p.two_s != 1) throw Error(ErrorKind::UnsupportedCase, "operator functional relation needs s = 1/2");
    if (p.q != 3 && p.q != 5)
        throw Error(ErrorKind::UnsupportedQ, "operator functional relation is printed for q = 3, 5 only");
    const cplx eta = p.eta();
    std::vector<DenseMatrix> t;
    for (int k = 0; k < p.q; ++k) t.push_back(transfer_half(u + static_cast<double>(k) * eta, p));
    const HyperbolicProduct dp = delta_product(p);
    auto d = [&](double k) { return dp.value(u + k * eta); };
    const auto dim = t[0].rows();
    DenseMatrix lead;
    DenseMatrix lhs;
    if (p.q == 3) {
        lead = t[0] * t[1] * t[2];
        lhs = lead - d(-1) * t[1] - d(0) * t[2] - d(1) * t[0];
    } else {
        lead = t[0] * t[1] * t[2] * t[3] * t[4];
        lhs = lead;
        lhs += d(1) * d(-2) * t[0] + d(0) * d(2) * t[4] + d(1) * d(-1) * t[3];
        lhs -= d(1) * (t[0] * t[3] * t[4]);
        lhs += d(0) * d(-2) * t[2];
        lhs -= d(0) * (t[2] * t[3] * t[4]);
        lhs += d(-1) * d(2) * t[1];
        lhs -= d(2) * (t[0] * t[1] * t[4]);
        lhs -= d(-2) * (t[0] * t[1] * t[2]);
        lhs -= d(-1) * (t[1] * t[2] * t[3]);
    }
    lhs -= rhs(u) * DenseMatrix::Identity(dim, dim);
    return lhs.norm() / lead.norm();
}

inline double functional_relation_operator_residual(cplx u, const ModelParams& p) {
    return functional_relation_operator_residual(u, p, [&](cplx v) { return f_total(v, p); });
}

}  // namespace xxz
