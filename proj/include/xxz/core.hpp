#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace xxz {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Failure categories surfaced by the library. The CLI maps these onto exit
/// codes and the `kind` field of its error objects.
enum class ErrorKind {
    InvalidParams,
    PoleAtDenominator,
    PoleAtRoot,
    UnsupportedCase,
    UnsupportedQ,
    DimensionTooLarge,
    DerivativeUnstable,
    BoundarySingularity,
    ConvergenceFailure,
    NoConvergence,
    RankDeficiency,
    MethodDisagreement,
    LengthMismatch,
    IncompleteMatch,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::PoleAtDenominator: return "PoleAtDenominator";
        case ErrorKind::PoleAtRoot: return "PoleAtRoot";
        case ErrorKind::UnsupportedCase: return "UnsupportedCase";
        case ErrorKind::UnsupportedQ: return "UnsupportedQ";
        case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorKind::DerivativeUnstable: return "DerivativeUnstable";
        case ErrorKind::BoundarySingularity: return "BoundarySingularity";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::RankDeficiency: return "RankDeficiency";
        case ErrorKind::MethodDisagreement: return "MethodDisagreement";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::IncompleteMatch: return "IncompleteMatch";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// what() without the kind prefix.
    const std::string& message() const noexcept { return message_; }

    /// True for failures caused by bad input rather than by the numerics.
    bool is_validation() const noexcept {
        return kind_ == ErrorKind::InvalidParams || kind_ == ErrorKind::UnsupportedCase ||
               kind_ == ErrorKind::UnsupportedQ || kind_ == ErrorKind::DimensionTooLarge ||
               kind_ == ErrorKind::LengthMismatch;
    }

private:
    ErrorKind kind_;
    std::string message_;
};

enum class BoundaryCase { Case1AlphaBeta, Case2AlphaAlpha, Case3BetaBeta };
enum class Side { Minus, Plus };

inline std::string_view to_string(BoundaryCase c) {
    switch (c) {
        case BoundaryCase::Case1AlphaBeta: return "alpha_beta";
        case BoundaryCase::Case2AlphaAlpha: return "alpha_alpha";
        case BoundaryCase::Case3BetaBeta: return "beta_beta";
    }
    return "?";
}

inline std::string_view to_string(Side s) { return s == Side::Minus ? "minus" : "plus"; }

/// Chain size, spin and the integers fixing the anisotropy eta = i*pi*r/q.
struct ChainSpec {
    int n = 1;
    int two_s = 1;
    int r = 1;
    int q = 3;
};

/// Full model description. Operators and Hamiltonians accept any boundary
/// values; everything that depends on the Bethe ansatz requires `validate`.
struct ModelParams {
    int n = 1;
    int two_s = 1;
    int r = 1;
    int q = 3;
    cplx alpha_minus{};
    cplx alpha_plus{};
    cplx beta_minus{};
    cplx beta_plus{};
    cplx theta_minus{};
    cplx theta_plus{};
    BoundaryCase bcase = BoundaryCase::Case2AlphaAlpha;
    Side free_alpha_side = Side::Minus;
    Side free_beta_side = Side::Minus;

    /// eta is always rebuilt from the integers so the q-fold shift lattice
    /// closes exactly: 2*q*eta = 2*i*pi*r.
    cplx eta() const { return {0.0, pi * static_cast<double>(r) / static_cast<double>(q)}; }
    double spin() const { return 0.5 * two_s; }
    bool odd_r() const { return r % 2 == 1; }
    /// (-1)^{2sN}
    int sign_2sn() const { return (two_s * n) % 2 == 0 ? 1 : -1; }
    /// Dimension of the quantum space, (2s+1)^N.
    long long hilbert_dim() const {
        long long d = 1;
        for (int i = 0; i < n; ++i) d *= (two_s + 1);
        return d;
    }
    ChainSpec chain() const { return {n, two_s, r, q}; }
};

namespace detail {

inline bool close(cplx a, cplx b, double tol = 1e-12) {
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

inline int parity_sign(int k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace detail

/// Checks the structural invariants and the values pinned by the boundary case.
inline void validate(const ModelParams& p) {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidParams, msg); };
    if (p.n < 1) fail("n must be positive");
    if (p.two_s < 1) fail("two_s must be positive");
    if (p.r < 1) fail("r must be positive");
    if (p.q < 3 || p.q % 2 == 0) fail("q must be an odd integer >= 3");
    if (std::gcd(p.r, p.q) != 1) fail("r/q must be an irreducible fraction");
    if (!detail::close(p.theta_minus, p.theta_plus)) fail("theta_minus must equal theta_plus");

    const cplx eta = p.eta();
    const cplx half_pi{0.0, pi / 2};
    switch (p.bcase) {
        case BoundaryCase::Case1AlphaBeta: {
            const cplx fixed_alpha = p.free_alpha_side == Side::Minus ? p.alpha_plus : p.alpha_minus;
            const cplx fixed_beta = p.free_beta_side == Side::Minus ? p.beta_plus : p.beta_minus;
            if (!detail::close(fixed_alpha, half_pi)) fail("case alpha_beta: fixed alpha must be i*pi/2");
            if (!detail::close(fixed_beta, eta)) fail("case alpha_beta: fixed beta must be eta");
            break;
        }
        case BoundaryCase::Case2AlphaAlpha:
            if (!detail::close(p.beta_minus, eta) || !detail::close(p.beta_plus, eta))
                fail("case alpha_alpha: beta_minus and beta_plus must equal eta");
            break;
        case BoundaryCase::Case3BetaBeta:
            if (!detail::close(p.alpha_minus, eta) || !detail::close(p.alpha_plus, eta))
                fail("case beta_beta: alpha_minus and alpha_plus must equal eta");
            break;
    }
}

/// Case 3 has no known h(u) for even r; refuse instead of guessing.
inline void require_supported(const ModelParams& p) {
    validate(p);
    if (p.bcase == BoundaryCase::Case3BetaBeta && !p.odd_r())
        throw Error(ErrorKind::UnsupportedCase,
                    "case beta_beta with even r has no T-Q solution (r=" + std::to_string(p.r) + ")");
}

inline ModelParams case1_params(ChainSpec c, Side free_alpha, cplx alpha, Side free_beta, cplx beta,
                                cplx theta) {
    ModelParams p{c.n, c.two_s, c.r, c.q};
    const cplx eta = p.eta();
    const cplx half_pi{0.0, pi / 2};
    p.bcase = BoundaryCase::Case1AlphaBeta;
    p.free_alpha_side = free_alpha;
    p.free_beta_side = free_beta;
    p.alpha_minus = free_alpha == Side::Minus ? alpha : half_pi;
    p.alpha_plus = free_alpha == Side::Plus ? alpha : half_pi;
    p.beta_minus = free_beta == Side::Minus ? beta : eta;
    p.beta_plus = free_beta == Side::Plus ? beta : eta;
    p.theta_minus = p.theta_plus = theta;
    validate(p);
    return p;
}

inline ModelParams case2_params(ChainSpec c, cplx alpha_minus, cplx alpha_plus, cplx theta) {
    ModelParams p{c.n, c.two_s, c.r, c.q};
    p.bcase = BoundaryCase::Case2AlphaAlpha;
    p.alpha_minus = alpha_minus;
    p.alpha_plus = alpha_plus;
    p.beta_minus = p.beta_plus = p.eta();
    p.theta_minus = p.theta_plus = theta;
    validate(p);
    return p;
}

inline ModelParams case3_params(ChainSpec c, cplx beta_minus, cplx beta_plus, cplx theta) {
    ModelParams p{c.n, c.two_s, c.r, c.q};
    p.bcase = BoundaryCase::Case3BetaBeta;
    p.alpha_minus = p.alpha_plus = p.eta();
    p.beta_minus = beta_minus;
    p.beta_plus = beta_plus;
    p.theta_minus = p.theta_plus = theta;
    validate(p);
    return p;
}

/// Reduces the imaginary part into (-pi, pi]; every object built on the
/// spectral parameter here is 2*i*pi periodic.
inline cplx wrap_strip(cplx u) {
    double im = std::remainder(u.imag(), 2.0 * pi);
    if (im <= -pi) im += 2.0 * pi;
    return {u.real(), im};
}

/// Distance between two points of the cylinder C / 2*i*pi*Z.
inline double strip_distance(cplx a, cplx b) { return std::abs(wrap_strip(a - b)); }

}  // namespace xxz
