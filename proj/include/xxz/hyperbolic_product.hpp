#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "xxz/core.hpp"

namespace xxz {

enum class HypKind { Sinh, Cosh };

/// One factor f(slope*u + offset)^power with f = sinh or cosh.
struct HypFactor {
    HypKind kind = HypKind::Sinh;
    double slope = 1.0;
    cplx offset{};
    int power = 1;

    cplx arg(cplx u) const { return slope * u + offset; }
};

namespace detail {

inline cplx hyp(HypKind k, cplx z) { return k == HypKind::Sinh ? std::sinh(z) : std::cosh(z); }

/// log sinh / log cosh without overflow for large |Re z|. The branch is
/// irrelevant because only exp() of sums of these is ever used.
inline cplx log_hyp(HypKind k, cplx z) {
    if (std::abs(z.real()) < 5.0) return std::log(hyp(k, z));
    const double sgn = z.real() > 0 ? 1.0 : -1.0;
    const cplx zz = sgn * z;  // Re zz > 0
    const cplx tail = std::exp(-2.0 * zz);
    const cplx core = zz - std::log(2.0) + std::log(k == HypKind::Sinh ? 1.0 - tail : 1.0 + tail);
    // sinh is odd: log sinh(z) = log(-1) + log sinh(-z)
    if (k == HypKind::Sinh && sgn < 0) return core + cplx(0.0, pi);
    return core;
}

/// coth or tanh, the log-derivative of sinh or cosh.
inline cplx dlog_hyp(HypKind k, cplx z) {
    return k == HypKind::Sinh ? std::cosh(z) / std::sinh(z) : std::sinh(z) / std::cosh(z);
}

inline cplx ipow(cplx z, int p) {
    cplx out{1.0, 0.0};
    const bool inv = p < 0;
    unsigned e = static_cast<unsigned>(inv ? -p : p);
    cplx base = z;
    while (e) {
        if (e & 1u) out *= base;
        base *= base;
        e >>= 1u;
    }
    return inv ? 1.0 / out : out;
}

}  // namespace detail

/// prefactor * prod_k f_k(a_k u + b_k)^{p_k}.
///
/// Almost every scalar of the model (xi, delta, h, h~, g, gamma, Q) is of
/// this shape. Keeping the factor list explicit gives exact log-derivatives,
/// overflow-safe evaluation and exact cancellation of common factors.
class HyperbolicProduct {
public:
    HyperbolicProduct() = default;
    explicit HyperbolicProduct(cplx prefactor) : prefactor_(prefactor) {}

    HyperbolicProduct& times(HypKind kind, double slope, cplx offset, int power = 1) {
        if (power != 0) factors_.push_back({kind, slope, offset, power});
        return *this;
    }
    HyperbolicProduct& sinh(double slope, cplx offset, int power = 1) {
        return times(HypKind::Sinh, slope, offset, power);
    }
    HyperbolicProduct& cosh(double slope, cplx offset, int power = 1) {
        return times(HypKind::Cosh, slope, offset, power);
    }
    HyperbolicProduct& scale(cplx c) {
        prefactor_ *= c;
        return *this;
    }
    HyperbolicProduct& times(const HyperbolicProduct& other) {
        prefactor_ *= other.prefactor_;
        factors_.insert(factors_.end(), other.factors_.begin(), other.factors_.end());
        return *this;
    }

    /// The same function evaluated at slope_u * u + shift.
    HyperbolicProduct substituted(double slope_u, cplx shift) const {
        HyperbolicProduct out(prefactor_);
        for (const auto& f : factors_) out.times(f.kind, f.slope * slope_u, f.slope * shift + f.offset, f.power);
        return out;
    }

    /// 1 / this
    HyperbolicProduct inverse() const {
        HyperbolicProduct out(1.0 / prefactor_);
        for (const auto& f : factors_) out.times(f.kind, f.slope, f.offset, -f.power);
        return out;
    }

    /// Merges identical factors and drops those whose powers cancel.
    HyperbolicProduct& simplify() {
        std::vector<HypFactor> merged;
        for (const auto& f : factors_) {
            auto it = std::find_if(merged.begin(), merged.end(), [&](const HypFactor& g) {
                return g.kind == f.kind && g.slope == f.slope && g.offset == f.offset;
            });
            if (it == merged.end())
                merged.push_back(f);
            else
                it->power += f.power;
        }
        std::erase_if(merged, [](const HypFactor& f) { return f.power == 0; });
        factors_ = std::move(merged);
        return *this;
    }

    cplx prefactor() const { return prefactor_; }
    const std::vector<HypFactor>& factors() const { return factors_; }

    cplx value(cplx u) const {
        bool large = false;
        for (const auto& f : factors_) large = large || std::abs(f.arg(u).real()) > 5.0;
        if (!large) {
            cplx v = prefactor_;
            for (const auto& f : factors_) v *= detail::ipow(detail::hyp(f.kind, f.arg(u)), f.power);
            return v;
        }
        return std::exp(log_value(u));
    }

    /// log of the value (any branch).
    cplx log_value(cplx u) const {
        cplx acc = std::log(prefactor_);
        for (const auto& f : factors_) acc += static_cast<double>(f.power) * detail::log_hyp(f.kind, f.arg(u));
        return acc;
    }

    cplx log_derivative(cplx u) const {
        cplx acc{};
        for (const auto& f : factors_)
            acc += static_cast<double>(f.power) * f.slope * detail::dlog_hyp(f.kind, f.arg(u));
        return acc;
    }

    /// d/du of the value. Uses the product rule term by term, so it stays
    /// finite at zeros of the product where value * log_derivative is 0 * inf.
    cplx derivative(cplx u) const {
        bool large = false;
        for (const auto& f : factors_) large = large || std::abs(f.arg(u).real()) > 5.0;
        if (large) return value(u) * log_derivative(u);
        const std::size_t k = factors_.size();
        std::vector<cplx> val(k), dval(k);
        for (std::size_t i = 0; i < k; ++i) {
            const auto& f = factors_[i];
            const cplx z = f.arg(u);
            const cplx base = detail::hyp(f.kind, z);
            const cplx dbase = f.slope * (f.kind == HypKind::Sinh ? std::cosh(z) : std::sinh(z));
            val[i] = detail::ipow(base, f.power);
            dval[i] = static_cast<double>(f.power) * detail::ipow(base, f.power - 1) * dbase;
        }
        cplx acc{};
        for (std::size_t i = 0; i < k; ++i) {
            cplx term = dval[i];
            for (std::size_t j = 0; j < k; ++j)
                if (j != i) term *= val[j];
            acc += term;
        }
        return prefactor_ * acc;
    }

    /// Net order of vanishing at u: zeros counted positive, poles negative.
    int zero_order(cplx u, double tol = 1e-9) const {
        int order = 0;
        for (const auto& f : factors_)
            if (std::abs(detail::hyp(f.kind, f.arg(u))) < tol) order += f.power;
        return order;
    }

    /// Smallest |f_k| over factors with negative power; a pole guard.
    double min_denominator(cplx u) const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& f : factors_)
            if (f.power < 0) m = std::min(m, std::abs(detail::hyp(f.kind, f.arg(u))));
        return m;
    }

    /// All zeros of positive-power factors with imaginary part in (-pi, pi].
    std::vector<cplx> factor_zeros() const {
        std::vector<cplx> out;
        for (const auto& f : factors_) {
            if (f.power <= 0) continue;
            const double base = f.kind == HypKind::Sinh ? 0.0 : 0.5;
            // slope*u + offset = i*pi*(k + base); |slope| <= q keeps k in range
            const int kmax = static_cast<int>(std::ceil(2.0 * std::abs(f.slope))) + 4;
            for (int k = -kmax; k <= kmax; ++k) {
                const cplx z = (cplx(0.0, pi * (k + base)) - f.offset) / f.slope;
                const cplx w = wrap_strip(z);
                const bool seen = std::any_of(out.begin(), out.end(), [&](cplx x) { return std::abs(x - w) < 1e-12; });
                if (!seen) out.push_back(w);
            }
        }
        return out;
    }

private:
    cplx prefactor_{1.0, 0.0};
    std::vector<HypFactor> factors_;
};

}  // namespace xxz
