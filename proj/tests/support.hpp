#pragma once

#include <complex>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_complex.hpp>

#include "xxz/core.hpp"

namespace xxz::test {

using mpc = boost::multiprecision::cpp_complex_50;

inline mpc to_mp(cplx z) { return mpc(z.real(), z.imag()); }
inline cplx to_double(const mpc& z) { return {z.real().convert_to<double>(), z.imag().convert_to<double>()}; }

/// eta = i pi r / q at 50 digits.
inline mpc eta_mp(int r, int q) {
    using boost::multiprecision::cpp_bin_float_50;
    const cpp_bin_float_50 pi50 = boost::math::constants::pi<cpp_bin_float_50>();
    return mpc(cpp_bin_float_50(0), pi50 * r / q);
}

inline double rel_err(cplx got, cplx want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

inline cplx random_cplx(std::mt19937_64& rng, double re, double im) {
    std::uniform_real_distribution<double> a(-re, re), b(-im, im);
    return {a(rng), b(rng)};
}

inline cplx random_u(std::mt19937_64& rng) { return random_cplx(rng, 0.8, 0.8); }

/// A validated config of the given case with random free boundary values.
inline ModelParams random_params(std::mt19937_64& rng, BoundaryCase bc, int n, int two_s, int r, int q) {
    const ChainSpec chain{n, two_s, r, q};
    const cplx theta = random_cplx(rng, 0.6, 0.3);
    auto boundary = [&] { return cplx(0.3, 0.2) + random_cplx(rng, 0.6, 0.9); };
    switch (bc) {
        case BoundaryCase::Case1AlphaBeta: {
            std::bernoulli_distribution side(0.5);
            return case1_params(chain, side(rng) ? Side::Plus : Side::Minus, boundary(), side(rng) ? Side::Plus : Side::Minus,
                                boundary(), theta);
        }
        case BoundaryCase::Case2AlphaAlpha: return case2_params(chain, boundary(), boundary(), theta);
        case BoundaryCase::Case3BetaBeta: return case3_params(chain, boundary(), boundary(), theta);
    }
    return {};
}

struct CaseParity {
    BoundaryCase bc;
    int r;
    int q;
    std::string label() const {
        return std::string(to_string(bc)) + "_r" + std::to_string(r) + "_q" + std::to_string(q);
    }
};

/// Every supported case/parity combination at q = 3 and q = 5.
inline std::vector<CaseParity> supported_case_parities() {
    std::vector<CaseParity> out;
    for (BoundaryCase bc : {BoundaryCase::Case1AlphaBeta, BoundaryCase::Case2AlphaAlpha, BoundaryCase::Case3BetaBeta})
        for (auto [r, q] : {std::pair{1, 3}, std::pair{2, 3}, std::pair{3, 5}, std::pair{2, 5}}) {
            if (bc == BoundaryCase::Case3BetaBeta && r % 2 == 0) continue;
            out.push_back({bc, r, q});
        }
    return out;
}

}  // namespace xxz::test
