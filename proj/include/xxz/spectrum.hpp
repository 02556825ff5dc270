#pragma once

#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "xxz/core.hpp"
#include "xxz/operators.hpp"

namespace xxz {

inline constexpr Eigen::Index max_spectrum_dim = 1024;

struct SpectrumReport {
    std::vector<cplx> eigenvalues;
    /// ||(A - lambda)v|| / ||A|| per eigenpair; empty for pure matchings.
    std::vector<double> residual_norms;
    /// pairing[i] = index in the reference list matched to eigenvalues[i].
    std::vector<int> pairing;
    double max_pair_deviation = 0.0;
    double total_cost = 0.0;
};

struct Eigendecomposition {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
};

inline Eigendecomposition eigendecompose(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidParams, "matrix is not square");
    if (m.rows() > max_spectrum_dim)
        throw Error(ErrorKind::DimensionTooLarge, "dense spectrum limited to dimension 1024");
    Eigen::ComplexEigenSolver<DenseMatrix> es(m, true);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "complex Schur iteration failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

inline SpectrumReport full_spectrum(const DenseMatrix& m) {
    const Eigendecomposition ed = eigendecompose(m);
    const double scale = std::max(m.norm(), std::numeric_limits<double>::min());
    SpectrumReport rep;
    for (Eigen::Index k = 0; k < ed.values.size(); ++k) {
        const Eigen::VectorXcd v = ed.vectors.col(k);
        rep.eigenvalues.push_back(ed.values(k));
        rep.residual_norms.push_back((m * v - ed.values(k) * v).norm() / (scale * v.norm()));
    }
    return rep;
}

namespace detail {

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
/// with potentials, O(n^3)). Returns row -> column.
inline std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> match_col(n + 1, 0), way(n + 1, 0);  // match_col[j] = row matched to column j (1-based)
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        match_col[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = match_col[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match_col[j0] != 0);
        do {
            const int j1 = way[j0];
            match_col[j0] = match_col[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n);
    for (int j = 1; j <= n; ++j) row_to_col[match_col[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace detail

/// Optimal bijection between two equally long lists under |a_i - b_j|.
inline SpectrumReport match_spectra(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size())
        throw Error(ErrorKind::LengthMismatch,
                    "cannot pair " + std::to_string(a.size()) + " with " + std::to_string(b.size()) + " values");
    const std::size_t n = a.size();
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cost[i][j] = std::abs(a[i] - b[j]);
    SpectrumReport rep;
    rep.eigenvalues = a;
    rep.pairing = detail::hungarian(cost);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = cost[i][rep.pairing[i]];
        rep.total_cost += d;
        rep.max_pair_deviation = std::max(rep.max_pair_deviation, d);
    }
    return rep;
}

}  // namespace xxz
