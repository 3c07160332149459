#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "genfun/errors.hpp"
#include "genfun/field.hpp"

namespace genfun {

// Dense row-major inverse; throws when the matrix is numerically singular.
inline std::vector<double> invert_dense(const std::vector<double>& mat, int n) {
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = mat[static_cast<size_t>(i) * n + j];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) throw SingularSystem("interior operator is not invertible");
    Eigen::MatrixXd inv = lu.inverse();
    std::vector<double> out(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<size_t>(i) * n + j] = inv(i, j);
    return out;
}

inline double norm_inf(const std::vector<double>& mat, int n) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::abs(mat[static_cast<size_t>(i) * n + j]);
        worst = std::max(worst, row);
    }
    return worst;
}

inline std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b,
                                  int n) {
    std::vector<double> out(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = a[static_cast<size_t>(i) * n + k];
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j)
                out[static_cast<size_t>(i) * n + j] += aik * b[static_cast<size_t>(k) * n + j];
        }
    return out;
}

// Gauss-Lobatto collocation on [-1, 1]: nodes y_j = cos(j pi / (M-1)) in
// descending order, the spectral differentiation matrix with diagonal entries
// from the negative-row-sum identity, and the homogeneous-Dirichlet inverse
// of the second derivative.
class ChebyshevGrid {
public:
    explicit ChebyshevGrid(int n_nodes) : n_(n_nodes) {
        if (n_ < 2) throw GridTooCoarse("need at least 2 collocation nodes");
        nodes_.resize(n_);
        for (int j = 0; j < n_; ++j) nodes_[j] = std::cos(M_PI * j / (n_ - 1));
        build_diff();
        diff2_ = matmul(diff_, diff_, n_);
        if (n_ >= 3) build_dirichlet_solve();
    }

    int size() const { return n_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& diff() const { return diff_; }
    const std::vector<double>& diff2() const { return diff2_; }

    // Row-major map from a forcing sampled on all nodes to the solution of
    // phi'' = forcing with phi(-1) = phi(1) = 0 sampled on all nodes.
    const std::vector<double>& dirichlet_solve() const {
        if (n_ < 3)
            throw GridTooCoarse("Dirichlet solve needs at least one interior node");
        return solve_;
    }

    static bool matches(const std::vector<double>& nodes, double tol = 1e-12) {
        const int n = static_cast<int>(nodes.size());
        if (n < 2) return false;
        for (int j = 0; j < n; ++j)
            if (std::abs(nodes[j] - std::cos(M_PI * j / (n - 1))) > tol) return false;
        return true;
    }

private:
    void build_diff() {
        diff_.assign(static_cast<size_t>(n_) * n_, 0.0);
        auto c = [&](int i) { return (i == 0 || i == n_ - 1) ? 2.0 : 1.0; };
        for (int i = 0; i < n_; ++i) {
            double rowsum = 0.0;
            for (int j = 0; j < n_; ++j) {
                if (i == j) continue;
                const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
                const double v = (c(i) / c(j)) * sign / (nodes_[i] - nodes_[j]);
                diff_[static_cast<size_t>(i) * n_ + j] = v;
                rowsum += v;
            }
            diff_[static_cast<size_t>(i) * n_ + i] = -rowsum;
        }
    }

    void build_dirichlet_solve() {
        const int m = n_ - 2;
        std::vector<double> interior(static_cast<size_t>(m) * m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                interior[static_cast<size_t>(i) * m + j] =
                    diff2_[static_cast<size_t>(i + 1) * n_ + (j + 1)];
        std::vector<double> inv = invert_dense(interior, m);
        solve_.assign(static_cast<size_t>(n_) * n_, 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                solve_[static_cast<size_t>(i + 1) * n_ + (j + 1)] =
                    inv[static_cast<size_t>(i) * m + j];
    }

    int n_;
    std::vector<double> nodes_;
    std::vector<double> diff_;
    std::vector<double> diff2_;
    std::vector<double> solve_;
};

// Solves phi'' = omega on each Fourier mode profile with phi(+-1) = 0.
inline SpectralField poisson_channel_solve(const SpectralField& omega,
                                           const ChebyshevGrid& grid) {
    if (omega.kind() != Transverse::chebyshev_y)
        throw DimensionMismatch("channel solve needs a chebyshev_y field");
    if (omega.nodes() != grid.nodes())
        throw GridMismatch("field nodes do not match the collocation grid");
    return apply_node_matrix(omega, grid.dirichlet_solve());
}

} // namespace genfun
