#pragma once

// Test-only oracles, deliberately independent of the library's closed-form
// evaluation paths: dense sampled quadrature (trapezoid / Simpson) instead
// of exact per-segment integrals.

#include <cmath>
#include <functional>

#include "memorium/constitutive.hpp"
#include "memorium/history.hpp"
#include "memorium/kernels.hpp"

namespace oracles {

using memorium::History;
using memorium::MaterialModel;
using memorium::Matrix;
using memorium::Vector;

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Dense response at shift s: G(0) X(s) + int Gdot(u) X(s+u) du with the
// hereditary integral done by per-segment composite Simpson on the
// sampled integrand plus the analytic constant tail.
inline Vector dense_response(const MaterialModel& M, const History& H, double s,
                             int sub_per_segment = 32) {
    Vector r = M.kernel.at_zero() * H.at(s);
    double span = H.span();
    for (int d = 0; d < M.space.dim; ++d) {
        auto integrand = [&](double u) {
            return (M.kernel.deriv_at(u).row(d) * H.at(s + u))(0);
        };
        double acc = 0.0;
        // Integrate over [0, span - s] split at the (shifted) history nodes.
        double prev = 0.0;
        for (double node : H.grid) {
            double u = node - s;
            if (u <= 0.0) continue;
            acc += simpson(integrand, prev, u, sub_per_segment);
            prev = u;
        }
        // Tail: X constant, int_{prev}^inf Gdot = G(inf) - G(prev + s).
        Vector tail = (M.kernel.G_inf - M.kernel.at(prev + s)).row(d) * H.limit();
        (void)span;
        r[d] += acc + tail(0);
    }
    return r;
}

// Brute-force work oracle: dense uniform grid merged with the history
// nodes; inner hereditary integrals by trapezoid backward recursion, outer
// integral by trapezoid with per-interval physical rates.
inline double dense_work(const MaterialModel& M, const History& H, int n_nodes = 100000) {
    double span = H.span();
    if (span <= 0.0) return 0.0;
    std::vector<double> grid;
    grid.reserve(n_nodes + H.grid.size());
    for (int i = 0; i < n_nodes; ++i) grid.push_back(span * i / (n_nodes - 1.0));
    grid = memorium::merge_grids(grid, H.grid);
    const int N = static_cast<int>(grid.size());

    std::vector<Vector> X(N);
    for (int i = 0; i < N; ++i) X[i] = H.at(grid[i]);

    // Backward trapezoid recursion of m_i(s) = int_s^inf e^{-(v-s)/tau} X(v) dv.
    const int n = M.space.dim;
    std::vector<Vector> R(N, Vector::Zero(n));
    Matrix G0 = M.kernel.at_zero();
    for (int i = 0; i < N; ++i) R[i] = G0 * X[i];
    for (const auto& term : M.kernel.terms) {
        double tau = term.tau;
        Matrix D = term.C / tau;
        Vector m = tau * X[N - 1];
        R[N - 1] -= D * m;
        for (int j = N - 2; j >= 0; --j) {
            double h = grid[j + 1] - grid[j];
            double e = std::exp(-h / tau);
            m = 0.5 * h * (X[j] + e * X[j + 1]) + e * m;
            R[j] -= D * m;
        }
    }

    double w = 0.0;
    for (int j = 0; j + 1 < N; ++j) {
        double h = grid[j + 1] - grid[j];
        Vector rate = -(X[j + 1] - X[j]) / h; // physical orientation
        w += 0.5 * h * (R[j].dot(rate) + R[j + 1].dot(rate));
    }
    return w;
}

// Dense moment int_0^inf e^(-s/tau) phi(s) ds of a scalar piecewise-linear
// record with constant tail, by per-segment Simpson plus the analytic tail.
inline double dense_exp_moment(const std::vector<double>& grid, const std::vector<double>& vals,
                               double tau) {
    auto lin = [&](double s) {
        if (s <= grid.front()) return vals.front();
        if (s >= grid.back()) return vals.back();
        for (size_t j = 0; j + 1 < grid.size(); ++j)
            if (s <= grid[j + 1]) {
                double w = (s - grid[j]) / (grid[j + 1] - grid[j]);
                return (1.0 - w) * vals[j] + w * vals[j + 1];
            }
        return vals.back();
    };
    double acc = 0.0;
    for (size_t j = 0; j + 1 < grid.size(); ++j)
        acc += simpson([&](double s) { return std::exp(-s / tau) * lin(s); }, grid[j], grid[j + 1],
                       64);
    acc += vals.back() * tau * std::exp(-grid.back() / tau);
    return acc;
}

} // namespace oracles
