#include <random>

#include <Eigen/Eigenvalues>

#include "memorium/kernels.hpp"
#include "memorium/work.hpp"

namespace memorium {

namespace {

// Work as an exact quadratic form in the free nodal values (the tail node
// is pinned at zero), assembled by probing unit perturbations.
Matrix work_quadratic_form(const MaterialModel& M, const std::vector<double>& grid) {
    const int n = M.space.dim;
    const int free_nodes = static_cast<int>(grid.size()) - 1;
    const int m = free_nodes * n;

    auto eval = [&](const Vector& coeffs) {
        std::vector<Vector> values(grid.size(), Vector::Zero(n));
        for (int j = 0; j < free_nodes; ++j) values[j] = coeffs.segment(j * n, n);
        return work(M, History(M.space, grid, values)).value;
    };

    std::vector<double> diag(m);
    Matrix Q = Matrix::Zero(m, m);
    for (int a = 0; a < m; ++a) {
        Vector e = Vector::Zero(m);
        e[a] = 1.0;
        diag[a] = eval(e);
        Q(a, a) = diag[a];
    }
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            Vector e = Vector::Zero(m);
            e[a] = 1.0;
            e[b] = 1.0;
            double cross = 0.5 * (eval(e) - diag[a] - diag[b]);
            Q(a, b) = cross;
            Q(b, a) = cross;
        }
    }
    return Q; // w(h) = h . Q h for unit-assembled h
}

} // namespace

DissipativeReport check_dissipative(const MaterialModel& M, int search_budget,
                                    unsigned long long seed, double tol_diss) {
    M.validate();
    DissipativeReport rep;
    if (M.kernel.terms.empty()) return rep; // elastic kernel: w is path-independent, >= 0 tested trivially

    std::mt19937_64 rng(seed);
    double tau = M.max_tau();
    const int n = M.space.dim;

    for (int restart = 0; restart < search_budget; ++restart) {
        rep.restarts_used = restart + 1;

        std::uniform_int_distribution<int> nnodes(3, n > 4 ? 4 : 6);
        std::uniform_real_distribution<double> gap(0.2, 1.5);
        int nodes = nnodes(rng);
        std::vector<double> grid(nodes);
        grid[0] = 0.0;
        for (int j = 1; j < nodes; ++j) grid[j] = grid[j - 1] + gap(rng) * tau;

        Matrix Q = work_quadratic_form(M, grid);
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (Q + Q.transpose()));
        double lmin = es.eigenvalues()[0];
        double scale = Q.norm() + 1.0;
        if (lmin < -tol_diss * scale) {
            Vector h = es.eigenvectors().col(0);
            std::vector<Vector> values(grid.size(), Vector::Zero(n));
            for (int j = 0; j + 1 < nodes; ++j) values[j] = h.segment(j * n, n);
            History witness(M.space, grid, values);
            double w = work(M, witness).value;
            if (w < -tol_diss) {
                rep.violation_found = true;
                rep.w_value = w;
                rep.witness = witness;
                return rep;
            }
        }
    }
    return rep;
}

} // namespace memorium
