#include "memorium/relaxed.hpp"

#include <cmath>
#include <sstream>

namespace memorium {

namespace {

struct DepthFamily {
    double depth;
    double free_len;
    std::vector<double> free_grid; // node positions inside the free segment
    Vector upper_pin;              // target(q)
    Vector lower_pin;              // source(0)
};

DepthFamily make_family(const RelaxationProblem& P, double q, double free_len) {
    DepthFamily F;
    F.depth = q;
    F.free_len = free_len;
    F.upper_pin = P.target.at(q);
    F.lower_pin = P.source.head();
    for (int j = 1; j <= P.free_nodes; ++j)
        F.free_grid.push_back(free_len * j / (P.free_nodes + 1));
    return F;
}

Process assemble(const RelaxationProblem& P, const DepthFamily& F, const Vector& x) {
    const int n = P.model->space.dim;
    std::vector<double> grid = {0.0};
    std::vector<Vector> values = {F.upper_pin};
    for (int j = 0; j < P.free_nodes; ++j) {
        grid.push_back(F.free_grid[j]);
        values.push_back(x.segment(j * n, n));
    }
    Process free_seg(P.model->space, F.free_len, std::move(grid), std::move(values), F.lower_pin);
    return concat(process_from_history(P.target, F.depth), free_seg);
}

// Conjugate gradients on A x = -g from x = 0. Negative curvature means the
// quadratic is unbounded below; a flat direction with remaining gradient
// means the same. CG from zero converges to the least-norm solution on
// singular consistent systems.
Vector cg_minimize(const Matrix& A, const Vector& g, double tol, bool& degenerate) {
    const int m = static_cast<int>(g.size());
    Vector x = Vector::Zero(m);
    Vector r = -g;
    Vector p = r;
    double rr = r.squaredNorm();
    double g0 = std::sqrt(rr);
    if (g0 == 0.0) return x;
    double curve_scale = A.norm() + 1.0;
    for (int it = 0; it < 4 * m + 10; ++it) {
        Vector Ap = A * p;
        double kappa = p.dot(Ap);
        double pn2 = p.squaredNorm();
        if (kappa < -1e-12 * curve_scale * pn2)
            throw UnboundedBelowError(
                "relaxed work: negative curvature direction; the work quadratic is unbounded "
                "below (non-dissipative kernel)");
        if (kappa <= 1e-14 * curve_scale * pn2) {
            if (std::abs(p.dot(r)) > 1e-10 * curve_scale * std::sqrt(pn2))
                throw UnboundedBelowError(
                    "relaxed work: flat direction with nonzero slope; objective unbounded below");
            degenerate = true;
            return x;
        }
        double alpha = rr / kappa;
        x += alpha * p;
        r -= alpha * Ap;
        double rr_new = r.squaredNorm();
        if (std::sqrt(rr_new) <= tol * g0) return x;
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    return x;
}

} // namespace

RelaxedWorkResult relaxed_work(const RelaxationProblem& P) {
    if (!P.model) throw ConfigError("relaxed_work: missing model");
    const MaterialModel& M = *P.model;
    M.validate();
    if (P.source.space != M.space || P.target.space != M.space)
        throw ShapeError("relaxed_work: history layouts do not match the model");
    if (P.free_nodes < 1) throw ConfigError("relaxed_work: free_nodes must be >= 1");

    if (P.dissipative_mode) {
        DissipativeReport probe = check_dissipative(M, 2, 7);
        if (probe.violation_found)
            throw NumericalError(
                "relaxed_work: dissipativity probe found w < 0; set dissipative_mode=false to "
                "override");
    }

    double tau = M.max_tau();
    double free_len = P.free_len > 0.0 ? P.free_len : 262144.0 * tau;
    double q = P.replay_depth0 > 0.0 ? P.replay_depth0
                                     : std::max(4.0 * tau, P.target.span() + 2.0 * tau);

    const int n = M.space.dim;
    const int m = P.free_nodes * n;
    double w_source = work(M, P.source, P.work_opts).value;

    RelaxedWorkResult res;
    Vector x_best;
    std::optional<DepthFamily> family_best;
    bool have_prev = false;
    double prev_value = 0.0;

    for (int step = 0; step < P.max_depth_steps; ++step, q *= 2.0) {
        DepthFamily F = make_family(P, q, free_len);

        auto J = [&](const Vector& x) {
            History full = prolong(assemble(P, F, x), P.source);
            return work(M, full, P.work_opts).value - w_source;
        };

        // Quadratic reconstruction by probing. Nodes sharing or touching a
        // segment always couple; beyond that the coupling is memory-only
        // and dies like exp(-stretch/tau) across the intervening segments,
        // so far pairs are provably below quadrature noise and skipped.
        double seg_len = free_len / (P.free_nodes + 1);
        double c = J(Vector::Zero(m));
        Vector gvec(m);
        std::vector<double> jps(m);
        Matrix A = Matrix::Zero(m, m);
        for (int a = 0; a < m; ++a) {
            Vector e = Vector::Zero(m);
            e[a] = 1.0;
            jps[a] = J(e);
            double jm = J(-e);
            gvec[a] = 0.5 * (jps[a] - jm);
            A(a, a) = jps[a] + jm - 2.0 * c;
        }
        for (int a = 0; a < m; ++a) {
            for (int b = a + 1; b < m; ++b) {
                int idx_gap = std::abs(b / n - a / n);
                if (idx_gap >= 3 && (idx_gap - 2) * seg_len > 40.0 * tau) continue;
                Vector e = Vector::Zero(m);
                e[a] = 1.0;
                e[b] = 1.0;
                double cross = J(e) - jps[a] - jps[b] + c;
                A(a, b) = cross;
                A(b, a) = cross;
            }
        }

        bool degenerate = false;
        Vector x = cg_minimize(A, gvec, P.cg_tol, degenerate);
        double value = J(x); // exact quadrature at the minimizer

        res.trace.emplace_back(q, value);
        res.value = value;
        res.degenerate = res.degenerate || degenerate;
        x_best = x;
        family_best = F;

        if (have_prev && std::abs(value - prev_value) < P.tol_rw) {
            res.converged = true;
            break;
        }
        prev_value = value;
        have_prev = true;
    }

    if (!res.converged) {
        std::ostringstream os;
        os << "relaxed_work: no convergence within depth budget; trace:";
        for (auto& [d, v] : res.trace) os << " (" << d << ", " << v << ")";
        throw BudgetError(os.str());
    }

    Process K = assemble(P, *family_best, x_best);
    DistanceReport dr = distance(M, prolong(K, P.source), P.target, P.metric_cfg);
    res.residual_distance = dr.value;
    res.residual_uncertainty = dr.uncertainty;
    res.achieving = std::move(K);
    return res;
}

double max_recoverable(const RelaxationProblem& P) { return -relaxed_work(P).value; }

std::vector<BoundRow> check_relaxed_bounds(const MaterialModel& M, const History& H,
                                           const History& H2, const RelaxedBoundsOptions& opts) {
    History zero = constant_history(M.space, Vector::Zero(M.space.dim));

    auto solve = [&](const History& src, const History& tgt) {
        RelaxationProblem P;
        P.model = &M;
        P.source = src;
        P.target = tgt;
        P.free_nodes = opts.free_nodes;
        P.max_depth_steps = opts.max_depth_steps;
        P.dissipative_mode = false; // bounds are reported either way
        return relaxed_work(P).value;
    };
    auto slack = [&](double rhs) { return opts.tol + opts.tol_rel * (1.0 + std::abs(rhs)); };

    double v_0_H = solve(zero, H);
    double v_0_H2 = solve(zero, H2);
    double v_H2_H = solve(H2, H);
    double v_H_H2 = solve(H, H2);

    std::vector<BoundRow> rows;

    double sub_rhs = v_0_H2 + v_H2_H;
    rows.push_back({"subadditivity", v_0_H, sub_rhs, v_0_H <= sub_rhs + slack(sub_rhs), "none"});

    double estimate_rhs = work(M, H).value + retardation_gap(M, H, H2, false);
    rows.push_back({"retardation_estimate", v_H2_H, estimate_rhs,
                    v_H2_H <= estimate_rhs + slack(estimate_rhs), "pass"});

    if (opts.include_prolongation_row) {
        // Dagger prolongation: constant process at H(0), so the right side
        // vanishes and the target is H delayed by the process span.
        Process K = constant_process(M.space, H.head(), 2.0 * M.max_tau());
        double w_K_H = work_over(M, K, H).value;
        double v_H_KH = solve(H, prolong(K, H));
        rows.push_back({"dagger_prolongation_bound", v_H_KH, w_K_H,
                        v_H_KH <= w_K_H + slack(w_K_H), "pass"});
    }

    rows.push_back({"symmetry_bound", v_H2_H + v_H_H2, 0.0,
                    v_H2_H + v_H_H2 >= -slack(v_H2_H + v_H_H2), "fail"});

    rows.push_back({"zero_source_domination", v_0_H, v_H2_H,
                    v_0_H >= v_H2_H - slack(v_H2_H), "none"});

    return rows;
}

} // namespace memorium
