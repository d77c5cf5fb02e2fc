#include "memorium/sweeps.hpp"

#include <cmath>

namespace memorium {

Vector random_vector(Rng& rng, int n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

History random_history(Rng& rng, const Space& space, double tau_scale,
                       const HistoryGenOptions& opts) {
    std::uniform_int_distribution<int> nn(opts.min_nodes, opts.max_nodes);
    std::uniform_real_distribution<double> gap(0.3 * opts.gap_scale, 1.6 * opts.gap_scale);
    int nodes = nn(rng);
    std::vector<double> grid(nodes);
    grid[0] = 0.0;
    for (int j = 1; j < nodes; ++j) grid[j] = grid[j - 1] + gap(rng) * tau_scale;
    std::vector<Vector> values;
    for (int j = 0; j < nodes; ++j) values.push_back(random_vector(rng, space.dim, opts.amplitude));
    if (opts.zero_tail) values.back().setZero();
    return History(space, std::move(grid), std::move(values));
}

Process random_process(Rng& rng, const Space& space, double duration, const Vector& terminal,
                       int nodes, double amplitude) {
    std::vector<double> grid(nodes);
    grid[0] = 0.0;
    for (int j = 1; j < nodes; ++j) grid[j] = duration * j / nodes;
    std::vector<Vector> values;
    for (int j = 0; j < nodes; ++j) values.push_back(random_vector(rng, space.dim, amplitude));
    return Process(space, duration, std::move(grid), std::move(values), terminal);
}

MaterialModel random_model(Rng& rng, const Space& space, const ModelGenOptions& opts) {
    std::uniform_real_distribution<double> taud(opts.tau_lo, opts.tau_hi);
    MaterialModel M;
    M.space = space;
    const int n = space.dim;
    auto raw = [&]() {
        Matrix A(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) A(r, c) = random_vector(rng, 1, opts.scale)[0];
        return A;
    };
    auto psd = [&]() {
        Matrix B = raw();
        return Matrix((B.transpose() * B) / n + 0.05 * opts.scale * Matrix::Identity(n, n));
    };
    M.kernel.G_inf = opts.monotone_symmetric ? psd() : raw();
    for (int t = 0; t < opts.terms; ++t)
        M.kernel.terms.push_back({taud(rng), opts.monotone_symmetric ? psd() : raw()});
    M.require_symmetric = opts.monotone_symmetric;
    M.validate();
    return M;
}

namespace {

VerifyRow row(const std::string& suite, const std::string& property, double lhs, double rhs,
              double margin) {
    return VerifyRow{suite, property, margin >= 0.0, lhs, rhs, margin};
}

} // namespace

std::vector<VerifyRow> verify_kernels(const MaterialModel& M, Rng& rng,
                                      const VerifyOptions& opts) {
    std::vector<VerifyRow> rows;
    double tau = M.max_tau();

    // Analytic derivative against central differences.
    double worst = 0.0;
    std::uniform_real_distribution<double> sd(0.0, 10.0 * tau);
    for (int c = 0; c < std::max(opts.cases, 20); ++c) {
        double s = sd(rng);
        double h = 1e-5 * tau;
        if (s < h) s = h;
        Matrix fd = (eval_G(M, s + h) - eval_G(M, s - h)) / (2.0 * h);
        Matrix an = eval_Gdot(M, s);
        worst = std::max(worst, (fd - an).norm() / (1.0 + an.norm()));
    }
    rows.push_back(row("kernels", "Gdot_matches_finite_difference", worst, 1e-7, 1e-7 - worst));

    // Tail bound monotone and dominating a quadrature of ||Gdot||_F. The
    // bound is exact for single-term kernels, so the trapezoid's own error
    // (Richardson-estimated) must be budgeted before comparing.
    bool monotone = true;
    double worst_gap = 0.0;
    auto trapz = [&](double p0, double p1, int N) {
        double quad = 0.0;
        for (int q = 0; q < N; ++q) {
            double s0 = p0 + (p1 - p0) * q / N;
            double s1 = p0 + (p1 - p0) * (q + 1) / N;
            quad += 0.5 * (eval_Gdot(M, s0).norm() + eval_Gdot(M, s1).norm()) * (s1 - s0);
        }
        return quad;
    };
    for (int i = 0; i + 1 < 12; ++i) {
        double p0 = i * 0.5 * tau, p1 = (i + 1) * 0.5 * tau;
        if (tail_integral_abs(M, p1) > tail_integral_abs(M, p0) + 1e-14) monotone = false;
        double q1 = trapz(p0, p1, 400);
        double q2 = trapz(p0, p1, 800);
        double quad_err = std::abs(q2 - q1) / 3.0;
        double bound = tail_integral_abs(M, p0) - tail_integral_abs(M, p1);
        worst_gap = std::min(worst_gap, bound - q2 + 4.0 * quad_err + 1e-12);
    }
    rows.push_back(row("kernels", "tail_bound_monotone", monotone ? 1.0 : 0.0, 1.0,
                       monotone ? 0.0 : -1.0));
    rows.push_back(row("kernels", "tail_bound_dominates_quadrature", worst_gap, 0.0, worst_gap));

    DissipativeReport rep = check_dissipative(M, 6, rng(), opts.tol_diss);
    rows.push_back(row("kernels", "dissipative_no_violation", rep.w_value, 0.0,
                       rep.violation_found ? rep.w_value : 0.0));
    return rows;
}

std::vector<VerifyRow> verify_metric(const MaterialModel& M, Rng& rng, const VerifyOptions& opts) {
    std::vector<VerifyRow> rows;
    double tau = M.max_tau();
    const Space& sp = M.space;

    double worst_sym = 0.0, worst_tri = 0.0, worst_contract = 0.0, worst_scale = 0.0;
    double worst_cont = 0.0;
    for (int c = 0; c < opts.cases; ++c) {
        History H1 = random_history(rng, sp, tau);
        History H2 = random_history(rng, sp, tau);
        History H3 = random_history(rng, sp, tau);
        DistanceReport d12 = distance(M, H1, H2);
        DistanceReport d21 = distance(M, H2, H1);
        DistanceReport d13 = distance(M, H1, H3);
        DistanceReport d32 = distance(M, H3, H2);
        worst_sym = std::max(worst_sym, std::abs(d12.value - d21.value));
        double tri = d12.value - (d13.value + d32.value)
                     - 2.0 * (d12.uncertainty + d13.uncertainty + d32.uncertainty) - 1e-12;
        worst_tri = std::max(worst_tri, tri);

        DistanceReport d2 = distance(M, axpy(2.0, H1, 0.0, H2), axpy(2.0, H2, 0.0, H1));
        worst_scale = std::max(worst_scale, std::abs(d2.value - 2.0 * d12.value));

        // Contraction with matched heads.
        History H2m = H2;
        H2m.values.front() = H1.head();
        Process K = random_process(rng, sp, 1.5 * tau, H1.head());
        ContractionReport cr = check_contraction(M, H1, H2m, K);
        worst_contract = std::max(worst_contract,
                                  cr.lhs - cr.rhs - cr.rhs_uncertainty - 1e-12 * (1.0 + cr.rhs));

        // Response continuity: summed block response gap bounded by the
        // distance plus the instantaneous term gap.
        Vector r1 = respond(M, H1).flat;
        Vector r2 = respond(M, H2).flat;
        double lhs = block_norm_sum(sp, r1 - r2);
        double inst = block_norm_sum(sp, M.kernel.at_zero() * (H1.head() - H2.head()));
        double rhs = d12.value + d12.uncertainty + inst + 1e-10;
        worst_cont = std::max(worst_cont, lhs - rhs);
    }
    rows.push_back(row("metric", "symmetry", worst_sym, 1e-12, 1e-12 - worst_sym));
    rows.push_back(row("metric", "triangle_inequality", worst_tri, 0.0, -worst_tri));
    rows.push_back(row("metric", "homogeneity", worst_scale, 1e-10, 1e-10 - worst_scale));
    rows.push_back(row("metric", "contraction", worst_contract, 0.0, -worst_contract));
    rows.push_back(row("metric", "response_continuity", worst_cont, 0.0, -worst_cont));

    // d(H, H) = 0 and approachability.
    History H = random_history(rng, sp, tau);
    rows.push_back(row("metric", "identity", distance(M, H, H).value, 0.0,
                       1e-14 - distance(M, H, H).value));

    History Hp = random_history(rng, sp, tau);
    Hp.values.front() = H.limit(); // junction H(p) = H'(0) for p past the span
    double p = std::max(4.0 * tau, H.span() + tau);
    bool shrinking = true;
    double prev = 1e300;
    for (int lev = 0; lev < 4; ++lev, p *= 2.0) {
        History app = prolong(process_from_history(H, p), Hp);
        double d = distance(M, app, H).value;
        if (d > prev + 1e-12) shrinking = false;
        prev = d;
    }
    double app_margin = (shrinking && prev <= 1e-6) ? 0.0 : -1.0;
    rows.push_back(row("metric", "approachability_decay", prev, 1e-6, app_margin));
    return rows;
}

std::vector<VerifyRow> verify_work(const MaterialModel& M, Rng& rng, const VerifyOptions& opts) {
    std::vector<VerifyRow> rows;
    double tau = M.max_tau();
    const Space& sp = M.space;

    double worst_add = 0.0, worst_state = 0.0;
    for (int c = 0; c < opts.cases; ++c) {
        History H = random_history(rng, sp, tau);
        Process K = random_process(rng, sp, 1.2 * tau, H.head());
        Process K2 = random_process(rng, sp, 0.8 * tau, K.values.front());
        double left = work_over(M, concat(K2, K), H).value;
        double right = work_over(M, K2, prolong(K, H)).value + work_over(M, K, H).value;
        worst_add = std::max(worst_add, std::abs(left - right));

        // State-function bound |w(K,H) - w(K,H')| <= (sum of block TVs) d(H,H').
        History H2 = random_history(rng, sp, tau);
        H2.values.front() = H.head();
        double wdiff = std::abs(work_over(M, K, H).value - work_over(M, K, H2).value);
        double tv = 0.0;
        History KH = prolong(K, constant_history(sp, K.terminal_left_limit));
        for (int j = 0; j + 1 < KH.nodes() && KH.grid[j] < K.duration; ++j)
            for (double bn : block_norms(sp, KH.values[j + 1] - KH.values[j])) tv += bn;
        DistanceReport d = distance(M, H, H2);
        worst_state = std::max(worst_state, wdiff - tv * (d.value + d.uncertainty) - 1e-9);
    }
    rows.push_back(row("work", "additivity_over_prolongations", worst_add, 1e-9,
                       1e-9 - worst_add));
    rows.push_back(row("work", "state_function_bound", worst_state, 0.0, -worst_state));

    // Constant histories cost nothing.
    History C = constant_history(sp, random_vector(rng, sp.dim));
    rows.push_back(row("work", "constant_history_zero", work(M, C).value, 0.0,
                       1e-12 - std::abs(work(M, C).value)));

    // Retardation lemma: the work surplus converges to the gap.
    History H = random_history(rng, sp, tau);
    History H2 = random_history(rng, sp, tau);
    bool sym = (M.kernel.G_inf - M.kernel.G_inf.transpose()).norm()
               <= 1e-12 * (1.0 + M.kernel.G_inf.norm());
    if (sym) {
        double gap = retardation_gap(M, H, H2);
        double err_first = 0.0, err_prev = 1e300;
        bool monotone = true;
        for (double mult : {5.0, 10.0, 20.0, 40.0}) {
            double p = mult * tau + H.span();
            History chain = prolong(process_from_history(H, p),
                                    prolong(lemma_process(H, H2, p), H2));
            double surplus = work(M, chain).value - work(M, H).value - work(M, H2).value;
            double err = std::abs(surplus - gap);
            if (err_prev == 1e300) err_first = err;
            if (err > err_prev * 1.02 + 1e-10) monotone = false;
            err_prev = err;
        }
        // The retarded-transition error decays like c/(p + span): demand
        // monotone shrinking with a genuine reduction over the doublings.
        bool converged = monotone && err_prev <= 0.5 * err_first + 1e-10;
        rows.push_back(row("work", "retardation_lemma_convergence", err_prev, 0.5 * err_first,
                           converged ? 0.0 : -1.0));
    }
    return rows;
}

std::vector<VerifyRow> verify_relaxed(const MaterialModel& M, Rng& rng,
                                      const VerifyOptions& opts) {
    (void)opts;
    std::vector<VerifyRow> rows;
    const Space& sp = M.space;

    // Constant-to-constant closed form.
    Vector x1 = random_vector(rng, sp.dim);
    Vector x2 = random_vector(rng, sp.dim);
    RelaxationProblem P;
    P.model = &M;
    P.source = constant_history(sp, x1);
    P.target = constant_history(sp, x2);
    P.dissipative_mode = false;
    RelaxedWorkResult res = relaxed_work(P);
    const Matrix& Ginf = M.kernel.G_inf;
    double closed = 0.5 * (x2.dot(Ginf * x2) - x1.dot(Ginf * x1));
    double rel = std::abs(res.value - closed) / (1.0 + std::abs(closed));
    rows.push_back(row("relaxed", "constant_to_constant_formula", res.value, closed,
                       1e-4 - rel));

    // Zero self relaxed work on constants.
    RelaxationProblem Pself = P;
    Pself.source = P.target;
    double self = relaxed_work(Pself).value;
    rows.push_back(row("relaxed", "self_relaxed_work_zero", self, 0.0,
                       1e-6 - std::abs(self)));

    // Full bound report at constant histories, where every side is
    // closed-form tight; robust rows again on a random pair, where the
    // dagger prolongation bound is outside this family's certification.
    for (const auto& r : check_relaxed_bounds(M, constant_history(sp, x2 * 0.5),
                                              constant_history(sp, x1 * 0.5)))
        rows.push_back(row("relaxed", "constant_" + r.name, r.lhs, r.rhs, r.holds ? 0.0 : -1.0));

    RelaxedBoundsOptions bo;
    bo.include_prolongation_row = false;
    for (const auto& r : check_relaxed_bounds(M, random_history(rng, sp, M.max_tau()),
                                              random_history(rng, sp, M.max_tau()), bo))
        rows.push_back(row("relaxed", r.name + (r.certified == "none" ? "" : "_" + r.certified),
                           r.lhs, r.rhs, r.holds ? 0.0 : -1.0));
    return rows;
}

std::vector<VerifyRow> verify_energy(const MaterialModel& M, Rng& rng,
                                     const VerifyOptions& opts) {
    std::vector<VerifyRow> rows;
    double tau = M.max_tau();
    const Space& sp = M.space;
    FreeEnergyFunctional psi = make_graffi(M);

    // Constant-history restriction.
    Vector x = random_vector(rng, sp.dim);
    double lhs = evaluate(psi, constant_history(sp, x));
    double rhs = 0.5 * x.dot(M.kernel.G_inf * x);
    rows.push_back(row("energy", "constant_history_restriction", lhs, rhs,
                       1e-10 - std::abs(lhs - rhs)));

    double worst_diss = 0.0, worst_floor = 0.0, worst_delta = 0.0;
    for (int c = 0; c < opts.cases; ++c) {
        History H = random_history(rng, sp, tau);
        Process K = random_process(rng, sp, 1.5 * tau, H.head());
        DissipationReport rep = check_dissipation_inequality(psi, K, H);
        worst_diss = std::max(worst_diss, rep.increment - rep.work_value);

        double at_head = evaluate(psi, constant_history(sp, H.head()));
        worst_floor = std::max(worst_floor, at_head - evaluate(psi, H));

        ChainRuleReport cr = chain_rule(psi, H, 0.5 * H.span(), 1e-4 * tau);
        worst_delta = std::max(worst_delta, cr.delta_part);
    }
    rows.push_back(row("energy", "dissipation_inequality", worst_diss, 0.0,
                       1e-9 - worst_diss));
    rows.push_back(row("energy", "constant_head_floor", worst_floor, 0.0, -worst_floor + 1e-12));
    rows.push_back(row("energy", "delta_psi_nonpositive", worst_delta, 0.0,
                       1e-12 - worst_delta));

    // Chain rule convergence order on one smooth history.
    std::vector<double> g;
    for (int i = 0; i <= 80; ++i) g.push_back(i * 0.1);
    std::vector<Vector> vals;
    Vector dir = random_vector(rng, sp.dim);
    for (double s : g) vals.push_back(std::exp(-s) * dir);
    History smooth(sp, g, vals);
    double t = 2.05;
    double e1 = chain_rule(psi, smooth, t, 8e-3).discrepancy;
    double e2 = chain_rule(psi, smooth, t, 4e-3).discrepancy;
    double order = std::log2((e1 + 1e-300) / (e2 + 1e-300));
    rows.push_back(row("energy", "chain_rule_order", order, 2.0, order - 1.9));

    // Blockwise stress = energy gradient.
    History H = random_history(rng, sp, tau);
    ClausiusDuhemReport cd = clausius_duhem_restrictions(psi, M, H, 0.4 * H.span(), {0.05});
    double worst_block = 0.0;
    for (auto& [name, v] : cd.block_residuals) worst_block = std::max(worst_block, v);
    rows.push_back(row("energy", "stress_equals_energy_gradient", worst_block, 1e-8,
                       1e-8 - worst_block));
    return rows;
}

Matrix random_matrix(Rng& rng, int rows, int cols, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix A(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) A(r, c) = g(rng);
    return A;
}

namespace {

Vector flatten3(const Eigen::Matrix3d& M3) {
    Vector out(9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out[3 * r + c] = M3(r, c);
    return out;
}

Vector flatten_k3(const Matrix& Mk) {
    Vector out(3 * Mk.rows());
    for (int r = 0; r < Mk.rows(); ++r)
        for (int c = 0; c < 3; ++c) out[3 * r + c] = Mk(r, c);
    return out;
}

// Numeric chaining: self-action from the discrete micro balance,
// z_h = Div_h S + beta (bulk) or Div_Sigma,h S + [S]m (surface).
FieldSample chained_self_action(const FieldSample& S, const FieldSample& extra, int k,
                                const SurfaceFrame* frame) {
    FieldSample grad = frame ? surface_gradient(S, *frame) : gradient(S);
    int axes = frame ? 3 : S.dim;
    FieldSample out;
    out.dim = S.dim;
    out.size = S.size;
    out.h = S.h;
    out.comps = k;
    out.data.resize(static_cast<size_t>(out.nodes()) * k);
    int kmax = S.dim == 3 ? S.size[2] : 1;
    for (int i = 0; i < S.size[0]; ++i)
        for (int j = 0; j < S.size[1]; ++j)
            for (int kk = 0; kk < kmax; ++kk)
                for (int r = 0; r < k; ++r) {
                    double div = 0.0;
                    for (int c = 0; c < 3; ++c) div += grad.at(i, j, kk, (3 * r + c) * axes + c);
                    out.at(i, j, kk, r) = div + extra.at(i, j, kk, r);
                }
    return out;
}

} // namespace

BalanceStudy balance_convergence_study(int k, Rng& rng, const std::vector<int>& levels) {
    BalanceStudy study;
    study.levels = levels;

    const Matrix A = random_matrix(rng, k, 3);
    Matrix S0 = random_matrix(rng, 3, 3);
    S0 = (0.5 * (S0 + S0.transpose())).eval(); // the moment identity pins skw(P)
    const Matrix Zc = random_matrix(rng, k, 3);
    const Vector Bc = random_vector(rng, k);
    const Eigen::Vector3d p(1.3, 0.8, 0.5), q(1.1, 0.7, 1.3), w(0.9, 1.4, 0.6);
    const Eigen::Vector3d alpha = A.transpose() * (Zc * q);
    const Eigen::Vector3d gamma = A.transpose() * Bc;

    // z = Zc q cos(q.x) + Bc sin(w.x); P = S0 sin(p.x) + 1/2 e(A^T z);
    // b = -Div P with Div(1/2 e(a)) = 1/2 curl a computed analytically.
    auto zfun = [&](const Eigen::Vector3d& x) {
        return Vector(Zc * q * std::cos(q.dot(x)) + Bc * std::sin(w.dot(x)));
    };
    auto Pfun = [&](const Eigen::Vector3d& x) {
        Eigen::Matrix3d Pm = S0 * std::sin(p.dot(x));
        Pm += 0.5 * ricci_e(A.transpose() * zfun(x));
        return flatten3(Pm);
    };
    auto bfun = [&](const Eigen::Vector3d& x) {
        Eigen::Vector3d div = S0 * (p * std::cos(p.dot(x)));
        Eigen::Vector3d curl_a = (-std::sin(q.dot(x)) * q).cross(alpha)
                                 + (std::cos(w.dot(x)) * w).cross(gamma);
        return Vector(-(div + 0.5 * curl_a));
    };
    auto Sfun = [&](const Eigen::Vector3d& x) { return flatten_k3(Zc * std::sin(q.dot(x))); };
    auto betafun = [&](const Eigen::Vector3d& x) { return Vector(Bc * std::sin(w.dot(x))); };

    // Surface fields in the frame m = e3 over in-plane coordinates (u, v).
    SurfaceFrame frame(Eigen::Vector3d::UnitZ());
    const Matrix St = random_matrix(rng, 3, 3);
    const Matrix Zs = random_matrix(rng, k, 3);
    const Vector zc = random_vector(rng, k), z0 = random_vector(rng, k);
    const Eigen::Vector2d cw(1.2, 0.9), dw(0.8, 1.1), tw(1.0, 1.5);

    auto zs_fun = [&](double u, double v) {
        return Vector(zc * std::cos(cw[0] * u + cw[1] * v) + z0 * std::sin(dw[0] * u + dw[1] * v));
    };
    auto a_fun = [&](double u, double v) { return Eigen::Vector3d(A.transpose() * zs_fun(u, v)); };
    auto a_du = [&](double u, double v) {
        Vector dz = -zc * cw[0] * std::sin(cw[0] * u + cw[1] * v)
                    + z0 * dw[0] * std::cos(dw[0] * u + dw[1] * v);
        return Eigen::Vector3d(A.transpose() * dz);
    };
    auto a_dv = [&](double u, double v) {
        Vector dz = -zc * cw[1] * std::sin(cw[0] * u + cw[1] * v)
                    + z0 * dw[1] * std::cos(dw[0] * u + dw[1] * v);
        return Eigen::Vector3d(A.transpose() * dz);
    };
    // T: smooth base St psi(u,v) with the three entries pinned by the
    // moment identity skw(T Pi) = 1/2 e(a) for Pi = diag(1, 1, 0).
    auto Tfun = [&](double u, double v) {
        double psi = std::sin(tw[0] * u + tw[1] * v);
        Eigen::Vector3d a = a_fun(u, v);
        Eigen::Matrix3d T = St * psi;
        T(1, 0) = T(0, 1);          // symmetric base pair
        T(0, 1) += a[2];            // T01 - T10 = a3
        T(2, 0) = a[1];             // T20 = a2
        T(2, 1) = -a[0];            // T21 = -a1
        return flatten3(T);
    };
    auto divT_fun = [&](double u, double v) {
        double pu = tw[0] * std::cos(tw[0] * u + tw[1] * v);
        double pv = tw[1] * std::cos(tw[0] * u + tw[1] * v);
        Eigen::Vector3d div;
        div[0] = St(0, 0) * pu + St(0, 1) * pv + a_dv(u, v)[2];
        div[1] = St(0, 1) * pu + St(1, 1) * pv;
        div[2] = a_du(u, v)[1] - a_dv(u, v)[0];
        return div;
    };
    auto Ssurf_fun = [&](double u, double v) {
        return flatten_k3(Zs * std::sin(cw[0] * u + cw[1] * v));
    };
    auto divSsurf_fun = [&](double u, double v) {
        double c = std::cos(cw[0] * u + cw[1] * v);
        return Vector((Zs.col(0) * cw[0] + Zs.col(1) * cw[1]) * c);
    };

    for (int npts : levels) {
        double h = 1.0 / (npts - 1);

        FieldSample P = sample_bulk(npts, h, 9, Pfun);
        FieldSample b = sample_bulk(npts, h, 3, bfun);
        FieldSample S = sample_bulk(npts, h, 3 * k, Sfun);
        FieldSample beta = sample_bulk(npts, h, k, betafun);
        FieldSample z = sample_bulk(npts, h, k,
                                    [&](const Eigen::Vector3d& x) { return zfun(x); });

        BulkBalanceResiduals exact_z = bulk_balance_residual(P, b, S, z, beta, A);
        study.bulk_force.push_back(exact_z.force_norm);
        study.bulk_micro.push_back(exact_z.micro_norm);
        FieldSample z_h = chained_self_action(S, beta, k, nullptr);
        BulkBalanceResiduals chained = bulk_balance_residual(P, b, S, z_h, beta, A);
        study.bulk_moment.push_back(chained.moment_norm);

        FieldSample T = sample_surface(npts, h, 9, Tfun);
        FieldSample Ss = sample_surface(npts, h, 3 * k, Ssurf_fun);
        FieldSample zs = sample_surface(npts, h, k,
                                        [&](double u, double v) { return zs_fun(u, v); });
        // Traces: jumps live in the m-column; averages cancel in [.]m.
        auto P_trace = [&](double sign) {
            return sample_surface(npts, h, 9, [&](double u, double v) {
                Vector out = Vector::Zero(9);
                Eigen::Vector3d jump = -divT_fun(u, v); // [P]m = -Div_Sigma T
                for (int r = 0; r < 3; ++r) out[3 * r + 2] = 0.5 * sign * jump[r];
                return out;
            });
        };
        auto S_trace = [&](double sign) {
            return sample_surface(npts, h, 3 * k, [&](double u, double v) {
                Vector out = Ssurf_fun(u, v);
                Vector jump = zs_fun(u, v) - divSsurf_fun(u, v); // [S]m = z - Div_Sigma S
                for (int r = 0; r < k; ++r) out[3 * r + 2] += 0.5 * sign * jump[r];
                return out;
            });
        };
        FieldSample Pp = P_trace(1.0), Pm = P_trace(-1.0);
        FieldSample Sp = S_trace(1.0), Sm = S_trace(-1.0);

        SurfaceBalanceResiduals sres = surface_balance_residual(T, Ss, zs, Pp, Pm, Sp, Sm, frame, A);
        study.surf_force.push_back(sres.force_norm);
        study.surf_micro.push_back(sres.micro_norm);

        FieldSample jumpSm = sample_surface(npts, h, k, [&](double u, double v) {
            return Vector(zs_fun(u, v) - divSsurf_fun(u, v));
        });
        FieldSample zs_h = chained_self_action(Ss, jumpSm, k, &frame);
        SurfaceBalanceResiduals schained =
            surface_balance_residual(T, Ss, zs_h, Pp, Pm, Sp, Sm, frame, A);
        study.surf_moment.push_back(schained.moment_norm);
    }
    return study;
}

std::vector<VerifyRow> verify_balance(int k, Rng& rng, const VerifyOptions& opts) {
    (void)opts;
    std::vector<VerifyRow> rows;

    // Jump/average product rule on random cases.
    double worst = 0.0;
    for (int c = 0; c < 1000; ++c) {
        Vector s = random_vector(rng, 4);
        worst = std::max(worst, jump_average_residual(s[0], s[1], s[2], s[3]));
        worst = std::max(worst, jump_average_residual(random_matrix(rng, 3, 3),
                                                      random_matrix(rng, 3, 3),
                                                      random_vector(rng, 3), random_vector(rng, 3)));
    }
    rows.push_back(row("balance", "jump_average_product_rule", worst, 1e-14, 1e-14 - worst));

    // Projector algebra.
    Vector nr = random_vector(rng, 3);
    SurfaceFrame frame(Eigen::Vector3d(nr[0], nr[1], nr[2]).normalized());
    Eigen::Matrix3d Pi = frame.projector();
    double alg = (Pi * Pi - Pi).norm() + (Pi * frame.m).norm() + std::abs(Pi.trace() - 2.0);
    rows.push_back(row("balance", "projector_algebra", alg, 1e-12, 1e-12 - alg));

    BalanceStudy study = balance_convergence_study(k, rng, {9, 17, 33});
    auto order_row = [&](const char* name, const std::vector<double>& norms) {
        double worst_order = 1e9;
        for (size_t i = 0; i + 1 < norms.size(); ++i)
            worst_order = std::min(worst_order, std::log2(norms[i] / norms[i + 1]));
        rows.push_back(row("balance", name, worst_order, 1.9, worst_order - 1.9));
    };
    order_row("bulk_force_convergence_order", study.bulk_force);
    order_row("bulk_micro_convergence_order", study.bulk_micro);
    order_row("bulk_moment_convergence_order", study.bulk_moment);
    order_row("surface_force_convergence_order", study.surf_force);
    order_row("surface_micro_convergence_order", study.surf_micro);
    order_row("surface_moment_convergence_order", study.surf_moment);
    return rows;
}

} // namespace memorium
