#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "memorium/relaxed.hpp"
#include "memorium/sweeps.hpp"
#include "oracles.hpp"

using namespace memorium;

namespace {

MaterialModel scalar_model(double g_inf, double tau, double c) {
    MaterialModel M;
    M.space = Space::flat(1);
    M.kernel.G_inf = Matrix::Constant(1, 1, g_inf);
    if (c != 0.0) M.kernel.terms.push_back({tau, Matrix::Constant(1, 1, c)});
    M.validate();
    return M;
}

History const1(double v) { return constant_history(Space::flat(1), Vector::Constant(1, v)); }

RelaxationProblem problem(const MaterialModel& M, History src, History tgt) {
    RelaxationProblem P;
    P.model = &M;
    P.source = std::move(src);
    P.target = std::move(tgt);
    return P;
}

} // namespace

TEST_CASE("self relaxed work on a constant history is zero") {
    MaterialModel M = scalar_model(2.0, 1.0, 1.0);
    RelaxationProblem P = problem(M, const1(1.5), const1(1.5));
    RelaxedWorkResult r = relaxed_work(P);
    CHECK(std::abs(r.value) < 1e-6);
    CHECK(r.converged);
    CHECK(-max_recoverable(P) == doctest::Approx(r.value));
}

TEST_CASE("constant-to-constant reproduces the closed form") {
    // g_inf = 2, source 0, target 3: w^r = (1/2) 2 (9 - 0) = 9.
    MaterialModel M = scalar_model(2.0, 1.0, 1.0);
    RelaxationProblem P = problem(M, const1(0.0), const1(3.0));
    RelaxedWorkResult r = relaxed_work(P);
    CHECK(r.value == doctest::Approx(9.0).epsilon(1e-4));
    CHECK(r.value >= 9.0 - 1e-9); // dissipative kernel: never below the inf
    CHECK(r.residual_distance < 1e-6);
    REQUIRE(r.achieving.has_value());

    // Maximum recoverable work: from 2-dagger to 0-dagger with g_inf = 1.
    MaterialModel M1 = scalar_model(1.0, 1.0, 1.0);
    RelaxationProblem P2 = problem(M1, const1(2.0), const1(0.0));
    CHECK(max_recoverable(P2) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("trace converges in the replay depth") {
    MaterialModel M = scalar_model(1.0, 1.0, 1.0);
    History H(Space::flat(1), {0.0, 0.7, 2.0},
              {Vector::Constant(1, 1.0), Vector::Constant(1, -0.5), Vector::Constant(1, 0.4)});
    RelaxationProblem P = problem(M, const1(0.4), H);
    P.tol_rw = 1e-9;
    RelaxedWorkResult r = relaxed_work(P);
    REQUIRE(r.trace.size() >= 2);
    // The value settles from below: shallow depths may undershoot by the
    // residual coupling e^{(span - q)/tau}, never exceed a later depth by
    // more than that scale, and the step sizes collapse.
    for (size_t i = 0; i + 1 < r.trace.size(); ++i) {
        CHECK(r.trace[i + 1].second <= r.trace[i].second + 1e-7);
        CHECK(std::abs(r.trace[i + 1].second - r.trace[i].second)
              <= std::exp(H.span() - r.trace[i].first) + 1e-7);
    }
    CHECK(std::abs(r.trace.back().second - r.trace[r.trace.size() - 2].second) < 1e-9);
    CHECK(r.converged);
    CHECK(r.residual_distance < 1e-6);
}

TEST_CASE("optimizer value brackets the brute-force process enumeration") {
    // Scalar single-exponential instance: source 1-dagger, target 0-dagger.
    MaterialModel M = scalar_model(1.0, 1.0, 1.0);
    History src = const1(1.0);
    History tgt = const1(0.0);

    // Oracle family at a given depth: replay of the target over
    // [0, depth), free segment of the same length with three interior
    // nodes, endpoints pinned. The oracle work is dense quadrature; since
    // it is an exact quadratic in the three values, it is reconstructed
    // from ten dense evaluations and spot-checked against direct dense
    // evaluations before the enumeration uses it.
    auto oracle_family = [&](double depth) {
        std::vector<double> fg = {0.0, depth / 4.0, depth / 2.0, 3.0 * depth / 4.0};
        auto eval = [&, fg](double a, double b, double c) {
            std::vector<Vector> vals = {Vector::Zero(1), Vector::Constant(1, a),
                                        Vector::Constant(1, b), Vector::Constant(1, c)};
            Process free(Space::flat(1), depth, fg, vals, Vector::Constant(1, 1.0));
            Process K = concat(process_from_history(tgt, depth), free);
            return oracles::dense_work(M, prolong(K, src), 20000);
        };
        // Quadratic reconstruction J(x) = c0 + g.x + 1/2 x.A x.
        double c0 = eval(0, 0, 0);
        Vector g(3);
        Matrix A(3, 3);
        double jp[3], jm[3];
        for (int i = 0; i < 3; ++i) {
            double e[3] = {0, 0, 0};
            e[i] = 1.0;
            jp[i] = eval(e[0], e[1], e[2]);
            jm[i] = eval(-e[0], -e[1], -e[2]);
            g[i] = 0.5 * (jp[i] - jm[i]);
            A(i, i) = jp[i] + jm[i] - 2.0 * c0;
        }
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                double e[3] = {0, 0, 0};
                e[i] = 1.0;
                e[j] = 1.0;
                double cross = eval(e[0], e[1], e[2]) - jp[i] - jp[j] + c0;
                A(i, j) = cross;
                A(j, i) = cross;
            }
        auto quad = [c0, g, A](double a, double b, double c) {
            Vector x(3);
            x << a, b, c;
            return c0 + g.dot(x) + 0.5 * x.dot(A * x);
        };
        // Spot-check the reconstruction against direct dense quadrature.
        for (double a : {-1.4, 0.6})
            for (double b : {-0.2, 1.8})
                for (double c : {-2.0, 1.0})
                    CHECK(std::abs(quad(a, b, c) - eval(a, b, c)) < 1e-7);
        return quad;
    };

    auto grid_min = [&](double depth, int npt) {
        auto quad = oracle_family(depth);
        double best = 1e300;
        for (int a = 0; a < npt; ++a)
            for (int b = 0; b < npt; ++b)
                for (int c = 0; c < npt; ++c) {
                    auto val = [&](int idx) { return -2.0 + 4.0 * idx / (npt - 1); };
                    best = std::min(best, quad(val(a), val(b), val(c)));
                }
        return best;
    };

    // Optimizer never exceeds the 21-point enumeration at matched depths.
    RelaxationProblem P = problem(M, src, tgt);
    double value = relaxed_work(P).value;
    for (double depth : {2.0, 5.0, 10.0}) {
        double best21 = grid_min(depth, 21);
        RelaxationProblem Pd = problem(M, src, tgt);
        Pd.free_nodes = 3;
        Pd.free_len = depth;
        Pd.replay_depth0 = depth;
        Pd.max_depth_steps = 2;
        RelaxedWorkResult rd = relaxed_work(Pd);
        CHECK(rd.trace.front().second <= best21 + 1e-6);
        CHECK(value <= best21 + 1e-6);
    }

    // Richardson limit of the enumeration: first in the value-grid step
    // (second order), then two Richardson stages in the reciprocal depth
    // over q = 10, 20, 40 where the c/q transient-excess law is in range.
    auto delta_limit = [&](double depth) {
        double m21 = grid_min(depth, 21);  // step 0.2
        double m41 = grid_min(depth, 41);  // step 0.1
        return (4.0 * m41 - m21) / 3.0;
    };
    double m10 = delta_limit(10.0);
    double m20 = delta_limit(20.0);
    double m40 = delta_limit(40.0);
    double r1 = 2.0 * m20 - m10;
    double r2 = 2.0 * m40 - m20;
    double extrapolated = (4.0 * r2 - r1) / 3.0;

    CHECK(std::abs(value - extrapolated) <= 0.02 * std::abs(extrapolated));
    // Both sit near the closed form -1/2.
    CHECK(value == doctest::Approx(-0.5).epsilon(1e-3));
    CHECK(extrapolated == doctest::Approx(-0.5).epsilon(0.02));
}

TEST_CASE("non-dissipative kernels are detected as unbounded below") {
    MaterialModel M = scalar_model(1.0, 1.0, -2.0); // G(0) = -1
    RelaxationProblem P = problem(M, const1(0.0), const1(1.0));
    P.dissipative_mode = false;
    CHECK_THROWS_AS(relaxed_work(P), UnboundedBelowError);

    RelaxationProblem P2 = problem(M, const1(0.0), const1(1.0));
    P2.dissipative_mode = true; // the probe fires first
    CHECK_THROWS_AS(relaxed_work(P2), NumericalError);
}

TEST_CASE("budget exhaustion carries the trace") {
    MaterialModel M = scalar_model(1.0, 1.0, 1.0);
    History H(Space::flat(1), {0.0, 1.0},
              {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)});
    RelaxationProblem P = problem(M, const1(-1.0), H);
    P.max_depth_steps = 1;
    P.tol_rw = 1e-16;
    try {
        relaxed_work(P);
        FAIL("expected BudgetError");
    } catch (const BudgetError& e) {
        CHECK(std::string(e.what()).find("trace") != std::string::npos);
    }
}

TEST_CASE("bound report on random histories (robust rows)") {
    Rng rng(71);
    MaterialModel M = scalar_model(1.2, 0.8, 0.6);
    History H = random_history(rng, Space::flat(1), 0.8);
    History H2 = random_history(rng, Space::flat(1), 0.8);
    RelaxedBoundsOptions bo;
    bo.include_prolongation_row = false; // certified only at tight (constant) cases
    auto rows = check_relaxed_bounds(M, H, H2, bo);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        INFO(r.name, " lhs=", r.lhs, " rhs=", r.rhs);
        CHECK(r.holds);
    }
    CHECK(rows[1].certified == "pass");
    CHECK(rows[2].certified == "fail");
}

TEST_CASE("bound report at constant histories includes the dagger bound") {
    MaterialModel M = scalar_model(1.2, 0.8, 0.6);
    auto rows = check_relaxed_bounds(M, const1(0.9), const1(-0.3));
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
        INFO(r.name, " lhs=", r.lhs, " rhs=", r.rhs);
        CHECK(r.holds);
    }
    // Every side is closed-form here; the dagger bound reads 0 <= 0.
    CHECK(rows[2].name == "dagger_prolongation_bound");
    CHECK(rows[2].lhs == doctest::Approx(0.0).epsilon(1e-4));
    CHECK(rows[2].rhs == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("constant triples: every bound with closed-form sides") {
    // Item 4 arithmetic: between constants every relaxed work is exact, so
    // the sub-additivity chain degenerates to equalities.
    MaterialModel M = scalar_model(2.0, 1.0, 0.5);
    double a = 0.7, b = -0.4;
    RelaxedWorkResult r_ab = relaxed_work(problem(M, const1(a), const1(b)));
    RelaxedWorkResult r_b0 = relaxed_work(problem(M, const1(b), const1(0.0)));
    RelaxedWorkResult r_a0 = relaxed_work(problem(M, const1(a), const1(0.0)));
    double gab = 0.5 * 2.0 * (b * b - a * a);
    CHECK(r_ab.value == doctest::Approx(gab).epsilon(1e-4));
    // Triangle through b: equality within optimizer tolerance.
    CHECK(r_a0.value == doctest::Approx(r_ab.value + r_b0.value).epsilon(1e-3));
    // Symmetry bound: w^r_{a}(b) + w^r_{b}(a) = 0 exactly in the limit.
    RelaxedWorkResult r_ba = relaxed_work(problem(M, const1(b), const1(a)));
    CHECK(r_ab.value + r_ba.value >= -1e-5);
}

TEST_CASE("item 6: recoverable work from H to zero dominates the stored head energy") {
    Rng rng(73);
    ModelGenOptions mo;
    mo.monotone_symmetric = true;
    mo.terms = 1;
    MaterialModel M = random_model(rng, Space::flat(1), mo);
    History zero = const1(0.0);
    for (int c = 0; c < 8; ++c) {
        History H = random_history(rng, Space::flat(1), M.max_tau());
        RelaxationProblem P = problem(M, H, zero);
        P.dissipative_mode = false;
        double recoverable = max_recoverable(P); // -w^r_H(0-dagger), lower bound
        double floor = 0.5 * H.head()[0] * M.kernel.G_inf(0, 0) * H.head()[0];
        // Optimizer negation is a lower bound on the true recoverable
        // work, so crossing the floor certifies the inequality; a miss
        // within slack is only reported.
        CHECK(recoverable >= floor - 0.05 * (1.0 + std::abs(floor)));
    }
}

TEST_CASE("random scalar sweep of the robust bound rows") {
    Rng rng(79);
    MaterialModel M = scalar_model(1.1, 0.7, 0.9);
    RelaxedBoundsOptions bo;
    bo.include_prolongation_row = false;
    bo.free_nodes = 4;
    bo.max_depth_steps = 4;
    int violations = 0;
    for (int c = 0; c < 100; ++c) {
        History H = random_history(rng, Space::flat(1), 0.7, {3, 5, 1.0, 1.0, false});
        History H2 = random_history(rng, Space::flat(1), 0.7, {3, 5, 1.0, 1.0, false});
        for (const auto& r : check_relaxed_bounds(M, H, H2, bo))
            if (!r.holds) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("self pair reduces sub-additivity to nonnegativity") {
    Rng rng(83);
    MaterialModel M = scalar_model(1.0, 1.0, 1.0);
    History H = random_history(rng, Space::flat(1), 1.0);
    RelaxedBoundsOptions bo;
    bo.include_prolongation_row = false;
    auto rows = check_relaxed_bounds(M, H, H, bo);
    // symmetry_bound with H2 = H reads 2 w^r_H(H) >= 0.
    for (const auto& r : rows)
        if (r.name == "symmetry_bound") {
            CHECK(r.holds);
            CHECK(r.lhs >= -1e-5);
        }
}

TEST_CASE("lower semicontinuity probe on the scalar constant family") {
    // On constants the optimizer is tight, so the footnote's statement is
    // checked directly: d(H1, H) < delta implies w^r(H1) >= w^r(H) - eps,
    // with the modulus read off the closed form.
    MaterialModel M = scalar_model(2.0, 1.0, 1.0);
    History src = const1(-0.3);
    auto wr = [&](double c) {
        RelaxationProblem P = problem(M, src, const1(c));
        return relaxed_work(P).value;
    };
    double base_c = 1.2;
    double v0 = wr(base_c);
    // d(a-dagger, b-dagger) = |a - b| sup_t int |Gdot(s+t)| ds = |a - b| here.
    // |w^r(c+t) - w^r(c)| <= g_inf |t| (|2c| + |t|) / 2: the local modulus.
    for (double theta : {0.2, 0.05, 0.01}) {
        // d(theta-shifted, base) scales linearly in theta for this kernel.
        double eps = 2.0 * theta * (std::abs(2.0 * base_c) + theta) / 2.0 + 1e-5;
        CHECK(wr(base_c + theta) >= v0 - eps);
        CHECK(wr(base_c - theta) >= v0 - eps);
    }
}

TEST_CASE("purely elastic kernels relax through the singular quadratic") {
    MaterialModel M;
    M.space = Space::flat(2);
    M.kernel.G_inf = Matrix::Identity(2, 2) * 2.0;
    M.validate();
    Vector x1(2), x2(2);
    x1 << 0.5, -1.0;
    x2 << 1.5, 0.25;
    RelaxationProblem P;
    P.model = &M;
    P.source = constant_history(M.space, x1);
    P.target = constant_history(M.space, x2);
    RelaxedWorkResult r = relaxed_work(P);
    double closed = 0.5 * (x2.dot(M.kernel.G_inf * x2) - x1.dot(M.kernel.G_inf * x1));
    CHECK(r.value == doctest::Approx(closed).epsilon(1e-10));
    CHECK(r.residual_distance == 0.0); // the elastic metric cannot separate
}

TEST_CASE("relaxed-work dissipation inequalities in both printed forms") {
    Rng rng(89);
    MaterialModel M = scalar_model(1.2, 1.0, 0.8);
    RelaxationProblem base;
    base.model = &M;
    base.free_nodes = 4;
    base.dissipative_mode = false;
    auto solve = [&](const History& src, const History& tgt) {
        RelaxationProblem P = base;
        P.source = src;
        P.target = tgt;
        return relaxed_work(P).value;
    };

    for (int c = 0; c < 6; ++c) {
        History Hs = random_history(rng, M.space, 1.0, {3, 5, 1.0, 0.8, false});
        History H = random_history(rng, M.space, 1.0, {3, 5, 1.0, 0.8, false});
        Process K = random_process(rng, M.space, 1.2, H.head());
        Process Ks = random_process(rng, M.space, 1.2, Hs.head());

        // Prolonging the target costs at most the full work of the
        // prolonged record: w^r_{H'}(K*H) - w^r_{H'}(H) <= w(K*H).
        double lhs_a = solve(Hs, prolong(K, H)) - solve(Hs, H);
        double rhs_a = work(M, prolong(K, H)).value;
        CHECK(lhs_a <= rhs_a + 1e-3 * (1.0 + std::abs(rhs_a)));

        // Prolonging the source costs at most the work over the
        // prolongation: w^r_{H'}(H) - w^r_{K*H'}(H) <= w(K, H').
        double lhs_b = solve(Hs, H) - solve(prolong(Ks, Hs), H);
        double rhs_b = work_over(M, Ks, Hs).value;
        CHECK(lhs_b <= rhs_b + 1e-3 * (1.0 + std::abs(rhs_b)));
    }
}
