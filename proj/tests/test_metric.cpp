#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "memorium/metric.hpp"
#include "memorium/sweeps.hpp"
#include "oracles.hpp"

using namespace memorium;

namespace {

MaterialModel scalar_model(double g_inf, double tau, double c) {
    MaterialModel M;
    M.space = Space::flat(1);
    M.kernel.G_inf = Matrix::Constant(1, 1, g_inf);
    M.kernel.terms.push_back({tau, Matrix::Constant(1, 1, c)});
    M.validate();
    return M;
}

History exp_scalar_history(double span, double step) {
    std::vector<double> grid;
    std::vector<Vector> values;
    for (double s = 0.0; s <= span + 1e-12; s += step) {
        grid.push_back(s);
        values.push_back(Vector::Constant(1, std::exp(-s)));
    }
    return History(Space::flat(1), std::move(grid), std::move(values));
}

} // namespace

TEST_CASE("distance vanishes on identical histories") {
    Rng rng(5);
    Space sp = Space::blocked(BlockLayout(1));
    MaterialModel M = random_model(rng, sp);
    History H = random_history(rng, sp, 1.0);
    DistanceReport d = distance(M, H, H);
    CHECK(d.value == 0.0);
}

TEST_CASE("scalar analytic oracle: sup is one half") {
    // Gdot = -e^-s, H = e^-s, H' = 0: discrepancy(t) = e^-t / 2, sup = 1/2.
    MaterialModel M = scalar_model(1.0, 1.0, 1.0);
    History H = exp_scalar_history(40.0, 0.01);
    History Z = constant_history(Space::flat(1), Vector::Zero(1));
    DistanceReport d = distance(M, H, Z);
    CHECK(d.value == doctest::Approx(0.5).epsilon(2e-4));
    CHECK(std::abs(d.value - 0.5) < 1e-4);
    CHECK(d.argmax_t == 0.0);
    CHECK(d.uncertainty >= 0.0);
}

TEST_CASE("homogeneity of the defining integrals") {
    Rng rng(11);
    Space sp = Space::flat(2);
    MaterialModel M = random_model(rng, sp);
    for (int c = 0; c < 20; ++c) {
        History H1 = random_history(rng, sp, 1.0);
        History H2 = random_history(rng, sp, 1.0);
        double d1 = distance(M, H1, H2).value;
        double d2 = distance(M, axpy(2.0, H1, 0.0, H2), axpy(2.0, H2, 0.0, H1)).value;
        CHECK(d2 == doctest::Approx(2.0 * d1).epsilon(1e-12));
    }
}

TEST_CASE("pseudometric axioms on random triples") {
    Rng rng(13);
    Space sp = Space::blocked(BlockLayout(1));
    MaterialModel M = random_model(rng, sp);
    for (int c = 0; c < 30; ++c) {
        History A = random_history(rng, sp, 1.0);
        History B = random_history(rng, sp, 1.0);
        History C = random_history(rng, sp, 1.0);
        DistanceReport ab = distance(M, A, B);
        DistanceReport ba = distance(M, B, A);
        CHECK(ab.value == ba.value); // symmetry is exact
        DistanceReport ac = distance(M, A, C);
        DistanceReport cb = distance(M, C, B);
        double slack = 2.0 * (ab.uncertainty + ac.uncertainty + cb.uncertainty);
        CHECK(ab.value <= ac.value + cb.value + slack + 1e-12);
    }
}

TEST_CASE("equivalence requires matching heads and small distance") {
    MaterialModel M = scalar_model(1.0, 1.0, 1.0);
    History H = exp_scalar_history(40.0, 0.01);
    History Z = constant_history(Space::flat(1), Vector::Zero(1));
    CHECK_THROWS_AS(equivalent(M, H, Z, 1e-6), ContinuityError); // heads differ: precondition

    History Zh = constant_history(Space::flat(1), Vector::Constant(1, 1.0));
    CHECK_FALSE(equivalent(M, H, Zh, 1e-6)); // distance 0.5 - epsilon > tol
    CHECK(equivalent(M, H, H, 1e-12));
}

TEST_CASE("contraction on random triples") {
    Rng rng(17);
    Space sp = Space::blocked(BlockLayout(1));
    MaterialModel M = random_model(rng, sp);
    for (int c = 0; c < 50; ++c) {
        History H = random_history(rng, sp, 1.0);
        History H2 = random_history(rng, sp, 1.0);
        H2.values.front() = H.head();
        Process K = random_process(rng, sp, 0.5 + 0.1 * (c % 20), H.head());
        ContractionReport rep = check_contraction(M, H, H2, K);
        CHECK(rep.holds);
        CHECK(rep.lhs <= rep.rhs + rep.rhs_uncertainty + 1e-12);
    }
    // Nearly empty process: both sides effectively equal.
    History H = random_history(rng, sp, 1.0);
    History H2 = random_history(rng, sp, 1.0);
    H2.values.front() = H.head();
    Process K0 = constant_process(sp, H.head(), 1e-9);
    ContractionReport rep = check_contraction(M, H, H2, K0);
    CHECK(rep.lhs == doctest::Approx(rep.rhs).epsilon(1e-6));
    // Identical histories: both sides vanish.
    ContractionReport zz = check_contraction(M, H, H, K0);
    CHECK(zz.lhs == 0.0);
    CHECK(zz.rhs == 0.0);
}

TEST_CASE("fading memory with the certified tail bound") {
    MaterialModel M = scalar_model(1.0, 1.0, 1.0);
    History H = exp_scalar_history(6.0, 0.2);
    History H2 = constant_history(Space::flat(1), Vector::Constant(1, 1.0));
    Process K = constant_process(Space::flat(1), H.head(), 0.5);

    double eps = 1e-4;
    FadingReport rep = check_fading(M, H, H2, K, eps);
    CHECK(rep.observed_found);
    CHECK(rep.p_observed <= rep.p_certified + 1e-12);

    // Closed form: 2 M sum-C e^-p < eps at p* = ln(2 M / eps); the dyadic
    // certificate lands within one doubling of it.
    double pstar = std::log(2.0 * rep.m_bound * 1.0 / eps);
    CHECK(rep.p_certified >= pstar - 1e-9);
    CHECK(rep.p_certified <= 2.0 * pstar + 1e-9);

    // Huge eps: the first rung already qualifies.
    FadingReport easy = check_fading(M, H, H2, K, 1e9);
    CHECK(easy.p_observed == doctest::Approx(K.duration));

    // Identical histories: distance zero at the first rung.
    FadingReport same = check_fading(M, H, H, K, 1e-12);
    CHECK(same.p_observed == doctest::Approx(K.duration));

    CHECK_THROWS_AS(check_fading(M, H, H2, K, 0.0), ConfigError);
}

TEST_CASE("approachability decays below any eps at the tail-bound rate") {
    Rng rng(19);
    Space sp = Space::blocked(BlockLayout(1));
    MaterialModel M = random_model(rng, sp);
    double tau = M.max_tau();
    History H = random_history(rng, sp, tau);
    History H2 = random_history(rng, sp, tau);
    H2.values.front() = H.limit(); // junction H(p) = H2(0) beyond the span

    double m = 0.0;
    for (const History* h : {&H, &H2})
        for (const auto& v : h->values)
            for (double bn : block_norms(sp, v)) m = std::max(m, bn);

    double p = std::max(2.0 * tau, H.span() + tau);
    double prev = 1e300;
    for (int lev = 0; lev < 6; ++lev, p *= 2.0) {
        History app = prolong(process_from_history(H, p), H2);
        DistanceReport d = distance(M, app, H);
        CHECK(d.value <= prev + 1e-12);
        CHECK(d.value <= 2.0 * m * tail_integral_abs_blocks(M, p) + 1e-12);
        prev = d.value;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("response continuity against the distance") {
    Rng rng(23);
    Space sp = Space::blocked(BlockLayout(2));
    MaterialModel M = random_model(rng, sp);
    for (int c = 0; c < 20; ++c) {
        History H = random_history(rng, sp, 1.0);
        History H2 = random_history(rng, sp, 1.0);
        DistanceReport d = distance(M, H, H2);
        double lhs = block_norm_sum(sp, respond(M, H).flat - respond(M, H2).flat);
        double inst = block_norm_sum(sp, M.kernel.at_zero() * (H.head() - H2.head()));
        CHECK(lhs <= d.value + d.uncertainty + inst + 1e-10);
    }
}

TEST_CASE("surface distance mirrors the scalar oracle") {
    MaterialModel M = scalar_model(1.0, 1.0, 1.0);
    SurfaceModel SM{M.space, M.kernel, Eigen::Vector3d::UnitZ()};
    History H = exp_scalar_history(40.0, 0.01);
    History Z = constant_history(Space::flat(1), Vector::Zero(1));
    DistanceReport d = distance_surface(SM, H, Z);
    CHECK(std::abs(d.value - 0.5) < 1e-4);
    CHECK(distance_surface(SM, H, H).value == 0.0);
    double one = distance_surface(SM, H, Z).value;
    double two = distance_surface(SM, axpy(2.0, H, 0.0, H), axpy(2.0, Z, 0.0, Z)).value;
    CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-12));
}
