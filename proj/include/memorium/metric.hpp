#pragma once

#include <vector>

#include "memorium/constitutive.hpp"

namespace memorium {

/// Sample lags for the sup over t in the history distance. The default
/// grid is log-spaced on [1e-3 min_tau, 20 max_tau] with the t -> 0+
/// endpoint prepended; a Lipschitz-plus-tail majorant brackets the sup
/// between the grid maximum and a certified upper bound.
struct MetricConfig {
    int t_points = 64;
    double t_min_factor = 1e-3;  // times min tau
    double t_max_factor = 20.0;  // times max tau
    bool sup_tail_bound = true;

    std::vector<double> t_grid(const MaterialModel& M) const;
};

struct DistanceReport {
    double value = 0.0;        // grid maximum (lower bracket of the sup)
    double uncertainty = 0.0;  // certified bracket width
    double argmax_t = 0.0;
};

/// Pseudometric d(H, H'): sup over t of the summed dual-block magnitudes
/// of int_0^inf Gdot(s+t) (X(s) - X'(s)) ds. Exact per-segment integrals;
/// the t-dependence reduces to sum_i e^(-t/tau_i) m_i with precomputed
/// moment vectors m_i.
DistanceReport distance(const MaterialModel& M, const History& H, const History& H2,
                        const MetricConfig& cfg = {});

/// Equivalence test: requires matching initial values (precondition,
/// distinct from inequivalence), then compares the distance to tol.
bool equivalent(const MaterialModel& M, const History& H, const History& H2, double tol,
                const MetricConfig& cfg = {});

struct ContractionReport {
    double lhs = 0.0, lhs_uncertainty = 0.0;
    double rhs = 0.0, rhs_uncertainty = 0.0;
    bool holds = false;
};

/// d(K*H, K*H') <= d(H, H') checked with both brackets.
ContractionReport check_contraction(const MaterialModel& M, const History& H, const History& H2,
                                    const Process& K, const MetricConfig& cfg = {});

struct FadingReport {
    double eps = 0.0;
    double m_bound = 0.0;       // max sup-norm over both histories' blocks
    double p_observed = 0.0;    // smallest dyadic p with measured d < eps
    double p_certified = 0.0;   // smallest dyadic p with 2M sum-tail(p) < eps
    bool observed_found = false;
};

/// Smallest p on a dyadic ladder with d(K_p*H, K_p*H') < eps, where K_p
/// extends K by a constant head. The certificate uses the row-block tail
/// bound 2M sum_A int_p^inf |Gdot_A| ds.
FadingReport check_fading(const MaterialModel& M, const History& H, const History& H2,
                          const Process& K, double eps, const MetricConfig& cfg = {},
                          int max_doublings = 60);

DistanceReport distance_surface(const SurfaceModel& SM, const History& HH, const History& HH2,
                                const MetricConfig& cfg = {});

} // namespace memorium
