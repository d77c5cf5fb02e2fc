#pragma once

#include <string>
#include <vector>

#include "memorium/constitutive.hpp"

namespace memorium {

/// Work density with per-block contributions. The sign convention is the
/// physical one: the work expended while the record unwinds from its deep
/// past to the present, so a relaxed constant history costs nothing and
/// dissipative kernels make w(H) >= 0 on histories with vanishing limits.
struct WorkReport {
    double value = 0.0;
    std::vector<std::pair<std::string, double>> breakdown;
    double quadrature_error_bound = 0.0;
};

struct WorkOptions {
    double panel_tol = 1e-10;  // per-history budget for the adaptive panels
    int max_depth = 24;
    double continuity_tol = kDefaultContinuityTol;  // junction check in work_over
};

/// w(H) = int_0^inf R(H^s) . (-dX/ds)(s) ds, Gauss panels per segment,
/// constant tail contributing nothing.
WorkReport work(const MaterialModel& M, const History& H, const WorkOptions& opts = {});

/// Work over a prolongation, computed as the direct integral over [0, p)
/// and cross-checked against w(K*H) - w(H); disagreement beyond the
/// quadrature bounds throws InternalConsistencyError.
WorkReport work_over(const MaterialModel& M, const Process& K, const History& H,
                     const WorkOptions& opts = {});

/// Extreme-retardation gap of the lemma:
///   1/2 (X_H(inf) . Ginf X_H(inf) - X_H2(0) . Ginf X_H2(0)).
/// Requires a symmetric G(inf) unless strict is disabled.
double retardation_gap(const MaterialModel& M, const History& H, const History& H2,
                       bool strict = true);

/// Bulk traces feeding the full surface work: one-sided limit histories
/// and the jump rate records [ydot] (dim 3) and [nudot] (dim k). Rate
/// records must decay to zero at their last node.
struct SurfaceTraces {
    History h_plus;
    History h_minus;
    History jump_rate_y;
    History jump_rate_nu;
};

/// Reduced surface work w_hat: the surface mirror of work().
WorkReport work_surface_reduced(const SurfaceModel& SM, const History& HH,
                                const WorkOptions& opts = {});

/// Full surface work: reduced part plus the trace part
///   int ( <sigma> m . [ydot] + <S> m . [nudot] ) dt.
WorkReport work_surface(const SurfaceModel& SM, const MaterialModel& M, const History& HH,
                        const SurfaceTraces& traces, const WorkOptions& opts = {});

} // namespace memorium
