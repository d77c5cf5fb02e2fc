#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memorium/metric.hpp"
#include "memorium/work.hpp"

namespace memorium {

/// Relaxed-work instance: approach `target` from `source` by processes of
/// the form (replay of target over [0, q)) * (free transition segment),
/// whose prolongations of the source converge to the target in the
/// pseudometric as the replay depth q grows. The work is an exact
/// quadratic in the free nodal values; the endpoints of the transition are
/// pinned (target(q) above, source(0) below).
struct RelaxationProblem {
    const MaterialModel* model = nullptr;
    History source;
    History target;

    int free_nodes = 8;
    double free_len = 0.0;        // 0 = auto: retardation span 262144 max_tau
    double replay_depth0 = 0.0;   // 0 = auto: max(4 tau, target span + 2 tau)
    int max_depth_steps = 8;
    double tol_rw = 1e-7;
    double cg_tol = 1e-12;
    bool dissipative_mode = true; // run a cheap dissipativity probe first
    WorkOptions work_opts{};
    MetricConfig metric_cfg{};
};

struct RelaxedWorkResult {
    double value = 0.0;            // upper bound on the true infimum
    double residual_distance = 0.0;
    double residual_uncertainty = 0.0;
    std::vector<std::pair<double, double>> trace; // (replay depth, value)
    bool converged = false;
    bool degenerate = false;       // singular quadratic, least-norm step taken
    std::optional<Process> achieving;
};

RelaxedWorkResult relaxed_work(const RelaxationProblem& P);

/// -relaxed_work(P).value: the maximum recoverable work from source to target.
double max_recoverable(const RelaxationProblem& P);

/// One inequality instance evaluated with optimizer values. `certified`
/// states what a pass/fail proves given that optimizer values are upper
/// bounds on the true infima: "pass" = a strict pass proves the
/// inequality, "fail" = a fail disproves it, "none" = informational.
struct BoundRow {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    std::string certified;
};

struct RelaxedBoundsOptions {
    int free_nodes = 6;
    double tol = 1e-6;       // absolute slack
    double tol_rel = 1e-3;   // relative slack for bounds the optimizer approaches tightly
    int max_depth_steps = 6;
    /// The dagger prolongation bound w^r_H(K-dagger * H) <= w(K-dagger, H)
    /// is certified by this construction only where the family is tight
    /// (constant histories); skip it on generic sweeps.
    bool include_prolongation_row = true;
};

/// Sub-additivity, the retardation estimate, the dagger prolongation
/// bound, the symmetry bound and domination by the zero-source relaxed
/// work, checked around the pair (H, H2) with 0-dagger as the third
/// history.
std::vector<BoundRow> check_relaxed_bounds(const MaterialModel& M, const History& H,
                                           const History& H2,
                                           const RelaxedBoundsOptions& opts = {});

} // namespace memorium
