#pragma once

#include <vector>

#include "memorium/statespace.hpp"

namespace memorium {

/// Default tolerance for the prolongation compatibility K(p)- = H(0).
inline constexpr double kDefaultContinuityTol = 1e-12;

/// Grid nodes closer than this are merged when grids are combined.
inline constexpr double kGridMergeTol = 1e-14;

/// Lag-parametrized record of the state: s = 0 is the present, s grows
/// into the past. Piecewise linear between nodes, constant for s >= s_M,
/// so H(infinity) always exists and equals the last nodal value.
struct History {
    Space space;
    std::vector<double> grid;    // s_0 = 0 < s_1 < ... < s_M
    std::vector<Vector> values;  // M+1 nodal states

    History() : space(Space::flat(1)), grid{0.0}, values{Vector::Zero(1)} {}
    History(Space sp, std::vector<double> g, std::vector<Vector> v);

    int nodes() const { return static_cast<int>(grid.size()); }
    double span() const { return grid.back(); }

    const Vector& head() const { return values.front(); }
    const Vector& limit() const { return values.back(); } // H(infinity)

    /// Piecewise-linear value at lag s (constant beyond the last node).
    Vector at(double s) const;

    /// Lag-derivative d/ds on the segment containing s (zero on the tail;
    /// at a node the right slope is taken, matching right continuity).
    Vector lag_slope(double s) const;
};

/// Finite-duration record over [0, p). Nodes live in [0, p); the left
/// limit K(p)- is stored explicitly and closes the last linear segment.
struct Process {
    Space space;
    double duration;
    std::vector<double> grid;    // in [0, duration)
    std::vector<Vector> values;
    Vector terminal_left_limit;  // K(p)-

    Process(Space sp, double p, std::vector<double> g, std::vector<Vector> v, Vector terminal);

    /// Value at s in [0, duration); throws DomainError outside.
    Vector at(double s) const;
};

/// Constant history of value X.
History constant_history(const Space& space, const Vector& X);

/// Constant process of value X over [0, p).
Process constant_process(const Space& space, const Vector& X, double p);

/// Prolongation K * H: result(s) = K(s) on [0, p), H(s - p) beyond.
/// Requires the compatibility K(p)- = H(0) within tol.
History prolong(const Process& K, const History& H, double tol = kDefaultContinuityTol);

/// Relative continuation: result(s) = K(s) + H(0) on [0, p), H(s - p)
/// beyond. No compatibility requirement; the head may jump at p.
History prolong_relative(const Process& K, const History& H);

/// Shifted history H^t(s) = H(t + s).
History shift(const History& H, double t);

/// Restriction of H to [0, p) as a process; left limit is H(p).
Process process_from_history(const History& H, double p);

/// Restriction K_p^r of K over [r, p): value(s) = K(r + s).
Process truncate_front(const Process& K, double r);

/// Concatenation: outer occupies [0, p_outer), inner follows. Requires
/// outer(p_outer)- = inner(0) within tol.
Process concat(const Process& outer, const Process& inner, double tol = kDefaultContinuityTol);

/// Interpolation process of the retardation lemma: linear in r from the
/// blocks of H at p to the blocks of Hp at 0, duration p.
Process lemma_process(const History& H, const History& Hp, double p);

/// Compactly supported rate variation: H_a(s) = H(s) + a f((s-t)/a) (T - Hdot(t))
/// with bump f(x) = x (1-x^2)^3 on |x| < 1. Preserves H_a(t) = H(t) and
/// leaves H untouched outside [t-a, t+a]; the lag-rate at t becomes T.
History varied_history(const History& H, double t, double alpha, const Vector& lag_rate_target);

/// Union of both grids (and any extra nodes), deduplicated at kGridMergeTol.
std::vector<double> merge_grids(const std::vector<double>& a, const std::vector<double>& b);

/// Same function on a refined grid (must contain the span start 0).
History resample(const History& H, const std::vector<double>& grid);

/// a*H1 + b*H2 on the merged grid.
History axpy(double a, const History& H1, double b, const History& H2);

} // namespace memorium
