#pragma once

#include <optional>
#include <vector>

#include "memorium/history.hpp"
#include "memorium/statespace.hpp"

namespace memorium {

/// Closed-form segment integrals against a decaying exponential:
///   exp_int0 = int_0^D e^(-u/tau) du
///   exp_int1 = int_0^D u e^(-u/tau) du
///   exp_int2 = int_0^D u^2 e^(-u/tau) du
double exp_int0(double tau, double D);
double exp_int1(double tau, double D);
double exp_int2(double tau, double D);

struct PronyTerm {
    double tau;
    Matrix C;
};

/// Relaxation function G(s) = G_inf + sum_i C_i e^(-s/tau_i) on R^dim.
/// Gdot is Lebesgue-integrable and G(inf) = G_inf by construction.
struct PronyKernel {
    Matrix G_inf;
    std::vector<PronyTerm> terms;

    int dim() const { return static_cast<int>(G_inf.rows()); }

    Matrix at(double s) const;
    Matrix deriv_at(double s) const;
    Matrix at_zero() const;  // G(0) = G_inf + sum C_i

    void validate() const;
};

/// Full material model: state space plus the n x n kernel assembly. The
/// nine named blocks G_AB live at the block offsets of the space.
struct MaterialModel {
    Space space;
    PronyKernel kernel;
    bool require_symmetric = false;

    void validate() const;

    double max_tau() const;
    double min_tau() const;
};

/// Surface counterpart: same block shape over (W_surf, nu, N_surf) plus
/// the unit normal of the carrying plane.
struct SurfaceModel {
    Space space;
    PronyKernel kernel;
    Eigen::Vector3d normal;

    void validate() const;
    MaterialModel material() const { return MaterialModel{space, kernel, false}; }
};

Matrix eval_G(const MaterialModel& M, double s);
Matrix eval_Gdot(const MaterialModel& M, double s);

/// Named-block view G_AB(s): dual block A (rows), state block B (cols),
/// both indexing the space's block list.
Matrix eval_G_block(const MaterialModel& M, double s, int A, int B);

/// Upper bound on int_p^inf ||Gdot(s)||_F ds: sum_i ||C_i||_F e^(-p/tau_i).
/// Monotone decreasing in p.
double tail_integral_abs(const MaterialModel& M, double p);

/// Same bound restricted to one dual block row span (used by the fading
/// certificate, which sums the three row-block tails).
double tail_integral_abs_rows(const MaterialModel& M, double p, const BlockSpan& rows);

/// Sum over the space's dual blocks of tail_integral_abs_rows.
double tail_integral_abs_blocks(const MaterialModel& M, double p);

struct DissipativeReport {
    bool violation_found = false;
    double w_value = 0.0;      // work at the witness (meaningful on violation)
    int restarts_used = 0;
    std::optional<History> witness;
};

/// Searches for a history with vanishing limits and negative work by exact
/// minimization of the work quadratic form over randomized unit-norm nodal
/// grids. "No violation found" is a verdict, not a proof.
DissipativeReport check_dissipative(const MaterialModel& M, int search_budget,
                                    unsigned long long seed = 1,
                                    double tol_diss = 1e-9);

} // namespace memorium
