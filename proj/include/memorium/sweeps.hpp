#pragma once

#include <random>
#include <string>
#include <vector>

#include "memorium/balance.hpp"
#include "memorium/energy.hpp"

namespace memorium {

using Rng = std::mt19937_64;

/// Deterministic case generators shared by the verify command and tests.
Vector random_vector(Rng& rng, int n, double scale = 1.0);

struct HistoryGenOptions {
    int min_nodes = 3;
    int max_nodes = 7;
    double gap_scale = 1.0;   // mean node spacing in units of max tau
    double amplitude = 1.0;
    bool zero_tail = false;   // pin H(inf) = 0
};

History random_history(Rng& rng, const Space& space, double tau_scale,
                       const HistoryGenOptions& opts = {});

/// Process with pinned terminal left limit (prolongation-ready).
Process random_process(Rng& rng, const Space& space, double duration, const Vector& terminal,
                       int nodes = 3, double amplitude = 1.0);

struct ModelGenOptions {
    int terms = 2;
    bool monotone_symmetric = false; // PSD symmetric C_i and G_inf
    double tau_lo = 0.3;
    double tau_hi = 3.0;
    double scale = 1.0;
};

MaterialModel random_model(Rng& rng, const Space& space, const ModelGenOptions& opts = {});

/// One verified property instance; lhs/rhs give the compared quantities
/// and margin their distance to the threshold (sign-normalized so that
/// nonnegative means pass).
struct VerifyRow {
    std::string suite;
    std::string property;
    bool pass = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
};

struct VerifyOptions {
    int cases = 25;
    double tol = 1e-7;
    double tol_diss = 1e-9;
};

std::vector<VerifyRow> verify_kernels(const MaterialModel& M, Rng& rng,
                                      const VerifyOptions& opts = {});
std::vector<VerifyRow> verify_metric(const MaterialModel& M, Rng& rng,
                                     const VerifyOptions& opts = {});
std::vector<VerifyRow> verify_work(const MaterialModel& M, Rng& rng,
                                   const VerifyOptions& opts = {});
std::vector<VerifyRow> verify_relaxed(const MaterialModel& M, Rng& rng,
                                      const VerifyOptions& opts = {});
std::vector<VerifyRow> verify_energy(const MaterialModel& M, Rng& rng,
                                     const VerifyOptions& opts = {});
std::vector<VerifyRow> verify_balance(int k, Rng& rng, const VerifyOptions& opts = {});

Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0);

/// Manufactured-solution residual norms per refinement level for the six
/// pointwise balances (bulk and surface force/micro/moment). The moment
/// rows are chained through the numerically divergenced self-action so
/// they inherit an observable O(h^2) residual.
struct BalanceStudy {
    std::vector<int> levels;
    std::vector<double> bulk_force, bulk_micro, bulk_moment;
    std::vector<double> surf_force, surf_micro, surf_moment;
};

BalanceStudy balance_convergence_study(int k, Rng& rng, const std::vector<int>& levels);

} // namespace memorium
