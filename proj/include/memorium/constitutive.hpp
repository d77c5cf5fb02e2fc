#pragma once

#include <vector>

#include "memorium/history.hpp"
#include "memorium/kernels.hpp"

namespace memorium {

/// Dual triple (sigma, z, S) with the flat vector alongside; the flat form
/// reuses the state layout on the dual side.
struct StressState {
    Space space;
    Vector flat;

    Matrix sigma() const;  // 3x3 (requires the blocked layout)
    Vector z() const;      // k
    Matrix S() const;      // kx3
};

/// Hereditary response of a fixed history at arbitrary shifts:
///   R(s) = G(0) X(s) + int_0^inf Gdot(u) X(s+u) du
/// evaluated exactly for piecewise-linear histories against Prony kernels.
/// Per term the normalized partial integrals
///   Jhat_i(s) = int_s^inf e^(-(v-s)/tau_i) X(v) dv
/// are precomputed at the nodes by one backward sweep, so a query costs
/// O(terms) closed-form segment integrals; no intermediate history is ever
/// materialized.
class HereditaryEvaluator {
public:
    HereditaryEvaluator(const MaterialModel& model, const History& history);

    /// Flat response of the shifted history H^s.
    Vector respond_flat(double s) const;

    const History& history() const { return hist_; }

private:
    Vector jhat(int term, double s) const;

    const MaterialModel& model_;
    History hist_;
    Matrix G0_;
    std::vector<Matrix> D_;               // C_i / tau_i
    std::vector<std::vector<Vector>> jh_; // [term][node]
};

/// sigma(H), z(H), S(H) in one flat evaluation.
StressState respond(const MaterialModel& M, const History& H);

/// Response along a prolongation: respond(M, (K*H)^s) for s in [0, p).
StressState respond_after(const MaterialModel& M, const Process& K, const History& H, double s);

/// Surface triple T(HH), z_surf(HH), S_surf(HH) over the surface layout.
StressState respond_surface(const SurfaceModel& SM, const History& HH);

} // namespace memorium
