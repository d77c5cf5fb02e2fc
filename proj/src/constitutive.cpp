#include "memorium/constitutive.hpp"

#include <cmath>

namespace memorium {

namespace {
BlockLayout layout_of(const Space& space) {
    if (space.blocks.size() != 3 || space.blocks[0].size != 9)
        throw ShapeError("block access requires the (W, nu, N) layout");
    return BlockLayout(space.blocks[1].size);
}
} // namespace

Matrix StressState::sigma() const {
    return unpack(layout_of(space), flat).W;
}

Vector StressState::z() const {
    return unpack(layout_of(space), flat).nu;
}

Matrix StressState::S() const {
    return unpack(layout_of(space), flat).N;
}

HereditaryEvaluator::HereditaryEvaluator(const MaterialModel& model, const History& history)
    : model_(model), hist_(history) {
    if (model.space != history.space)
        throw ShapeError("hereditary evaluation: model and history spaces differ");
    G0_ = model.kernel.at_zero();
    const auto& terms = model.kernel.terms;
    D_.reserve(terms.size());
    for (const auto& t : terms) D_.push_back(t.C / t.tau);

    const int M = hist_.nodes() - 1;
    jh_.assign(terms.size(), std::vector<Vector>(M + 1));
    for (size_t i = 0; i < terms.size(); ++i) {
        double tau = terms[i].tau;
        jh_[i][M] = tau * hist_.values[M]; // constant tail, closed form
        for (int j = M - 1; j >= 0; --j) {
            double D = hist_.grid[j + 1] - hist_.grid[j];
            Vector slope = (hist_.values[j + 1] - hist_.values[j]) / D;
            jh_[i][j] = hist_.values[j] * exp_int0(tau, D) + slope * exp_int1(tau, D)
                        + std::exp(-D / tau) * jh_[i][j + 1];
        }
    }
}

Vector HereditaryEvaluator::jhat(int term, double s) const {
    double tau = model_.kernel.terms[term].tau;
    const auto& grid = hist_.grid;
    const int M = hist_.nodes() - 1;
    if (s >= grid[M]) return tau * hist_.values[M];

    // Segment containing s.
    int j = static_cast<int>(std::upper_bound(grid.begin(), grid.end(), s) - grid.begin()) - 1;
    if (j < 0) j = 0;
    double D = grid[j + 1] - s;
    Vector xs = hist_.at(s);
    Vector slope = (hist_.values[j + 1] - hist_.values[j]) / (grid[j + 1] - grid[j]);
    return xs * exp_int0(tau, D) + slope * exp_int1(tau, D) + std::exp(-D / tau) * jh_[term][j + 1];
}

Vector HereditaryEvaluator::respond_flat(double s) const {
    if (s < 0.0) throw DomainError("respond: negative lag");
    Vector r = G0_ * hist_.at(s);
    for (size_t i = 0; i < D_.size(); ++i) r -= D_[i] * jhat(static_cast<int>(i), s);
    return r;
}

StressState respond(const MaterialModel& M, const History& H) {
    HereditaryEvaluator ev(M, H);
    return StressState{H.space, ev.respond_flat(0.0)};
}

StressState respond_after(const MaterialModel& M, const Process& K, const History& H, double s) {
    if (s < 0.0 || s >= K.duration)
        throw DomainError("respond_after: s outside [0, p)");
    HereditaryEvaluator ev(M, prolong(K, H));
    return StressState{H.space, ev.respond_flat(s)};
}

StressState respond_surface(const SurfaceModel& SM, const History& HH) {
    return respond(SM.material(), HH);
}

} // namespace memorium
