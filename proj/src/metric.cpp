#include "memorium/metric.hpp"

#include <cmath>
#include <limits>

namespace memorium {

std::vector<double> MetricConfig::t_grid(const MaterialModel& M) const {
    if (t_points < 2) throw ConfigError("metric: t_points must be >= 2");
    double lo = t_min_factor * M.min_tau();
    double hi = t_max_factor * M.max_tau();
    if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("metric: degenerate t range");
    std::vector<double> g;
    g.reserve(t_points + 1);
    g.push_back(0.0); // the t -> 0+ endpoint
    double r = std::log(hi / lo) / (t_points - 1);
    for (int i = 0; i < t_points; ++i) g.push_back(lo * std::exp(r * i));
    return g;
}

namespace {

// Moment vectors m_i = int_0^inf Gdot_i(s) D(s) ds for the difference
// history D, per Prony term, all segments in closed form.
std::vector<Vector> difference_moments(const MaterialModel& M, const History& H,
                                       const History& H2) {
    if (H.space != M.space || H2.space != M.space)
        throw ShapeError("distance: layout mismatch");
    std::vector<double> grid = merge_grids(H.grid, H2.grid);
    std::vector<Vector> delta;
    delta.reserve(grid.size());
    for (double s : grid) delta.push_back(H.at(s) - H2.at(s));

    const auto& terms = M.kernel.terms;
    std::vector<Vector> moments(terms.size(), Vector::Zero(M.space.dim));
    const int Mn = static_cast<int>(grid.size()) - 1;
    for (size_t i = 0; i < terms.size(); ++i) {
        double tau = terms[i].tau;
        Vector acc = Vector::Zero(M.space.dim);
        for (int j = 0; j < Mn; ++j) {
            double D = grid[j + 1] - grid[j];
            Vector slope = (delta[j + 1] - delta[j]) / D;
            acc += std::exp(-grid[j] / tau)
                   * (delta[j] * exp_int0(tau, D) + slope * exp_int1(tau, D));
        }
        acc += std::exp(-grid[Mn] / tau) * tau * delta[Mn]; // constant tail
        moments[i] = -(terms[i].C / tau) * acc;
    }
    return moments;
}

// Summed block magnitudes of sum_i e^(-t/tau_i) m_i.
double block_sum_at(const MaterialModel& M, const std::vector<Vector>& moments, double t) {
    Vector v = Vector::Zero(M.space.dim);
    for (size_t i = 0; i < moments.size(); ++i)
        v += std::exp(-t / M.kernel.terms[i].tau) * moments[i];
    return block_norm_sum(M.space, v);
}

DistanceReport distance_from_moments(const MaterialModel& M, const std::vector<Vector>& moments,
                                     const MetricConfig& cfg) {
    std::vector<double> ts = cfg.t_grid(M);
    DistanceReport rep;
    std::vector<double> g(ts.size());
    for (size_t j = 0; j < ts.size(); ++j) {
        g[j] = block_sum_at(M, moments, ts[j]);
        if (g[j] > rep.value) {
            rep.value = g[j];
            rep.argmax_t = ts[j];
        }
    }
    if (!cfg.sup_tail_bound) return rep;

    // Certified upper bracket. S_i bounds the summed block magnitudes of
    // term i's contribution; between grid points the Lipschitz constant of
    // g is at most sum_i S_i e^(-t/tau_i)/tau_i, and beyond the last point
    // g(t) <= sum_i S_i e^(-t/tau_i).
    std::vector<double> S(moments.size());
    for (size_t i = 0; i < moments.size(); ++i)
        S[i] = block_norm_sum(M.space, moments[i]);

    double upper = rep.value;
    for (size_t j = 0; j + 1 < ts.size(); ++j) {
        double lip = 0.0;
        for (size_t i = 0; i < S.size(); ++i)
            lip += S[i] * std::exp(-ts[j] / M.kernel.terms[i].tau) / M.kernel.terms[i].tau;
        double cap = 0.5 * (g[j] + g[j + 1] + lip * (ts[j + 1] - ts[j]));
        upper = std::max(upper, cap);
    }
    double tail = 0.0;
    for (size_t i = 0; i < S.size(); ++i)
        tail += S[i] * std::exp(-ts.back() / M.kernel.terms[i].tau);
    upper = std::max(upper, tail);

    rep.uncertainty = upper - rep.value;
    return rep;
}

} // namespace

DistanceReport distance(const MaterialModel& M, const History& H, const History& H2,
                        const MetricConfig& cfg) {
    if (M.kernel.terms.empty()) return DistanceReport{}; // elastic kernel: d == 0
    return distance_from_moments(M, difference_moments(M, H, H2), cfg);
}

bool equivalent(const MaterialModel& M, const History& H, const History& H2, double tol,
                const MetricConfig& cfg) {
    double head_gap = (H.head() - H2.head()).norm();
    if (head_gap > tol)
        throw ContinuityError("equivalent: initial values differ (precondition)", head_gap);
    return distance(M, H, H2, cfg).value < tol;
}

ContractionReport check_contraction(const MaterialModel& M, const History& H, const History& H2,
                                    const Process& K, const MetricConfig& cfg) {
    History PH = prolong(K, H);
    History PH2 = prolong(K, H2);
    DistanceReport lhs = distance(M, PH, PH2, cfg);
    DistanceReport rhs = distance(M, H, H2, cfg);
    ContractionReport rep;
    rep.lhs = lhs.value;
    rep.lhs_uncertainty = lhs.uncertainty;
    rep.rhs = rhs.value;
    rep.rhs_uncertainty = rhs.uncertainty;
    rep.holds = lhs.value <= rhs.value + rhs.uncertainty + 1e-13 * (1.0 + rhs.value);
    return rep;
}

FadingReport check_fading(const MaterialModel& M, const History& H, const History& H2,
                          const Process& K, double eps, const MetricConfig& cfg,
                          int max_doublings) {
    if (!(eps > 0.0)) throw ConfigError("check_fading: eps must be positive");
    FadingReport rep;
    rep.eps = eps;

    double m = 0.0;
    for (const History* h : {&H, &H2})
        for (const auto& v : h->values)
            for (double bn : block_norms(h->space, v)) m = std::max(m, bn);
    rep.m_bound = m;

    // Certified p on the same dyadic ladder as the observation.
    auto certified_at = [&](double p) { return 2.0 * m * tail_integral_abs_blocks(M, p) < eps; };

    double p0 = K.duration;
    bool cert_found = false;
    double p = p0;
    for (int j = 0; j <= max_doublings; ++j, p *= 2.0) {
        if (!cert_found && certified_at(p)) {
            rep.p_certified = p;
            cert_found = true;
        }
        if (!rep.observed_found) {
            Process Kp = (p == K.duration)
                             ? K
                             : concat(constant_process(K.space, K.values.front(), p - K.duration), K);
            DistanceReport d = distance(M, prolong(Kp, H), prolong(Kp, H2), cfg);
            if (d.value + d.uncertainty < eps) {
                rep.p_observed = p;
                rep.observed_found = true;
            }
        }
        if (cert_found && rep.observed_found) break;
    }
    if (!cert_found)
        rep.p_certified = std::numeric_limits<double>::infinity();
    return rep;
}

DistanceReport distance_surface(const SurfaceModel& SM, const History& HH, const History& HH2,
                                const MetricConfig& cfg) {
    return distance(SM.material(), HH, HH2, cfg);
}

} // namespace memorium
