#include "memorium/work.hpp"

#include <cmath>
#include <functional>

namespace memorium {

namespace {

constexpr double kG4x[2] = {0.3399810435848563, 0.8611363115940526};
constexpr double kG4w[2] = {0.6521451548625461, 0.3478548451374538};

// One 4-point Gauss panel of a vector-valued integrand.
template <typename F>
Vector gauss4(const F& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    Vector acc = kG4w[0] * (f(c - h * kG4x[0]) + f(c + h * kG4x[0]))
                 + kG4w[1] * (f(c - h * kG4x[1]) + f(c + h * kG4x[1]));
    return h * acc;
}

struct PanelResult {
    Vector value;
    double error_bound = 0.0;
};

template <typename F>
void adaptive_panel(const F& f, double a, double b, double tol, int depth, int max_depth,
                    PanelResult& out) {
    Vector whole = gauss4(f, a, b);
    double m = 0.5 * (a + b);
    Vector halves = gauss4(f, a, m) + gauss4(f, m, b);
    double err = (whole - halves).template lpNorm<1>() / 15.0;
    if (err <= tol || depth >= max_depth) {
        out.value += halves;
        out.error_bound += err;
        return;
    }
    adaptive_panel(f, a, m, 0.5 * tol, depth + 1, max_depth, out);
    adaptive_panel(f, m, b, 0.5 * tol, depth + 1, max_depth, out);
}

// Integrates per-block power contributions R(s) . rate(s) over [a, b] with
// a constant rate per call; the result vector holds one entry per block.
PanelResult integrate_power(const HereditaryEvaluator& ev, const Space& space, double a, double b,
                            const Vector& physical_rate, double tol, int max_depth) {
    auto f = [&](double s) {
        Vector r = ev.respond_flat(s);
        Vector per_block(space.blocks.size());
        for (size_t bidx = 0; bidx < space.blocks.size(); ++bidx) {
            const auto& blk = space.blocks[bidx];
            per_block[bidx] = r.segment(blk.offset, blk.size)
                                  .dot(physical_rate.segment(blk.offset, blk.size));
        }
        return per_block;
    };
    PanelResult out;
    out.value = Vector::Zero(static_cast<int>(space.blocks.size()));
    adaptive_panel(f, a, b, tol, 0, max_depth, out);
    return out;
}

std::vector<std::string> block_labels(const Space& space) {
    if (space.blocks.size() == 3) return {"W", "nu", "N"};
    std::vector<std::string> l;
    for (size_t i = 0; i < space.blocks.size(); ++i) l.push_back("block" + std::to_string(i));
    return l;
}

WorkReport work_on_range(const MaterialModel& M, const History& H, double a, double b,
                         const WorkOptions& opts) {
    HereditaryEvaluator ev(M, H);
    const Space& space = H.space;
    Vector per_block = Vector::Zero(static_cast<int>(space.blocks.size()));
    double bound = 0.0;

    // Active segments of H clipped to [a, b]; rates vanish elsewhere.
    double seg_tol = opts.panel_tol / std::max<size_t>(1, H.grid.size());
    for (int j = 0; j + 1 < H.nodes(); ++j) {
        double lo = std::max(a, H.grid[j]);
        double hi = std::min(b, H.grid[j + 1]);
        if (hi <= lo) continue;
        Vector rate = -(H.values[j + 1] - H.values[j]) / (H.grid[j + 1] - H.grid[j]);
        if (rate.norm() == 0.0) continue;
        PanelResult pr = integrate_power(ev, space, lo, hi, rate, seg_tol, opts.max_depth);
        per_block += pr.value;
        bound += pr.error_bound;
    }

    WorkReport rep;
    auto labels = block_labels(space);
    for (size_t i = 0; i < labels.size(); ++i) {
        rep.breakdown.emplace_back(labels[i], per_block[static_cast<int>(i)]);
        rep.value += per_block[static_cast<int>(i)];
    }
    rep.quadrature_error_bound = bound;
    return rep;
}

} // namespace

WorkReport work(const MaterialModel& M, const History& H, const WorkOptions& opts) {
    if (M.space != H.space) throw ShapeError("work: layout mismatch");
    return work_on_range(M, H, 0.0, H.span(), opts);
}

WorkReport work_over(const MaterialModel& M, const Process& K, const History& H,
                     const WorkOptions& opts) {
    if (M.space != H.space || M.space != K.space) throw ShapeError("work_over: layout mismatch");
    History KH = prolong(K, H, opts.continuity_tol);

    WorkReport direct = work_on_range(M, KH, 0.0, K.duration, opts);

    WorkReport whole = work_on_range(M, KH, 0.0, KH.span(), opts);
    WorkReport base = work(M, H, opts);
    double diff_form = whole.value - base.value;

    double budget = direct.quadrature_error_bound + whole.quadrature_error_bound
                    + base.quadrature_error_bound
                    + 1e-9 * (1.0 + std::abs(whole.value) + std::abs(base.value));
    if (std::abs(direct.value - diff_form) > budget)
        throw InternalConsistencyError("work_over: direct integral and difference form disagree");
    return direct;
}

double retardation_gap(const MaterialModel& M, const History& H, const History& H2, bool strict) {
    if (M.space != H.space || M.space != H2.space)
        throw ShapeError("retardation_gap: layout mismatch");
    const Matrix& Ginf = M.kernel.G_inf;
    if (strict) {
        double asym = (Ginf - Ginf.transpose()).lpNorm<Eigen::Infinity>();
        if (asym > 1e-12 * (1.0 + Ginf.lpNorm<Eigen::Infinity>()))
            throw ConfigError("retardation_gap: G(inf) is not symmetric (strict mode)");
    }
    const Vector& xe = H.limit();
    const Vector& y0 = H2.head();
    return 0.5 * (xe.dot(Ginf * xe) - y0.dot(Ginf * y0));
}

WorkReport work_surface_reduced(const SurfaceModel& SM, const History& HH,
                                const WorkOptions& opts) {
    return work(SM.material(), HH, opts);
}

WorkReport work_surface(const SurfaceModel& SM, const MaterialModel& M, const History& HH,
                        const SurfaceTraces& traces, const WorkOptions& opts) {
    SM.validate();
    if (traces.h_plus.space != M.space || traces.h_minus.space != M.space)
        throw ShapeError("work_surface: trace histories do not match the bulk layout");
    if (traces.jump_rate_y.space.dim != 3)
        throw ShapeError("work_surface: [ydot] record must have dimension 3");
    int k = (M.space.blocks.size() == 3) ? M.space.blocks[1].size : 0;
    if (k == 0 || traces.jump_rate_nu.space.dim != k)
        throw ShapeError("work_surface: [nudot] record must have dimension k");
    for (const History* r : {&traces.jump_rate_y, &traces.jump_rate_nu})
        if (r->limit().norm() > 1e-12)
            throw ConfigError("work_surface: jump rate records must decay to zero");

    WorkReport rep = work_surface_reduced(SM, HH, opts);

    HereditaryEvaluator ev_plus(M, traces.h_plus);
    HereditaryEvaluator ev_minus(M, traces.h_minus);
    const Eigen::Vector3d m = SM.normal;
    BlockLayout bl(k);

    auto trace_power = [&](double s) {
        StateBlocks avg = unpack(bl, 0.5 * (ev_plus.respond_flat(s) + ev_minus.respond_flat(s)));
        Vector out(1);
        out[0] = (avg.W * m).dot(traces.jump_rate_y.at(s)) +
                 (avg.N * m).dot(traces.jump_rate_nu.at(s));
        return out;
    };

    // Panels split at every kink of the rate records and of the trace
    // histories; rates vanish beyond their own spans.
    std::vector<double> grid = merge_grids(traces.jump_rate_y.grid, traces.jump_rate_nu.grid);
    double support = grid.back();
    grid = merge_grids(grid, merge_grids(traces.h_plus.grid, traces.h_minus.grid));
    while (grid.size() > 1 && grid.back() > support + kGridMergeTol) grid.pop_back();
    double seg_tol = opts.panel_tol / std::max<size_t>(1, grid.size());
    PanelResult pr;
    pr.value = Vector::Zero(1);
    for (size_t j = 0; j + 1 < grid.size(); ++j)
        adaptive_panel(trace_power, grid[j], grid[j + 1], seg_tol, 0, opts.max_depth, pr);

    rep.breakdown.emplace_back("traces", pr.value[0]);
    rep.value += pr.value[0];
    rep.quadrature_error_bound += pr.error_bound;
    return rep;
}

} // namespace memorium
