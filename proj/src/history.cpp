#include "memorium/history.hpp"

#include <algorithm>
#include <cmath>

namespace memorium {

namespace {

void check_grid(const std::vector<double>& grid, bool starts_at_zero) {
    if (grid.empty()) throw ShapeError("grid must be nonempty");
    if (starts_at_zero && grid.front() != 0.0)
        throw ShapeError("grid must start at 0");
    for (size_t j = 1; j < grid.size(); ++j)
        if (!(grid[j] > grid[j - 1]))
            throw ShapeError("grid must be strictly increasing");
}

void check_values(const Space& space, const std::vector<Vector>& values, size_t expect) {
    if (values.size() != expect)
        throw ShapeError("number of nodal values does not match grid");
    for (const auto& v : values)
        if (v.size() != space.dim)
            throw ShapeError("nodal value dimension does not match space");
}

// Index of the segment [grid[j], grid[j+1]) containing s; grid.size()-1 if
// s is at or beyond the last node.
size_t segment_index(const std::vector<double>& grid, double s) {
    auto it = std::upper_bound(grid.begin(), grid.end(), s);
    if (it == grid.begin()) return 0;
    size_t j = static_cast<size_t>(it - grid.begin()) - 1;
    return std::min(j, grid.size() - 1);
}

} // namespace

History::History(Space sp, std::vector<double> g, std::vector<Vector> v)
    : space(std::move(sp)), grid(std::move(g)), values(std::move(v)) {
    check_grid(grid, true);
    check_values(space, values, grid.size());
}

Vector History::at(double s) const {
    if (s <= 0.0) return values.front();
    if (s >= grid.back()) return values.back();
    size_t j = segment_index(grid, s);
    double h = grid[j + 1] - grid[j];
    double w = (s - grid[j]) / h;
    return (1.0 - w) * values[j] + w * values[j + 1];
}

Vector History::lag_slope(double s) const {
    if (s < 0.0 || s >= grid.back()) return Vector::Zero(space.dim);
    size_t j = segment_index(grid, s);
    if (j + 1 >= grid.size()) return Vector::Zero(space.dim);
    return (values[j + 1] - values[j]) / (grid[j + 1] - grid[j]);
}

Process::Process(Space sp, double p, std::vector<double> g, std::vector<Vector> v, Vector terminal)
    : space(std::move(sp)), duration(p), grid(std::move(g)), values(std::move(v)),
      terminal_left_limit(std::move(terminal)) {
    if (!(duration > 0.0)) throw ShapeError("process duration must be positive");
    check_grid(grid, true);
    if (grid.back() >= duration)
        throw ShapeError("process grid must lie in [0, duration)");
    check_values(space, values, grid.size());
    if (terminal_left_limit.size() != space.dim)
        throw ShapeError("terminal left limit dimension does not match space");
}

Vector Process::at(double s) const {
    if (s < 0.0 || s >= duration)
        throw DomainError("process evaluated outside [0, duration)");
    size_t j = segment_index(grid, s);
    double right_s = (j + 1 < grid.size()) ? grid[j + 1] : duration;
    const Vector& right_v = (j + 1 < grid.size()) ? values[j + 1] : terminal_left_limit;
    double w = (s - grid[j]) / (right_s - grid[j]);
    return (1.0 - w) * values[j] + w * right_v;
}

History constant_history(const Space& space, const Vector& X) {
    if (X.size() != space.dim) throw ShapeError("constant_history: dimension mismatch");
    return History(space, {0.0}, {X});
}

Process constant_process(const Space& space, const Vector& X, double p) {
    if (X.size() != space.dim) throw ShapeError("constant_process: dimension mismatch");
    return Process(space, p, {0.0}, {X}, X);
}

std::vector<double> merge_grids(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> m;
    m.reserve(a.size() + b.size());
    m.insert(m.end(), a.begin(), a.end());
    m.insert(m.end(), b.begin(), b.end());
    std::sort(m.begin(), m.end());
    std::vector<double> out;
    for (double s : m)
        if (out.empty() || s - out.back() > kGridMergeTol) out.push_back(s);
    return out;
}

History prolong(const Process& K, const History& H, double tol) {
    if (K.space != H.space) throw ShapeError("prolong: space mismatch");
    double gap = (K.terminal_left_limit - H.head()).norm();
    if (gap > tol)
        throw ContinuityError("prolong: K(p)- != H(0)", gap);

    std::vector<double> grid = K.grid;
    std::vector<Vector> values = K.values;
    if (K.duration - grid.back() <= kGridMergeTol) {
        grid.pop_back();
        values.pop_back();
    }
    // Junction node at p carries H(0); H's nodes follow shifted by p.
    grid.push_back(K.duration);
    values.push_back(H.head());
    for (int j = 1; j < H.nodes(); ++j) {
        grid.push_back(K.duration + H.grid[j]);
        values.push_back(H.values[j]);
    }
    return History(H.space, std::move(grid), std::move(values));
}

History prolong_relative(const Process& K, const History& H) {
    if (K.space != H.space) throw ShapeError("prolong_relative: space mismatch");
    std::vector<double> grid = K.grid;
    std::vector<Vector> values;
    values.reserve(K.values.size());
    for (const auto& v : K.values) values.push_back(v + H.head());

    // The head may jump at p: the left limit K(p)- + H(0) is recorded a
    // hair before the junction, the sharp-ramp stand-in for the jump
    // within the piecewise-linear subclass.
    double eps = std::min(K.duration * 1e-9, 0.5 * (K.duration - grid.back()));
    Vector left = K.terminal_left_limit + H.head();
    if ((left - H.head()).norm() > kGridMergeTol && eps > kGridMergeTol) {
        grid.push_back(K.duration - eps);
        values.push_back(left);
    }
    grid.push_back(K.duration);
    values.push_back(H.head());
    for (int j = 1; j < H.nodes(); ++j) {
        grid.push_back(K.duration + H.grid[j]);
        values.push_back(H.values[j]);
    }
    return History(H.space, std::move(grid), std::move(values));
}

History shift(const History& H, double t) {
    if (t < 0.0) throw DomainError("shift: negative lag");
    if (t == 0.0) return H;
    std::vector<double> grid = {0.0};
    std::vector<Vector> values = {H.at(t)};
    for (int j = 0; j < H.nodes(); ++j) {
        if (H.grid[j] - t > kGridMergeTol) {
            grid.push_back(H.grid[j] - t);
            values.push_back(H.values[j]);
        }
    }
    if (grid.size() == 1) {
        // Shift landed at or beyond the last node: constant history.
        return History(H.space, {0.0}, {H.limit()});
    }
    return History(H.space, std::move(grid), std::move(values));
}

Process process_from_history(const History& H, double p) {
    if (!(p > 0.0)) throw DomainError("process_from_history: p must be positive");
    std::vector<double> grid;
    std::vector<Vector> values;
    for (int j = 0; j < H.nodes(); ++j) {
        if (H.grid[j] < p - kGridMergeTol) {
            grid.push_back(H.grid[j]);
            values.push_back(H.values[j]);
        }
    }
    if (grid.empty()) {
        grid.push_back(0.0);
        values.push_back(H.head());
    }
    return Process(H.space, p, std::move(grid), std::move(values), H.at(p));
}

Process truncate_front(const Process& K, double r) {
    if (r < 0.0 || r >= K.duration)
        throw DomainError("truncate_front: r outside [0, duration)");
    if (r == 0.0) return K;
    std::vector<double> grid = {0.0};
    std::vector<Vector> values = {K.at(r)};
    for (size_t j = 0; j < K.grid.size(); ++j) {
        if (K.grid[j] - r > kGridMergeTol) {
            grid.push_back(K.grid[j] - r);
            values.push_back(K.values[j]);
        }
    }
    return Process(K.space, K.duration - r, std::move(grid), std::move(values),
                   K.terminal_left_limit);
}

Process concat(const Process& outer, const Process& inner, double tol) {
    if (outer.space != inner.space) throw ShapeError("concat: space mismatch");
    double gap = (outer.terminal_left_limit - inner.values.front()).norm();
    if (gap > tol)
        throw ContinuityError("concat: outer(p)- != inner(0)", gap);
    std::vector<double> grid = outer.grid;
    std::vector<Vector> values = outer.values;
    if (outer.duration - grid.back() <= kGridMergeTol) {
        grid.pop_back();
        values.pop_back();
    }
    for (size_t j = 0; j < inner.grid.size(); ++j) {
        grid.push_back(outer.duration + inner.grid[j]);
        values.push_back(inner.values[j]);
    }
    return Process(outer.space, outer.duration + inner.duration, std::move(grid),
                   std::move(values), inner.terminal_left_limit);
}

Process lemma_process(const History& H, const History& Hp, double p) {
    if (H.space != Hp.space) throw ShapeError("lemma_process: space mismatch");
    if (!(p > 0.0)) throw DomainError("lemma_process: p must be positive");
    Vector start = H.at(p);
    Vector end = Hp.head();
    return Process(H.space, p, {0.0}, {start}, end);
}

namespace {
double bump(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    double q = 1.0 - x * x;
    return x * q * q * q;
}
} // namespace

History varied_history(const History& H, double t, double alpha, const Vector& lag_rate_target) {
    if (!(alpha > 0.0)) throw DomainError("varied_history: alpha must be positive");
    if (t - alpha < 0.0 || t + alpha > H.span())
        throw DomainError("varied_history: window [t-a, t+a] escapes the grid span");
    if (lag_rate_target.size() != H.space.dim)
        throw ShapeError("varied_history: rate target dimension mismatch");

    // Central-difference lag rate of H at t; the window fits, so both
    // probes stay in the span.
    double dt = alpha / 4.0;
    Vector rate = (H.at(t + dt) - H.at(t - dt)) / (2.0 * dt);
    Vector amp = lag_rate_target - rate;

    // Window sampling: 40 equal pieces, t exactly at the center node.
    const int half = 20;
    std::vector<double> extra;
    for (int i = -half; i <= half; ++i) extra.push_back(t + alpha * i / half);
    std::vector<double> grid = merge_grids(H.grid, extra);

    std::vector<Vector> values;
    values.reserve(grid.size());
    for (double s : grid) {
        Vector v = H.at(s);
        if (std::abs(s - t) < alpha)
            v += alpha * bump((s - t) / alpha) * amp;
        values.push_back(std::move(v));
    }
    return History(H.space, std::move(grid), std::move(values));
}

History resample(const History& H, const std::vector<double>& grid) {
    std::vector<Vector> values;
    values.reserve(grid.size());
    for (double s : grid) values.push_back(H.at(s));
    return History(H.space, grid, std::move(values));
}

History axpy(double a, const History& H1, double b, const History& H2) {
    if (H1.space != H2.space) throw ShapeError("axpy: space mismatch");
    std::vector<double> grid = merge_grids(H1.grid, H2.grid);
    std::vector<Vector> values;
    values.reserve(grid.size());
    for (double s : grid) values.push_back(a * H1.at(s) + b * H2.at(s));
    return History(H1.space, grid, std::move(values));
}

} // namespace memorium
