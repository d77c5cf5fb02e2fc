#include "memorium/balance.hpp"

#include <cmath>

namespace memorium {

SurfaceFrame::SurfaceFrame(const Eigen::Vector3d& normal) : m(normal) {
    if (std::abs(m.norm() - 1.0) > 1e-12)
        throw ConfigError("surface frame: normal must be a unit vector");
    // In-plane orthonormal pair; seed axis chosen away from m.
    Eigen::Vector3d seed = std::abs(m[0]) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    e_u = (seed - seed.dot(m) * m).normalized();
    e_v = m.cross(e_u);
}

Eigen::Matrix3d ricci_e(const Eigen::Vector3d& a) {
    Eigen::Matrix3d E;
    E << 0.0, a[2], -a[1],
        -a[2], 0.0, a[0],
        a[1], -a[0], 0.0;
    return E;
}

Eigen::Matrix3d skw(const Eigen::Matrix3d& A) { return 0.5 * (A - A.transpose()); }

double jump_average_residual(double a1p, double a1m, double a2p, double a2m) {
    double lhs = a1p * a2p - a1m * a2m;
    double rhs = (a1p - a1m) * 0.5 * (a2p + a2m) + 0.5 * (a1p + a1m) * (a2p - a2m);
    return std::abs(lhs - rhs);
}

double jump_average_residual(const Matrix& a1p, const Matrix& a1m, const Vector& a2p,
                             const Vector& a2m) {
    if (a1p.cols() != a2p.size() || a1m.cols() != a2m.size() || a1p.rows() != a1m.rows())
        throw ShapeError("jump_average_residual: incompatible shapes");
    Vector lhs = a1p * a2p - a1m * a2m;
    Vector rhs = (a1p - a1m) * 0.5 * (a2p + a2m) + 0.5 * (a1p + a1m) * (a2p - a2m);
    return (lhs - rhs).norm();
}

double jump_average_residual(const Matrix& a1p, const Matrix& a1m, const Matrix& a2p,
                             const Matrix& a2m) {
    if (a1p.cols() != a2p.rows() || a1m.cols() != a2m.rows())
        throw ShapeError("jump_average_residual: incompatible shapes");
    Matrix lhs = a1p * a2p - a1m * a2m;
    Matrix rhs = (a1p - a1m) * 0.5 * (a2p + a2m) + 0.5 * (a1p + a1m) * (a2p - a2m);
    return (lhs - rhs).norm();
}

void FieldSample::validate() const {
    if (dim != 2 && dim != 3) throw ShapeError("field: dim must be 2 or 3");
    int axes = dim;
    for (int a = 0; a < axes; ++a)
        if (size[a] < 5) throw ShapeError("field: need at least 5 nodes per axis");
    if (!(h > 0.0)) throw ShapeError("field: spacing must be positive");
    if (comps < 1) throw ShapeError("field: comps must be >= 1");
    if (static_cast<int>(data.size()) != nodes() * comps)
        throw ShapeError("field: data size does not match grid");
}

FieldSample sample_bulk(int npts, double h, int comps,
                        const std::function<Vector(const Eigen::Vector3d&)>& f) {
    FieldSample out;
    out.dim = 3;
    out.size = {npts, npts, npts};
    out.h = h;
    out.comps = comps;
    out.data.resize(static_cast<size_t>(out.nodes()) * comps);
    for (int i = 0; i < npts; ++i)
        for (int j = 0; j < npts; ++j)
            for (int k = 0; k < npts; ++k) {
                Vector v = f(Eigen::Vector3d(i * h, j * h, k * h));
                for (int c = 0; c < comps; ++c) out.at(i, j, k, c) = v[c];
            }
    out.validate();
    return out;
}

FieldSample sample_surface(int npts, double h, int comps,
                           const std::function<Vector(double, double)>& f) {
    FieldSample out;
    out.dim = 2;
    out.size = {npts, npts, 1};
    out.h = h;
    out.comps = comps;
    out.data.resize(static_cast<size_t>(out.nodes()) * comps);
    for (int i = 0; i < npts; ++i)
        for (int j = 0; j < npts; ++j) {
            Vector v = f(i * h, j * h);
            for (int c = 0; c < comps; ++c) out.at(i, j, 0, c) = v[c];
        }
    out.validate();
    return out;
}

namespace {

// Central difference along axis; one-sided 2nd order at the boundary.
double diff_axis(const FieldSample& f, int i, int j, int k, int c, int axis) {
    int idx[3] = {i, j, k};
    int n = f.size[axis];
    auto val = [&](int off) {
        int p[3] = {idx[0], idx[1], idx[2]};
        p[axis] += off;
        return f.at(p[0], p[1], p[2], c);
    };
    if (idx[axis] == 0)
        return (-3.0 * val(0) + 4.0 * val(1) - val(2)) / (2.0 * f.h);
    if (idx[axis] == n - 1)
        return (3.0 * val(0) - 4.0 * val(-1) + val(-2)) / (2.0 * f.h);
    return (val(1) - val(-1)) / (2.0 * f.h);
}

template <typename Fn>
FieldSample map_nodes(const FieldSample& ref, int comps, Fn&& fn) {
    FieldSample out;
    out.dim = ref.dim;
    out.size = ref.size;
    out.h = ref.h;
    out.comps = comps;
    out.data.resize(static_cast<size_t>(out.nodes()) * comps);
    int kmax = ref.dim == 3 ? ref.size[2] : 1;
    for (int i = 0; i < ref.size[0]; ++i)
        for (int j = 0; j < ref.size[1]; ++j)
            for (int k = 0; k < kmax; ++k) {
                Vector v = fn(i, j, k);
                for (int c = 0; c < comps; ++c) out.at(i, j, k, c) = v[c];
            }
    return out;
}

Vector node_vec(const FieldSample& f, int i, int j, int k) {
    Vector v(f.comps);
    for (int c = 0; c < f.comps; ++c) v[c] = f.at(i, j, k, c);
    return v;
}

} // namespace

FieldSample gradient(const FieldSample& f) {
    f.validate();
    int axes = f.dim;
    return map_nodes(f, f.comps * axes, [&](int i, int j, int k) {
        Vector g(f.comps * axes);
        for (int c = 0; c < f.comps; ++c)
            for (int a = 0; a < axes; ++a) g[c * axes + a] = diff_axis(f, i, j, k, c, a);
        return g;
    });
}

FieldSample surface_gradient(const FieldSample& f, const SurfaceFrame& frame) {
    f.validate();
    if (f.dim != 2) throw ShapeError("surface_gradient: dim-2 field required");
    return map_nodes(f, f.comps * 3, [&](int i, int j, int k) {
        Vector g(f.comps * 3);
        for (int c = 0; c < f.comps; ++c) {
            double du = diff_axis(f, i, j, k, c, 0);
            double dv = diff_axis(f, i, j, k, c, 1);
            Eigen::Vector3d grad3 = du * frame.e_u + dv * frame.e_v;
            for (int a = 0; a < 3; ++a) g[c * 3 + a] = grad3[a];
        }
        return g;
    });
}

double interior_max_norm(const FieldSample& f) {
    f.validate();
    double worst = 0.0;
    int kmax = f.dim == 3 ? f.size[2] : 1;
    for (int i = 1; i < f.size[0] - 1; ++i)
        for (int j = 1; j < f.size[1] - 1; ++j)
            for (int k = (f.dim == 3 ? 1 : 0); k < (f.dim == 3 ? kmax - 1 : 1); ++k) {
                double s = 0.0;
                for (int c = 0; c < f.comps; ++c) s += f.at(i, j, k, c) * f.at(i, j, k, c);
                worst = std::max(worst, std::sqrt(s));
            }
    return worst;
}

BulkBalanceResiduals bulk_balance_residual(const FieldSample& P, const FieldSample& b,
                                           const FieldSample& S, const FieldSample& z,
                                           const FieldSample& beta, const Matrix& A_const) {
    for (const FieldSample* f : {&P, &b, &S, &z, &beta}) f->validate();
    const int k = static_cast<int>(A_const.rows());
    if (A_const.cols() != 3) throw ShapeError("bulk balance: A must be k x 3");
    if (P.comps != 9 || b.comps != 3 || S.comps != 3 * k || z.comps != k || beta.comps != k)
        throw ShapeError("bulk balance: field component counts do not match k");

    FieldSample gradP = gradient(P);  // comps 9*3, deriv fastest
    FieldSample gradS = gradient(S);

    BulkBalanceResiduals out;
    out.force = map_nodes(P, 3, [&](int i, int j, int kk) {
        Vector r(3);
        for (int row = 0; row < 3; ++row) {
            double div = 0.0;
            for (int col = 0; col < 3; ++col)
                div += gradP.at(i, j, kk, (3 * row + col) * 3 + col);
            r[row] = div + b.at(i, j, kk, row);
        }
        return r;
    });
    out.micro = map_nodes(P, k, [&](int i, int j, int kk) {
        Vector r(k);
        for (int row = 0; row < k; ++row) {
            double div = 0.0;
            for (int col = 0; col < 3; ++col)
                div += gradS.at(i, j, kk, (3 * row + col) * 3 + col);
            r[row] = div - z.at(i, j, kk, row) + beta.at(i, j, kk, row);
        }
        return r;
    });
    out.moment = map_nodes(P, 9, [&](int i, int j, int kk) {
        Eigen::Matrix3d Pm;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) Pm(r, c) = P.at(i, j, kk, 3 * r + c);
        Vector zv = node_vec(z, i, j, kk);
        Eigen::Matrix3d res = skw(Pm) - 0.5 * ricci_e(A_const.transpose() * zv);
        Vector out9(9);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) out9[3 * r + c] = res(r, c);
        return out9;
    });
    out.force_norm = interior_max_norm(out.force);
    out.micro_norm = interior_max_norm(out.micro);
    out.moment_norm = interior_max_norm(out.moment);
    return out;
}

SurfaceBalanceResiduals surface_balance_residual(
    const FieldSample& T_surf, const FieldSample& S_surf, const FieldSample& z_surf,
    const FieldSample& P_plus, const FieldSample& P_minus, const FieldSample& S_plus,
    const FieldSample& S_minus, const SurfaceFrame& frame, const Matrix& A_const) {
    for (const FieldSample* f : {&T_surf, &S_surf, &z_surf, &P_plus, &P_minus, &S_plus, &S_minus}) {
        f->validate();
        if (f->dim != 2) throw ShapeError("surface balance: dim-2 fields required");
    }
    const int k = static_cast<int>(A_const.rows());
    if (A_const.cols() != 3) throw ShapeError("surface balance: A must be k x 3");
    if (T_surf.comps != 9 || S_surf.comps != 3 * k || z_surf.comps != k)
        throw ShapeError("surface balance: surface field component counts do not match k");
    if (P_plus.comps != 9 || P_minus.comps != 9 || S_plus.comps != 3 * k || S_minus.comps != 3 * k)
        throw ShapeError("surface balance: trace field component counts do not match k");

    FieldSample gradT = surface_gradient(T_surf, frame);
    FieldSample gradSs = surface_gradient(S_surf, frame);
    const Eigen::Vector3d m = frame.m;
    const Eigen::Matrix3d Pi = frame.projector();

    SurfaceBalanceResiduals out;
    out.force = map_nodes(T_surf, 3, [&](int i, int j, int kk) {
        Vector r(3);
        for (int row = 0; row < 3; ++row) {
            double div = 0.0;
            for (int col = 0; col < 3; ++col)
                div += gradT.at(i, j, kk, (3 * row + col) * 3 + col);
            double jump = 0.0;
            for (int col = 0; col < 3; ++col)
                jump += (P_plus.at(i, j, kk, 3 * row + col) - P_minus.at(i, j, kk, 3 * row + col))
                        * m[col];
            r[row] = div + jump;
        }
        return r;
    });
    out.micro = map_nodes(T_surf, k, [&](int i, int j, int kk) {
        Vector r(k);
        for (int row = 0; row < k; ++row) {
            double div = 0.0;
            for (int col = 0; col < 3; ++col)
                div += gradSs.at(i, j, kk, (3 * row + col) * 3 + col);
            double jump = 0.0;
            for (int col = 0; col < 3; ++col)
                jump += (S_plus.at(i, j, kk, 3 * row + col) - S_minus.at(i, j, kk, 3 * row + col))
                        * m[col];
            r[row] = div - z_surf.at(i, j, kk, row) + jump;
        }
        return r;
    });
    out.moment = map_nodes(T_surf, 9, [&](int i, int j, int kk) {
        Eigen::Matrix3d Tm;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) Tm(r, c) = T_surf.at(i, j, kk, 3 * r + c);
        Vector zv = node_vec(z_surf, i, j, kk);
        Eigen::Matrix3d res = skw(Tm * Pi) - 0.5 * ricci_e(A_const.transpose() * zv);
        Vector out9(9);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) out9[3 * r + c] = res(r, c);
        return out9;
    });
    out.force_norm = interior_max_norm(out.force);
    out.micro_norm = interior_max_norm(out.micro);
    out.moment_norm = interior_max_norm(out.moment);
    return out;
}

} // namespace memorium
