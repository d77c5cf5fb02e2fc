#pragma once

#include <array>
#include <functional>
#include <vector>

#include "memorium/statespace.hpp"

namespace memorium {

/// Planar discontinuity surface: unit normal covector and projector
/// I - m (x) m, with an orthonormal in-plane frame (e_u, e_v, m).
struct SurfaceFrame {
    Eigen::Vector3d m;

    explicit SurfaceFrame(const Eigen::Vector3d& normal);

    Eigen::Matrix3d projector() const { return Eigen::Matrix3d::Identity() - m * m.transpose(); }
    Eigen::Vector3d e_u;
    Eigen::Vector3d e_v;
};

/// Skew matrix from a vector via the alternating symbol: (e a)_ij = eps_ijk a_k.
Eigen::Matrix3d ricci_e(const Eigen::Vector3d& a);

Eigen::Matrix3d skw(const Eigen::Matrix3d& A);

/// Jump/average product-rule residual [a1 a2] - [a1]<a2> - <a1>[a2] for a
/// distributive product. Overloads cover the shapes the balances use.
double jump_average_residual(double a1p, double a1m, double a2p, double a2m);
double jump_average_residual(const Matrix& a1p, const Matrix& a1m, const Vector& a2p,
                             const Vector& a2m);
double jump_average_residual(const Matrix& a1p, const Matrix& a1m, const Matrix& a2p,
                             const Matrix& a2m);

/// Nodal samples of a comps-valued field on a uniform grid over a box;
/// dim is 2 (surface, in-plane coordinates) or 3 (bulk).
struct FieldSample {
    int dim = 3;
    std::array<int, 3> size{5, 5, 5}; // size[2] ignored when dim == 2
    double h = 0.1;
    int comps = 1;
    std::vector<double> data; // node-major, comps fastest

    int nodes() const { return dim == 3 ? size[0] * size[1] * size[2] : size[0] * size[1]; }
    int index(int i, int j, int k) const {
        return dim == 3 ? (i * size[1] + j) * size[2] + k : i * size[1] + j;
    }
    double& at(int i, int j, int k, int c) { return data[index(i, j, k) * comps + c]; }
    double at(int i, int j, int k, int c) const { return data[index(i, j, k) * comps + c]; }

    void validate() const;
};

/// Samples f(x) on a dim-3 grid (x in physical coordinates, origin 0).
FieldSample sample_bulk(int npts, double h, int comps,
                        const std::function<Vector(const Eigen::Vector3d&)>& f);

/// Samples f(u, v) on a dim-2 surface grid.
FieldSample sample_surface(int npts, double h, int comps,
                           const std::function<Vector(double, double)>& f);

/// Central-difference spatial gradient: output has comps*dim components,
/// derivative index fastest. Boundary nodes carry one-sided differences of
/// the same order and are excluded from interior norms.
FieldSample gradient(const FieldSample& f);

/// Surface gradient grad_Sigma a = grad a (I - m (x) m), assembled from
/// in-plane derivatives of a dim-2 field: comps x 3 output per node.
FieldSample surface_gradient(const FieldSample& f, const SurfaceFrame& frame);

/// Max norm over interior nodes (central-difference region).
double interior_max_norm(const FieldSample& f);

struct BulkBalanceResiduals {
    FieldSample force;    // Div P + b
    FieldSample micro;    // Div S - z + beta
    FieldSample moment;   // skw(P) - 1/2 e(A* z)
    double force_norm = 0.0;
    double micro_norm = 0.0;
    double moment_norm = 0.0;
};

/// Pointwise bulk balances with constant A (k x 3): P (9 comps), b (3),
/// S (3k comps, kx3 row-major), z (k), beta (k).
BulkBalanceResiduals bulk_balance_residual(const FieldSample& P, const FieldSample& b,
                                           const FieldSample& S, const FieldSample& z,
                                           const FieldSample& beta, const Matrix& A_const);

struct SurfaceBalanceResiduals {
    FieldSample force;    // Div_Sigma T + [P]m
    FieldSample micro;    // Div_Sigma S_surf - z_surf + [S]m
    FieldSample moment;   // skw(T Pi) - 1/2 e(A* z_surf)
    double force_norm = 0.0;
    double micro_norm = 0.0;
    double moment_norm = 0.0;
};

/// Pointwise surface balances on a planar Sigma: surface fields live on a
/// dim-2 grid; P/S traces are one-sided bulk values on the same grid.
SurfaceBalanceResiduals surface_balance_residual(
    const FieldSample& T_surf, const FieldSample& S_surf, const FieldSample& z_surf,
    const FieldSample& P_plus, const FieldSample& P_minus, const FieldSample& S_plus,
    const FieldSample& S_minus, const SurfaceFrame& frame, const Matrix& A_const);

} // namespace memorium
