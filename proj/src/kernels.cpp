#include "memorium/kernels.hpp"

#include <cmath>
#include <limits>

namespace memorium {

double exp_int0(double tau, double D) {
    return tau * (-std::expm1(-D / tau));
}

double exp_int1(double tau, double D) {
    double E = std::exp(-D / tau);
    return tau * tau * (-std::expm1(-D / tau)) - tau * D * E;
}

double exp_int2(double tau, double D) {
    double E = std::exp(-D / tau);
    return 2.0 * tau * tau * tau * (-std::expm1(-D / tau)) - E * (2.0 * tau * tau * D + tau * D * D);
}

Matrix PronyKernel::at(double s) const {
    if (s < 0.0) throw DomainError("kernel evaluated at negative lag");
    Matrix G = G_inf;
    for (const auto& t : terms) G += std::exp(-s / t.tau) * t.C;
    return G;
}

Matrix PronyKernel::deriv_at(double s) const {
    if (s < 0.0) throw DomainError("kernel derivative evaluated at negative lag");
    Matrix G = Matrix::Zero(G_inf.rows(), G_inf.cols());
    for (const auto& t : terms) G -= (std::exp(-s / t.tau) / t.tau) * t.C;
    return G;
}

Matrix PronyKernel::at_zero() const {
    Matrix G = G_inf;
    for (const auto& t : terms) G += t.C;
    return G;
}

void PronyKernel::validate() const {
    if (G_inf.rows() != G_inf.cols() || G_inf.rows() < 1)
        throw ShapeError("kernel: G_inf must be square and nonempty");
    for (const auto& t : terms) {
        if (!(t.tau > 0.0) || !std::isfinite(t.tau))
            throw ConfigError("kernel: relaxation times must be positive and finite");
        if (t.C.rows() != G_inf.rows() || t.C.cols() != G_inf.cols())
            throw ShapeError("kernel: term matrix dimensions must match G_inf");
    }
}

namespace {

bool is_symmetric(const Matrix& A, double tol) {
    return (A - A.transpose()).lpNorm<Eigen::Infinity>() <= tol * (1.0 + A.lpNorm<Eigen::Infinity>());
}

} // namespace

void MaterialModel::validate() const {
    kernel.validate();
    if (kernel.dim() != space.dim)
        throw ShapeError("model: kernel dimension does not match state space");
    if (require_symmetric) {
        if (!is_symmetric(kernel.G_inf, 1e-12))
            throw ConfigError("model: require_symmetric set but G_inf is not symmetric");
        for (const auto& t : kernel.terms)
            if (!is_symmetric(t.C, 1e-12))
                throw ConfigError("model: require_symmetric set but a Prony term is not symmetric");
    }
}

double MaterialModel::max_tau() const {
    double m = 0.0;
    for (const auto& t : kernel.terms) m = std::max(m, t.tau);
    return m > 0.0 ? m : 1.0;
}

double MaterialModel::min_tau() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : kernel.terms) m = std::min(m, t.tau);
    return std::isfinite(m) ? m : 1.0;
}

void SurfaceModel::validate() const {
    material().validate();
    if (std::abs(normal.norm() - 1.0) > 1e-12)
        throw ConfigError("surface model: normal must be a unit vector");
}

Matrix eval_G(const MaterialModel& M, double s) { return M.kernel.at(s); }

Matrix eval_Gdot(const MaterialModel& M, double s) { return M.kernel.deriv_at(s); }

Matrix eval_G_block(const MaterialModel& M, double s, int A, int B) {
    const auto& blocks = M.space.blocks;
    if (A < 0 || B < 0 || A >= static_cast<int>(blocks.size())
        || B >= static_cast<int>(blocks.size()))
        throw ShapeError("eval_G_block: block index out of range");
    const BlockSpan& ra = blocks[A];
    const BlockSpan& cb = blocks[B];
    return M.kernel.at(s).block(ra.offset, cb.offset, ra.size, cb.size);
}

double tail_integral_abs(const MaterialModel& M, double p) {
    if (p < 0.0) throw DomainError("tail_integral_abs: p must be nonnegative");
    double b = 0.0;
    for (const auto& t : M.kernel.terms) b += t.C.norm() * std::exp(-p / t.tau);
    return b;
}

double tail_integral_abs_rows(const MaterialModel& M, double p, const BlockSpan& rows) {
    if (p < 0.0) throw DomainError("tail_integral_abs_rows: p must be nonnegative");
    double b = 0.0;
    for (const auto& t : M.kernel.terms)
        b += t.C.middleRows(rows.offset, rows.size).norm() * std::exp(-p / t.tau);
    return b;
}

double tail_integral_abs_blocks(const MaterialModel& M, double p) {
    double b = 0.0;
    for (const auto& blk : M.space.blocks) b += tail_integral_abs_rows(M, p, blk);
    return b;
}

} // namespace memorium
