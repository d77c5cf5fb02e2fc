#include "memorium/statespace.hpp"

namespace memorium {

StateVector pack(const BlockLayout& layout, const Matrix& W, const Vector& nu, const Matrix& N) {
    if (W.rows() != 3 || W.cols() != 3)
        throw ShapeError("pack: W must be 3x3");
    if (nu.size() != layout.k)
        throw ShapeError("pack: nu must have length k");
    if (N.rows() != layout.k || N.cols() != 3)
        throw ShapeError("pack: N must be kx3");

    Vector data(layout.n());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            data[3 * i + j] = W(i, j);
    data.segment(layout.nu_offset(), layout.k) = nu;
    for (int i = 0; i < layout.k; ++i)
        for (int j = 0; j < 3; ++j)
            data[layout.grad_offset() + 3 * i + j] = N(i, j);
    return StateVector(layout, std::move(data));
}

StateBlocks unpack(const BlockLayout& layout, const Vector& data) {
    if (data.size() != layout.n())
        throw ShapeError("unpack: data length does not match layout");
    StateBlocks b;
    b.W.resize(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            b.W(i, j) = data[3 * i + j];
    b.nu = data.segment(layout.nu_offset(), layout.k);
    b.N.resize(layout.k, 3);
    for (int i = 0; i < layout.k; ++i)
        for (int j = 0; j < 3; ++j)
            b.N(i, j) = data[layout.grad_offset() + 3 * i + j];
    return b;
}

StateBlocks unpack(const StateVector& X) { return unpack(X.layout, X.data); }

Matrix sym_part(const BlockLayout& layout, const Vector& data) {
    Matrix W = unpack(layout, data).W;
    return 0.5 * (W + W.transpose());
}

Matrix sym_part(const StateVector& X) { return sym_part(X.layout, X.data); }

std::vector<double> block_norms(const Space& space, const Vector& data) {
    if (data.size() != space.dim)
        throw ShapeError("block_norms: data length does not match space");
    std::vector<double> r;
    r.reserve(space.blocks.size());
    for (const auto& b : space.blocks)
        r.push_back(data.segment(b.offset, b.size).norm());
    return r;
}

double block_norm_sum(const Space& space, const Vector& data) {
    double s = 0.0;
    for (double v : block_norms(space, data)) s += v;
    return s;
}

} // namespace memorium
