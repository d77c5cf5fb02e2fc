#pragma once

#include <vector>

#include <Eigen/Dense>

#include "memorium/errors.hpp"

namespace memorium {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Block layout of the flattened instantaneous state X = (W, nu, N).
///
/// W is 3x3 (displacement gradient), nu in R^k (morphological descriptor),
/// N is kx3 (descriptor gradient). Row-major flattening, blocks in that
/// order, so n = 9 + 4k. The same layout serves the dual side
/// (sigma, z, S) and the surface side (W_surf, nu, N_surf).
struct BlockLayout {
    int k = 1;

    explicit BlockLayout(int k_ = 1) : k(k_) {
        if (k < 1) throw ShapeError("BlockLayout: k must be >= 1");
    }

    int n() const { return 9 + 4 * k; }

    int w_offset() const { return 0; }
    int w_size() const { return 9; }
    int nu_offset() const { return 9; }
    int nu_size() const { return k; }
    int grad_offset() const { return 9 + k; }
    int grad_size() const { return 3 * k; }

    bool operator==(const BlockLayout& o) const { return k == o.k; }
    bool operator!=(const BlockLayout& o) const { return k != o.k; }
};

/// Contiguous block span inside a flat state vector.
struct BlockSpan {
    int offset;
    int size;
    bool operator==(const BlockSpan& o) const { return offset == o.offset && size == o.size; }
};

/// Dimension plus block decomposition shared by histories, kernels and the
/// metric. The full complex-body state uses the three-block 9+4k layout;
/// reduced toy spaces (scalar kernels in tests and scenarios) use a single
/// block covering everything.
struct Space {
    int dim = 1;
    std::vector<BlockSpan> blocks;

    static Space flat(int n) {
        if (n < 1) throw ShapeError("Space::flat: dimension must be >= 1");
        Space s;
        s.dim = n;
        s.blocks = {BlockSpan{0, n}};
        return s;
    }

    static Space blocked(const BlockLayout& l) {
        Space s;
        s.dim = l.n();
        s.blocks = {BlockSpan{l.w_offset(), l.w_size()},
                    BlockSpan{l.nu_offset(), l.nu_size()},
                    BlockSpan{l.grad_offset(), l.grad_size()}};
        return s;
    }

    bool operator==(const Space& o) const { return dim == o.dim && blocks == o.blocks; }
    bool operator!=(const Space& o) const { return !(*this == o); }
};

/// Flattened instantaneous state. All entries nondimensional.
struct StateVector {
    BlockLayout layout;
    Vector data;

    StateVector(BlockLayout l, Vector d) : layout(l), data(std::move(d)) {
        if (data.size() != layout.n())
            throw ShapeError("StateVector: data length does not match layout");
    }

    static StateVector zero(BlockLayout l) { return StateVector(l, Vector::Zero(l.n())); }
};

/// Row-major flattening of (W, nu, N) into a StateVector.
StateVector pack(const BlockLayout& layout, const Matrix& W, const Vector& nu, const Matrix& N);

struct StateBlocks {
    Matrix W;  // 3x3
    Vector nu; // k
    Matrix N;  // kx3
};

StateBlocks unpack(const StateVector& X);
StateBlocks unpack(const BlockLayout& layout, const Vector& data);

/// Linearized strain: sym part of the W block.
Matrix sym_part(const StateVector& X);
Matrix sym_part(const BlockLayout& layout, const Vector& data);

/// Per-block Euclidean (Frobenius) magnitudes of a flat vector.
std::vector<double> block_norms(const Space& space, const Vector& data);

/// Sum of per-block magnitudes; the norm-like quantity the metric sums.
double block_norm_sum(const Space& space, const Vector& data);

} // namespace memorium
