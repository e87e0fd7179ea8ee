#ifndef OAP_LINEAR_OPERATOR_HPP
#define OAP_LINEAR_OPERATOR_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "oap/errors.hpp"

namespace oap {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Compressed sparse row storage with 0-based indices.
template <typename Scalar>
using CsrMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;

/// Row-major dense storage, so that apply streams rows.
template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Column-major dense matrix used for bases and projection blocks.
template <typename Scalar>
using Basis = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

inline void require(bool ok, const char* what) {
    if (!ok) throw DimensionError(what);
}

}  // namespace detail

/// Builds a CSR matrix from raw arrays, checking the storage invariants:
/// offsets start at 0, are non-decreasing and end at nnz; columns are
/// strictly increasing within a row and below ncols.
template <typename Scalar>
CsrMatrix<Scalar> make_csr(Index nrows, Index ncols, const std::vector<int>& row_offsets,
                           const std::vector<int>& col_indices, const std::vector<Scalar>& values) {
    if (nrows < 0 || ncols < 0) throw DimensionError("make_csr: negative dimension");
    if (static_cast<Index>(row_offsets.size()) != nrows + 1)
        throw DimensionError("make_csr: row_offsets must have nrows+1 entries");
    if (col_indices.size() != values.size())
        throw DimensionError("make_csr: col_indices and values differ in length");
    if (row_offsets.front() != 0 || row_offsets.back() != static_cast<int>(values.size()))
        throw DimensionError("make_csr: row_offsets must span [0, nnz]");

    std::vector<Eigen::Triplet<Scalar, int>> triplets;
    triplets.reserve(values.size());
    for (Index i = 0; i < nrows; ++i) {
        const int begin = row_offsets[i];
        const int end = row_offsets[i + 1];
        if (end < begin) throw DimensionError("make_csr: row_offsets decreasing at row " + std::to_string(i));
        for (int p = begin; p < end; ++p) {
            const int j = col_indices[p];
            if (j < 0 || j >= ncols)
                throw DimensionError("make_csr: column index out of range in row " + std::to_string(i));
            if (p > begin && col_indices[p - 1] >= j)
                throw DimensionError("make_csr: columns not strictly increasing in row " + std::to_string(i));
            triplets.emplace_back(static_cast<int>(i), j, values[p]);
        }
    }
    CsrMatrix<Scalar> m(nrows, ncols);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

/// An immutable matrix A, stored either as CSR or as row-major dense.
///
/// The Frobenius norm is computed once at construction; the Lanczos kernels
/// scale their breakdown thresholds by it.
template <typename Scalar>
class LinearOperator {
public:
    using Sparse = CsrMatrix<Scalar>;
    using Dense = DenseMatrix<Scalar>;

    explicit LinearOperator(Sparse m) : storage_(std::move(m)) {
        auto& s = std::get<Sparse>(storage_);
        s.makeCompressed();
        frobenius_ = s.norm();
    }

    explicit LinearOperator(Dense m) : storage_(std::move(m)) { frobenius_ = std::get<Dense>(storage_).norm(); }

    Index rows() const {
        return std::visit([](const auto& m) { return static_cast<Index>(m.rows()); }, storage_);
    }
    Index cols() const {
        return std::visit([](const auto& m) { return static_cast<Index>(m.cols()); }, storage_);
    }

    bool is_sparse() const noexcept { return std::holds_alternative<Sparse>(storage_); }
    const Sparse* sparse() const noexcept { return std::get_if<Sparse>(&storage_); }
    const Dense* dense() const noexcept { return std::get_if<Dense>(&storage_); }

    Scalar frobenius_norm() const noexcept { return frobenius_; }

    template <typename Visitor>
    decltype(auto) visit(Visitor&& f) const {
        return std::visit(std::forward<Visitor>(f), storage_);
    }

private:
    std::variant<Sparse, Dense> storage_;
    Scalar frobenius_{0};
};

/// y = A v
template <typename Scalar, typename Derived>
Vector<Scalar> apply(const LinearOperator<Scalar>& A, const Eigen::MatrixBase<Derived>& v) {
    detail::require(v.size() == A.cols(), "apply: length(v) != ncols(A)");
    return A.visit([&](const auto& m) -> Vector<Scalar> { return m * v; });
}

/// y = A' u, without forming A'. For CSR this scatters row by row.
template <typename Scalar, typename Derived>
Vector<Scalar> apply_transpose(const LinearOperator<Scalar>& A, const Eigen::MatrixBase<Derived>& u) {
    detail::require(u.size() == A.rows(), "apply_transpose: length(u) != nrows(A)");
    return A.visit([&](const auto& m) -> Vector<Scalar> { return m.transpose() * u; });
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar dot(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
    detail::require(u.size() == v.size(), "dot: length mismatch");
    return u.dot(v);
}

template <typename Derived>
typename Derived::Scalar norm2(const Eigen::MatrixBase<Derived>& v) {
    return v.norm();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
    return v.allFinite();
}

/// Row i of A as a column vector.
template <typename Scalar>
Vector<Scalar> row(const LinearOperator<Scalar>& A, Index i) {
    detail::require(i >= 0 && i < A.rows(), "row: index out of range");
    return A.visit([&](const auto& m) -> Vector<Scalar> { return m.row(i).transpose(); });
}

/// Rows [first, first+count) of A, transposed into the columns of a dense block.
template <typename Scalar>
Basis<Scalar> rows_as_columns(const LinearOperator<Scalar>& A, Index first, Index count) {
    detail::require(first >= 0 && count >= 0 && first + count <= A.rows(), "rows_as_columns: range out of bounds");
    return A.visit([&](const auto& m) -> Basis<Scalar> {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, CsrMatrix<Scalar>>) {
            return Basis<Scalar>(m.middleRows(first, count).transpose());
        } else {
            return m.middleRows(first, count).transpose();
        }
    });
}

template <typename Scalar>
DenseMatrix<Scalar> to_dense(const LinearOperator<Scalar>& A) {
    return A.visit([](const auto& m) -> DenseMatrix<Scalar> { return DenseMatrix<Scalar>(m); });
}

template <typename Scalar>
LinearOperator<Scalar> to_sparse_operator(const DenseMatrix<Scalar>& m) {
    CsrMatrix<Scalar> s = m.sparseView();
    return LinearOperator<Scalar>(std::move(s));
}

}  // namespace oap

#endif  // OAP_LINEAR_OPERATOR_HPP
