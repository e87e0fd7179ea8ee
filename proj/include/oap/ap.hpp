#ifndef OAP_AP_HPP
#define OAP_AP_HPP

// Accumulated projection (AP) baseline.
//
// The rows of A are split into contiguous blocks A_1..A_k. Starting from
// p_0 = alpha A'b (alpha = |b|^2/|A'b|^2, c_0 = alpha |b|^2 = x'p_0), each
// block replaces p by the orthogonal projection of the unknown x onto
// ran[p, A_i'], using only the known inner products l = [c, b_i] = W'x.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <type_traits>
#include <vector>

#include <Eigen/QR>

#include "oap/linear_operator.hpp"
#include "oap/oap.hpp"

namespace oap {

/// Contiguous row blocks [boundaries[i], boundaries[i+1]).
class BlockPartition {
public:
    explicit BlockPartition(std::vector<Index> boundaries) : boundaries_(std::move(boundaries)) {
        if (boundaries_.size() < 2 || boundaries_.front() != 0)
            throw std::invalid_argument("BlockPartition: boundaries must start at 0 and define a block");
        for (std::size_t i = 1; i < boundaries_.size(); ++i)
            if (boundaries_[i] <= boundaries_[i - 1])
                throw std::invalid_argument("BlockPartition: boundaries must be strictly increasing");
    }

    /// k blocks of n / k rows; the remainder goes to the last block.
    static BlockPartition even(Index nrows, Index blocks) {
        if (blocks < 1 || blocks > nrows) throw std::invalid_argument("BlockPartition::even: need 1 <= blocks <= nrows");
        const Index size = nrows / blocks;
        std::vector<Index> b;
        for (Index i = 0; i < blocks; ++i) b.push_back(i * size);
        b.push_back(nrows);
        return BlockPartition(std::move(b));
    }

    std::size_t blocks() const noexcept { return boundaries_.size() - 1; }
    Index begin(std::size_t i) const { return boundaries_.at(i); }
    Index size(std::size_t i) const { return boundaries_.at(i + 1) - boundaries_.at(i); }
    Index rows() const noexcept { return boundaries_.back(); }
    const std::vector<Index>& boundaries() const noexcept { return boundaries_; }

private:
    std::vector<Index> boundaries_;
};

/// Current projection p of x and its known inner product c = x'p.
template <typename Scalar>
struct ApState {
    Vector<Scalar> p;
    Scalar c{0};
};

template <typename Scalar>
ApState<Scalar> ap_init(const LinearOperator<Scalar>& A, const Vector<Scalar>& b) {
    detail::require(b.size() == A.rows(), "ap_init: length(b) != nrows(A)");
    Vector<Scalar> atb = apply_transpose(A, b);
    const Scalar atb2 = atb.squaredNorm();
    if (!(atb2 > Scalar(0))) throw DegenerateSeed("ap_init: A'b = 0, b is orthogonal to ran(A)");
    const Scalar b2 = b.squaredNorm();
    const Scalar alpha = b2 / atb2;
    return {alpha * atb, alpha * b2};
}

/// Projection of the unknown x onto ran(W) from l = W'x alone.
///
/// With a column-pivoted thin QR, W P = Q R, the first r columns of Q span
/// ran(W) (r counts |R_ii| > 1e-12 |W|_F). Then Q_r'x = y solves
/// R_r' y = (P'l)_r, p = Q_r y and c = x'p = |y|^2.
template <typename Scalar>
ApState<Scalar> project_onto(const Basis<Scalar>& W, const Vector<Scalar>& l) {
    detail::require(W.cols() == l.size(), "project_onto: l must have one entry per column of W");
    const Scalar threshold = Scalar(1e-12) * W.norm();
    Eigen::ColPivHouseholderQR<Basis<Scalar>> qr(W);
    const auto& R = qr.matrixR();
    const Index kmax = std::min(W.rows(), W.cols());
    Index rank = 0;
    while (rank < kmax && std::abs(R(rank, rank)) > threshold) ++rank;
    if (rank == 0) throw EmptySubspace("project_onto: every column was rank-filtered");

    Vector<Scalar> pl = qr.colsPermutation().transpose() * l;
    Vector<Scalar> y = R.topLeftCorner(rank, rank)
                           .template triangularView<Eigen::Upper>()
                           .transpose()
                           .solve(pl.head(rank));
    Basis<Scalar> Q = qr.householderQ() * Basis<Scalar>::Identity(W.rows(), rank);
    return {Q * y, y.squaredNorm()};
}

/// Observed after each block projection of a sweep.
template <typename Scalar>
using BlockObserver = std::function<void(std::size_t block, const ApState<Scalar>&)>;

/// One pass over all blocks: W = [p | A_i'], l = [c ; b_i].
template <typename Scalar>
ApState<Scalar> ap_sweep(const LinearOperator<Scalar>& A, const Vector<Scalar>& b, const BlockPartition& partition,
                         ApState<Scalar> s, const std::type_identity_t<BlockObserver<Scalar>>& observer = {}) {
    detail::require(partition.rows() == A.rows(), "ap_sweep: partition does not cover the rows of A");
    detail::require(b.size() == A.rows() && s.p.size() == A.cols(), "ap_sweep: vectors do not conform");
    for (std::size_t i = 0; i < partition.blocks(); ++i) {
        const Index first = partition.begin(i);
        const Index count = partition.size(i);
        Basis<Scalar> W(A.cols(), count + 1);
        W.col(0) = s.p;
        W.rightCols(count) = rows_as_columns(A, first, count);
        Vector<Scalar> l(count + 1);
        l(0) = s.c;
        l.tail(count) = b.segment(first, count);
        s = project_onto(W, l);
        if (observer) observer(i, s);
    }
    return s;
}

/// Runs at least one sweep and repeats until |b - Ap|/|b| <= tol or max_sweeps is reached.
/// In the report, restarts counts sweeps and inner_iterations the blocks of
/// each sweep.
template <typename Scalar>
SolveResult<Scalar> ap_solve(const LinearOperator<Scalar>& A, const Vector<Scalar>& b,
                             const BlockPartition& partition, double tol, std::size_t max_sweeps) {
    detail::require(A.rows() == A.cols(), "ap_solve: operator must be square");
    SolveResult<Scalar> out;
    auto& rep = out.report;
    const Scalar b_norm = b.norm();
    if (!(b_norm > Scalar(0))) {
        out.x = Vector<Scalar>::Zero(A.cols());
        rep.termination = Termination::converged;
        return out;
    }
    ApState<Scalar> s = ap_init(A, b);
    Scalar relres{0};
    do {
        s = ap_sweep(A, b, partition, std::move(s));
        relres = (b - apply(A, s.p)).norm() / b_norm;
        ++rep.restarts;
        rep.inner_iterations.push_back(partition.blocks());
        rep.residual_history.push_back(relres);
    } while (relres > static_cast<Scalar>(tol) && rep.restarts < max_sweeps);
    rep.termination = relres <= static_cast<Scalar>(tol) ? Termination::converged : Termination::max_restarts;
    rep.final_relres = relres;
    out.x = std::move(s.p);
    return out;
}

}  // namespace oap

#endif  // OAP_AP_HPP
