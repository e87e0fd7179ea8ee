#ifndef OAP_LANCZOS_HPP
#define OAP_LANCZOS_HPP

// Short-recurrence reductions of a square operator A:
//
//   two-sided tridiagonalization   U'AV = T,  T tridiagonal with
//     diagonal alpha, superdiagonal beta, subdiagonal gamma;
//   bidiagonalization              U'AV = B,  B upper bidiagonal with
//     diagonal alpha, superdiagonal beta.
//
// Each step touches A exactly twice (A v and A' u) and needs only the
// previous pair of basis vectors. The step engines below keep that two-vector
// window; the tridiagonalize / bidiagonalize drivers retain full bases and
// exist for testing.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "oap/linear_operator.hpp"

namespace oap {

inline constexpr double default_break_tolerance = 1e-13;

enum class Mode { tridiagonal, bidiagonal };

/// Which side of the recurrence collapsed. `both` arises e.g. for A = I.
enum class Breakdown { none, u_side, v_side, both };

inline bool u_broke(Breakdown b) noexcept { return b == Breakdown::u_side || b == Breakdown::both; }
inline bool v_broke(Breakdown b) noexcept { return b == Breakdown::v_side || b == Breakdown::both; }

inline Breakdown make_breakdown(bool u_side, bool v_side) noexcept {
    if (u_side && v_side) return Breakdown::both;
    if (u_side) return Breakdown::u_side;
    if (v_side) return Breakdown::v_side;
    return Breakdown::none;
}

/// Entries of T. `gammas` stays empty in bidiagonal mode.
template <typename Scalar>
struct RecurrenceCoefficients {
    std::vector<Scalar> alphas;
    std::vector<Scalar> betas;
    std::vector<Scalar> gammas;
};

/// Rolling window of the reduction at the start of step k.
///
/// Tridiagonal mode: v_curr = v_k, u_curr = u_k.
/// Bidiagonal mode:  v_curr = v_k, u_curr = u_{k-1} (u_k is produced by step k).
/// beta_prev / gamma_prev hold beta_{k-1} / gamma_{k-1}, zero at k = 1.
template <typename Scalar>
struct KrylovState {
    Mode mode = Mode::tridiagonal;
    std::size_t k = 1;
    Vector<Scalar> v_prev;
    Vector<Scalar> v_curr;
    Vector<Scalar> u_prev;
    Vector<Scalar> u_curr;
    Scalar beta_prev{0};
    Scalar gamma_prev{0};
};

template <typename Scalar>
KrylovState<Scalar> start_tridiagonal(const Vector<Scalar>& v1, const Vector<Scalar>& u1) {
    detail::require(v1.size() == u1.size(), "start_tridiagonal: v1 and u1 differ in length");
    KrylovState<Scalar> s;
    s.mode = Mode::tridiagonal;
    s.v_prev = Vector<Scalar>::Zero(v1.size());
    s.v_curr = v1;
    s.u_prev = Vector<Scalar>::Zero(u1.size());
    s.u_curr = u1;
    return s;
}

template <typename Scalar>
KrylovState<Scalar> start_bidiagonal(const Vector<Scalar>& v1) {
    KrylovState<Scalar> s;
    s.mode = Mode::bidiagonal;
    s.v_prev = Vector<Scalar>::Zero(v1.size());
    s.v_curr = v1;
    s.u_prev = Vector<Scalar>::Zero(v1.size());
    s.u_curr = Vector<Scalar>::Zero(v1.size());
    return s;
}

/// Result of one step. A broken side has a zero next vector; its norm is
/// reported as computed, before thresholding.
template <typename Scalar>
struct StepOutcome {
    Vector<Scalar> next_v;  // v_{k+1}
    Vector<Scalar> next_u;  // u_{k+1} (tridiagonal) or u_k (bidiagonal)
    Vector<Scalar> av;      // A v_k, reused by the solvers
    Scalar alpha{0};
    Scalar beta{0};
    Scalar gamma{0};
    Breakdown breakdown = Breakdown::none;
};

namespace detail {

template <typename Scalar>
void check_finite(std::size_t k, Scalar alpha, Scalar beta, Scalar gamma) {
    using std::isfinite;
    if (!isfinite(alpha) || !isfinite(beta) || !isfinite(gamma))
        throw NumericalOverflow(k, "non-finite recurrence coefficient");
}

template <typename Scalar>
void check_state(const LinearOperator<Scalar>& A, const KrylovState<Scalar>& s, Mode mode, Scalar tau_break) {
    require(A.rows() == A.cols(), "Lanczos step: operator must be square");
    require(s.v_curr.size() == A.cols() && s.u_curr.size() == A.rows() && s.v_prev.size() == A.cols() &&
                s.u_prev.size() == A.rows(),
            "Lanczos step: state vectors do not conform to A");
    if (s.mode != mode) throw std::invalid_argument("Lanczos step: state is in the other mode");
    if (!(tau_break > Scalar(0))) throw std::invalid_argument("Lanczos step: tau_break must be positive");
}

}  // namespace detail

/// One step of the two-sided tridiagonalization:
///
///   alpha_k = u_k' A v_k
///   w       = A v_k  - alpha_k u_k - beta_{k-1}  u_{k-1},   gamma_k = |w|,  u_{k+1} = w / gamma_k
///   q       = A' u_k - alpha_k v_k - gamma_{k-1} v_{k-1},   beta_k  = |q|,  v_{k+1} = q / beta_k
///
/// A side breaks down when its norm is at most tau_break * |A|_F.
template <typename Scalar>
StepOutcome<Scalar> tridiag_step(const LinearOperator<Scalar>& A, const KrylovState<Scalar>& s,
                                 Scalar tau_break = Scalar(default_break_tolerance)) {
    detail::check_state(A, s, Mode::tridiagonal, tau_break);
    StepOutcome<Scalar> out;
    out.av = apply(A, s.v_curr);
    out.alpha = s.u_curr.dot(out.av);
    Vector<Scalar> w = out.av - out.alpha * s.u_curr - s.beta_prev * s.u_prev;
    out.gamma = w.norm();
    Vector<Scalar> q = apply_transpose(A, s.u_curr) - out.alpha * s.v_curr - s.gamma_prev * s.v_prev;
    out.beta = q.norm();
    detail::check_finite(s.k, out.alpha, out.beta, out.gamma);

    const Scalar threshold = tau_break * A.frobenius_norm();
    const bool u_side = out.gamma <= threshold;
    const bool v_side = out.beta <= threshold;
    out.next_u = u_side ? Vector<Scalar>::Zero(w.size()) : Vector<Scalar>(w / out.gamma);
    out.next_v = v_side ? Vector<Scalar>::Zero(q.size()) : Vector<Scalar>(q / out.beta);
    out.breakdown = make_breakdown(u_side, v_side);
    return out;
}

/// One step of the bidiagonalization:
///
///   w = A v_k  - beta_{k-1} u_{k-1},   alpha_k = |w|,  u_k     = w / alpha_k
///   q = A' u_k - alpha_k v_k,          beta_k  = |q|,  v_{k+1} = q / beta_k
///
/// `gamma` is left at zero. If the u side breaks down, u_k is zero and q
/// degenerates to -alpha_k v_k, which the threshold then flags as well.
template <typename Scalar>
StepOutcome<Scalar> bidiag_step(const LinearOperator<Scalar>& A, const KrylovState<Scalar>& s,
                                Scalar tau_break = Scalar(default_break_tolerance)) {
    detail::check_state(A, s, Mode::bidiagonal, tau_break);
    const Scalar threshold = tau_break * A.frobenius_norm();
    StepOutcome<Scalar> out;
    out.av = apply(A, s.v_curr);
    Vector<Scalar> w = out.av - s.beta_prev * s.u_curr;
    out.alpha = w.norm();
    const bool u_side = out.alpha <= threshold;
    out.next_u = u_side ? Vector<Scalar>::Zero(w.size()) : Vector<Scalar>(w / out.alpha);
    Vector<Scalar> q = apply_transpose(A, out.next_u) - out.alpha * s.v_curr;
    out.beta = q.norm();
    detail::check_finite(s.k, out.alpha, out.beta, out.gamma);

    const bool v_side = u_side || out.beta <= threshold;
    out.next_v = v_side ? Vector<Scalar>::Zero(q.size()) : Vector<Scalar>(q / out.beta);
    out.breakdown = make_breakdown(u_side, v_side);
    return out;
}

template <typename Scalar>
StepOutcome<Scalar> step(const LinearOperator<Scalar>& A, const KrylovState<Scalar>& s,
                         Scalar tau_break = Scalar(default_break_tolerance)) {
    return s.mode == Mode::tridiagonal ? tridiag_step(A, s, tau_break) : bidiag_step(A, s, tau_break);
}

/// Shifts the window by one step. Only valid for an outcome without breakdown.
template <typename Scalar>
void advance(KrylovState<Scalar>& s, StepOutcome<Scalar> out) {
    if (out.breakdown != Breakdown::none) throw std::logic_error("advance: cannot continue past a breakdown");
    s.v_prev = std::move(s.v_curr);
    s.v_curr = std::move(out.next_v);
    s.u_prev = std::move(s.u_curr);
    s.u_curr = std::move(out.next_u);
    s.beta_prev = out.beta;
    s.gamma_prev = out.gamma;
    ++s.k;
}

/// Growing set of orthonormal columns with a fixed capacity.
template <typename Scalar>
class FullBasis {
public:
    FullBasis(Index n, Index capacity) : columns_(n, capacity) {}

    Index size() const noexcept { return count_; }
    auto view() const { return columns_.leftCols(count_); }

    void append(const Vector<Scalar>& v) {
        if (count_ == columns_.cols()) columns_.conservativeResize(Eigen::NoChange, 2 * count_ + 1);
        columns_.col(count_++) = v;
    }

    /// Removes from `v` its components along the stored columns with two
    /// passes of classical Gram-Schmidt. Returns the total coefficients.
    Vector<Scalar> project_out_twice(Vector<Scalar>& v) const {
        Vector<Scalar> total = Vector<Scalar>::Zero(count_);
        if (count_ == 0) return total;
        for (int pass = 0; pass < 2; ++pass) {
            Vector<Scalar> h = view().transpose() * v;
            v -= view() * h;
            total += h;
        }
        return total;
    }

    Basis<Scalar> matrix() const { return view(); }

private:
    Basis<Scalar> columns_;
    Index count_ = 0;
};

/// Re-orthogonalizes a step outcome against full V and U bases, rescaling
/// beta (and gamma, or alpha in bidiagonal mode) so that the recurrences still
/// hold with the cleaned vectors. Returns the coefficients removed from the
/// unnormalized q = beta * v_{k+1}; callers that track x'v need them.
template <typename Scalar>
Vector<Scalar> reorthogonalize(StepOutcome<Scalar>& out, Mode mode, const FullBasis<Scalar>& V,
                               const FullBasis<Scalar>& U, Scalar threshold) {
    bool u_side = u_broke(out.breakdown);
    bool v_side = v_broke(out.breakdown);
    Vector<Scalar> removed = Vector<Scalar>::Zero(V.size());
    if (!u_side) {
        Scalar& norm = mode == Mode::tridiagonal ? out.gamma : out.alpha;
        U.project_out_twice(out.next_u);
        const Scalar rho = out.next_u.norm();
        norm *= rho;
        if (norm <= threshold) {
            u_side = true;
            out.next_u.setZero();
        } else {
            out.next_u /= rho;
        }
    }
    if (!v_side) {
        removed = V.project_out_twice(out.next_v) * out.beta;
        const Scalar rho = out.next_v.norm();
        out.beta *= rho;
        if (out.beta <= threshold) {
            v_side = true;
            out.next_v.setZero();
        } else {
            out.next_v /= rho;
        }
    }
    out.breakdown = make_breakdown(u_side, v_side);
    return removed;
}

/// Full-basis result of a reduction driver.
template <typename Scalar>
struct Reduction {
    RecurrenceCoefficients<Scalar> coeffs;
    Basis<Scalar> V;
    Basis<Scalar> U;
    std::optional<std::size_t> breakdown_step;
};

namespace detail {

template <typename Scalar>
Reduction<Scalar> reduce(const LinearOperator<Scalar>& A, KrylovState<Scalar> s, std::size_t steps,
                         bool reorthogonalize_bases, Scalar tau_break) {
    const Index n = A.rows();
    if (steps + 1 > static_cast<std::size_t>(n) && n > 0)
        throw std::invalid_argument("reduction driver: steps must not exceed n - 1");
    const Scalar threshold = tau_break * A.frobenius_norm();
    const bool tri = s.mode == Mode::tridiagonal;

    Reduction<Scalar> red;
    FullBasis<Scalar> V(n, static_cast<Index>(steps) + 1);
    FullBasis<Scalar> U(n, static_cast<Index>(steps) + 1);
    V.append(s.v_curr);
    if (tri) U.append(s.u_curr);

    for (std::size_t k = 1; k <= steps; ++k) {
        StepOutcome<Scalar> out = step(A, s, tau_break);
        if (reorthogonalize_bases) reorthogonalize(out, s.mode, V, U, threshold);
        red.coeffs.alphas.push_back(out.alpha);
        red.coeffs.betas.push_back(out.beta);
        if (tri) red.coeffs.gammas.push_back(out.gamma);
        if (!tri && !u_broke(out.breakdown)) U.append(out.next_u);
        if (out.breakdown != Breakdown::none) {
            red.breakdown_step = k;
            break;
        }
        V.append(out.next_v);
        if (tri) U.append(out.next_u);
        advance(s, std::move(out));
    }
    red.V = V.matrix();
    red.U = U.matrix();
    return red;
}

}  // namespace detail

/// Runs `steps` tridiagonalization steps from unit vectors v1, u1, keeping
/// every basis vector. With `reorthogonalize_bases`, each new vector is
/// projected against all earlier ones (twice) before normalization.
/// V and U get steps + 1 columns, or k columns when step k breaks down.
template <typename Scalar>
Reduction<Scalar> tridiagonalize(const LinearOperator<Scalar>& A, const Vector<Scalar>& v1,
                                 const Vector<Scalar>& u1, std::size_t steps, bool reorthogonalize_bases,
                                 Scalar tau_break = Scalar(default_break_tolerance)) {
    detail::require(v1.size() == A.cols() && u1.size() == A.rows(), "tridiagonalize: start vectors do not conform");
    return detail::reduce(A, start_tridiagonal(v1, u1), steps, reorthogonalize_bases, tau_break);
}

/// Bidiagonal counterpart. V gets steps + 1 columns and U gets steps
/// columns; on breakdown at step k, V keeps k columns and U keeps u_k if it
/// was valid.
template <typename Scalar>
Reduction<Scalar> bidiagonalize(const LinearOperator<Scalar>& A, const Vector<Scalar>& v1, std::size_t steps,
                                bool reorthogonalize_bases, Scalar tau_break = Scalar(default_break_tolerance)) {
    detail::require(v1.size() == A.cols(), "bidiagonalize: start vector does not conform");
    return detail::reduce(A, start_bidiagonal(v1), steps, reorthogonalize_bases, tau_break);
}

}  // namespace oap

#endif  // OAP_LANCZOS_HPP
