#ifndef OAP_OAP_HPP
#define OAP_OAP_HPP

// Orthogonally accumulated projection (OAP) solvers.
//
// A cycle builds orthonormal directions v_1, v_2, ... with a Lanczos-type
// reduction and, alongside, the scalars c_k = x'v_k of the unknown solution x
// of A x = rhs. Since A'u_k is expanded in v's by the recurrence, multiplying
// it by x turns rhs'u_k into the next c. The approximation accumulates as
// x_k = c_1 v_1 + ... + c_k v_k. In floating point the v's drift out of
// orthogonality; the cycle stops when the new direction is no longer
// orthogonal to x_k, and the restarted driver resumes on the residual
// equation A e = r.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <type_traits>
#include <vector>

#include "oap/lanczos.hpp"
#include "oap/linear_operator.hpp"

namespace oap {

enum class Variant { roap2, roap3 };  // bidiagonal / tridiagonal kernel

/// Which right-hand side a restarted cycle projects.
///   cycle_residual: the cycle solves A e = r with c_1 = r'r/|A'r| and r'u_k.
///   original_b:     keeps b in c_1 and in b'u_k, as the printed listing does.
enum class RhsMode { cycle_residual, original_b };

enum class Termination { converged, max_restarts, stagnation };

enum class StopCause { orthogonality, breakdown, exhausted, divergence };

inline std::string_view to_string(Variant v) { return v == Variant::roap2 ? "roap2" : "roap3"; }

inline std::string_view to_string(RhsMode m) {
    return m == RhsMode::cycle_residual ? "cycle-residual" : "original-b";
}

inline std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::max_restarts: return "max-restarts";
        case Termination::stagnation: return "stagnation";
    }
    return "?";
}

inline std::string_view to_string(StopCause c) {
    switch (c) {
        case StopCause::orthogonality: return "orthogonality";
        case StopCause::breakdown: return "breakdown";
        case StopCause::exhausted: return "exhausted";
        case StopCause::divergence: return "divergence";
    }
    return "?";
}

/// Solver parameters. Zero for max_inner / max_restarts means "n - 1" / "n".
struct SolveOptions {
    double tol = 1e-6;
    double orth_tol = 1e-8;
    double break_tol = default_break_tolerance;
    std::size_t max_restarts = 0;
    std::size_t max_inner = 0;
    RhsMode rhs_mode = RhsMode::cycle_residual;
    // A cycle is abandoned (keeping its best iterate) once the residual of
    // its running iterate exceeds this multiple of the cycle's rhs norm.
    double divergence_factor = 1e6;
    // Test-only: keep full bases and re-orthogonalize every new vector.
    bool reorthogonalize = false;

    void validate() const {
        if (!(tol > 0)) throw std::invalid_argument("SolveOptions: tol must be positive");
        if (!(orth_tol > 0 && orth_tol < 1)) throw std::invalid_argument("SolveOptions: orth_tol must lie in (0,1)");
        if (!(break_tol > 0)) throw std::invalid_argument("SolveOptions: break_tol must be positive");
        if (!(divergence_factor > 1)) throw std::invalid_argument("SolveOptions: divergence_factor must exceed 1");
    }
};

template <typename Scalar>
struct SolveReport {
    Termination termination = Termination::max_restarts;
    std::size_t restarts = 0;
    std::vector<std::size_t> inner_iterations;
    std::vector<StopCause> cycle_stops;
    Scalar final_relres{0};
    std::vector<Scalar> residual_history;  // relative residual after each cycle
    std::size_t breakdown_events = 0;

    std::size_t total_inner() const {
        std::size_t s = 0;
        for (auto k : inner_iterations) s += k;
        return s;
    }
};

/// Unit start vector together with its known coefficient c1 = x'v1.
template <typename Scalar>
struct Seed {
    Vector<Scalar> v1;
    Scalar c1{0};
};

/// v1 = t A'w with t = 1/|A'w|, c1 = t rhs'w.
template <typename Scalar>
Seed<Scalar> init_from_vector(const LinearOperator<Scalar>& A, const Vector<Scalar>& rhs, const Vector<Scalar>& w,
                              Scalar tau_break = Scalar(default_break_tolerance)) {
    detail::require(rhs.size() == A.rows() && w.size() == A.rows(), "init_from_vector: rhs/w do not conform");
    Vector<Scalar> atw = apply_transpose(A, w);
    const Scalar norm = atw.norm();
    if (!(norm > tau_break * A.frobenius_norm() * w.norm())) throw DegenerateSeed("init_from_vector: A'w vanishes");
    const Scalar t = Scalar(1) / norm;
    return {t * atw, t * rhs.dot(w)};
}

/// v1 = A_i' / |A_i|, c1 = rhs_i / |A_i|.
template <typename Scalar>
Seed<Scalar> init_from_row(const LinearOperator<Scalar>& A, const Vector<Scalar>& rhs, Index i) {
    detail::require(rhs.size() == A.rows(), "init_from_row: rhs does not conform");
    Vector<Scalar> a = row(A, i);
    const Scalar norm = a.norm();
    if (!(norm > Scalar(0))) throw DegenerateSeed("init_from_row: row " + std::to_string(i) + " is zero");
    return {a / norm, rhs(i) / norm};
}

/// c_{k+1} = (b'u_k - alpha_k c_k - gamma_{k-1} c_{k-1}) / beta_k
template <typename Scalar>
constexpr Scalar c_update_tridiag(Scalar b_dot_u, Scalar alpha, Scalar beta, Scalar gamma_prev, Scalar c_curr,
                                  Scalar c_prev) {
    return (b_dot_u - alpha * c_curr - gamma_prev * c_prev) / beta;
}

/// c_{k+1} = (b'u_k - alpha_k c_k) / beta_k
template <typename Scalar>
constexpr Scalar c_update_bidiag(Scalar b_dot_u, Scalar alpha, Scalar beta, Scalar c_curr) {
    return (b_dot_u - alpha * c_curr) / beta;
}

/// Cosine of the angle between x_k and v_{k+1}; zero when x_k = 0.
template <typename Scalar>
Scalar orthogonality_cosine(const Vector<Scalar>& x, const Vector<Scalar>& v_next) {
    const Scalar nx = x.norm();
    if (!(nx > Scalar(0))) return Scalar(0);
    return std::abs(dot(x, v_next)) / nx;
}

/// True iff |cos(x_k, v_{k+1})| > orth_tol, i.e. v_{k+1} has visibly left
/// the orthogonal complement of the accumulated approximation.
template <typename Scalar>
bool orthogonality_lost(const Vector<Scalar>& x, const Vector<Scalar>& v_next, Scalar orth_tol) {
    return orthogonality_cosine(x, v_next) > orth_tol;
}

/// Observed right before an update x_{k+1} = x_k + c_{k+1} v_{k+1} is applied.
template <typename Scalar>
struct AcceptedStep {
    std::size_t k;
    Scalar c_next;
    Scalar cosine;
    const Vector<Scalar>& x_before;
    const Vector<Scalar>& v_next;
};

template <typename Scalar>
using StepObserver = std::function<void(const AcceptedStep<Scalar>&)>;

template <typename Scalar>
struct CycleResult {
    Vector<Scalar> x;
    std::size_t inner_steps = 0;
    StopCause stop = StopCause::exhausted;
};

namespace detail {

template <typename Scalar>
CycleResult<Scalar> oap_cycle(const LinearOperator<Scalar>& A, const Vector<Scalar>& rhs, KrylovState<Scalar> s,
                              Scalar c1, const SolveOptions& opts, const StepObserver<Scalar>& observer) {
    opts.validate();
    const Index n = A.rows();
    require(A.cols() == n, "OAP cycle: operator must be square");
    require(rhs.size() == n && s.v_curr.size() == n, "OAP cycle: vectors do not conform");
    const bool tri = s.mode == Mode::tridiagonal;
    const Scalar tau_break = static_cast<Scalar>(opts.break_tol);
    const Scalar orth_tol = static_cast<Scalar>(opts.orth_tol);
    const Scalar threshold = tau_break * A.frobenius_norm();
    const std::size_t max_inner =
        opts.max_inner > 0 ? opts.max_inner : static_cast<std::size_t>(std::max<Index>(n - 1, 1));

    std::optional<FullBasis<Scalar>> V;
    std::optional<FullBasis<Scalar>> U;
    std::vector<Scalar> c_all;
    if (opts.reorthogonalize) {
        V.emplace(n, static_cast<Index>(max_inner) + 1);
        U.emplace(n, static_cast<Index>(max_inner) + 1);
        V->append(s.v_curr);
        if (tri) U->append(s.u_curr);
        c_all.push_back(c1);
    }

    CycleResult<Scalar> res;
    res.x = c1 * s.v_curr;
    Scalar c_prev{0};
    Scalar c_curr = c1;

    // A x_k tracked through the A v_k each step computes anyway.
    Vector<Scalar> ax = Vector<Scalar>::Zero(n);
    const Scalar rhs_norm = rhs.norm();
    Scalar best_residual = std::numeric_limits<Scalar>::infinity();
    Vector<Scalar> best_x = res.x;

    for (std::size_t k = 1; k <= max_inner; ++k) {
        StepOutcome<Scalar> out = step(A, s, tau_break);
        res.inner_steps = k;

        ax += c_curr * out.av;
        const Scalar residual = (rhs - ax).norm();
        if (!std::isfinite(residual) || residual > static_cast<Scalar>(opts.divergence_factor) * rhs_norm) {
            res.x = std::move(best_x);
            res.stop = StopCause::divergence;
            return res;
        }
        if (residual < best_residual) {
            best_residual = residual;
            best_x = res.x;
        }

        Vector<Scalar> removed;
        if (V) {
            removed = reorthogonalize(out, s.mode, *V, *U, threshold);
        }
        if (v_broke(out.breakdown)) {
            res.stop = StopCause::breakdown;
            return res;
        }

        // In bidiagonal mode out.next_u is u_k; in tridiagonal mode u_k is the current one.
        const Vector<Scalar>& u_k = tri ? s.u_curr : out.next_u;
        Scalar c_next = tri ? c_update_tridiag(rhs.dot(u_k), out.alpha, out.beta, s.gamma_prev, c_curr, c_prev)
                            : c_update_bidiag(rhs.dot(u_k), out.alpha, out.beta, c_curr);
        if (V) {
            // x'q lost the projections removed by re-orthogonalization.
            Scalar correction{0};
            for (Index j = 0; j < removed.size(); ++j) correction += removed(j) * c_all[static_cast<std::size_t>(j)];
            c_next -= correction / out.beta;
        }
        if (!std::isfinite(c_next)) throw NumericalOverflow(k, "non-finite projection coefficient");

        const Scalar cosine = orthogonality_cosine(res.x, out.next_v);
        if (cosine > orth_tol) {
            res.stop = StopCause::orthogonality;
            return res;
        }
        if (observer) observer(AcceptedStep<Scalar>{k, c_next, cosine, res.x, out.next_v});
        res.x += c_next * out.next_v;

        if (u_broke(out.breakdown)) {
            res.stop = StopCause::breakdown;
            return res;
        }
        if (V) {
            V->append(out.next_v);
            U->append(out.next_u);
            c_all.push_back(c_next);
        }
        advance(s, std::move(out));
        c_prev = c_curr;
        c_curr = c_next;
    }
    res.stop = StopCause::exhausted;
    return res;
}

}  // namespace detail

/// One OAP cycle on the tridiagonal kernel from unit v1, u1 with c1 = x'v1.
template <typename Scalar>
CycleResult<Scalar> oap_cycle_tridiag(const LinearOperator<Scalar>& A, const Vector<Scalar>& rhs,
                                      const Vector<Scalar>& v1, const Vector<Scalar>& u1, Scalar c1,
                                      const SolveOptions& opts = {},
                                      const std::type_identity_t<StepObserver<Scalar>>& observer = {}) {
    return detail::oap_cycle(A, rhs, start_tridiagonal(v1, u1), c1, opts, observer);
}

/// One OAP cycle on the bidiagonal kernel; needs no u1.
template <typename Scalar>
CycleResult<Scalar> oap_cycle_bidiag(const LinearOperator<Scalar>& A, const Vector<Scalar>& rhs,
                                     const Vector<Scalar>& v1, Scalar c1, const SolveOptions& opts = {},
                                     const std::type_identity_t<StepObserver<Scalar>>& observer = {}) {
    return detail::oap_cycle(A, rhs, start_bidiagonal(v1), c1, opts, observer);
}

template <typename Scalar>
struct SolveResult {
    Vector<Scalar> x;
    SolveReport<Scalar> report;
};

/// Restarted OAP (ROAP2 on the bidiagonal kernel, ROAP3 on the tridiagonal
/// one). Each restart seeds v1 = A'r/|A'r| from the current residual r
/// (u1 = v1 for ROAP3), runs one cycle and adds its result to x.
///
/// Stops when |b - Ax|/|b| <= tol, after max_restarts cycles, or with
/// `stagnation` when three consecutive cycles move x by no more than 1e-12 |x|
/// or A'r vanishes.
template <typename Scalar>
SolveResult<Scalar> roap_solve(const LinearOperator<Scalar>& A, const Vector<Scalar>& b, Variant variant,
                               const SolveOptions& opts = {}) {
    opts.validate();
    const Index n = A.rows();
    detail::require(A.cols() == n, "roap_solve: operator must be square");
    detail::require(b.size() == n, "roap_solve: length(b) != n");

    SolveResult<Scalar> out;
    out.x = Vector<Scalar>::Zero(n);
    auto& rep = out.report;
    const Scalar b_norm = b.norm();
    if (!(b_norm > Scalar(0))) {
        rep.termination = Termination::converged;
        rep.final_relres = Scalar(0);
        return out;
    }

    const std::size_t max_restarts = opts.max_restarts > 0 ? opts.max_restarts : static_cast<std::size_t>(n);
    const Scalar tol = static_cast<Scalar>(opts.tol);
    constexpr Scalar negligible_step = Scalar(1e-12);
    constexpr std::size_t stagnation_window = 3;

    Vector<Scalar> r = b;
    Scalar relres = Scalar(1);
    std::size_t idle_cycles = 0;
    for (;;) {
        if (relres <= tol) {
            rep.termination = Termination::converged;
            break;
        }
        if (rep.restarts >= max_restarts) {
            rep.termination = Termination::max_restarts;
            break;
        }

        const Vector<Scalar>& rhs = opts.rhs_mode == RhsMode::cycle_residual ? r : b;
        Seed<Scalar> seed;
        try {
            seed = init_from_vector(A, rhs, r, static_cast<Scalar>(opts.break_tol));
        } catch (const DegenerateSeed&) {
            rep.termination = Termination::stagnation;
            break;
        }

        CycleResult<Scalar> cycle = variant == Variant::roap3
                                        ? oap_cycle_tridiag(A, rhs, seed.v1, seed.v1, seed.c1, opts)
                                        : oap_cycle_bidiag(A, rhs, seed.v1, seed.c1, opts);
        out.x += cycle.x;
        r = b - apply(A, out.x);
        relres = r.norm() / b_norm;
        if (!std::isfinite(relres)) throw NumericalOverflow(rep.restarts + 1, "non-finite residual after restart");

        ++rep.restarts;
        rep.inner_iterations.push_back(cycle.inner_steps);
        rep.cycle_stops.push_back(cycle.stop);
        rep.residual_history.push_back(relres);
        if (cycle.stop == StopCause::breakdown) ++rep.breakdown_events;

        idle_cycles = cycle.x.norm() <= negligible_step * out.x.norm() ? idle_cycles + 1 : 0;
        if (idle_cycles >= stagnation_window && relres > tol) {
            rep.termination = Termination::stagnation;
            break;
        }
    }
    rep.final_relres = relres;
    return out;
}

}  // namespace oap

#endif  // OAP_OAP_HPP
