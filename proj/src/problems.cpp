#include "oap/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oap::problems {

std::string_view to_string(Family f) {
    switch (f) {
        case Family::convdiff2d: return "convdiff2d";
        case Family::poisson_lshape: return "poisson-lshape";
        case Family::tridiag_unsym: return "tridiag-unsym";
        case Family::random_dense: return "random-dense";
    }
    return "?";
}

std::optional<Family> parse_family(std::string_view s) {
    for (auto f : {Family::convdiff2d, Family::poisson_lshape, Family::tridiag_unsym, Family::random_dense})
        if (s == to_string(f)) return f;
    return std::nullopt;
}

namespace {

using Triplet = Eigen::Triplet<double, int>;

CsrMatrix<double> assemble(Index n, const std::vector<Triplet>& triplets) {
    CsrMatrix<double> m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

GeneratedProblem with_solution(LinearOperator<double> A, Vector<double> x, std::string label) {
    Vector<double> b = apply(A, x);
    return {std::move(A), std::move(b), std::move(x), std::move(label)};
}

GeneratedProblem with_rhs(LinearOperator<double> A, bool constructed, std::string label) {
    const Index n = A.rows();
    if (constructed) return with_solution(std::move(A), Vector<double>::Ones(n), std::move(label));
    return {std::move(A), Vector<double>::Ones(n), std::nullopt, std::move(label)};
}

}  // namespace

GeneratedProblem gen_convdiff2d(Index nx, Index ny, double p1, double p2, double p3, bool constructed) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("gen_convdiff2d: grid dimensions must be >= 2");
    const double hx = 1.0 / static_cast<double>(nx + 1);
    const double hy = 1.0 / static_cast<double>(ny + 1);
    const double diag = 2.0 / (hx * hx) + 2.0 / (hy * hy) + p3;
    const double west = -1.0 / (hx * hx) - p1 / (2.0 * hx);
    const double east = -1.0 / (hx * hx) + p1 / (2.0 * hx);
    const double south = -1.0 / (hy * hy) - p2 / (2.0 * hy);
    const double north = -1.0 / (hy * hy) + p2 / (2.0 * hy);

    const Index n = nx * ny;
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(5 * n));
    for (Index j = 0; j < ny; ++j) {
        for (Index i = 0; i < nx; ++i) {
            const int r = static_cast<int>(j * nx + i);
            if (j > 0) t.emplace_back(r, r - static_cast<int>(nx), south);
            if (i > 0) t.emplace_back(r, r - 1, west);
            t.emplace_back(r, r, diag);
            if (i + 1 < nx) t.emplace_back(r, r + 1, east);
            if (j + 1 < ny) t.emplace_back(r, r + static_cast<int>(nx), north);
        }
    }
    return with_rhs(LinearOperator<double>(assemble(n, t)), constructed, std::string(to_string(Family::convdiff2d)));
}

namespace {

// Grid node (i, j) at (i h, j h), h = 1/(2m), is interior to the L-shape iff
// it lies strictly inside the lower strip or strictly inside the left strip.
bool lshape_interior(Index i, Index j, Index m) {
    const Index full = 2 * m;
    const bool lower = i > 0 && i < full && j > 0 && j < m;
    const bool left = i > 0 && i < m && j > 0 && j < full;
    return lower || left;
}

}  // namespace

Index lshape_unknowns(Index m) { return (m - 1) * (3 * m - 1); }

Index lshape_parameter_for(Index target) {
    Index best = 3;
    for (Index m = 3; lshape_unknowns(m) <= 4 * std::max<Index>(target, 1) + 64; ++m)
        if (std::abs(lshape_unknowns(m) - target) < std::abs(lshape_unknowns(best) - target)) best = m;
    return best;
}

GeneratedProblem gen_poisson_lshape(Index m, bool constructed) {
    if (m < 3) throw std::invalid_argument("gen_poisson_lshape: m must be >= 3");
    const Index full = 2 * m;
    const double h = 1.0 / static_cast<double>(full);
    const double inv_h2 = 1.0 / (h * h);

    std::vector<int> index(static_cast<std::size_t>((full + 1) * (full + 1)), -1);
    auto at = [&](Index i, Index j) -> int& { return index[static_cast<std::size_t>(j * (full + 1) + i)]; };
    int n = 0;
    for (Index j = 1; j < full; ++j)
        for (Index i = 1; i < full; ++i)
            if (lshape_interior(i, j, m)) at(i, j) = n++;

    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(5 * n));
    for (Index j = 1; j < full; ++j) {
        for (Index i = 1; i < full; ++i) {
            const int r = at(i, j);
            if (r < 0) continue;
            for (const auto& [di, dj] : {std::pair{0, -1}, std::pair{-1, 0}, std::pair{1, 0}, std::pair{0, 1}}) {
                const int c = at(i + di, j + dj);
                if (c >= 0) t.emplace_back(r, c, -inv_h2);
            }
            t.emplace_back(r, r, 4.0 * inv_h2);
        }
    }
    return with_rhs(LinearOperator<double>(assemble(n, t)), constructed,
                    std::string(to_string(Family::poisson_lshape)));
}

Vector<double> sample_solution(Profile profile, Index n) {
    if (n < 1) throw std::invalid_argument("sample_solution: n must be >= 1");
    const double h = profile == Profile::exp1 ? 1.0 / static_cast<double>(n + 1) : 1.0 / static_cast<double>(n);
    const double rate = profile == Profile::exp1 ? 1.0 : 3.0;
    Vector<double> x(n);
    for (Index i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1) * h;
        x(i) = t * (1.0 - t) * std::exp(rate * t);
    }
    return x;
}

GeneratedProblem gen_tridiag_unsym(Index n, Profile profile) {
    if (n < 2) throw std::invalid_argument("gen_tridiag_unsym: n must be >= 2");
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(3 * n));
    for (Index i = 0; i < n; ++i) {
        const int r = static_cast<int>(i);
        if (i > 0) t.emplace_back(r, r - 1, -1.0);
        t.emplace_back(r, r, 2.0);
        if (i + 1 < n) t.emplace_back(r, r + 1, -1.1);
    }
    return with_solution(LinearOperator<double>(assemble(n, t)), sample_solution(profile, n),
                         std::string(to_string(Family::tridiag_unsym)));
}

GeneratedProblem gen_random_dense(Index n, std::uint64_t seed, Profile profile) {
    if (n < 1) throw std::invalid_argument("gen_random_dense: n must be >= 1");
    Pcg32 rng(seed);
    DenseMatrix<double> a(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) a(i, j) = rng.uniform_open();
    return with_solution(LinearOperator<double>(std::move(a)), sample_solution(profile, n),
                         std::string(to_string(Family::random_dense)));
}

GeneratedProblem generate(const ProblemSpec& spec) {
    switch (spec.family) {
        case Family::convdiff2d: return gen_convdiff2d(spec.nx, spec.ny, spec.p1, spec.p2, spec.p3, spec.constructed);
        case Family::poisson_lshape: return gen_poisson_lshape(spec.m, spec.constructed);
        case Family::tridiag_unsym: return gen_tridiag_unsym(spec.n, spec.profile);
        case Family::random_dense: return gen_random_dense(spec.n, spec.seed, spec.profile);
    }
    throw std::invalid_argument("generate: unknown family");
}

Pcg32::Pcg32(std::uint64_t seed, std::uint64_t stream) : state_(0), inc_((stream << 1u) | 1u) {
    (*this)();
    state_ += seed;
    (*this)();
}

std::uint32_t Pcg32::operator()() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

double Pcg32::uniform_open() {
    const std::uint64_t hi = (*this)() >> 5;  // 27 bits
    const std::uint64_t lo = (*this)() >> 6;  // 26 bits
    const double k = static_cast<double>((hi << 26) | lo);
    return (k + 0.5) / 9007199254740992.0;  // 2^53
}

}  // namespace oap::problems
