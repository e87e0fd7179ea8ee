#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "oap/problems.hpp"
#include "oracles.hpp"

using namespace oap;
using namespace oap::problems;

namespace {

oracle::Mat dense(const GeneratedProblem& p) { return to_dense(p.A); }

double asymmetry(const oracle::Mat& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

void check_constructed(const GeneratedProblem& p) {
    REQUIRE(p.x_true);
    CHECK((apply(p.A, *p.x_true) - p.b).norm() <= 1e-12 * p.b.norm());
}

}  // namespace

TEST_CASE("convdiff2d Laplacian on a 2x2 grid") {
    const auto p = gen_convdiff2d(2, 2, 0, 0, 0);
    const oracle::Mat a = dense(p);
    oracle::Mat ref(4, 4);
    ref << 36, -9, -9, 0,
           -9, 36, 0, -9,
           -9, 0, 36, -9,
           0, -9, -9, 36;
    CHECK((a - ref).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(asymmetry(a) == 0.0);
    CHECK(p.b == Vector<double>::Ones(4));
    CHECK_FALSE(p.x_true);
    CHECK(p.label == "convdiff2d");
}

TEST_CASE("convdiff2d structure") {
    const auto p = gen_convdiff2d(5, 4, 0, 0, 0);
    const oracle::Mat a = dense(p);
    CHECK(asymmetry(a) == 0.0);
    for (Index i = 0; i < a.rows(); ++i) {
        const double off = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
        CHECK(a(i, i) >= off - 1e-9);
    }
    // Irreducible: the adjacency graph of the stencil is connected.
    const Index n = a.rows();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Index> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const Index i = stack.back();
        stack.pop_back();
        for (Index j = 0; j < n; ++j)
            if (a(i, j) != 0 && !seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = true;
                stack.push_back(j);
            }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool s) { return s; }));
}

TEST_CASE("convdiff2d convection makes the operator unsymmetric") {
    const Index nx = 6;
    const double hx = 1.0 / (nx + 1);
    const auto p = gen_convdiff2d(nx, 5, 1, 0, 0);
    const oracle::Mat a = dense(p);
    for (Index j = 0; j < 5; ++j)
        for (Index i = 0; i + 1 < nx; ++i) {
            const Index r = j * nx + i;
            CHECK(a(r, r + 1) - a(r + 1, r) == doctest::Approx(2 * (1 / (2 * hx))));
        }
    const auto q = gen_convdiff2d(4, 3, 1, 2, 5);
    const oracle::Mat b = dense(q);
    const double hy = 1.0 / 4;
    CHECK(b(0, 0) == doctest::Approx(2 * 25.0 + 2 / (hy * hy) + 5));
    CHECK(b(0, 4) == doctest::Approx(-1 / (hy * hy) + 2 / (2 * hy)));
    CHECK(b(4, 0) == doctest::Approx(-1 / (hy * hy) - 2 / (2 * hy)));
}

TEST_CASE("constructed right-hand sides") {
    const auto c = gen_convdiff2d(5, 6, 1, 1, 0, true);
    check_constructed(c);
    CHECK(*c.x_true == Vector<double>::Ones(30));
    check_constructed(gen_poisson_lshape(4, true));
    check_constructed(gen_tridiag_unsym(50));
    check_constructed(gen_random_dense(40, 3));
}

TEST_CASE("poisson_lshape structure") {
    for (Index m : {3, 5, 9}) {
        const auto p = gen_poisson_lshape(m);
        const oracle::Mat a = dense(p);
        const double h = 1.0 / (2 * m);
        CHECK(a.rows() == lshape_unknowns(m));
        CHECK(asymmetry(a) == 0.0);
        CHECK((a.diagonal().array() - 4 / (h * h)).abs().maxCoeff() <= 1e-9);
        for (Index i = 0; i < a.rows(); ++i) {
            int count = 0;
            for (Index j = 0; j < a.cols(); ++j) {
                if (i == j || a(i, j) == 0) continue;
                ++count;
                CHECK(a(i, j) == doctest::Approx(-1 / (h * h)));
            }
            CHECK(count >= 1);
            CHECK(count <= 4);
        }
    }
    CHECK(lshape_unknowns(3) == 16);
}

TEST_CASE("poisson_lshape near 200 unknowns is positive definite") {
    const Index m = lshape_parameter_for(200);
    CHECK(m == 9);
    const auto p = gen_poisson_lshape(m);
    CHECK(p.A.rows() == 208);
    Eigen::SelfAdjointEigenSolver<oracle::Mat> eig(dense(p));
    CHECK(eig.eigenvalues().minCoeff() > 0);
    CHECK(lshape_parameter_for(500) == 14);
}

TEST_CASE("tridiag_unsym") {
    const auto p = gen_tridiag_unsym(3);
    oracle::Mat ref(3, 3);
    ref << 2, -1.1, 0, -1, 2, -1.1, 0, -1, 2;
    CHECK(dense(p) == ref);
    const oracle::Mat a = dense(gen_tridiag_unsym(8));
    const oracle::Mat d = a - a.transpose();
    for (Index i = 0; i < 8; ++i)
        for (Index j = 0; j < 8; ++j) {
            if (std::abs(i - j) == 1)
                CHECK(std::abs(d(i, j)) == doctest::Approx(0.1));
            else
                CHECK(d(i, j) == 0.0);
        }
    check_constructed(p);
    CHECK((*p.x_true - sample_solution(Profile::exp1, 3)).norm() == 0.0);
}

TEST_CASE("tridiag_unsym at n = 600 is ill-conditioned") {
    const auto p = gen_tridiag_unsym(600);
    CHECK(oracle::condition_number(dense(p)) > 1e12);
}

TEST_CASE("random_dense") {
    const auto a = gen_random_dense(300, 7);
    const auto b = gen_random_dense(300, 7);
    CHECK(*a.A.dense() == *b.A.dense());
    CHECK(a.b == b.b);
    const auto& m = *a.A.dense();
    CHECK(m.minCoeff() > 0.0);
    CHECK(m.maxCoeff() < 1.0);
    Eigen::FullPivLU<oracle::Mat> lu(m);
    CHECK(lu.isInvertible());
    CHECK(*gen_random_dense(30, 8).A.dense() != *gen_random_dense(30, 9).A.dense());
    CHECK((*a.x_true - sample_solution(Profile::exp3, 300)).norm() == 0.0);
}

TEST_CASE("Pcg32 reference stream") {
    // First outputs of the reference pcg32_srandom(42, 54) demo.
    Pcg32 rng(42, 54);
    const std::uint32_t expected[] = {0xa15c02b7, 0x7b47f409, 0xba1d3330, 0x83d2f293, 0xbfa4784b, 0xcbed606e};
    for (auto e : expected) CHECK(rng() == e);
}

TEST_CASE("sample_solution") {
    const auto x = sample_solution(Profile::exp1, 3);
    CHECK(x(1) == doctest::Approx(0.41218031767503205).epsilon(1e-15));
    CHECK(x(0) == doctest::Approx(0.25 * 0.75 * std::exp(0.25)).epsilon(1e-15));
    CHECK(x(2) == doctest::Approx(0.75 * 0.25 * std::exp(0.75)).epsilon(1e-15));
    const auto y = sample_solution(Profile::exp3, 4);
    CHECK(y(3) == 0.0);
    CHECK(y(1) == doctest::Approx(0.25 * std::exp(1.5)).epsilon(1e-15));
}

TEST_CASE("generate dispatches on the family") {
    ProblemSpec s;
    s.family = Family::tridiag_unsym;
    s.n = 12;
    CHECK(generate(s).A.rows() == 12);
    s.family = Family::poisson_lshape;
    s.m = 3;
    CHECK(generate(s).A.rows() == 16);
    CHECK(parse_family("random-dense") == Family::random_dense);
    CHECK_FALSE(parse_family("nope"));
    CHECK(to_string(Family::poisson_lshape) == "poisson-lshape");
}

TEST_CASE("generators validate their parameters") {
    CHECK_THROWS_AS(gen_convdiff2d(1, 3, 0, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(gen_poisson_lshape(2), std::invalid_argument);
    CHECK_THROWS_AS(gen_tridiag_unsym(1), std::invalid_argument);
    CHECK_THROWS_AS(gen_random_dense(0, 1), std::invalid_argument);
}
