// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance          run every criterion
//   acceptance 3 7      run criteria 3 and 7

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oap/ap.hpp"
#include "oap/lanczos.hpp"
#include "oap/oap.hpp"
#include "oap/problems.hpp"
#include "oracles.hpp"

using namespace oap;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

LinearOperator<double> op(const oracle::Mat& m) { return LinearOperator<double>(DenseMatrix<double>(m)); }

// Criteria 1 and 2 share their instances.
std::vector<oracle::Mat> conditioned_instances() {
    std::mt19937_64 rng(2024);
    std::vector<oracle::Mat> out;
    for (int i = 0; i < 20; ++i) out.push_back(oracle::conditioned_matrix(rng, 20, 900.0));
    return out;
}

struct Reductions {
    Reduction<double> tri, bi, tri_short, bi_short;
};

Reductions reduce_instance(const oracle::Mat& m, std::mt19937_64& rng) {
    const auto A = op(m);
    const Vector<double> v1 = oracle::unit_vector(rng, m.rows());
    const Vector<double> u1 = oracle::unit_vector(rng, m.rows());
    const auto steps = static_cast<std::size_t>(m.rows() - 1);
    return {tridiagonalize(A, v1, u1, steps, true), bidiagonalize(A, v1, steps, true),
            tridiagonalize(A, v1, u1, 5, false), bidiagonalize(A, v1, 5, false)};
}

Verdict orthonormality() {
    Verdict v;
    std::mt19937_64 rng(1);
    double worst_cond = 0, reorth = 0, plain = 0;
    bool breakdown = false;
    for (const auto& m : conditioned_instances()) {
        worst_cond = std::max(worst_cond, oracle::condition_number(m));
        const auto r = reduce_instance(m, rng);
        breakdown = breakdown || r.tri.breakdown_step || r.bi.breakdown_step;
        for (const auto* b : {&r.tri.V, &r.tri.U, &r.bi.V, &r.bi.U}) reorth = std::max(reorth, oracle::max_gram_deviation(*b));
        for (const auto* b : {&r.tri_short.V, &r.tri_short.U, &r.bi_short.V, &r.bi_short.U})
            plain = std::max(plain, oracle::max_gram_deviation(*b));
    }
    v.detail << "20 matrices n=20, max cond " << sci(worst_cond) << "; re-orthogonalized max|G-I| " << sci(reorth)
             << " (<= 1e-10); 5 plain steps max|G-I| " << sci(plain) << " (<= 1e-8)";
    v.require(worst_cond <= 1e3, "condition number");
    v.require(!breakdown, "unexpected breakdown");
    v.require(reorth <= 1e-10, "re-orthogonalized Gram bound");
    v.require(plain <= 1e-8, "plain Gram bound");
    return v;
}

Verdict reduction_form() {
    Verdict v;
    std::mt19937_64 rng(1);
    double tri = 0, bi = 0;
    for (const auto& m : conditioned_instances()) {
        const auto r = reduce_instance(m, rng);
        tri = std::max(tri, oracle::max_off_band(r.tri.U.transpose() * m * r.tri.V, -1, 1));
        bi = std::max(bi, oracle::max_off_band(r.bi.U.transpose() * m * r.bi.V.leftCols(r.bi.U.cols()), 0, 1));
    }
    v.detail << "off-pattern max: tridiagonal " << sci(tri) << ", upper bidiagonal " << sci(bi) << " (<= 1e-10)";
    v.require(tri <= 1e-10, "tridiagonal form");
    v.require(bi <= 1e-10, "bidiagonal form");
    return v;
}

SolveOptions oracle_mode() {
    SolveOptions o;
    o.reorthogonalize = true;
    return o;
}

Verdict coefficient_fidelity() {
    Verdict v;
    std::vector<problems::GeneratedProblem> cases;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 8; ++i) {
        const oracle::Mat m = oracle::gaussian_matrix(rng, 15, 15);
        const Vector<double> x = oracle::gaussian_vector(rng, 15);
        cases.push_back({op(m), m * x, x, "gaussian"});
    }
    cases.push_back(problems::gen_tridiag_unsym(15));
    cases.push_back(problems::gen_random_dense(15, 1));
    cases.push_back(problems::gen_convdiff2d(3, 5, 1, 1, 0, true));
    cases.push_back(problems::gen_convdiff2d(5, 3, 0, 0, 0, true));

    double worst = 0;
    std::size_t accepted = 0;
    for (const auto& p : cases) {
        const Vector<double>& x = *p.x_true;
        const auto seed = init_from_vector(p.A, p.b, p.b);
        worst = std::max(worst, std::abs(seed.c1 - x.dot(seed.v1)) / x.norm());
        auto observer = [&](const AcceptedStep<double>& s) {
            worst = std::max(worst, std::abs(s.c_next - x.dot(s.v_next)) / x.norm());
            ++accepted;
        };
        oap_cycle_bidiag(p.A, p.b, seed.v1, seed.c1, oracle_mode(), observer);
        oap_cycle_tridiag(p.A, p.b, seed.v1, seed.v1, seed.c1, oracle_mode(), observer);
    }
    v.detail << cases.size() << " problems n=15, both kernels, " << accepted << " accepted steps; max |c_k - x'v_k|/|x| "
             << sci(worst) << " (<= 1e-9)";
    v.require(worst <= 1e-9, "coefficient bound");
    return v;
}

Verdict exact_solve() {
    Verdict v;
    std::mt19937_64 rng(4);
    double worst = 0;
    std::size_t max_steps = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const oracle::Mat m = oracle::gaussian_matrix(rng, 20, 20);
        const auto A = op(m);
        const Vector<double> b = oracle::gaussian_vector(rng, 20);
        const auto seed = init_from_vector(A, b, b);
        for (bool tri : {false, true}) {
            const auto cyc = tri ? oap_cycle_tridiag(A, b, seed.v1, seed.v1, seed.c1, oracle_mode())
                                 : oap_cycle_bidiag(A, b, seed.v1, seed.c1, oracle_mode());
            worst = std::max(worst, (b - m * cyc.x).norm() / b.norm());
            max_steps = std::max(max_steps, cyc.inner_steps);
        }
    }
    v.detail << "50 trials n=20, both kernels; max relres " << sci(worst) << " (<= 1e-9), max inner steps " << max_steps
             << " (<= 20)";
    v.require(worst <= 1e-9, "relres bound");
    v.require(max_steps <= 20, "inner step bound");
    return v;
}

struct ExampleRun {
    int criterion;
    std::string label;
    Index n;
    Variant variant;
    SolveReport<double> report;
    std::optional<double> relerr;
    double recomputed_relres;
};

ExampleRun run_example(int criterion, const problems::GeneratedProblem& p, Variant variant, const SolveOptions& opts) {
    const auto res = roap_solve(p.A, p.b, variant, opts);
    ExampleRun r{criterion, p.label, p.A.rows(), variant, res.report, std::nullopt,
                 (p.b - apply(p.A, res.x)).norm() / p.b.norm()};
    if (p.x_true) r.relerr = (res.x - *p.x_true).norm() / p.x_true->norm();
    return r;
}

std::map<int, std::vector<ExampleRun>>& example_cache() {
    static std::map<int, std::vector<ExampleRun>> cache;
    return cache;
}

const std::vector<ExampleRun>& example_runs(int criterion) {
    auto& cache = example_cache();
    if (auto it = cache.find(criterion); it != cache.end()) return it->second;
    std::vector<problems::GeneratedProblem> probs;
    SolveOptions opts;
    switch (criterion) {
        case 5:
            probs.push_back(problems::gen_convdiff2d(9, 10, 1, 1, 0));
            probs.push_back(problems::gen_convdiff2d(9, 19, 1, 1, 0));
            probs.push_back(problems::gen_convdiff2d(19, 19, 1, 1, 0));
            break;
        case 6:
            probs.push_back(problems::gen_poisson_lshape(problems::lshape_parameter_for(200)));
            probs.push_back(problems::gen_poisson_lshape(problems::lshape_parameter_for(500)));
            break;
        case 7:
            probs.push_back(problems::gen_tridiag_unsym(600));
            break;
        case 8:
            probs.push_back(problems::gen_random_dense(300, 1));
            opts.max_restarts = 300;
            break;
    }
    std::vector<ExampleRun> runs;
    for (const auto& p : probs)
        for (auto variant : {Variant::roap2, Variant::roap3}) runs.push_back(run_example(criterion, p, variant, opts));
    return cache[criterion] = std::move(runs);
}

void describe(Verdict& v, const std::vector<ExampleRun>& runs) {
    const char* sep = "";
    for (const auto& r : runs) {
        v.detail << sep << r.label << " n=" << r.n << " " << to_string(r.variant) << ": relres "
                 << sci(r.recomputed_relres) << ", " << r.report.restarts << " restarts";
        if (r.relerr) v.detail << ", relerr " << sci(*r.relerr);
        sep = "; ";
    }
}

Verdict example_reproduction(int criterion, std::size_t max_restarts) {
    Verdict v;
    const auto& runs = example_runs(criterion);
    describe(v, runs);
    for (const auto& r : runs) {
        const std::string name = r.label + " n=" + std::to_string(r.n) + " " + std::string(to_string(r.variant));
        v.require(r.report.termination == Termination::converged, name + " converged");
        v.require(r.recomputed_relres <= 1e-6, name + " relres");
        v.require(r.report.restarts <= max_restarts, name + " restarts");
        v.require(std::abs(r.recomputed_relres - r.report.final_relres) <= 1e-12, name + " reported relres");
    }
    return v;
}

Verdict example1() { return example_reproduction(5, 20); }

Verdict example2() {
    Verdict v = example_reproduction(6, static_cast<std::size_t>(-1));
    return v;
}

Verdict example3() {
    Verdict v = example_reproduction(7, 30);
    for (const auto& r : example_runs(7)) v.require(r.relerr && *r.relerr <= 1e-2, "relerr bound");
    const double cond = oracle::condition_number(to_dense(problems::gen_tridiag_unsym(600).A));
    v.detail << "; cond " << sci(cond) << " (> 1e12)";
    v.require(cond > 1e12, "condition estimate");
    return v;
}

Verdict example4() { return example_reproduction(8, 300); }

Verdict monotonicity() {
    Verdict v;
    std::size_t runs = 0, steps = 0, violations = 0;
    double worst = 0;
    std::ostringstream where;
    for (int c : {5, 6, 7, 8}) {
        for (const auto& r : example_runs(c)) {
            ++runs;
            std::size_t bad = 0;
            const auto& h = r.report.residual_history;
            for (std::size_t i = 1; i < h.size(); ++i) {
                ++steps;
                const double ratio = h[i] / h[i - 1];
                if (ratio > 1 + 1e-8) {
                    ++bad;
                    worst = std::max(worst, ratio);
                }
            }
            if (bad > 0) where << " " << r.label << " n=" << r.n << " " << to_string(r.variant) << ":" << bad;
            violations += bad;
        }
    }
    v.detail << runs << " runs, " << steps << " restart steps, " << violations
             << " increases beyond factor 1+1e-8";
    if (violations > 0) v.detail << " (worst ratio " << sci(worst) << ";" << where.str() << ")";
    v.require(violations == 0, "residual history increases");
    return v;
}

Verdict ap_suite() {
    Verdict v;
    std::mt19937_64 rng(10);
    double init_gap = 0, proj_gap = 0, c_drop = 0, err_rise = 0, one_block = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const oracle::Mat m = oracle::gaussian_matrix(rng, 10, 10);
        const Vector<double> x = oracle::gaussian_vector(rng, 10);
        const auto A = op(m);
        const Vector<double> b = m * x;
        auto s = ap_init(A, b);
        init_gap = std::max(init_gap, std::abs(s.c - x.dot(s.p)) / (x.norm() * s.p.norm()));
        double c_prev = s.c, err_prev = (x - s.p).norm();
        auto observer = [&](std::size_t, const ApState<double>& st) {
            proj_gap = std::max(proj_gap, std::abs(st.c - x.dot(st.p)) / (x.norm() * st.p.norm()));
            c_drop = std::max(c_drop, (c_prev - st.c) / c_prev);
            const double err = (x - st.p).norm();
            err_rise = std::max(err_rise, (err - err_prev) / err_prev);
            c_prev = st.c;
            err_prev = err;
        };
        const auto blocks = BlockPartition::even(10, 2 + trial % 3);
        for (int sweep = 0; sweep < 5; ++sweep) s = ap_sweep(A, b, blocks, s, observer);
        const auto full = ap_sweep(A, b, BlockPartition::even(10, 1), ap_init(A, b));
        one_block = std::max(one_block, (full.p - x).norm() / x.norm());
    }
    v.detail << "20 instances n=10, 2-4 blocks: init |c-x'p| " << sci(init_gap) << " (<= 1e-12), projection |c-x'p| "
             << sci(proj_gap) << " (<= 1e-10), max relative c decrease " << sci(c_drop) << ", max relative error increase "
             << sci(err_rise) << " (<= 1e-12); one block error " << sci(one_block) << " (<= 1e-10)";
    v.require(init_gap <= 1e-12, "ap_init consistency");
    v.require(proj_gap <= 1e-10, "projection consistency");
    v.require(c_drop <= 1e-12, "c growth");
    v.require(err_rise <= 1e-12, "error monotonicity");
    v.require(one_block <= 1e-10, "single block recovery");
    return v;
}

Verdict oracle_equivalence() {
    Verdict v;
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> size(4, 16);
    double proj = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = size(rng);
        const int k = 1 + trial % (n - 1);
        const oracle::Mat w = oracle::gaussian_matrix(rng, n, k);
        const Vector<double> x = oracle::gaussian_vector(rng, n);
        const Vector<double> l = w.transpose() * x;
        const Vector<double> ref = oracle::normal_equations_projection(w, l);
        const auto s = project_onto(Basis<double>(w), l);
        proj = std::max(proj, (s.p - ref).norm() / ref.norm());
    }
    double adjoint = 0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int rows = size(rng), cols = size(rng);
        oracle::Mat m = oracle::gaussian_matrix(rng, rows, cols);
        const bool sparse = trial % 2 == 0;
        if (sparse)
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                    if (unit(rng) < 0.6) m(i, j) = 0;
        const auto A = sparse ? to_sparse_operator(DenseMatrix<double>(m)) : op(m);
        const Vector<double> u = oracle::gaussian_vector(rng, rows);
        const Vector<double> x = oracle::gaussian_vector(rng, cols);
        const double scale = u.norm() * x.norm() * std::max(A.frobenius_norm(), 1e-300);
        adjoint = std::max(adjoint, std::abs(u.dot(apply(A, x)) - apply_transpose(A, u).dot(x)) / scale);
    }
    v.detail << "projection vs normal equations, 50 instances: max relative gap " << sci(proj)
             << " (<= 1e-10); adjoint identity, 100 triples: max scaled gap " << sci(adjoint) << " (<= 1e-12)";
    v.require(proj <= 1e-10, "projection oracle");
    v.require(adjoint <= 1e-12, "adjoint identity");
    return v;
}

struct Criterion {
    const char* name;
    std::function<Verdict()> run;
    double time_limit_s;  // 0 means no limit
};

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, Criterion> criteria{
        {1, {"orthonormality", orthonormality, 5}},
        {2, {"reduction form", reduction_form, 0}},
        {3, {"coefficient fidelity", coefficient_fidelity, 0}},
        {4, {"exact solve at desk scale", exact_solve, 0}},
        {5, {"convection-diffusion", example1, 30}},
        {6, {"L-shaped Poisson", example2, 60}},
        {7, {"ill-conditioned tridiagonal", example3, 60}},
        {8, {"random dense", example4, 120}},
        {9, {"restart monotonicity", monotonicity, 0}},
        {10, {"AP baseline", ap_suite, 0}},
        {11, {"oracle equivalence", oracle_equivalence, 0}},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        char* end = nullptr;
        const long id = std::strtol(argv[i], &end, 10);
        if (*end != '\0' || !criteria.count(static_cast<int>(id))) {
            std::fprintf(stderr, "usage: %s [criterion 1-11 ...]\n", argv[0]);
            return 2;
        }
        selected.push_back(static_cast<int>(id));
    }
    if (selected.empty())
        for (const auto& [id, c] : criteria) selected.push_back(id);

    bool all = true;
    for (int id : selected) {
        const auto& c = criteria.at(id);
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0 && secs > c.time_limit_s) {
            v.pass = false;
            v.detail << " [failed: runtime limit " << c.time_limit_s << " s]";
        }
        std::printf("%s %d %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", id, c.name, v.detail.str().c_str(), secs);
        std::fflush(stdout);
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
