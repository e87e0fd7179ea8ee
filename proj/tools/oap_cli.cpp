// oap_cli: generate test problems, solve systems and run the benchmark suite.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "oap/bench.hpp"
#include "oap/errors.hpp"
#include "oap/matrix_market.hpp"
#include "oap/problems.hpp"

namespace {

using oap::Index;
namespace bench = oap::bench;
namespace problems = oap::problems;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_not_converged = 2;

struct ProblemFlags {
    std::string family;
    Index nx = 9;
    Index ny = 10;
    Index m = 8;
    Index n = 0;
    double p1 = 1.0;
    double p2 = 1.0;
    double p3 = 0.0;
    std::uint64_t seed = 1;
    std::string profile;
    bool constructed = false;

    void add_to(CLI::App& app, bool family_required) {
        auto* f = app.add_option("--family", family, "convdiff2d | poisson-lshape | tridiag-unsym | random-dense");
        if (family_required) f->required();
        app.add_option("--nx", nx, "convdiff2d interior nodes in x")->check(CLI::Range(Index{2}, Index{1} << 20));
        app.add_option("--ny", ny, "convdiff2d interior nodes in y")->check(CLI::Range(Index{2}, Index{1} << 20));
        app.add_option("--m", m, "poisson-lshape grid parameter, h = 1/(2m)")->check(CLI::Range(Index{3}, Index{1} << 16));
        app.add_option("--n", n, "problem size (tridiag-unsym, random-dense; target size for poisson-lshape)");
        app.add_option("--p1", p1, "convdiff2d x-convection coefficient");
        app.add_option("--p2", p2, "convdiff2d y-convection coefficient");
        app.add_option("--p3", p3, "convdiff2d reaction coefficient");
        app.add_option("--seed", seed, "random-dense generator seed");
        app.add_option("--profile", profile, "exact solution profile: exp1 | exp3")->check(CLI::IsMember({"exp1", "exp3"}));
        app.add_flag("--constructed", constructed, "convdiff2d / poisson-lshape: b = A * ones with known solution");
    }

    problems::ProblemSpec spec() const {
        const auto fam = problems::parse_family(family);
        if (!fam) throw CLI::ValidationError("--family", "unknown family '" + family + "'");
        problems::ProblemSpec s;
        s.family = *fam;
        s.nx = nx;
        s.ny = ny;
        s.m = m;
        s.p1 = p1;
        s.p2 = p2;
        s.p3 = p3;
        s.seed = seed;
        s.constructed = constructed;
        if (*fam == problems::Family::tridiag_unsym) {
            s.n = n > 0 ? n : 600;
            s.profile = problems::Profile::exp1;
        } else if (*fam == problems::Family::random_dense) {
            s.n = n > 0 ? n : 300;
            s.profile = problems::Profile::exp3;
        } else if (*fam == problems::Family::poisson_lshape && n > 0) {
            s.m = problems::lshape_parameter_for(n);
        }
        if (profile == "exp1") s.profile = problems::Profile::exp1;
        if (profile == "exp3") s.profile = problems::Profile::exp3;
        return s;
    }
};

struct SolverFlags {
    double tol = 1e-6;
    double orth_tol = 1e-8;
    std::size_t max_restarts = 0;
    std::string rhs_mode = "cycle-residual";
    Index blocks = 4;
    bool reorthogonalize = false;

    void add_to(CLI::App& app) {
        app.add_option("--tol", tol, "relative residual target")->capture_default_str();
        app.add_option("--orth-tol", orth_tol, "loss-of-orthogonality threshold on |cos|")->capture_default_str();
        app.add_option("--max-restarts", max_restarts, "restart (or AP sweep) limit; 0 means n");
        app.add_option("--rhs-mode", rhs_mode, "inner right-hand side: cycle-residual | original-b")
            ->check(CLI::IsMember({"cycle-residual", "original-b"}))
            ->capture_default_str();
        app.add_option("--blocks", blocks, "number of row blocks for ap")->check(CLI::PositiveNumber)->capture_default_str();
        app.add_flag("--reorthogonalize", reorthogonalize, "keep full bases and re-orthogonalize every step");
    }

    bench::RunOptions options() const {
        bench::RunOptions o;
        o.solve.tol = tol;
        o.solve.orth_tol = orth_tol;
        o.solve.max_restarts = max_restarts;
        o.solve.rhs_mode = rhs_mode == "original-b" ? oap::RhsMode::original_b : oap::RhsMode::cycle_residual;
        o.solve.reorthogonalize = reorthogonalize;
        o.solve.validate();
        o.ap_blocks = blocks;
        return o;
    }
};

std::vector<bench::Solver> parse_solvers(const std::vector<std::string>& names) {
    std::vector<bench::Solver> out;
    for (const auto& name : names) {
        const auto s = bench::parse_solver(name);
        if (!s) throw CLI::ValidationError("--solver", "unknown solver '" + name + "'");
        if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
    }
    return out;
}

bench::Format parse_format(const std::string& f) { return f == "markdown" ? bench::Format::markdown : bench::Format::csv; }

void emit(const std::vector<bench::RunRecord>& records, const std::string& format, const std::string& out) {
    if (out.empty() || out == "-")
        bench::emit_report(records, parse_format(format), std::cout);
    else
        bench::emit_report(records, parse_format(format), out);
}

int status_of(const std::vector<bench::RunRecord>& records) {
    const bool ok = std::all_of(records.begin(), records.end(), [](const auto& r) { return r.converged(); });
    return ok ? exit_ok : exit_not_converged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orthogonally accumulated projection solvers"};
    app.require_subcommand(1);

    ProblemFlags gen_problem;
    std::string gen_out = "problem";
    auto* gen = app.add_subcommand("gen", "write a generated problem as Matrix Market files");
    gen_problem.add_to(*gen, true);
    gen->add_option("--out", gen_out, "output prefix: <prefix>.A.mtx, <prefix>.b.mtx and <prefix>.x.mtx")
        ->capture_default_str();

    ProblemFlags solve_problem;
    SolverFlags solve_flags;
    std::string matrix_path, rhs_path, solution_path, x_out;
    std::vector<std::string> solve_solvers{"roap2"};
    std::string solve_format = "csv", solve_out = "-";
    auto* solve = app.add_subcommand("solve", "solve one system from files or a generated family");
    solve_problem.add_to(*solve, false);
    solve_flags.add_to(*solve);
    auto* matrix_opt = solve->add_option("--matrix", matrix_path, "Matrix Market file with A")->check(CLI::ExistingFile);
    auto* rhs_opt = solve->add_option("--rhs", rhs_path, "Matrix Market file with b")->check(CLI::ExistingFile);
    solve->add_option("--solution", solution_path, "Matrix Market file with the exact solution")->check(CLI::ExistingFile);
    matrix_opt->needs(rhs_opt);
    rhs_opt->needs(matrix_opt);
    solve->add_option("--solver", solve_solvers, "roap2 | roap3 | oap2 | oap3 | ap (repeatable or comma-separated)")
        ->delimiter(',');
    solve->add_option("--format", solve_format, "csv | markdown")->check(CLI::IsMember({"csv", "markdown"}));
    solve->add_option("--out", solve_out, "report path, '-' for stdout");
    solve->add_option("--x-out", x_out, "write the computed solution (single solver only)");

    std::vector<std::string> bench_families;
    std::vector<Index> bench_sizes;
    std::vector<std::string> bench_solvers{"roap2", "roap3"};
    ProblemFlags bench_base;
    SolverFlags bench_flags;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    std::string bench_format = "csv", bench_out = "-";
    auto* bench_cmd = app.add_subcommand("bench", "run the pinned comparison suite");
    bench_cmd->add_option("--family", bench_families, "families to run (default: all)")->delimiter(',');
    bench_cmd->add_option("--sizes", bench_sizes, "problem sizes, overriding the per-family defaults")->delimiter(',');
    bench_cmd->add_option("--solver", bench_solvers, "solvers to compare")->delimiter(',');
    bench_cmd->add_option("--p1", bench_base.p1, "convdiff2d x-convection coefficient");
    bench_cmd->add_option("--p2", bench_base.p2, "convdiff2d y-convection coefficient");
    bench_cmd->add_option("--p3", bench_base.p3, "convdiff2d reaction coefficient");
    bench_cmd->add_option("--seed", bench_base.seed, "random-dense generator seed");
    bench_flags.add_to(*bench_cmd);
    bench_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--format", bench_format, "csv | markdown")->check(CLI::IsMember({"csv", "markdown"}));
    bench_cmd->add_option("--out", bench_out, "report path, '-' for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*gen) {
            const auto p = problems::generate(gen_problem.spec());
            oap::mm::write_matrix(gen_out + ".A.mtx", p.A);
            oap::mm::write_vector(gen_out + ".b.mtx", p.b);
            if (p.x_true) oap::mm::write_vector(gen_out + ".x.mtx", *p.x_true);
            std::cerr << p.label << ": n = " << p.A.rows() << '\n';
            return exit_ok;
        }

        if (*solve) {
            auto load = [&]() -> problems::GeneratedProblem {
                if (!matrix_path.empty()) {
                    auto A = oap::mm::read_matrix(matrix_path);
                    auto b = oap::mm::read_vector(rhs_path);
                    std::optional<oap::Vector<double>> x;
                    if (!solution_path.empty()) x = oap::mm::read_vector(solution_path);
                    return {std::move(A), std::move(b), std::move(x), "file"};
                }
                if (!solve_problem.family.empty()) return problems::generate(solve_problem.spec());
                throw CLI::ValidationError("solve", "give --matrix/--rhs or --family");
            };
            const auto p = load();
            if (p.A.rows() != p.A.cols() || p.b.size() != p.A.rows() ||
                (p.x_true && p.x_true->size() != p.A.cols()))
                throw oap::DimensionError("solve: A must be square and conform with b and the solution");
            const auto solvers = parse_solvers(solve_solvers);
            if (!x_out.empty() && solvers.size() != 1)
                throw CLI::ValidationError("--x-out", "needs exactly one solver");
            const auto options = solve_flags.options();
            std::vector<bench::RunRecord> records;
            oap::Vector<double> x;
            for (auto s : solvers) records.push_back(bench::run_case(p, s, options, &x));
            if (!x_out.empty()) oap::mm::write_vector(x_out, x);
            emit(records, solve_format, solve_out);
            return status_of(records);
        }

        if (*bench_cmd) {
            std::vector<problems::Family> families;
            if (bench_families.empty()) {
                families = {problems::Family::convdiff2d, problems::Family::poisson_lshape,
                            problems::Family::tridiag_unsym, problems::Family::random_dense};
            } else {
                for (const auto& f : bench_families) {
                    const auto fam = problems::parse_family(f);
                    if (!fam) throw CLI::ValidationError("--family", "unknown family '" + f + "'");
                    families.push_back(*fam);
                }
            }
            const auto solvers = parse_solvers(bench_solvers);
            problems::ProblemSpec base;
            base.p1 = bench_base.p1;
            base.p2 = bench_base.p2;
            base.p3 = bench_base.p3;
            base.seed = bench_base.seed;
            std::vector<bench::BenchCase> cases;
            for (auto fam : families) {
                const auto sizes = bench_sizes.empty() ? bench::default_sizes(fam) : bench_sizes;
                for (Index n : sizes) {
                    if (n < 2) throw CLI::ValidationError("--sizes", "sizes must be >= 2");
                    const auto spec = bench::sized_spec(fam, n, base);
                    for (auto s : solvers) cases.push_back({spec, s});
                }
            }
            const auto records = bench::run_suite(cases, bench_flags.options(), jobs);
            emit(records, bench_format, bench_out);
            return status_of(records);
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
