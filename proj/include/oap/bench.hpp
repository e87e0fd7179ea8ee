#ifndef OAP_BENCH_HPP
#define OAP_BENCH_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oap/oap.hpp"
#include "oap/problems.hpp"

namespace oap::bench {

/// oap2/oap3 run a single cycle seeded from b; roap2/roap3 restart it.
enum class Solver { roap2, roap3, oap2, oap3, ap };

std::string_view to_string(Solver s);
std::optional<Solver> parse_solver(std::string_view s);

struct RunRecord {
    std::string problem;
    Index n = 0;
    std::string solver;
    std::size_t restarts = 0;
    std::size_t inner_iters = 0;
    double relres = 0.0;
    std::optional<double> relerr;
    double time_ms = 0.0;
    std::string termination;  // "converged", a stop reason, or "error: ..."

    bool converged() const noexcept { return termination == "converged"; }
};

struct RunOptions {
    SolveOptions solve;
    Index ap_blocks = 4;
};

/// Runs one solver and measures the outcome from scratch. Solver errors end
/// up in `termination` instead of propagating. The computed x is stored in
/// `solution` when given.
RunRecord run_case(const problems::GeneratedProblem& problem, Solver solver, const RunOptions& options = {},
                   Vector<double>* solution = nullptr);

enum class Format { csv, markdown };

inline constexpr std::string_view csv_header = "problem,n,solver,restarts,inner_iters,relres,relerr,time_ms";

void emit_report(const std::vector<RunRecord>& records, Format format, std::ostream& out);
void emit_report(const std::vector<RunRecord>& records, Format format, const std::string& path);

/// Reads records written by emit_report in CSV form. `termination` is not
/// part of the CSV and comes back empty.
std::vector<RunRecord> parse_csv(std::istream& in);

/// The (nx, ny) mesh with nx <= ny, nx * ny = n and nx as large as possible.
std::pair<Index, Index> convdiff_mesh(Index n);

/// Problem for `family` at (approximately, for poisson-lshape) size n.
problems::ProblemSpec sized_spec(problems::Family family, Index n, const problems::ProblemSpec& base = {});

/// Default sizes per family: convdiff2d {90, 171, 361}, poisson-lshape
/// {200, 500}, tridiag-unsym {600}, random-dense {300}.
std::vector<Index> default_sizes(problems::Family family);

struct BenchCase {
    problems::ProblemSpec spec;
    Solver solver;
};

/// Runs all cases on up to `jobs` threads. The result is sorted by
/// (problem, n, solver) whatever the completion order.
std::vector<RunRecord> run_suite(const std::vector<BenchCase>& cases, const RunOptions& options, std::size_t jobs);

}  // namespace oap::bench

#endif  // OAP_BENCH_HPP
