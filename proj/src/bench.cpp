#include "oap/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "oap/ap.hpp"
#include "oap/errors.hpp"

namespace oap::bench {

std::string_view to_string(Solver s) {
    switch (s) {
        case Solver::roap2: return "roap2";
        case Solver::roap3: return "roap3";
        case Solver::oap2: return "oap2";
        case Solver::oap3: return "oap3";
        case Solver::ap: return "ap";
    }
    return "?";
}

std::optional<Solver> parse_solver(std::string_view s) {
    for (auto v : {Solver::roap2, Solver::roap3, Solver::oap2, Solver::oap3, Solver::ap})
        if (s == to_string(v)) return v;
    return std::nullopt;
}

namespace {

struct Outcome {
    Vector<double> x;
    std::size_t restarts = 0;
    std::size_t inner = 0;
    std::string termination;
};

Outcome single_cycle(const problems::GeneratedProblem& p, Solver solver, const SolveOptions& opts) {
    Outcome o;
    const Seed<double> seed = init_from_vector(p.A, p.b, p.b, opts.break_tol);
    const CycleResult<double> cycle = solver == Solver::oap3
                                          ? oap_cycle_tridiag(p.A, p.b, seed.v1, seed.v1, seed.c1, opts)
                                          : oap_cycle_bidiag(p.A, p.b, seed.v1, seed.c1, opts);
    o.x = cycle.x;
    o.restarts = 1;
    o.inner = cycle.inner_steps;
    o.termination = to_string(cycle.stop);
    return o;
}

Outcome solve(const problems::GeneratedProblem& p, Solver solver, const RunOptions& options) {
    switch (solver) {
        case Solver::roap2:
        case Solver::roap3: {
            auto res = roap_solve(p.A, p.b, solver == Solver::roap2 ? Variant::roap2 : Variant::roap3, options.solve);
            return {std::move(res.x), res.report.restarts, res.report.total_inner(),
                    std::string(to_string(res.report.termination))};
        }
        case Solver::oap2:
        case Solver::oap3:
            return single_cycle(p, solver, options.solve);
        case Solver::ap: {
            const std::size_t sweeps =
                options.solve.max_restarts > 0 ? options.solve.max_restarts : static_cast<std::size_t>(p.A.rows());
            const auto blocks = BlockPartition::even(p.A.rows(), std::min(options.ap_blocks, p.A.rows()));
            auto res = ap_solve(p.A, p.b, blocks, options.solve.tol, sweeps);
            return {std::move(res.x), res.report.restarts, res.report.total_inner(),
                    std::string(to_string(res.report.termination))};
        }
    }
    throw std::invalid_argument("run_case: unknown solver");
}

double relative_residual(const problems::GeneratedProblem& p, const Vector<double>& x) {
    const double b_norm = p.b.norm();
    const Vector<double> r = p.b - apply(p.A, x);
    return b_norm > 0 ? r.norm() / b_norm : r.norm();
}

}  // namespace

RunRecord run_case(const problems::GeneratedProblem& problem, Solver solver, const RunOptions& options,
                   Vector<double>* solution) {
    detail::require(problem.A.rows() == problem.A.cols() && problem.b.size() == problem.A.rows(),
                    "run_case: A must be square and conform with b");
    RunRecord rec;
    rec.problem = problem.label;
    rec.n = problem.A.rows();
    rec.solver = std::string(to_string(solver));

    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = solve(problem, solver, options);
    } catch (const std::exception& e) {
        o = Outcome{Vector<double>::Zero(problem.A.cols()), 0, 0, std::string("error: ") + e.what()};
    }
    rec.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    rec.restarts = o.restarts;
    rec.inner_iters = o.inner;
    rec.relres = relative_residual(problem, o.x);
    if (problem.x_true) {
        const double xn = problem.x_true->norm();
        const double en = (o.x - *problem.x_true).norm();
        rec.relerr = xn > 0 ? en / xn : en;
    }
    const bool error = o.termination.rfind("error:", 0) == 0;
    if (!error && std::isfinite(rec.relres) && rec.relres <= options.solve.tol)
        rec.termination = "converged";
    else if (!error && o.termination == "converged")
        rec.termination = "not-converged";
    else
        rec.termination = std::move(o.termination);
    if (solution) *solution = std::move(o.x);
    return rec;
}

namespace {

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string scientific(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 4);
    return std::string(buf, res.ptr);
}

void write_csv(const std::vector<RunRecord>& records, std::ostream& out) {
    out << csv_header << '\n';
    for (const auto& r : records) {
        if (r.problem.find_first_of(",\"\n") != std::string::npos || r.solver.find_first_of(",\"\n") != std::string::npos)
            throw Error("emit_report: labels must not contain commas, quotes or newlines");
        out << r.problem << ',' << r.n << ',' << r.solver << ',' << r.restarts << ',' << r.inner_iters << ','
            << shortest(r.relres) << ',' << (r.relerr ? shortest(*r.relerr) : std::string()) << ','
            << shortest(r.time_ms) << '\n';
    }
}

int solver_rank(const std::string& name) {
    const auto s = parse_solver(name);
    return s ? static_cast<int>(*s) : 100;
}

void write_markdown(const std::vector<RunRecord>& records, std::ostream& out) {
    // problem -> n -> solver -> record, in first-appearance order for problems.
    std::vector<std::string> problems;
    for (const auto& r : records)
        if (std::find(problems.begin(), problems.end(), r.problem) == problems.end()) problems.push_back(r.problem);

    bool first = true;
    for (const auto& name : problems) {
        std::vector<std::string> solvers;
        std::map<Index, std::map<std::string, const RunRecord*>> rows;
        for (const auto& r : records) {
            if (r.problem != name) continue;
            if (std::find(solvers.begin(), solvers.end(), r.solver) == solvers.end()) solvers.push_back(r.solver);
            rows[r.n][r.solver] = &r;
        }
        std::stable_sort(solvers.begin(), solvers.end(),
                         [](const auto& a, const auto& b) { return solver_rank(a) < solver_rank(b); });

        if (!first) out << '\n';
        first = false;
        out << "### " << name << "\n\n";
        out << "Relative residual (restarts)\n\n| n |";
        for (const auto& s : solvers) out << ' ' << s << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < solvers.size(); ++i) out << "---|";
        out << '\n';
        for (const auto& [n, cells] : rows) {
            out << "| " << n << " |";
            for (const auto& s : solvers) {
                const auto it = cells.find(s);
                if (it == cells.end()) {
                    out << " - |";
                    continue;
                }
                const RunRecord& r = *it->second;
                out << ' ' << scientific(r.relres) << " (" << r.restarts << ')';
                if (!r.converged()) out << " " << r.termination;
                out << " |";
            }
            out << '\n';
        }
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <typename T>
T parse_field(const std::string& s, std::size_t line, const char* what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(line, std::string("invalid ") + what + " '" + s + "'");
    return value;
}

}  // namespace

void emit_report(const std::vector<RunRecord>& records, Format format, std::ostream& out) {
    if (format == Format::csv)
        write_csv(records, out);
    else
        write_markdown(records, out);
}

void emit_report(const std::vector<RunRecord>& records, Format format, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    emit_report(records, format, out);
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<RunRecord> parse_csv(std::istream& in) {
    std::string line;
    std::size_t number = 1;
    if (!std::getline(in, line)) throw ParseError(1, "missing CSV header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header) throw ParseError(1, "unexpected CSV header");
    std::vector<RunRecord> records;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 8) throw ParseError(number, "expected 8 fields");
        RunRecord r;
        r.problem = f[0];
        r.n = parse_field<Index>(f[1], number, "n");
        r.solver = f[2];
        r.restarts = parse_field<std::size_t>(f[3], number, "restarts");
        r.inner_iters = parse_field<std::size_t>(f[4], number, "inner_iters");
        r.relres = parse_field<double>(f[5], number, "relres");
        if (!f[6].empty()) r.relerr = parse_field<double>(f[6], number, "relerr");
        r.time_ms = parse_field<double>(f[7], number, "time_ms");
        records.push_back(std::move(r));
    }
    return records;
}

std::pair<Index, Index> convdiff_mesh(Index n) {
    for (auto nx = static_cast<Index>(std::sqrt(static_cast<double>(n))) + 1; nx >= 2; --nx)
        if (nx * nx <= n && n % nx == 0) return {nx, n / nx};
    throw std::invalid_argument("convdiff_mesh: n = " + std::to_string(n) + " has no factorization nx*ny with nx, ny >= 2");
}

problems::ProblemSpec sized_spec(problems::Family family, Index n, const problems::ProblemSpec& base) {
    problems::ProblemSpec s = base;
    s.family = family;
    switch (family) {
        case problems::Family::convdiff2d:
            std::tie(s.nx, s.ny) = convdiff_mesh(n);
            break;
        case problems::Family::poisson_lshape:
            s.m = problems::lshape_parameter_for(n);
            break;
        case problems::Family::tridiag_unsym:
            s.n = n;
            s.profile = problems::Profile::exp1;
            break;
        case problems::Family::random_dense:
            s.n = n;
            s.profile = problems::Profile::exp3;
            break;
    }
    return s;
}

std::vector<Index> default_sizes(problems::Family family) {
    switch (family) {
        case problems::Family::convdiff2d: return {90, 171, 361};
        case problems::Family::poisson_lshape: return {200, 500};
        case problems::Family::tridiag_unsym: return {600};
        case problems::Family::random_dense: return {300};
    }
    return {};
}

std::vector<RunRecord> run_suite(const std::vector<BenchCase>& cases, const RunOptions& options, std::size_t jobs) {
    std::vector<RunRecord> records(cases.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
            const auto problem = problems::generate(cases[i].spec);
            records[i] = run_case(problem, cases[i].solver, options);
        }
    };
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(cases.size(), 1));
    std::vector<std::future<void>> pool;
    for (std::size_t j = 1; j < jobs; ++j) pool.push_back(std::async(std::launch::async, worker));
    worker();
    for (auto& f : pool) f.get();

    std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::make_tuple(a.problem, a.n, solver_rank(a.solver)) <
               std::make_tuple(b.problem, b.n, solver_rank(b.solver));
    });
    return records;
}

}  // namespace oap::bench
