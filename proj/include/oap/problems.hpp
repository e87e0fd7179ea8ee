#ifndef OAP_PROBLEMS_HPP
#define OAP_PROBLEMS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "oap/linear_operator.hpp"

namespace oap::problems {

enum class Family { convdiff2d, poisson_lshape, tridiag_unsym, random_dense };

/// Sampled exact solutions: exp1 is t(1-t)e^t, exp3 is t(1-t)e^{3t}.
enum class Profile { exp1, exp3 };

std::string_view to_string(Family f);
std::optional<Family> parse_family(std::string_view s);

struct ProblemSpec {
    Family family = Family::convdiff2d;
    Index nx = 9;  // convdiff2d interior grid
    Index ny = 10;
    Index m = 8;   // poisson_lshape, h = 1/(2m)
    Index n = 600; // tridiag_unsym, random_dense
    double p1 = 1.0;
    double p2 = 1.0;
    double p3 = 0.0;
    std::uint64_t seed = 1;
    Profile profile = Profile::exp1;
    bool constructed = false;  // convdiff2d / poisson_lshape: b = A * ones
};

struct GeneratedProblem {
    LinearOperator<double> A;
    Vector<double> b;
    std::optional<Vector<double>> x_true;
    std::string label;
};

/// Five-point convection-diffusion operator on the nx x ny interior nodes of
/// the unit square (h_x = 1/(nx+1), h_y = 1/(ny+1)), zero Dirichlet data,
/// lexicographic ordering with x fastest. b = f = 1, or A * ones when
/// `constructed`.
GeneratedProblem gen_convdiff2d(Index nx, Index ny, double p1, double p2, double p3, bool constructed = false);

/// Five-point Laplacian (scaled by 1/h^2) on the interior nodes of the
/// L-shaped domain [0,1]x[0,1/2] u [0,1/2]x[1/2,1] with h = 1/(2m).
GeneratedProblem gen_poisson_lshape(Index m, bool constructed = false);

/// Number of interior nodes of the L-shaped grid for parameter m.
Index lshape_unknowns(Index m);

/// The m >= 3 whose interior node count is closest to `target`.
Index lshape_parameter_for(Index target);

/// Tridiagonal matrix with subdiagonal -1, diagonal 2, superdiagonal -1.1 and
/// b = A x_true for the sampled `profile`.
GeneratedProblem gen_tridiag_unsym(Index n, Profile profile = Profile::exp1);

/// Dense n x n matrix of i.i.d. uniform (0,1) entries from a seeded PCG32
/// stream, with b = A x_true for the sampled `profile`.
GeneratedProblem gen_random_dense(Index n, std::uint64_t seed, Profile profile = Profile::exp3);

/// exp1: t_i = i/(n+1); exp3: t_i = i/n; i = 1..n.
Vector<double> sample_solution(Profile profile, Index n);

GeneratedProblem generate(const ProblemSpec& spec);

/// PCG32 (XSH-RR output, 64-bit LCG state). Same output on every platform.
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 54u);

    std::uint32_t operator()();

    /// Uniform on the open interval (0,1) with 53 random bits.
    double uniform_open();

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
};

}  // namespace oap::problems

#endif  // OAP_PROBLEMS_HPP
