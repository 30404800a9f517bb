#pragma once

#include "varcomp/numerics.hpp"

#include <functional>

namespace varcomp {

using Objective = std::function<double(const Vector&)>;

struct SimplexOptions {
    int max_iters = 2000;
    double x_tol = 1e-9;
    double f_tol = 1e-10;
    double initial_step = 0.25;
    int max_restarts = 10;
};

struct SimplexResult {
    Vector x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Nelder-Mead on the non-negative orthant. Trial points that leave the
/// orthant are projected back onto it. After each convergence the simplex
/// is rebuilt around the best vertex; the run stops once a rebuild no longer
/// improves the value by more than f_tol. Non-finite objective values are
/// treated as +infinity.
///
/// Converged means: value spread across the simplex <= f_tol (1 + |f|) and
/// simplex radius <= x_tol (1 + |x|_inf), reached within max_iters.
[[nodiscard]] SimplexResult minimize_nonnegative(const Objective& f, const Vector& start,
                                                 const SimplexOptions& opts = {});

/// Newton refinement from finite differences (Richardson-extrapolated central
/// gradient, central Hessian) over coordinates above `free_floor`; the others
/// stay fixed. Steps are projected onto the orthant and only kept when they do
/// not raise the value beyond roundoff.
[[nodiscard]] SimplexResult polish_nonnegative(const Objective& f, SimplexResult from,
                                               double free_floor, int max_steps = 20);

}  // namespace varcomp
