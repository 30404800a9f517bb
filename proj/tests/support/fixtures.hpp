#pragma once

#include <varcomp/model.hpp>
#include <varcomp/numerics.hpp>

#include <random>
#include <vector>

namespace varcomp::testing {

/// n = 3, X = 1, Z_1 = e_1.
VarCompModel tiny_model();

/// Balanced one-way layout: X = 1_{ab}, Z_1 = group indicator with `a`
/// groups of `b` consecutive observations.
Matrix group_indicator(int a, int b);
VarCompModel one_way_model(int a, int b);

Vector vec(std::initializer_list<double> values);

struct RandomModelOptions {
    int n_min = 3;
    int n_max = 8;
    int r_max = 3;
    int k_max = 3;
    /// Probability that X gets a duplicated column (only when m >= 2 is possible).
    double p_rank_deficient_x = 0.2;
    /// Probability that a Z block is a 0/1 indicator instead of Gaussian.
    double p_indicator = 0.3;
    /// Probability of a Z block whose columns are linearly dependent.
    double p_dependent_block = 0.0;
    bool full_rank_x = false;
};

/// Random model with m + sum k_i < n, so M(X, Z) is a proper subspace.
VarCompModel random_model(std::mt19937_64& rng, const RandomModelOptions& opts = {});

/// A random member X a + Z b of M(X, Z).
Vector random_member(std::mt19937_64& rng, const VarCompModel& model);

/// Unit vector orthogonal to M(X, Z), found with a full-pivoting QR
/// (independent of the library's SVD-based bases).
Vector random_complement_direction(std::mt19937_64& rng, const VarCompModel& model);

/// member + c * |member| * direction with c log-uniform in [1e-3, 1].
Vector random_nonmember(std::mt19937_64& rng, const VarCompModel& model);

double log_uniform(std::mt19937_64& rng, double lo, double hi);
Vector gaussian_vector(std::mt19937_64& rng, Eigen::Index size, double scale = 1.0);
Matrix gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols);

/// Random point of the scaled parameter space; a fifth of the kappa entries are 0.
KappaParams random_kappa_point(std::mt19937_64& rng, const VarCompModel& model);
/// Random sigma^2 = (s_0^2, ..., s_r^2) with s_0^2 > 0 and some zero components.
Vector random_sigma2(std::mt19937_64& rng, std::size_t r);

}  // namespace varcomp::testing
