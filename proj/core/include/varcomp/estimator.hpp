#pragma once

#include "varcomp/existence.hpp"
#include "varcomp/likelihood.hpp"
#include "varcomp/model.hpp"
#include "varcomp/numerics.hpp"

#include <optional>
#include <vector>

namespace varcomp {

struct FitOptions {
    int max_iters = 2000;  ///< per start
    double x_tol = 1e-9;
    double f_tol = 1e-10;
    /// 0 selects 1 + 2r.
    int n_starts = 0;
    double threshold_clamp = 1e-12;

    void validate() const;
};

struct FitResult {
    Method method = Method::ML;
    /// ML with full-rank X only.
    std::optional<Vector> beta_hat;
    /// X beta_hat (GLS fitted mean). Empty for REML.
    Vector fitted_mean;
    /// (sigma_0^2, sigma_1^2, ..., sigma_r^2)
    Vector sigma2_hat;
    /// (kappa_1, ..., kappa_r) at the optimum.
    Vector kappa_hat;
    /// Profiled criterion at the optimum (ML: l~, REML: l_K with orthonormal K
    /// unless the caller supplied a basis).
    double criterion_value = 0.0;
    /// boundary_flags[i] is true when sigma_{i+1}^2 was reported as exactly 0.
    std::vector<bool> boundary_flags;
    ExistenceCertificate certificate;
    int iterations = 0;
    bool converged = false;
    /// Criterion value reached from each start, in start order.
    std::vector<double> start_values;
};

/// Starting kappa vectors: 0, then h_i e_i and 10 h_i e_i for each block with
/// h_i = y'Z_i Z_i'y / (k_i y'y); further starts cycle through other scalings.
[[nodiscard]] std::vector<Vector> start_points(const VarCompModel& model, const Vector& y,
                                               int n_starts);

/// Throws NonexistenceError (with witness) when the estimate does not exist,
/// RankDeficiency when X is rank deficient.
[[nodiscard]] FitResult fit_ml(const VarCompModel& model, const Vector& y,
                               const FitOptions& opts = {}, const Tolerance& tol = {});

[[nodiscard]] FitResult fit_reml(const VarCompModel& model, const Vector& y,
                                 const FitOptions& opts = {}, const Tolerance& tol = {});

/// Same, with a caller-supplied contrast basis.
[[nodiscard]] FitResult fit_reml(const VarCompModel& model, const Vector& y,
                                 const RemlBasis& basis, const FitOptions& opts = {},
                                 const Tolerance& tol = {});

/// Subset of the columns of X that spans M(X) with full column rank, kept in
/// their original order. An n x 0 matrix when X = 0.
[[nodiscard]] Matrix full_rank_design(const Matrix& x, const Tolerance& tol = {});

/// ML fit for any X: a rank-deficient X is replaced by full_rank_design(X),
/// beta_hat is left empty and fitted_mean carries the identifiable X beta_hat.
[[nodiscard]] FitResult fit_ml_rank_deficient(const VarCompModel& model, const Vector& y,
                                              const FitOptions& opts = {},
                                              const Tolerance& tol = {});

}  // namespace varcomp
