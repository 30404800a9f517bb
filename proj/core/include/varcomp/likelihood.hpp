#pragma once

#include "varcomp/model.hpp"
#include "varcomp/numerics.hpp"

namespace varcomp {

// All criteria are "minus twice the log-likelihood" with the usual additive
// constants dropped. Values from different families (ML vs REML) are not
// comparable with each other.

/// log|V(s^2)| + (y - X b)' V^{-1} (y - X b)
[[nodiscard]] double neg2_loglik(const VarCompModel& model, const SigmaParams& params,
                                 const Vector& y, const Tolerance& tol = {});

/// n log k_0 + log|V~(k)| + k_0^{-1} (y - X b)' V~^{-1}(k) (y - X b)
[[nodiscard]] double neg2_loglik_kappa(const VarCompModel& model, const KappaParams& params,
                                       const Vector& y, const Tolerance& tol = {});

/// Generalized least squares estimate of beta for fixed kappa. Requires X of
/// full column rank; throws RankDeficiency otherwise.
[[nodiscard]] Vector gls_beta(const VarCompModel& model, const Vector& kappa, const Vector& y,
                              const Tolerance& tol = {});

/// Everything produced when beta and kappa_0 are profiled out at fixed kappa.
struct MlProfile {
    Vector beta;          ///< GLS estimate
    double quad = 0.0;    ///< (y - X beta)' V~^{-1} (y - X beta)
    double logdet = 0.0;  ///< log|V~(kappa)|
    double kappa0 = 0.0;  ///< quad / n
    double value = 0.0;   ///< n log kappa0 + logdet + n
};

/// Throws DegenerateFit when the GLS residual is numerically zero
/// (quad <= spd_tol * |y|^2); consult the existence certificate in that case.
[[nodiscard]] MlProfile profile_ml(const VarCompModel& model, const Vector& kappa,
                                   const Vector& y, const Tolerance& tol = {});

[[nodiscard]] double profile_kappa0(const VarCompModel& model, const Vector& kappa,
                                    const Vector& y, const Tolerance& tol = {});

[[nodiscard]] double profiled_criterion(const VarCompModel& model, const Vector& kappa,
                                        const Vector& y, const Tolerance& tol = {});

/// Contrast matrix K with K'X = 0 and rank n - m.
struct RemlBasis {
    Matrix k;
    bool orthonormal = true;
};

/// Orthonormal basis of the orthogonal complement of M(X). X must have full
/// column rank (RankDeficiency otherwise).
[[nodiscard]] RemlBasis reml_contrast_matrix(const Matrix& x, const Tolerance& tol = {});

/// Wraps a caller-supplied K after checking rank(K) = n - m and K'X = 0.
[[nodiscard]] RemlBasis make_reml_basis(const Matrix& x, Matrix k, const Tolerance& tol = {});

/// K = Q R with Q orthonormal. Then l_K = l_Q + log|R'R|, so criteria are
/// evaluated through Q and offset by log_det_rr; the offset is 0 for an
/// orthonormal basis.
struct ContrastFrame {
    Matrix q;
    double log_det_rr = 0.0;
};

[[nodiscard]] ContrastFrame contrast_frame(const RemlBasis& basis);

/// log|K'V(s^2)K| + y'K (K'V(s^2)K)^{-1} K'y
[[nodiscard]] double reml_criterion(const VarCompModel& model, const Vector& sigma2,
                                    const Vector& y, const RemlBasis& basis,
                                    const Tolerance& tol = {});

/// REML criterion with the overall scale s_0^2 profiled out at fixed
/// ratios kappa_i = s_i^2 / s_0^2. The profile dimension is n - m.
struct RemlProfile {
    double quad = 0.0;    ///< y'K (K'V~K)^{-1} K'y
    double logdet = 0.0;  ///< log|K'V~(kappa)K|
    double sigma0 = 0.0;  ///< quad / (n - m)
    double value = 0.0;
};

[[nodiscard]] RemlProfile profile_reml(const VarCompModel& model, const Vector& kappa,
                                       const Vector& y, const RemlBasis& basis,
                                       const Tolerance& tol = {});

[[nodiscard]] double reml_profiled_criterion(const VarCompModel& model, const Vector& kappa,
                                             const Vector& y, const RemlBasis& basis,
                                             const Tolerance& tol = {});

}  // namespace varcomp
