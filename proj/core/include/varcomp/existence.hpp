#pragma once

#include "varcomp/error.hpp"
#include "varcomp/likelihood.hpp"
#include "varcomp/model.hpp"
#include "varcomp/numerics.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace varcomp {

enum class Method { ML, REML };

[[nodiscard]] std::string_view to_string(Method method) noexcept;

/// Verdict on whether the ML or REML estimate exists for a given y, with the
/// numbers that justify it.
///
/// exists == (residual_norm > tol_used.rel_rank_tol * y_norm), where
/// residual_norm is the length of the component of y orthogonal to M(X, Z).
/// y = 0 is always a nonexistence case.
struct ExistenceCertificate {
    Method kind = Method::ML;
    bool exists = false;
    double residual_norm = 0.0;
    double y_norm = 0.0;
    /// residual_norm / y_norm (0 when y = 0); how far the case is from the boundary.
    double margin = 0.0;
    /// ML only: s_{X,Z} = residual_norm^2.
    std::optional<double> s_xz;
    /// ML only, and only when exists: n log s - n log n + n.
    std::optional<double> lower_bound;
    Tolerance tol_used;
    /// REML only: the test "y not in N M(Z)" taken literally. Reported, never
    /// used for the verdict; it disagrees with the verdict exactly when y lies
    /// in M(X, Z) but has a non-zero component in M(X).
    std::optional<bool> literal_reml_condition;
};

/// Ray along which the criterion decreases without bound (or, for REML when
/// N M(Z) fills M(X)^perp, toward an unattained infimum).
///
/// ML:   beta = beta_star, kappa_0 = 1/t, kappa = kappa_scale * t * 1.
/// REML: sigma^2 = (1/t, kappa_scale, ..., kappa_scale).
///
/// kappa_scale = 2 max_j h_j^2 / d_j, where h is the part of y left after
/// removing X beta_star, expressed in the eigenbasis of Z Z' restricted to
/// M(Z) with eigenvalues d_j. With that scale the derivative of the criterion
/// in log t is bounded by -(n - q) - sum_j 1 / (2 (1 + kappa_scale t d_j)) < 0
/// for every t > 0, so values along any increasing grid strictly decrease.
struct WitnessRay {
    Method kind = Method::ML;
    Vector beta_star;
    double kappa_scale = 1.0;
    std::size_t r = 0;
    std::vector<double> t_grid;

    [[nodiscard]] KappaParams ml_point(double t) const;
    [[nodiscard]] Vector reml_sigma2(double t) const;
};

/// Raised when an estimate does not exist. Carries the certificate and, when
/// one could be built, a witness ray.
class NonexistenceError : public Error {
public:
    NonexistenceError(ExistenceCertificate certificate, std::optional<WitnessRay> witness);

    [[nodiscard]] const ExistenceCertificate& certificate() const noexcept { return cert_; }
    [[nodiscard]] const std::optional<WitnessRay>& witness() const noexcept { return witness_; }

private:
    ExistenceCertificate cert_;
    std::optional<WitnessRay> witness_;
};

/// y' P_{(M(X) + M(Z))^perp} y
[[nodiscard]] double s_xz(const VarCompModel& model, const Vector& y, const Tolerance& tol = {});

[[nodiscard]] ExistenceCertificate ml_exists(const VarCompModel& model, const Vector& y,
                                             const Tolerance& tol = {});

/// The verdict tests N y against N M(Z), which is equivalent to y not in
/// M(X, Z). A rank-deficient X is accepted.
[[nodiscard]] ExistenceCertificate reml_exists(const VarCompModel& model, const Vector& y,
                                               const Tolerance& tol = {});

/// I - X X^+, the orthogonal projector onto M(X)^perp.
[[nodiscard]] Matrix residual_projector(const Matrix& x, const Tolerance& tol = {});

/// n log s_{X,Z} - n log n + n. Throws NonexistenceError when s_{X,Z} = 0.
[[nodiscard]] double ml_lower_bound(const VarCompModel& model, const Vector& y,
                                    const Tolerance& tol = {});

[[nodiscard]] std::vector<double> default_t_grid();

/// Throws Precondition when the ML estimate exists.
[[nodiscard]] WitnessRay nonexistence_witness(const VarCompModel& model, const Vector& y,
                                              const Tolerance& tol = {});
/// Throws Precondition when the REML estimate exists; RankDeficiency for rank-deficient X.
[[nodiscard]] WitnessRay reml_nonexistence_witness(const VarCompModel& model, const Vector& y,
                                                   const Tolerance& tol = {});

/// Criterion values (ML: l~, REML: l_K with orthonormal K) along ray.t_grid.
[[nodiscard]] std::vector<double> witness_trace(const VarCompModel& model, const Vector& y,
                                                const WitnessRay& ray, const Tolerance& tol = {});

enum class ProbeFamily { Kappa0Down, Kappa0Up, KappaUp, BetaUp };

[[nodiscard]] std::string_view to_string(ProbeFamily family) noexcept;
[[nodiscard]] std::optional<ProbeFamily> parse_probe_family(std::string_view name) noexcept;

/// Geometric escape sequences anchored at the point profiled at kappa = 0.
///
/// kappa0-down: kappa_0 = k0_hat * 10^-j         (ML and REML)
/// kappa0-up:   kappa_0 = k0_hat * 10^(6 j)      (ML and REML)
/// kappa-up:    kappa   = 10^(6 j) * 1           (ML: kappa; REML: ratios s_i^2 / s_0^2)
/// beta-up:     beta    = beta_0 + 10^j s v      (ML only; v = top right singular vector of X)
/// for j = 0, ..., length - 1.
[[nodiscard]] std::vector<KappaParams> ml_probe_sequence(const VarCompModel& model,
                                                         const Vector& y, ProbeFamily family,
                                                         int length = 12,
                                                         const Tolerance& tol = {});
[[nodiscard]] std::vector<Vector> reml_probe_sequence(const VarCompModel& model, const Vector& y,
                                                      ProbeFamily family, const RemlBasis& basis,
                                                      int length = 12, const Tolerance& tol = {});

/// ML criterion along a caller-declared sequence. Requires the ML estimate to
/// exist (Precondition otherwise).
[[nodiscard]] std::vector<double> divergence_probe_ml(const VarCompModel& model, const Vector& y,
                                                      const std::vector<KappaParams>& sequence,
                                                      const Tolerance& tol = {});
/// REML criterion along a caller-declared sequence of sigma^2 vectors.
[[nodiscard]] std::vector<double> divergence_probe_reml(const VarCompModel& model,
                                                        const Vector& y,
                                                        const std::vector<Vector>& sequence,
                                                        const RemlBasis& basis,
                                                        const Tolerance& tol = {});

struct GrowthCheck {
    double rise = 0.0;  ///< last - first
    bool rise_ok = false;
    bool tail_increasing = false;

    [[nodiscard]] bool ok() const noexcept { return rise_ok && tail_increasing; }
};

/// last - first >= min_rise, and the final `tail` values strictly increase.
[[nodiscard]] GrowthCheck check_growth(const std::vector<double>& values, double min_rise,
                                       std::size_t tail = 4);

}  // namespace varcomp
