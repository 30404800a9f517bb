#pragma once

#include "varcomp/numerics.hpp"

#include <cstdint>
#include <vector>

namespace varcomp {

/// Y = X beta + sum_i Z_i u_i + eps with u_i ~ N(0, s_i^2 I) and eps ~ N(0, s_0^2 I).
///
/// Immutable once built. Blocks are kept exactly as supplied; any span or
/// rank question is answered on demand through the numerics kernels.
class VarCompModel {
public:
    [[nodiscard]] const Matrix& x() const noexcept { return x_; }
    [[nodiscard]] const std::vector<Matrix>& z_blocks() const noexcept { return z_blocks_; }
    [[nodiscard]] const Matrix& z_block(std::size_t i) const { return z_blocks_.at(i); }
    /// [Z_1, ..., Z_r]
    [[nodiscard]] const Matrix& z() const noexcept { return z_; }
    /// [X, Z_1, ..., Z_r]
    [[nodiscard]] Matrix xz() const;

    [[nodiscard]] Eigen::Index n() const noexcept { return x_.rows(); }
    [[nodiscard]] Eigen::Index m() const noexcept { return x_.cols(); }
    [[nodiscard]] std::size_t r() const noexcept { return z_blocks_.size(); }
    [[nodiscard]] Eigen::Index k(std::size_t i) const { return z_blocks_.at(i).cols(); }
    [[nodiscard]] Eigen::Index rank_x() const noexcept { return rank_x_; }
    [[nodiscard]] bool full_rank_x() const noexcept { return rank_x_ == x_.cols(); }

private:
    friend VarCompModel build_model(Matrix x, std::vector<Matrix> z_blocks, const Tolerance& tol);
    VarCompModel() = default;

    Matrix x_;
    std::vector<Matrix> z_blocks_;
    Matrix z_;
    Eigen::Index rank_x_ = 0;
};

/// Validates dimensions and the model assumptions (sum k_i < n, m < n for a
/// non-zero X, Z not identically zero). A rank-deficient X is accepted and
/// recorded. X may have zero columns (no fixed effects).
[[nodiscard]] VarCompModel build_model(Matrix x, std::vector<Matrix> z_blocks,
                                       const Tolerance& tol = {});

/// Point of Theta: (beta, sigma_0^2, ..., sigma_r^2).
struct SigmaParams {
    Vector beta;
    Vector sigma2;
};

/// Point of the scaled parameterization: kappa_0 = sigma_0^2, kappa_i = sigma_i^2 / sigma_0^2.
struct KappaParams {
    Vector beta;
    double kappa0 = 1.0;
    Vector kappa;
};

struct ScaleSplit {
    double kappa0 = 1.0;
    Vector kappa;
};

/// Throws ParameterDomain unless sigma2 has r+1 entries, sigma2(0) > 0 and the rest >= 0.
void validate_sigma2(const VarCompModel& model, const Vector& sigma2);
void validate_kappa(const VarCompModel& model, const Vector& kappa);
void validate(const VarCompModel& model, const SigmaParams& params);
void validate(const VarCompModel& model, const KappaParams& params);

/// V(s^2) = s_0^2 I + sum_i s_i^2 Z_i Z_i'
[[nodiscard]] Matrix covariance(const VarCompModel& model, const Vector& sigma2);
/// V~(k) = I + sum_i k_i Z_i Z_i'
[[nodiscard]] Matrix scaled_covariance(const VarCompModel& model, const Vector& kappa);

[[nodiscard]] ScaleSplit sigma_to_kappa(const Vector& sigma2);
[[nodiscard]] Vector kappa_to_sigma(double kappa0, const Vector& kappa);
[[nodiscard]] KappaParams to_kappa(const SigmaParams& params);
[[nodiscard]] SigmaParams to_sigma(const KappaParams& params);

/// Draws one observation vector from the model.
///
/// Each random term has its own stream derived from `seed` (stream i for u_i,
/// i = 1..r, then stream r+1 for eps), so the draw is reproducible bit for bit
/// and adding a block does not perturb the draws of earlier blocks.
[[nodiscard]] Vector simulate(const VarCompModel& model, const SigmaParams& params,
                              std::uint64_t seed);

}  // namespace varcomp
