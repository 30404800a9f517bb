#pragma once

#include "varcomp/model.hpp"
#include "varcomp/numerics.hpp"

#include <span>
#include <vector>

namespace varcomp {

/// V~(k) = U [ I_q + sum_i k_i A_i , 0 ; 0 , I_{n-q} ] U'
///
/// The first q columns of U span H = M(Z); the rest span its complement and
/// are an arbitrary orthonormal choice. A_i is only non-negative definite in
/// general (its rank is rank(Z_i)); the sum of the A_i is positive definite.
struct DecompositionResult {
    Matrix u;
    std::vector<Matrix> a_blocks;
    Eigen::Index q = 0;

    [[nodiscard]] auto u1() const { return u.leftCols(q); }
    [[nodiscard]] auto u2() const { return u.rightCols(u.cols() - q); }
    /// sum_i A_i
    [[nodiscard]] Matrix a_sum() const;
    /// I_q + sum_i k_i A_i
    [[nodiscard]] Matrix inner(const Vector& kappa) const;
};

/// Equal-kappa form: V~(c 1) = U [ I_q + c D , 0 ; 0 , I_{n-q} ] U'.
struct EqualKappaResult {
    Matrix u;
    Vector d;

    [[nodiscard]] Eigen::Index q() const noexcept { return d.size(); }
};

/// Block decomposition for an arbitrary list of blocks sharing a row count.
/// Unlike scaled_cov_decomposition this accepts q = 0.
[[nodiscard]] DecompositionResult decompose_blocks(std::span<const Matrix> blocks,
                                                   const Tolerance& tol = {});

[[nodiscard]] DecompositionResult scaled_cov_decomposition(const VarCompModel& model,
                                                           const Tolerance& tol = {});

[[nodiscard]] EqualKappaResult equal_kappa_diagonalization(const DecompositionResult& dec);
[[nodiscard]] EqualKappaResult equal_kappa_diagonalization(const VarCompModel& model,
                                                           const Tolerance& tol = {});

[[nodiscard]] Matrix reconstruct(const DecompositionResult& dec, const Vector& kappa);
[[nodiscard]] Matrix reconstruct(const EqualKappaResult& eq, double c);

/// log|V~(kappa)| = log|I_q + sum_i k_i A_i|
[[nodiscard]] double block_logdet(const DecompositionResult& dec, const Vector& kappa,
                                  const Tolerance& tol = {});

/// d log k_0 + log|V~(k)| + k_0^{-1} w' V~^{-1}(k) w with d = dim of w,
/// evaluated through the q x q block. Stays accurate when kappa is so large
/// that V~ itself cannot be factored in floating point.
[[nodiscard]] double block_criterion(const DecompositionResult& dec, double kappa0,
                                     const Vector& kappa, const Vector& w,
                                     const Tolerance& tol = {});

struct EigenRange {
    double min = 0.0;
    double max = 0.0;
};

[[nodiscard]] EigenRange eigen_range(const Matrix& symmetric);

/// Eigenvalues >= -1e-10 * max(1, |lambda|_max); small negatives are roundoff.
[[nodiscard]] bool is_psd(const Matrix& symmetric);
/// lambda_min > 1e-10 * lambda_max > 0
[[nodiscard]] bool is_pd(const Matrix& symmetric);

}  // namespace varcomp
