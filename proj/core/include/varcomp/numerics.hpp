#pragma once

#include <Eigen/Dense>

#include <span>

namespace varcomp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tolerances used by every rank, projection and factorization decision.
///
/// `rel_rank_tol` is relative to the largest singular value of the matrix
/// under inspection, which keeps verdicts invariant under rescaling.
/// `spd_tol` bounds Cholesky pivots relative to the largest diagonal entry.
struct Tolerance {
    double rel_rank_tol = 1e-10;
    double spd_tol = 1e-12;

    /// Throws InvalidInput unless both values are finite and strictly positive.
    void validate() const;
};

void require_finite(const Matrix& a, const char* what);
void require_finite(const Vector& v, const char* what);

/// Number of singular values above `rel_rank_tol * sigma_max`; 0 for the zero
/// matrix and for matrices without columns.
[[nodiscard]] Eigen::Index numerical_rank(const Matrix& a, const Tolerance& tol = {});

/// Orthonormal basis (as columns) of the numerical column space of `a`.
/// The result has exactly numerical_rank(a) columns; possibly zero.
[[nodiscard]] Matrix orthonormal_basis(const Matrix& a, const Tolerance& tol = {});

/// Orthonormal basis of the orthogonal complement of the numerical column
/// space of `a`. Columns of the result together with orthonormal_basis(a)
/// form an orthogonal matrix.
[[nodiscard]] Matrix complement_basis(const Matrix& a, const Tolerance& tol = {});

/// y - B(B'y) with B = orthonormal_basis(a).
[[nodiscard]] Vector project_onto_complement(const Vector& y, const Matrix& a,
                                             const Tolerance& tol = {});

/// Horizontal concatenation [blocks...]. All blocks must share a row count.
[[nodiscard]] Matrix hconcat(std::span<const Matrix> blocks);

/// Cholesky factor of a symmetric positive definite matrix.
///
/// Construction fails with SpdFailure when a pivot is not larger than
/// `spd_tol` times the largest diagonal entry.
class SpdFactor {
public:
    explicit SpdFactor(const Matrix& v, const Tolerance& tol = {});

    [[nodiscard]] Eigen::Index order() const noexcept { return llt_.rows(); }
    [[nodiscard]] double logdet() const noexcept { return logdet_; }
    [[nodiscard]] Vector solve(const Vector& b) const;
    [[nodiscard]] Matrix solve(const Matrix& b) const;
    /// L^{-1} b for V = L L'.
    [[nodiscard]] Matrix solve_lower(const Matrix& b) const;
    /// b' V^{-1} b, computed as the squared norm of L^{-1} b.
    [[nodiscard]] double inverse_quadratic(const Vector& b) const;

private:
    Eigen::LLT<Matrix> llt_;
    double logdet_ = 0.0;
};

[[nodiscard]] double logdet_spd(const Matrix& v, const Tolerance& tol = {});
[[nodiscard]] Vector solve_spd(const Matrix& v, const Vector& b, const Tolerance& tol = {});

[[nodiscard]] double max_abs(const Matrix& a) noexcept;

}  // namespace varcomp
