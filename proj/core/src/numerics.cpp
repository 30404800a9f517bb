#include "varcomp/numerics.hpp"

#include "varcomp/error.hpp"

#include <cmath>
#include <string>

namespace varcomp {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::SpdFailure: return "spd-failure";
    case ErrorKind::ModelAssumption: return "model-assumption";
    case ErrorKind::ParameterDomain: return "parameter-domain";
    case ErrorKind::RankDeficiency: return "rank-deficiency";
    case ErrorKind::DegenerateFit: return "degenerate-fit";
    case ErrorKind::Nonexistence: return "nonexistence";
    case ErrorKind::Precondition: return "precondition";
    }
    return "unknown";
}

void Tolerance::validate() const
{
    if (!(std::isfinite(rel_rank_tol) && rel_rank_tol > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "rel_rank_tol must be finite and positive");
    }
    if (!(std::isfinite(spd_tol) && spd_tol > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "spd_tol must be finite and positive");
    }
}

void require_finite(const Matrix& a, const char* what)
{
    if (!a.allFinite()) {
        throw Error(ErrorKind::InvalidInput, std::string(what) + " has non-finite entries");
    }
}

void require_finite(const Vector& v, const char* what)
{
    if (!v.allFinite()) {
        throw Error(ErrorKind::InvalidInput, std::string(what) + " has non-finite entries");
    }
}

namespace {

void require_rows(const Matrix& a)
{
    if (a.rows() < 1) {
        throw Error(ErrorKind::InvalidInput, "matrix must have at least one row");
    }
}

struct SvdSplit {
    Matrix u;  // n x n when full, n x min(n, cols) when thin
    Eigen::Index rank = 0;
};

SvdSplit split_column_space(const Matrix& a, const Tolerance& tol, bool full)
{
    tol.validate();
    require_rows(a);
    require_finite(a, "matrix");
    const Eigen::Index n = a.rows();
    if (a.cols() == 0 || a.isZero(0.0)) {
        return {full ? Matrix::Identity(n, n) : Matrix(n, 0), 0};
    }
    const unsigned options = full ? Eigen::ComputeFullU : Eigen::ComputeThinU;
    Eigen::JacobiSVD<Matrix> svd(a, options);
    const Vector& s = svd.singularValues();
    const double cutoff = tol.rel_rank_tol * s(0);
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cutoff) {
        ++rank;
    }
    return {svd.matrixU(), rank};
}

}  // namespace

Eigen::Index numerical_rank(const Matrix& a, const Tolerance& tol)
{
    tol.validate();
    require_rows(a);
    require_finite(a, "matrix");
    if (a.cols() == 0 || a.isZero(0.0)) {
        return 0;
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector& s = svd.singularValues();
    const double cutoff = tol.rel_rank_tol * s(0);
    return (s.array() > cutoff).count();
}

Matrix orthonormal_basis(const Matrix& a, const Tolerance& tol)
{
    auto split = split_column_space(a, tol, false);
    return split.u.leftCols(split.rank);
}

Matrix complement_basis(const Matrix& a, const Tolerance& tol)
{
    auto split = split_column_space(a, tol, true);
    return split.u.rightCols(a.rows() - split.rank);
}

Vector project_onto_complement(const Vector& y, const Matrix& a, const Tolerance& tol)
{
    if (y.size() != a.rows()) {
        throw Error(ErrorKind::InvalidInput, "project_onto_complement: dimension mismatch");
    }
    require_finite(y, "vector");
    const Matrix basis = orthonormal_basis(a, tol);
    Vector out = y - basis * (basis.transpose() * y);
    return out;
}

Matrix hconcat(std::span<const Matrix> blocks)
{
    if (blocks.empty()) {
        throw Error(ErrorKind::InvalidInput, "hconcat: no blocks");
    }
    const Eigen::Index rows = blocks.front().rows();
    Eigen::Index cols = 0;
    for (const auto& b : blocks) {
        if (b.rows() != rows) {
            throw Error(ErrorKind::InvalidInput, "hconcat: row count mismatch");
        }
        cols += b.cols();
    }
    Matrix out(rows, cols);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        out.middleCols(at, b.cols()) = b;
        at += b.cols();
    }
    return out;
}

SpdFactor::SpdFactor(const Matrix& v, const Tolerance& tol)
{
    tol.validate();
    if (v.rows() != v.cols() || v.rows() == 0) {
        throw Error(ErrorKind::InvalidInput, "SPD factorization needs a non-empty square matrix");
    }
    require_finite(v, "matrix");
    const double max_diag = v.diagonal().maxCoeff();
    if (!(max_diag > 0.0)) {
        throw Error(ErrorKind::SpdFailure, "matrix is not positive definite (non-positive diagonal)");
    }
    llt_.compute(v);
    if (llt_.info() != Eigen::Success) {
        throw Error(ErrorKind::SpdFailure, "matrix is not positive definite");
    }
    const auto diag = llt_.matrixLLT().diagonal();
    const double floor = tol.spd_tol * max_diag;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        const double pivot = diag(i) * diag(i);
        if (!(pivot > floor)) {
            throw Error(ErrorKind::SpdFailure,
                        "matrix is numerically singular (pivot " + std::to_string(i) + ")");
        }
        acc += std::log(diag(i));
    }
    logdet_ = 2.0 * acc;
}

Vector SpdFactor::solve(const Vector& b) const
{
    if (b.size() != order()) {
        throw Error(ErrorKind::InvalidInput, "solve: dimension mismatch");
    }
    return llt_.solve(b);
}

Matrix SpdFactor::solve(const Matrix& b) const
{
    if (b.rows() != order()) {
        throw Error(ErrorKind::InvalidInput, "solve: dimension mismatch");
    }
    return llt_.solve(b);
}

Matrix SpdFactor::solve_lower(const Matrix& b) const
{
    if (b.rows() != order()) {
        throw Error(ErrorKind::InvalidInput, "solve: dimension mismatch");
    }
    return llt_.matrixL().solve(b);
}

double SpdFactor::inverse_quadratic(const Vector& b) const
{
    if (b.size() != order()) {
        throw Error(ErrorKind::InvalidInput, "quadratic form: dimension mismatch");
    }
    const Vector w = llt_.matrixL().solve(b);
    return w.squaredNorm();
}

double logdet_spd(const Matrix& v, const Tolerance& tol)
{
    return SpdFactor(v, tol).logdet();
}

Vector solve_spd(const Matrix& v, const Vector& b, const Tolerance& tol)
{
    require_finite(b, "right-hand side");
    return SpdFactor(v, tol).solve(b);
}

double max_abs(const Matrix& a) noexcept
{
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace varcomp
