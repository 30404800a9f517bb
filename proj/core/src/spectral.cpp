#include "varcomp/spectral.hpp"

#include "varcomp/error.hpp"

#include <algorithm>
#include <cmath>

namespace varcomp {

Matrix DecompositionResult::a_sum() const
{
    Matrix s = Matrix::Zero(q, q);
    for (const auto& a : a_blocks) {
        s += a;
    }
    return s;
}

Matrix DecompositionResult::inner(const Vector& kappa) const
{
    if (kappa.size() != static_cast<Eigen::Index>(a_blocks.size())) {
        throw Error(ErrorKind::InvalidInput, "kappa length must equal the number of blocks");
    }
    Matrix m = Matrix::Identity(q, q);
    for (std::size_t i = 0; i < a_blocks.size(); ++i) {
        m += kappa(static_cast<Eigen::Index>(i)) * a_blocks[i];
    }
    return m;
}

DecompositionResult decompose_blocks(std::span<const Matrix> blocks, const Tolerance& tol)
{
    const Matrix z = hconcat(blocks);
    const Matrix u1 = orthonormal_basis(z, tol);
    const Matrix u2 = complement_basis(z, tol);
    DecompositionResult out;
    out.q = u1.cols();
    out.u.resize(z.rows(), z.rows());
    out.u << u1, u2;
    out.a_blocks.reserve(blocks.size());
    for (const auto& zi : blocks) {
        const Matrix p = u1.transpose() * zi;
        Matrix a = p * p.transpose();
        out.a_blocks.push_back(0.5 * (a + a.transpose()));
    }
    return out;
}

DecompositionResult scaled_cov_decomposition(const VarCompModel& model, const Tolerance& tol)
{
    return decompose_blocks(model.z_blocks(), tol);
}

EqualKappaResult equal_kappa_diagonalization(const DecompositionResult& dec)
{
    EqualKappaResult out;
    out.u = dec.u;
    if (dec.q == 0) {
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(dec.a_sum());
    out.d = eig.eigenvalues();
    out.u.leftCols(dec.q) = dec.u1() * eig.eigenvectors();
    return out;
}

EqualKappaResult equal_kappa_diagonalization(const VarCompModel& model, const Tolerance& tol)
{
    return equal_kappa_diagonalization(scaled_cov_decomposition(model, tol));
}

Matrix reconstruct(const DecompositionResult& dec, const Vector& kappa)
{
    const Eigen::Index n = dec.u.rows();
    Matrix mid = Matrix::Identity(n, n);
    mid.topLeftCorner(dec.q, dec.q) = dec.inner(kappa);
    return dec.u * mid * dec.u.transpose();
}

Matrix reconstruct(const EqualKappaResult& eq, double c)
{
    Vector mid = Vector::Ones(eq.u.rows());
    mid.head(eq.q()).array() += c * eq.d.array();
    return eq.u * mid.asDiagonal() * eq.u.transpose();
}

double block_logdet(const DecompositionResult& dec, const Vector& kappa, const Tolerance& tol)
{
    if (dec.q == 0) {
        return 0.0;
    }
    return SpdFactor(dec.inner(kappa), tol).logdet();
}

double block_criterion(const DecompositionResult& dec, double kappa0, const Vector& kappa,
                       const Vector& w, const Tolerance& tol)
{
    if (!(kappa0 > 0.0) || !std::isfinite(kappa0)) {
        throw Error(ErrorKind::ParameterDomain, "kappa_0 must be finite and strictly positive");
    }
    if (w.size() != dec.u.rows()) {
        throw Error(ErrorKind::InvalidInput, "residual length does not match the decomposition");
    }
    const auto d = static_cast<double>(w.size());
    const Vector w2 = dec.u2().transpose() * w;
    double logdet = 0.0;
    double quad = w2.squaredNorm();
    if (dec.q > 0) {
        const SpdFactor inner(dec.inner(kappa), tol);
        logdet = inner.logdet();
        quad += inner.inverse_quadratic(dec.u1().transpose() * w);
    }
    return d * std::log(kappa0) + logdet + quad / kappa0;
}

EigenRange eigen_range(const Matrix& symmetric)
{
    if (symmetric.rows() == 0) {
        return {};
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
    const Vector& ev = eig.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

bool is_psd(const Matrix& symmetric)
{
    if (symmetric.rows() == 0) {
        return true;
    }
    const auto range = eigen_range(symmetric);
    const double scale = std::max({1.0, std::abs(range.min), std::abs(range.max)});
    return range.min >= -1e-10 * scale;
}

bool is_pd(const Matrix& symmetric)
{
    if (symmetric.rows() == 0) {
        return false;
    }
    const auto range = eigen_range(symmetric);
    return range.max > 0.0 && range.min > 1e-10 * range.max;
}

}  // namespace varcomp
