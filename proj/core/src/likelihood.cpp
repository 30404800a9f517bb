#include "varcomp/likelihood.hpp"

#include "varcomp/error.hpp"

#include <cmath>

namespace varcomp {

namespace {

void require_observation(const VarCompModel& model, const Vector& y)
{
    if (y.size() != model.n()) {
        throw Error(ErrorKind::InvalidInput, "observation vector length must equal n");
    }
    require_finite(y, "y");
}

void require_basis(const VarCompModel& model, const RemlBasis& basis)
{
    if (basis.k.rows() != model.n() || basis.k.cols() < 1) {
        throw Error(ErrorKind::InvalidInput, "REML basis has the wrong shape");
    }
}

/// Penalized least squares: min over (b, v) of |y - X b - Z D^{1/2} v|^2 + |v|^2
/// with D = diag(kappa) expanded over the columns of each block. The minimum is
/// (y - X b_gls)' V~^{-1} (y - X b_gls) and the leading triangular factor gives
/// log|V~|. The residual is read off a Householder QR of the stacked system, so
/// it stays accurate when it is tiny compared with |y|.
struct PenalizedFit {
    Vector beta;
    double quad = 0.0;
    double logdet = 0.0;
};

PenalizedFit penalized_ls(const Matrix& zs, const Matrix& x, const Vector& y,
                          const Tolerance& tol)
{
    const Eigen::Index n = zs.rows();
    const Eigen::Index k = zs.cols();
    const Eigen::Index m = x.cols();
    Matrix a = Matrix::Zero(n + k, k + m);
    a.topLeftCorner(n, k) = zs;
    a.topRightCorner(n, m) = x;
    a.bottomLeftCorner(k, k).setIdentity();
    Vector rhs = Vector::Zero(n + k);
    rhs.head(n) = y;

    const Eigen::HouseholderQR<Matrix> qr(a);
    const Vector qty = qr.householderQ().adjoint() * rhs;
    const auto r = qr.matrixQR().topLeftCorner(k + m, k + m).triangularView<Eigen::Upper>();
    PenalizedFit out;
    for (Eigen::Index i = 0; i < k; ++i) {
        out.logdet += 2.0 * std::log(std::abs(qr.matrixQR()(i, i)));
    }
    out.quad = qty.tail(n - m).squaredNorm();
    if (m > 0) {
        const auto r22 = qr.matrixQR().block(k, k, m, m).diagonal().cwiseAbs();
        if (!(r22.minCoeff() > tol.rel_rank_tol * r22.maxCoeff()) || !(r22.minCoeff() > 0.0)) {
            throw Error(ErrorKind::RankDeficiency,
                        "X' V^{-1} X is singular (X is rank deficient)");
        }
        out.beta = r.solve(qty.head(k + m)).tail(m);
    } else {
        out.beta = Vector(0);
    }
    return out;
}

/// Z D^{1/2}
Matrix scaled_z(const VarCompModel& model, const Vector& kappa)
{
    validate_kappa(model, kappa);
    Matrix zs = model.z();
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < model.r(); ++i) {
        const Eigen::Index ki = model.k(i);
        zs.middleCols(col, ki) *= std::sqrt(kappa(static_cast<Eigen::Index>(i)));
        col += ki;
    }
    return zs;
}

}  // namespace

double neg2_loglik(const VarCompModel& model, const SigmaParams& params, const Vector& y,
                   const Tolerance& tol)
{
    validate(model, params);
    require_observation(model, y);
    const SpdFactor v(covariance(model, params.sigma2), tol);
    const Vector resid = y - model.x() * params.beta;
    return v.logdet() + v.inverse_quadratic(resid);
}

double neg2_loglik_kappa(const VarCompModel& model, const KappaParams& params, const Vector& y,
                         const Tolerance& tol)
{
    validate(model, params);
    require_observation(model, y);
    const SpdFactor v(scaled_covariance(model, params.kappa), tol);
    const Vector resid = y - model.x() * params.beta;
    const auto n = static_cast<double>(model.n());
    return n * std::log(params.kappa0) + v.logdet() + v.inverse_quadratic(resid) / params.kappa0;
}

Vector gls_beta(const VarCompModel& model, const Vector& kappa, const Vector& y,
                const Tolerance& tol)
{
    require_observation(model, y);
    if (!model.full_rank_x()) {
        throw Error(ErrorKind::RankDeficiency, "gls_beta requires X of full column rank");
    }
    return penalized_ls(scaled_z(model, kappa), model.x(), y, tol).beta;
}

MlProfile profile_ml(const VarCompModel& model, const Vector& kappa, const Vector& y,
                     const Tolerance& tol)
{
    require_observation(model, y);
    if (!model.full_rank_x()) {
        throw Error(ErrorKind::RankDeficiency,
                    "profiling beta requires X of full column rank; reduce X first");
    }
    auto w = penalized_ls(scaled_z(model, kappa), model.x(), y, tol);
    if (!(w.quad > tol.spd_tol * y.squaredNorm())) {
        throw Error(ErrorKind::DegenerateFit,
                    "GLS residual is numerically zero; y lies in M(X, Z) at this kappa");
    }
    const auto n = static_cast<double>(model.n());
    MlProfile out;
    out.beta = std::move(w.beta);
    out.quad = w.quad;
    out.logdet = w.logdet;
    out.kappa0 = w.quad / n;
    out.value = n * std::log(out.kappa0) + out.logdet + n;
    return out;
}

double profile_kappa0(const VarCompModel& model, const Vector& kappa, const Vector& y,
                      const Tolerance& tol)
{
    return profile_ml(model, kappa, y, tol).kappa0;
}

double profiled_criterion(const VarCompModel& model, const Vector& kappa, const Vector& y,
                          const Tolerance& tol)
{
    return profile_ml(model, kappa, y, tol).value;
}

RemlBasis reml_contrast_matrix(const Matrix& x, const Tolerance& tol)
{
    const auto rank = numerical_rank(x, tol);
    if (rank != x.cols()) {
        throw Error(ErrorKind::RankDeficiency,
                    "REML contrasts require X of full column rank (rank " + std::to_string(rank) +
                        " < " + std::to_string(x.cols()) + ")");
    }
    return {complement_basis(x, tol), true};
}

RemlBasis make_reml_basis(const Matrix& x, Matrix k, const Tolerance& tol)
{
    require_finite(k, "K");
    if (k.rows() != x.rows() || k.cols() != x.rows() - x.cols()) {
        throw Error(ErrorKind::InvalidInput, "K must be n x (n - m)");
    }
    if (numerical_rank(x, tol) != x.cols()) {
        throw Error(ErrorKind::RankDeficiency, "REML contrasts require X of full column rank");
    }
    if (numerical_rank(k, tol) != k.cols()) {
        throw Error(ErrorKind::InvalidInput, "K must have rank n - m");
    }
    if (x.cols() > 0) {
        const double scale = std::max(1.0, max_abs(k) * max_abs(x));
        if (max_abs(k.transpose() * x) > 1e-10 * scale) {
            throw Error(ErrorKind::InvalidInput, "K'X must vanish");
        }
    }
    const Eigen::Index d = k.cols();
    const bool ortho = (k.transpose() * k - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-12;
    return {std::move(k), ortho};
}

ContrastFrame contrast_frame(const RemlBasis& basis)
{
    if (basis.orthonormal) {
        return {basis.k, 0.0};
    }
    const Eigen::HouseholderQR<Matrix> qr(basis.k);
    const Eigen::Index d = basis.k.cols();
    ContrastFrame frame;
    frame.q = qr.householderQ() * Matrix::Identity(basis.k.rows(), d);
    const auto r = qr.matrixQR().diagonal();
    for (Eigen::Index i = 0; i < d; ++i) {
        frame.log_det_rr += 2.0 * std::log(std::abs(r(i)));
    }
    return frame;
}

double reml_criterion(const VarCompModel& model, const Vector& sigma2, const Vector& y,
                      const RemlBasis& basis, const Tolerance& tol)
{
    validate_sigma2(model, sigma2);
    require_observation(model, y);
    require_basis(model, basis);
    const ContrastFrame frame = contrast_frame(basis);
    const Matrix& q = frame.q;
    const SpdFactor qvq(q.transpose() * covariance(model, sigma2) * q, tol);
    return frame.log_det_rr + qvq.logdet() + qvq.inverse_quadratic(q.transpose() * y);
}

RemlProfile profile_reml(const VarCompModel& model, const Vector& kappa, const Vector& y,
                         const RemlBasis& basis, const Tolerance& tol)
{
    require_observation(model, y);
    require_basis(model, basis);
    const ContrastFrame frame = contrast_frame(basis);
    const Matrix& q = frame.q;
    const Vector qy = q.transpose() * y;
    const PenalizedFit w =
        penalized_ls(q.transpose() * scaled_z(model, kappa), Matrix(q.cols(), 0), qy, tol);
    const double quad = w.quad;
    if (!(quad > tol.spd_tol * qy.squaredNorm()) || !(quad > 0.0)) {
        throw Error(ErrorKind::DegenerateFit,
                    "REML residual is numerically zero; K'y lies in K'M(Z) at this kappa");
    }
    const auto d = static_cast<double>(q.cols());
    RemlProfile out;
    out.quad = quad;
    out.logdet = frame.log_det_rr + w.logdet;
    out.sigma0 = quad / d;
    out.value = d * std::log(out.sigma0) + out.logdet + d;
    return out;
}

double reml_profiled_criterion(const VarCompModel& model, const Vector& kappa, const Vector& y,
                               const RemlBasis& basis, const Tolerance& tol)
{
    return profile_reml(model, kappa, y, basis, tol).value;
}

}  // namespace varcomp
