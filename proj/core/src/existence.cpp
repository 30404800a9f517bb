#include "varcomp/existence.hpp"

#include "varcomp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace varcomp {

std::string_view to_string(Method method) noexcept
{
    return method == Method::ML ? "ML" : "REML";
}

namespace {

void require_observation(const VarCompModel& model, const Vector& y)
{
    if (y.size() != model.n()) {
        throw Error(ErrorKind::InvalidInput, "observation vector length must equal n");
    }
    require_finite(y, "y");
}

std::string nonexistence_message(const ExistenceCertificate& cert)
{
    return std::string("the ") + std::string(to_string(cert.kind)) +
           " estimate does not exist: y lies in M(X, Z) (residual " +
           std::to_string(cert.residual_norm) + ")";
}

/// Min-norm least-squares coefficients of y on the columns of a.
Vector least_squares(const Matrix& a, const Vector& y, const Tolerance& tol)
{
    if (a.cols() == 0) {
        return Vector(0);
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    cod.setThreshold(tol.rel_rank_tol);
    return cod.solve(y);
}

/// 2 max_j h_j^2 / d_j over the eigenbasis of sum_i A_i.
double ray_scale(const DecompositionResult& dec, const Vector& h)
{
    if (dec.q == 0) {
        return 0.0;
    }
    const auto eq = equal_kappa_diagonalization(dec);
    const Vector coords = eq.u.leftCols(eq.q()).transpose() * h;
    double scale = 0.0;
    for (Eigen::Index j = 0; j < eq.q(); ++j) {
        if (eq.d(j) > 0.0) {
            scale = std::max(scale, coords(j) * coords(j) / eq.d(j));
        }
    }
    return 2.0 * scale;
}

std::vector<Matrix> project_blocks(const Matrix& k, const VarCompModel& model)
{
    std::vector<Matrix> out;
    out.reserve(model.r());
    for (const auto& zi : model.z_blocks()) {
        out.emplace_back(k.transpose() * zi);
    }
    return out;
}

double pow10(double e)
{
    return std::pow(10.0, e);
}

}  // namespace

KappaParams WitnessRay::ml_point(double t) const
{
    return {beta_star, 1.0 / t, Vector::Constant(static_cast<Eigen::Index>(r), kappa_scale * t)};
}

Vector WitnessRay::reml_sigma2(double t) const
{
    Vector s2 = Vector::Constant(static_cast<Eigen::Index>(r) + 1, kappa_scale);
    s2(0) = 1.0 / t;
    return s2;
}

NonexistenceError::NonexistenceError(ExistenceCertificate certificate,
                                     std::optional<WitnessRay> witness)
    : Error(ErrorKind::Nonexistence, nonexistence_message(certificate)),
      cert_(std::move(certificate)),
      witness_(std::move(witness))
{
}

double s_xz(const VarCompModel& model, const Vector& y, const Tolerance& tol)
{
    require_observation(model, y);
    return project_onto_complement(y, model.xz(), tol).squaredNorm();
}

ExistenceCertificate ml_exists(const VarCompModel& model, const Vector& y, const Tolerance& tol)
{
    require_observation(model, y);
    ExistenceCertificate cert;
    cert.kind = Method::ML;
    cert.tol_used = tol;
    cert.y_norm = y.norm();
    const Vector resid = project_onto_complement(y, model.xz(), tol);
    cert.residual_norm = resid.norm();
    cert.exists = cert.residual_norm > tol.rel_rank_tol * cert.y_norm;
    cert.margin = cert.y_norm > 0.0 ? cert.residual_norm / cert.y_norm : 0.0;
    const double s = resid.squaredNorm();
    cert.s_xz = s;
    if (cert.exists) {
        const auto n = static_cast<double>(model.n());
        cert.lower_bound = n * std::log(s) - n * std::log(n) + n;
    }
    return cert;
}

Matrix residual_projector(const Matrix& x, const Tolerance& tol)
{
    const Matrix b = orthonormal_basis(x, tol);
    const Eigen::Index n = x.rows();
    Matrix p = Matrix::Identity(n, n) - b * b.transpose();
    return 0.5 * (p + p.transpose());
}

ExistenceCertificate reml_exists(const VarCompModel& model, const Vector& y, const Tolerance& tol)
{
    require_observation(model, y);
    const Matrix nproj = residual_projector(model.x(), tol);
    const Matrix nz = nproj * model.z();
    const Vector ny = nproj * y;

    ExistenceCertificate cert;
    cert.kind = Method::REML;
    cert.tol_used = tol;
    cert.y_norm = y.norm();
    cert.residual_norm = project_onto_complement(ny, nz, tol).norm();
    cert.exists = cert.residual_norm > tol.rel_rank_tol * cert.y_norm;
    cert.margin = cert.y_norm > 0.0 ? cert.residual_norm / cert.y_norm : 0.0;
    const double literal = project_onto_complement(y, nz, tol).norm();
    cert.literal_reml_condition = literal > tol.rel_rank_tol * cert.y_norm;
    return cert;
}

double ml_lower_bound(const VarCompModel& model, const Vector& y, const Tolerance& tol)
{
    auto cert = ml_exists(model, y, tol);
    if (!cert.exists) {
        throw NonexistenceError(std::move(cert), std::nullopt);
    }
    return *cert.lower_bound;
}

std::vector<double> default_t_grid()
{
    return {1e1, 1e2, 1e3, 1e4};
}

WitnessRay nonexistence_witness(const VarCompModel& model, const Vector& y, const Tolerance& tol)
{
    const auto cert = ml_exists(model, y, tol);
    if (cert.exists) {
        throw Error(ErrorKind::Precondition,
                    "nonexistence witness requested but the ML estimate exists");
    }
    const Vector coef = least_squares(model.xz(), y, tol);
    WitnessRay ray;
    ray.kind = Method::ML;
    ray.r = model.r();
    ray.beta_star = coef.head(model.m());
    const Vector h = y - model.x() * ray.beta_star;
    ray.kappa_scale = ray_scale(scaled_cov_decomposition(model, tol), h);
    ray.t_grid = default_t_grid();
    return ray;
}

WitnessRay reml_nonexistence_witness(const VarCompModel& model, const Vector& y,
                                     const Tolerance& tol)
{
    const auto basis = reml_contrast_matrix(model.x(), tol);
    const auto cert = reml_exists(model, y, tol);
    if (cert.exists) {
        throw Error(ErrorKind::Precondition,
                    "nonexistence witness requested but the REML estimate exists");
    }
    const auto blocks = project_blocks(basis.k, model);
    WitnessRay ray;
    ray.kind = Method::REML;
    ray.r = model.r();
    ray.kappa_scale = ray_scale(decompose_blocks(blocks, tol), basis.k.transpose() * y);
    ray.t_grid = default_t_grid();
    return ray;
}

std::vector<double> witness_trace(const VarCompModel& model, const Vector& y,
                                  const WitnessRay& ray, const Tolerance& tol)
{
    require_observation(model, y);
    std::vector<double> values;
    values.reserve(ray.t_grid.size());
    if (ray.r != model.r()) {
        throw Error(ErrorKind::InvalidInput, "witness ray was built for a different model");
    }
    if (ray.kind == Method::ML) {
        const auto dec = scaled_cov_decomposition(model, tol);
        const Vector w = y - model.x() * ray.beta_star;
        for (double t : ray.t_grid) {
            const auto p = ray.ml_point(t);
            values.push_back(block_criterion(dec, p.kappa0, p.kappa, w, tol));
        }
        return values;
    }
    const auto basis = reml_contrast_matrix(model.x(), tol);
    const auto dec = decompose_blocks(project_blocks(basis.k, model), tol);
    const Vector w = basis.k.transpose() * y;
    for (double t : ray.t_grid) {
        const Vector s2 = ray.reml_sigma2(t);
        values.push_back(block_criterion(dec, s2(0), s2.tail(s2.size() - 1) / s2(0), w, tol));
    }
    return values;
}

std::string_view to_string(ProbeFamily family) noexcept
{
    switch (family) {
    case ProbeFamily::Kappa0Down: return "kappa0-down";
    case ProbeFamily::Kappa0Up: return "kappa0-up";
    case ProbeFamily::KappaUp: return "kappa-up";
    case ProbeFamily::BetaUp: return "beta-up";
    }
    return "unknown";
}

std::optional<ProbeFamily> parse_probe_family(std::string_view name) noexcept
{
    for (auto f : {ProbeFamily::Kappa0Down, ProbeFamily::Kappa0Up, ProbeFamily::KappaUp,
                   ProbeFamily::BetaUp}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    return std::nullopt;
}

std::vector<KappaParams> ml_probe_sequence(const VarCompModel& model, const Vector& y,
                                           ProbeFamily family, int length, const Tolerance& tol)
{
    require_observation(model, y);
    if (length < 2) {
        throw Error(ErrorKind::InvalidInput, "probe sequences need at least two elements");
    }
    const Vector beta0 = least_squares(model.x(), y, tol);
    const double k0 = (y - model.x() * beta0).squaredNorm() / static_cast<double>(model.n());
    if (!(k0 > 0.0)) {
        throw Error(ErrorKind::Precondition, "y lies in M(X); the ML estimate does not exist");
    }
    const auto r = static_cast<Eigen::Index>(model.r());
    const KappaParams base{beta0, k0, Vector::Zero(r)};

    double kappa_unit = 1.0;
    Vector direction;
    double beta_unit = 0.0;
    if (family == ProbeFamily::KappaUp) {
        const double top = eigen_range(scaled_cov_decomposition(model, tol).a_sum()).max;
        kappa_unit = top > 0.0 ? 1.0 / top : 1.0;
    }
    if (family == ProbeFamily::BetaUp) {
        if (model.m() == 0 || model.x().isZero(0.0)) {
            throw Error(ErrorKind::Precondition, "beta-up needs a non-zero design matrix X");
        }
        Eigen::JacobiSVD<Matrix> svd(model.x(), Eigen::ComputeThinV);
        direction = svd.matrixV().col(0);
        beta_unit = y.norm() / svd.singularValues()(0);
    }

    std::vector<KappaParams> seq;
    seq.reserve(static_cast<std::size_t>(length));
    for (int j = 0; j < length; ++j) {
        KappaParams p = base;
        switch (family) {
        case ProbeFamily::Kappa0Down: p.kappa0 = k0 * pow10(-j); break;
        case ProbeFamily::Kappa0Up: p.kappa0 = k0 * pow10(6.0 * j); break;
        case ProbeFamily::KappaUp: p.kappa = Vector::Constant(r, kappa_unit * pow10(6.0 * j)); break;
        case ProbeFamily::BetaUp: p.beta = beta0 + pow10(j) * beta_unit * direction; break;
        }
        seq.push_back(std::move(p));
    }
    return seq;
}

std::vector<Vector> reml_probe_sequence(const VarCompModel& model, const Vector& y,
                                        ProbeFamily family, const RemlBasis& basis, int length,
                                        const Tolerance& tol)
{
    require_observation(model, y);
    if (length < 2) {
        throw Error(ErrorKind::InvalidInput, "probe sequences need at least two elements");
    }
    if (family == ProbeFamily::BetaUp) {
        throw Error(ErrorKind::InvalidInput, "beta-up has no REML counterpart");
    }
    const double xi0 = profile_reml(model, Vector::Zero(static_cast<Eigen::Index>(model.r())), y,
                                    basis, tol)
                           .sigma0;
    double ratio_unit = 1.0;
    if (family == ProbeFamily::KappaUp) {
        const Matrix q = contrast_frame(basis).q;
        const double top = eigen_range(decompose_blocks(project_blocks(q, model), tol).a_sum()).max;
        ratio_unit = top > 0.0 ? 1.0 / top : 1.0;
    }
    const auto r = static_cast<Eigen::Index>(model.r());
    std::vector<Vector> seq;
    seq.reserve(static_cast<std::size_t>(length));
    for (int j = 0; j < length; ++j) {
        Vector s2 = Vector::Zero(r + 1);
        s2(0) = xi0;
        switch (family) {
        case ProbeFamily::Kappa0Down: s2(0) = xi0 * pow10(-j); break;
        case ProbeFamily::Kappa0Up: s2(0) = xi0 * pow10(6.0 * j); break;
        case ProbeFamily::KappaUp: s2.tail(r).setConstant(xi0 * ratio_unit * pow10(6.0 * j)); break;
        case ProbeFamily::BetaUp: break;
        }
        seq.push_back(std::move(s2));
    }
    return seq;
}

std::vector<double> divergence_probe_ml(const VarCompModel& model, const Vector& y,
                                        const std::vector<KappaParams>& sequence,
                                        const Tolerance& tol)
{
    if (!ml_exists(model, y, tol).exists) {
        throw Error(ErrorKind::Precondition,
                    "divergence probes require an existing ML estimate (y lies in M(X, Z))");
    }
    const auto dec = scaled_cov_decomposition(model, tol);
    std::vector<double> values;
    values.reserve(sequence.size());
    for (const auto& p : sequence) {
        validate(model, p);
        values.push_back(block_criterion(dec, p.kappa0, p.kappa, y - model.x() * p.beta, tol));
    }
    return values;
}

std::vector<double> divergence_probe_reml(const VarCompModel& model, const Vector& y,
                                          const std::vector<Vector>& sequence,
                                          const RemlBasis& basis, const Tolerance& tol)
{
    if (!reml_exists(model, y, tol).exists) {
        throw Error(ErrorKind::Precondition,
                    "divergence probes require an existing REML estimate (N y lies in N M(Z))");
    }
    if (basis.k.rows() != model.n()) {
        throw Error(ErrorKind::InvalidInput, "REML basis has the wrong shape");
    }
    const ContrastFrame frame = contrast_frame(basis);
    const Matrix& q = frame.q;
    const auto dec = decompose_blocks(project_blocks(q, model), tol);
    const Vector w = q.transpose() * y;
    std::vector<double> values;
    values.reserve(sequence.size());
    for (const auto& s2 : sequence) {
        validate_sigma2(model, s2);
        const Vector kappa = s2.tail(s2.size() - 1) / s2(0);
        values.push_back(block_criterion(dec, s2(0), kappa, w, tol) + frame.log_det_rr);
    }
    return values;
}

GrowthCheck check_growth(const std::vector<double>& values, double min_rise, std::size_t tail)
{
    GrowthCheck out;
    if (values.size() < 2) {
        return out;
    }
    out.rise = values.back() - values.front();
    out.rise_ok = out.rise >= min_rise;
    const std::size_t span = std::min(tail, values.size());
    out.tail_increasing = true;
    for (std::size_t i = values.size() - span + 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) {
            out.tail_increasing = false;
        }
    }
    return out;
}

}  // namespace varcomp
