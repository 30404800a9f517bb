#include "varcomp/estimator.hpp"

#include "varcomp/error.hpp"
#include "varcomp/nelder_mead.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace varcomp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Optimum {
    Vector kappa;
    double value = kInf;
    int iterations = 0;
    bool converged = false;
    std::vector<double> start_values;
};

Objective guarded(std::function<double(const Vector&)> criterion)
{
    return [criterion = std::move(criterion)](const Vector& kappa) {
        try {
            return criterion(kappa);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::SpdFailure || e.kind() == ErrorKind::DegenerateFit) {
                return kInf;
            }
            throw;
        }
    };
}

Vector clamp(Vector kappa, double threshold)
{
    for (Eigen::Index i = 0; i < kappa.size(); ++i) {
        if (kappa(i) < threshold) {
            kappa(i) = 0.0;
        }
    }
    return kappa;
}

Optimum minimize(const Objective& f, const std::vector<Vector>& starts, const FitOptions& opts)
{
    SimplexOptions simplex;
    simplex.max_iters = opts.max_iters;
    simplex.x_tol = opts.x_tol;
    simplex.f_tol = opts.f_tol;

    Optimum best;
    bool have_best = false;
    for (const auto& start : starts) {
        SimplexResult run = minimize_nonnegative(f, start, simplex);
        if (run.converged) {
            run = polish_nonnegative(f, std::move(run), 10.0 * opts.threshold_clamp);
        }
        const Vector kappa = clamp(run.x, opts.threshold_clamp);
        const double value = (kappa == run.x) ? run.value : f(kappa);
        best.iterations += run.iterations;
        best.start_values.push_back(value);
        if (!have_best || value < best.value) {
            have_best = true;
            best.kappa = kappa;
            best.value = value;
            best.converged = run.converged;
        }
    }
    return best;
}

std::vector<bool> flags_of(const Vector& kappa)
{
    std::vector<bool> flags(static_cast<std::size_t>(kappa.size()));
    for (Eigen::Index i = 0; i < kappa.size(); ++i) {
        flags[static_cast<std::size_t>(i)] = kappa(i) == 0.0;
    }
    return flags;
}

void require_sample(const VarCompModel& model, const Vector& y)
{
    if (y.size() != model.n()) {
        throw Error(ErrorKind::InvalidInput, "y has " + std::to_string(y.size()) +
                                                 " entries, model has n = " +
                                                 std::to_string(model.n()));
    }
    require_finite(y, "y");
}

}  // namespace

void FitOptions::validate() const
{
    if (max_iters <= 0 || !(x_tol > 0.0) || !(f_tol > 0.0) || n_starts < 0 ||
        !(threshold_clamp > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "fit options must be positive");
    }
}

std::vector<Vector> start_points(const VarCompModel& model, const Vector& y, int n_starts)
{
    const auto r = static_cast<Eigen::Index>(model.r());
    const auto count = static_cast<std::size_t>(n_starts > 0 ? n_starts : 1 + 2 * r);
    const double yy = y.squaredNorm();
    Vector h(r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const Matrix& zi = model.z_block(static_cast<std::size_t>(i));
        const double v = yy > 0.0 ? (zi.transpose() * y).squaredNorm() /
                                        (static_cast<double>(zi.cols()) * yy)
                                  : 0.0;
        h(i) = (std::isfinite(v) && v > 0.0) ? v : 1.0;
    }

    std::vector<Vector> starts{Vector::Zero(r)};
    static constexpr double kScales[] = {1.0, 10.0, 0.1, 100.0, 0.01};
    for (std::size_t round = 0; starts.size() < count; ++round) {
        const double scale = kScales[round % std::size(kScales)] *
                             std::pow(1e3, static_cast<double>(round / std::size(kScales)));
        for (Eigen::Index i = 0; i < r && starts.size() < count; ++i) {
            Vector s = Vector::Zero(r);
            s(i) = scale * h(i);
            starts.push_back(std::move(s));
        }
        if (r > 1 && starts.size() < count) {
            starts.push_back(scale * h);
        }
    }
    starts.resize(count);
    return starts;
}

FitResult fit_ml(const VarCompModel& model, const Vector& y, const FitOptions& opts,
                 const Tolerance& tol)
{
    tol.validate();
    opts.validate();
    require_sample(model, y);
    ExistenceCertificate cert = ml_exists(model, y, tol);
    if (!cert.exists) {
        throw NonexistenceError(cert, nonexistence_witness(model, y, tol));
    }
    if (!model.full_rank_x()) {
        throw Error(ErrorKind::RankDeficiency,
                    "X is rank deficient; use fit_ml_rank_deficient");
    }

    const Objective f = guarded(
        [&](const Vector& kappa) { return profiled_criterion(model, kappa, y, tol); });
    Optimum opt = minimize(f, start_points(model, y, opts.n_starts), opts);
    if (!std::isfinite(opt.value)) {
        throw Error(ErrorKind::DegenerateFit, "criterion is not finite at any start");
    }
    const MlProfile prof = profile_ml(model, opt.kappa, y, tol);

    FitResult out;
    out.method = Method::ML;
    out.beta_hat = prof.beta;
    out.fitted_mean = model.x() * prof.beta;
    out.sigma2_hat = kappa_to_sigma(prof.kappa0, opt.kappa);
    out.kappa_hat = opt.kappa;
    out.criterion_value = prof.value;
    out.boundary_flags = flags_of(opt.kappa);
    out.certificate = std::move(cert);
    out.iterations = opt.iterations;
    out.converged = opt.converged;
    out.start_values = std::move(opt.start_values);
    return out;
}

FitResult fit_reml(const VarCompModel& model, const Vector& y, const FitOptions& opts,
                   const Tolerance& tol)
{
    tol.validate();
    if (!model.full_rank_x()) {
        throw Error(ErrorKind::RankDeficiency, "REML requires X of full column rank");
    }
    return fit_reml(model, y, reml_contrast_matrix(model.x(), tol), opts, tol);
}

FitResult fit_reml(const VarCompModel& model, const Vector& y, const RemlBasis& basis,
                   const FitOptions& opts, const Tolerance& tol)
{
    tol.validate();
    opts.validate();
    require_sample(model, y);
    if (!model.full_rank_x()) {
        throw Error(ErrorKind::RankDeficiency, "REML requires X of full column rank");
    }
    if (basis.k.rows() != model.n() || basis.k.cols() != model.n() - model.m()) {
        throw Error(ErrorKind::InvalidInput, "contrast basis has the wrong shape");
    }
    ExistenceCertificate cert = reml_exists(model, y, tol);
    if (!cert.exists) {
        throw NonexistenceError(cert, reml_nonexistence_witness(model, y, tol));
    }

    const Objective f = guarded([&](const Vector& kappa) {
        return reml_profiled_criterion(model, kappa, y, basis, tol);
    });
    Optimum opt = minimize(f, start_points(model, y, opts.n_starts), opts);
    if (!std::isfinite(opt.value)) {
        throw Error(ErrorKind::DegenerateFit, "criterion is not finite at any start");
    }
    const RemlProfile prof = profile_reml(model, opt.kappa, y, basis, tol);

    FitResult out;
    out.method = Method::REML;
    out.sigma2_hat = kappa_to_sigma(prof.sigma0, opt.kappa);
    out.kappa_hat = opt.kappa;
    out.criterion_value = prof.value;
    out.boundary_flags = flags_of(opt.kappa);
    out.certificate = std::move(cert);
    out.iterations = opt.iterations;
    out.converged = opt.converged;
    out.start_values = std::move(opt.start_values);
    return out;
}

Matrix full_rank_design(const Matrix& x, const Tolerance& tol)
{
    tol.validate();
    const Eigen::Index rank = numerical_rank(x, tol);
    if (rank == x.cols()) {
        return x;
    }
    if (rank == 0) {
        return Matrix(x.rows(), 0);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < rank; ++j) {
        keep.push_back(qr.colsPermutation().indices()(j));
    }
    std::sort(keep.begin(), keep.end());
    Matrix out(x.rows(), rank);
    for (Eigen::Index j = 0; j < rank; ++j) {
        out.col(j) = x.col(keep[static_cast<std::size_t>(j)]);
    }
    return out;
}

FitResult fit_ml_rank_deficient(const VarCompModel& model, const Vector& y,
                                const FitOptions& opts, const Tolerance& tol)
{
    tol.validate();
    opts.validate();
    require_sample(model, y);
    ExistenceCertificate cert = ml_exists(model, y, tol);
    if (!cert.exists) {
        throw NonexistenceError(cert, nonexistence_witness(model, y, tol));
    }
    if (model.full_rank_x()) {
        return fit_ml(model, y, opts, tol);
    }
    const VarCompModel reduced =
        build_model(full_rank_design(model.x(), tol), model.z_blocks(), tol);
    FitResult out = fit_ml(reduced, y, opts, tol);
    out.beta_hat.reset();
    out.certificate = std::move(cert);
    return out;
}

}  // namespace varcomp
