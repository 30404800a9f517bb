#include "varcomp/model.hpp"

#include "varcomp/error.hpp"

#include <cmath>
#include <random>
#include <string>

namespace varcomp {

Matrix VarCompModel::xz() const
{
    Matrix out(n(), m() + z_.cols());
    out << x_, z_;
    return out;
}

VarCompModel build_model(Matrix x, std::vector<Matrix> z_blocks, const Tolerance& tol)
{
    tol.validate();
    if (z_blocks.empty()) {
        throw Error(ErrorKind::InvalidInput, "at least one random-effect block is required");
    }
    const Eigen::Index n = x.rows();
    if (n < 1) {
        throw Error(ErrorKind::InvalidInput, "X must have at least one row");
    }
    require_finite(x, "X");
    Eigen::Index k_total = 0;
    for (std::size_t i = 0; i < z_blocks.size(); ++i) {
        const auto& zi = z_blocks[i];
        const auto label = "Z_" + std::to_string(i + 1);
        if (zi.rows() != n) {
            throw Error(ErrorKind::InvalidInput,
                        label + " has " + std::to_string(zi.rows()) + " rows, X has " +
                            std::to_string(n));
        }
        if (zi.cols() < 1) {
            throw Error(ErrorKind::InvalidInput, label + " has no columns");
        }
        require_finite(zi, label.c_str());
        k_total += zi.cols();
    }
    if (k_total >= n) {
        throw Error(ErrorKind::ModelAssumption,
                    "sum of random-effect block widths (" + std::to_string(k_total) +
                        ") must be smaller than n (" + std::to_string(n) + ")");
    }
    if (!x.isZero(0.0) && x.cols() >= n) {
        throw Error(ErrorKind::ModelAssumption, "X must have fewer columns than rows");
    }

    VarCompModel model;
    model.z_ = hconcat(z_blocks);
    if (model.z_.isZero(0.0)) {
        throw Error(ErrorKind::ModelAssumption, "Z = [Z_1, ..., Z_r] is identically zero");
    }
    model.rank_x_ = numerical_rank(x, tol);
    model.x_ = std::move(x);
    model.z_blocks_ = std::move(z_blocks);
    return model;
}

void validate_sigma2(const VarCompModel& model, const Vector& sigma2)
{
    if (sigma2.size() != static_cast<Eigen::Index>(model.r() + 1)) {
        throw Error(ErrorKind::ParameterDomain,
                    "sigma2 must have r+1 = " + std::to_string(model.r() + 1) + " entries");
    }
    if (!sigma2.allFinite()) {
        throw Error(ErrorKind::ParameterDomain, "sigma2 has non-finite entries");
    }
    if (!(sigma2(0) > 0.0)) {
        throw Error(ErrorKind::ParameterDomain, "sigma_0^2 must be strictly positive");
    }
    if ((sigma2.tail(model.r()).array() < 0.0).any()) {
        throw Error(ErrorKind::ParameterDomain, "sigma_i^2 must be non-negative");
    }
}

void validate_kappa(const VarCompModel& model, const Vector& kappa)
{
    if (kappa.size() != static_cast<Eigen::Index>(model.r())) {
        throw Error(ErrorKind::ParameterDomain,
                    "kappa must have r = " + std::to_string(model.r()) + " entries");
    }
    if (!kappa.allFinite() || (kappa.array() < 0.0).any()) {
        throw Error(ErrorKind::ParameterDomain, "kappa_i must be finite and non-negative");
    }
}

namespace {

void validate_beta(const VarCompModel& model, const Vector& beta)
{
    if (beta.size() != model.m()) {
        throw Error(ErrorKind::ParameterDomain,
                    "beta must have m = " + std::to_string(model.m()) + " entries");
    }
    if (!beta.allFinite()) {
        throw Error(ErrorKind::ParameterDomain, "beta has non-finite entries");
    }
}

}  // namespace

void validate(const VarCompModel& model, const SigmaParams& params)
{
    validate_beta(model, params.beta);
    validate_sigma2(model, params.sigma2);
}

void validate(const VarCompModel& model, const KappaParams& params)
{
    validate_beta(model, params.beta);
    if (!(std::isfinite(params.kappa0) && params.kappa0 > 0.0)) {
        throw Error(ErrorKind::ParameterDomain, "kappa_0 must be finite and strictly positive");
    }
    validate_kappa(model, params.kappa);
}

Matrix covariance(const VarCompModel& model, const Vector& sigma2)
{
    validate_sigma2(model, sigma2);
    const Eigen::Index n = model.n();
    Matrix v = sigma2(0) * Matrix::Identity(n, n);
    for (std::size_t i = 0; i < model.r(); ++i) {
        const double s = sigma2(static_cast<Eigen::Index>(i) + 1);
        if (s != 0.0) {
            const auto& zi = model.z_block(i);
            v.noalias() += s * (zi * zi.transpose());
        }
    }
    return v;
}

Matrix scaled_covariance(const VarCompModel& model, const Vector& kappa)
{
    validate_kappa(model, kappa);
    const Eigen::Index n = model.n();
    Matrix v = Matrix::Identity(n, n);
    for (std::size_t i = 0; i < model.r(); ++i) {
        const double k = kappa(static_cast<Eigen::Index>(i));
        if (k != 0.0) {
            const auto& zi = model.z_block(i);
            v.noalias() += k * (zi * zi.transpose());
        }
    }
    return v;
}

ScaleSplit sigma_to_kappa(const Vector& sigma2)
{
    if (sigma2.size() < 1 || !(sigma2(0) > 0.0) || !std::isfinite(sigma2(0))) {
        throw Error(ErrorKind::ParameterDomain, "sigma_0^2 must be strictly positive");
    }
    return {sigma2(0), sigma2.tail(sigma2.size() - 1) / sigma2(0)};
}

Vector kappa_to_sigma(double kappa0, const Vector& kappa)
{
    if (!(kappa0 > 0.0) || !std::isfinite(kappa0)) {
        throw Error(ErrorKind::ParameterDomain, "kappa_0 must be strictly positive");
    }
    Vector sigma2(kappa.size() + 1);
    sigma2(0) = kappa0;
    sigma2.tail(kappa.size()) = kappa0 * kappa;
    return sigma2;
}

KappaParams to_kappa(const SigmaParams& params)
{
    auto split = sigma_to_kappa(params.sigma2);
    return {params.beta, split.kappa0, std::move(split.kappa)};
}

SigmaParams to_sigma(const KappaParams& params)
{
    return {params.beta, kappa_to_sigma(params.kappa0, params.kappa)};
}

namespace {

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint32_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      stream};
    return std::mt19937_64(seq);
}

}  // namespace

Vector simulate(const VarCompModel& model, const SigmaParams& params, std::uint64_t seed)
{
    validate(model, params);
    Vector y = model.x() * params.beta;
    for (std::size_t i = 0; i < model.r(); ++i) {
        const double s2 = params.sigma2(static_cast<Eigen::Index>(i) + 1);
        auto engine = stream_engine(seed, static_cast<std::uint32_t>(i + 1));
        std::normal_distribution<double> normal(0.0, std::sqrt(s2));
        Vector u(model.k(i));
        for (auto& v : u) {
            v = s2 > 0.0 ? normal(engine) : 0.0;
        }
        y.noalias() += model.z_block(i) * u;
    }
    auto engine = stream_engine(seed, static_cast<std::uint32_t>(model.r() + 1));
    std::normal_distribution<double> normal(0.0, std::sqrt(params.sigma2(0)));
    for (auto& v : y) {
        v += normal(engine);
    }
    return y;
}

}  // namespace varcomp
