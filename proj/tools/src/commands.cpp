#include "commands.hpp"

#include "csv.hpp"

#include <varcomp/error.hpp>
#include <varcomp/estimator.hpp>
#include <varcomp/spectral.hpp>

#include <json.hpp>

#include <cmath>
#include <random>
#include <sstream>

namespace varcomp::cli {

namespace {

using json = nlohmann::ordered_json;

json to_json(const Vector& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v(i));
    }
    return a;
}

json to_json(const Tolerance& tol)
{
    return {{"rel_rank_tol", tol.rel_rank_tol}, {"spd_tol", tol.spd_tol}};
}

json to_json(const ExistenceCertificate& c)
{
    json j;
    j["kind"] = std::string(to_string(c.kind));
    j["exists"] = c.exists;
    j["residual_norm"] = c.residual_norm;
    j["y_norm"] = c.y_norm;
    j["margin"] = c.margin;
    if (c.s_xz) {
        j["s_xz"] = *c.s_xz;
    }
    if (c.lower_bound) {
        j["lower_bound"] = *c.lower_bound;
    }
    if (c.literal_reml_condition) {
        j["literal_reml_condition"] = *c.literal_reml_condition;
    }
    j["tolerance"] = to_json(c.tol_used);
    return j;
}

std::string fmt(double v)
{
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

std::string fmt(const Vector& v)
{
    std::string out = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out += (i ? ", " : "") + fmt(v(i));
    }
    return out + ")";
}

struct Context {
    std::string verb;
    Manifest manifest;
    RunOptions options;
    Tolerance tol;
    json report;
    std::string summary;
};

CommandResult finish(Context& ctx, int code)
{
    ctx.report["exit_code"] = code;
    return {code, ctx.report.dump(2) + "\n", ctx.summary};
}

const Vector& require_y(const LoadedInput& in)
{
    if (!in.y) {
        throw InputError("no observation vector: give --y or \"y\" in the manifest");
    }
    return *in.y;
}

json witness_json(const VarCompModel& model, const Vector& y, const WitnessRay& ray,
                  const Tolerance& tol, std::string& summary)
{
    json w;
    w["kind"] = std::string(to_string(ray.kind));
    if (ray.kind == Method::ML) {
        w["beta_star"] = to_json(ray.beta_star);
    }
    w["kappa_scale"] = ray.kappa_scale;
    const auto values = witness_trace(model, y, ray, tol);
    json trace = json::array();
    summary += "witness ray trace:\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        trace.push_back({{"t", ray.t_grid[i]}, {"value", values[i]}});
        summary += "  t = " + fmt(ray.t_grid[i]) + "  criterion = " + fmt(values[i]) + "\n";
    }
    w["trace"] = std::move(trace);
    return w;
}

int check(Context& ctx, Method method)
{
    const auto in = load_inputs(ctx.manifest, ctx.options.y);
    const Vector& y = require_y(in);
    const auto cert = method == Method::ML ? ml_exists(in.model, y, ctx.tol)
                                           : reml_exists(in.model, y, ctx.tol);
    ctx.report["certificate"] = to_json(cert);
    ctx.summary += std::string(to_string(method)) + " estimate " +
                   (cert.exists ? "exists" : "does not exist") +
                   " (residual " + fmt(cert.residual_norm) + ", |y| " + fmt(cert.y_norm) + ")\n";
    return cert.exists ? kOk : kNonexistence;
}

int fit(Context& ctx)
{
    const auto in = load_inputs(ctx.manifest, ctx.options.y);
    const Vector& y = require_y(in);
    FitOptions opts;
    if (ctx.options.max_iters) {
        opts.max_iters = *ctx.options.max_iters;
    }
    if (ctx.options.starts) {
        opts.n_starts = *ctx.options.starts;
    }
    opts.validate();
    ctx.report["method"] = std::string(to_string(ctx.options.method));
    ctx.report["options"] = {{"max_iters", opts.max_iters},
                             {"x_tol", opts.x_tol},
                             {"f_tol", opts.f_tol},
                             {"n_starts", opts.n_starts > 0
                                              ? opts.n_starts
                                              : 1 + 2 * static_cast<int>(in.model.r())},
                             {"threshold_clamp", opts.threshold_clamp}};
    FitResult res;
    try {
        if (ctx.options.method == Method::REML) {
            res = fit_reml(in.model, y, opts, ctx.tol);
        } else if (in.model.full_rank_x()) {
            res = fit_ml(in.model, y, opts, ctx.tol);
        } else {
            res = fit_ml_rank_deficient(in.model, y, opts, ctx.tol);
        }
    } catch (const NonexistenceError& e) {
        ctx.report["certificate"] = to_json(e.certificate());
        ctx.summary += std::string(to_string(ctx.options.method)) +
                       " estimate does not exist: y lies in M(X, Z)\n";
        if (e.witness()) {
            ctx.report["witness"] = witness_json(in.model, y, *e.witness(), ctx.tol, ctx.summary);
        }
        return kNonexistence;
    }
    json est;
    est["sigma2_hat"] = to_json(res.sigma2_hat);
    est["kappa_hat"] = to_json(res.kappa_hat);
    est["beta_hat"] = res.beta_hat ? to_json(*res.beta_hat) : json(nullptr);
    if (res.method == Method::ML) {
        est["fitted_mean"] = to_json(res.fitted_mean);
    }
    est["boundary_flags"] = res.boundary_flags;
    ctx.report["estimate"] = std::move(est);
    ctx.report["criterion_value"] = res.criterion_value;
    ctx.report["converged"] = res.converged;
    ctx.report["iterations"] = res.iterations;
    ctx.report["start_values"] = res.start_values;
    ctx.report["certificate"] = to_json(res.certificate);
    ctx.summary += std::string(to_string(res.method)) + " fit " +
                   (res.converged ? "converged" : "did NOT converge") + " after " +
                   std::to_string(res.iterations) + " iterations\n  sigma2_hat = " +
                   fmt(res.sigma2_hat) + "\n  criterion = " + fmt(res.criterion_value) + "\n";
    return res.converged ? kOk : kNumericalFailure;
}

int decompose(Context& ctx)
{
    const auto in = load_inputs(ctx.manifest, std::nullopt);
    const auto dec = scaled_cov_decomposition(in.model, ctx.tol);
    const auto eq = equal_kappa_diagonalization(dec);
    ctx.report["n"] = in.model.n();
    ctx.report["q"] = dec.q;
    json blocks = json::array();
    for (std::size_t i = 0; i < dec.a_blocks.size(); ++i) {
        const auto range = eigen_range(dec.a_blocks[i]);
        blocks.push_back({{"index", i + 1},
                          {"eigen_min", range.min},
                          {"eigen_max", range.max},
                          {"psd", is_psd(dec.a_blocks[i])}});
    }
    ctx.report["a_blocks"] = std::move(blocks);
    const Matrix sum = dec.a_sum();
    const auto sum_range = eigen_range(sum);
    ctx.report["a_sum"] = {
        {"eigen_min", sum_range.min}, {"eigen_max", sum_range.max}, {"pd", is_pd(sum)}};
    ctx.report["equal_kappa_d"] = to_json(eq.d);

    const std::uint64_t seed = ctx.options.seed.value_or(ctx.manifest.seed.value_or(0));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logk(std::log(1e-3), std::log(1e3));
    json checks = json::array();
    double worst = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
        Vector kappa(static_cast<Eigen::Index>(in.model.r()));
        for (Eigen::Index i = 0; i < kappa.size(); ++i) {
            kappa(i) = std::exp(logk(rng));
        }
        const Matrix v = scaled_covariance(in.model, kappa);
        const double err = max_abs(reconstruct(dec, kappa) - v) / max_abs(v);
        worst = std::max(worst, err);
        checks.push_back({{"kappa", to_json(kappa)}, {"relative_error", err}});
    }
    ctx.report["seed"] = seed;
    ctx.report["reconstruction"] = std::move(checks);
    ctx.report["max_reconstruction_error"] = worst;
    ctx.summary += "q = " + std::to_string(dec.q) + ", reconstruction error " + fmt(worst) + "\n";
    return kOk;
}

int probe(Context& ctx)
{
    if (!ctx.options.family) {
        throw InputError("probe needs --family");
    }
    const ProbeFamily family = *ctx.options.family;
    const auto in = load_inputs(ctx.manifest, ctx.options.y);
    const Vector& y = require_y(in);
    ctx.report["method"] = std::string(to_string(ctx.options.method));
    ctx.report["family"] = std::string(to_string(family));

    const auto cert = ctx.options.method == Method::ML ? ml_exists(in.model, y, ctx.tol)
                                                       : reml_exists(in.model, y, ctx.tol);
    ctx.report["certificate"] = to_json(cert);
    if (!cert.exists) {
        ctx.summary += "estimate does not exist; probes are undefined\n";
        return kNonexistence;
    }

    std::vector<double> values;
    json sequence = json::array();
    if (ctx.options.method == Method::ML) {
        if (!in.model.full_rank_x()) {
            throw Error(ErrorKind::RankDeficiency, "probes require X of full column rank");
        }
        const auto seq = ml_probe_sequence(in.model, y, family, 12, ctx.tol);
        values = divergence_probe_ml(in.model, y, seq, ctx.tol);
        for (const auto& p : seq) {
            sequence.push_back(
                {{"beta", to_json(p.beta)}, {"kappa0", p.kappa0}, {"kappa", to_json(p.kappa)}});
        }
    } else {
        if (family == ProbeFamily::BetaUp) {
            throw InputError("beta-up has no REML counterpart");
        }
        const auto basis = reml_contrast_matrix(in.model.x(), ctx.tol);
        const auto seq = reml_probe_sequence(in.model, y, family, basis, 12, ctx.tol);
        values = divergence_probe_reml(in.model, y, seq, basis, ctx.tol);
        for (const auto& s2 : seq) {
            sequence.push_back({{"sigma2", to_json(s2)}});
        }
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        sequence[i]["value"] = values[i];
    }
    const auto growth = check_growth(values, 100.0);
    ctx.report["sequence"] = std::move(sequence);
    ctx.report["growth"] = {{"rise", growth.rise},
                            {"min_rise", 100.0},
                            {"rise_ok", growth.rise_ok},
                            {"tail_increasing", growth.tail_increasing}};
    ctx.summary += std::string(to_string(family)) + ": first " + fmt(values.front()) +
                   ", last " + fmt(values.back()) +
                   (growth.ok() ? " (diverging)\n" : " (growth NOT confirmed)\n");
    return growth.ok() ? kOk : kProbeViolation;
}

int simulate_cmd(Context& ctx)
{
    const auto in = load_inputs(ctx.manifest, std::nullopt);
    const auto beta = ctx.options.beta ? ctx.options.beta : ctx.manifest.simulate.beta;
    const auto sigma2 = ctx.options.sigma2 ? ctx.options.sigma2 : ctx.manifest.simulate.sigma2;
    if (!sigma2) {
        throw InputError("simulate needs --sigma2 or \"simulate.sigma2\" in the manifest");
    }
    const Vector b = beta ? *beta : Vector::Zero(in.model.m());
    const std::uint64_t seed = ctx.options.seed.value_or(ctx.manifest.seed.value_or(0));
    const Vector y = simulate(in.model, {b, *sigma2}, seed);
    ctx.report["seed"] = seed;
    ctx.report["beta"] = to_json(b);
    ctx.report["sigma2"] = to_json(*sigma2);
    ctx.report["y"] = to_json(y);
    if (ctx.options.out) {
        write_csv_vector(*ctx.options.out, y);
        ctx.report["out"] = ctx.options.out->string();
        ctx.summary += "wrote " + std::to_string(y.size()) + " values to " +
                       ctx.options.out->string() + "\n";
    } else {
        ctx.summary += "simulated " + std::to_string(y.size()) + " values\n";
    }
    return kOk;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::Nonexistence: return kNonexistence;
    case ErrorKind::SpdFailure:
    case ErrorKind::DegenerateFit: return kNumericalFailure;
    case ErrorKind::InvalidInput:
    case ErrorKind::ModelAssumption:
    case ErrorKind::ParameterDomain:
    case ErrorKind::RankDeficiency:
    case ErrorKind::Precondition: return kInputError;
    }
    return kInputError;
}

CommandResult run_command(const std::string& verb, const std::filesystem::path& manifest,
                          const RunOptions& options)
{
    Context ctx;
    ctx.verb = verb;
    ctx.options = options;
    ctx.report["command"] = verb;
    ctx.report["manifest"] = manifest.string();
    ctx.report["tolerance"] = to_json(Tolerance{});
    try {
        ctx.manifest = load_manifest(manifest);
        ctx.tol = ctx.manifest.tol;
        if (options.rel_rank_tol) {
            ctx.tol.rel_rank_tol = *options.rel_rank_tol;
        }
        ctx.tol.validate();
        ctx.report["tolerance"] = to_json(ctx.tol);
        int code = kOk;
        if (verb == "check-ml") {
            code = check(ctx, Method::ML);
        } else if (verb == "check-reml") {
            code = check(ctx, Method::REML);
        } else if (verb == "fit") {
            code = fit(ctx);
        } else if (verb == "decompose") {
            code = decompose(ctx);
        } else if (verb == "probe") {
            code = probe(ctx);
        } else if (verb == "simulate") {
            code = simulate_cmd(ctx);
        } else {
            throw InputError("unknown command '" + verb + "'");
        }
        return finish(ctx, code);
    } catch (const InputError& e) {
        ctx.report["error"] = {{"kind", "InputError"}, {"message", e.what()}};
        ctx.summary += std::string("error: ") + e.what() + "\n";
        return finish(ctx, kInputError);
    } catch (const Error& e) {
        ctx.report["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
        ctx.summary += std::string("error: ") + e.what() + "\n";
        return finish(ctx, exit_code_for(e.kind()));
    }
}

}  // namespace varcomp::cli
