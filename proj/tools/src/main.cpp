#include "commands.hpp"
#include "csv.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace varcomp;

int main(int argc, char** argv)
{
    CLI::App app{"Existence checks and ML/REML fits for linear variance components models"};
    app.require_subcommand(1);

    std::string manifest;
    cli::RunOptions opts;
    std::string y_path;
    std::string out_path;
    double tol = 0.0;
    std::uint64_t seed = 0;
    int max_iters = 0;
    int starts = 0;
    std::string method = "ml";
    std::string family;
    std::string beta;
    std::string sigma2;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--model", manifest, "JSON manifest naming the matrix files")
            ->required();
        sub->add_option("--y", y_path, "observation vector (single-column CSV)");
        sub->add_option("--tol", tol, "relative rank tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--max-iters", max_iters, "optimizer iterations per start")
            ->check(CLI::PositiveNumber);
        sub->add_option("--starts", starts, "number of optimizer starts")
            ->check(CLI::PositiveNumber);
    };
    auto method_option = [&](CLI::App* sub) {
        sub->add_option("--method", method, "ml or reml")
            ->check(CLI::IsMember({"ml", "reml"}));
    };

    auto* check_ml = app.add_subcommand("check-ml", "certify existence of the ML estimate");
    auto* check_reml = app.add_subcommand("check-reml", "certify existence of the REML estimate");
    auto* fit = app.add_subcommand("fit", "fit variance components");
    auto* decompose = app.add_subcommand("decompose", "block decomposition of the covariance");
    auto* probe = app.add_subcommand("probe", "criterion along a divergent sequence");
    auto* simulate = app.add_subcommand("simulate", "draw an observation vector");
    for (auto* sub : {check_ml, check_reml, fit, decompose, probe, simulate}) {
        common(sub);
    }
    method_option(fit);
    method_option(probe);
    probe->add_option("--family", family, "kappa0-down, kappa0-up, kappa-up or beta-up")
        ->required()
        ->check(CLI::IsMember({"kappa0-down", "kappa0-up", "kappa-up", "beta-up"}));
    simulate->add_option("--out", out_path, "output CSV file for y");
    simulate->add_option("--beta", beta, "fixed effects, comma separated");
    simulate->add_option("--sigma2", sigma2, "variance components s0^2,...,sr^2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kInputError;
    }

    CLI::App* chosen = app.get_subcommands().front();
    opts.method = method == "reml" ? Method::REML : Method::ML;
    if (!y_path.empty()) opts.y = y_path;
    if (!out_path.empty()) opts.out = out_path;
    if (chosen->count("--tol")) opts.rel_rank_tol = tol;
    if (chosen->count("--seed")) opts.seed = seed;
    if (chosen->count("--max-iters")) opts.max_iters = max_iters;
    if (chosen->count("--starts")) opts.starts = starts;
    if (!family.empty()) opts.family = parse_probe_family(family);
    try {
        if (!beta.empty()) opts.beta = cli::parse_number_list(beta, "--beta");
        if (!sigma2.empty()) opts.sigma2 = cli::parse_number_list(sigma2, "--sigma2");
    } catch (const cli::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kInputError;
    }

    const auto result = cli::run_command(chosen->get_name(), manifest, opts);
    std::cout << result.report;
    std::cerr << result.summary;
    return result.exit_code;
}
