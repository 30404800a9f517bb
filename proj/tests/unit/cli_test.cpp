#include "commands.hpp"
#include "csv.hpp"
#include "manifest.hpp"

#include "fixtures.hpp"
#include "workspace.hpp"

#include <varcomp/estimator.hpp>

#include <gtest/gtest.h>

#include <json.hpp>

using namespace varcomp;
using namespace varcomp::testing;
using varcomp::cli::InputError;

namespace {

nlohmann::json parse(const cli::CommandResult& r)
{
    return nlohmann::json::parse(r.report);
}

std::filesystem::path tiny_manifest(const Workspace& ws, const Vector& y)
{
    return ws.write_model("tiny", Matrix::Ones(3, 1), {vec({1, 0, 0})}, &y);
}

std::filesystem::path one_way_manifest(const Workspace& ws, const Vector& y)
{
    return ws.write_model("oneway", Matrix::Ones(6, 1), {group_indicator(3, 2)}, &y);
}

}  // namespace

TEST(Csv, ParsesRowsAndSkipsBlankLines)
{
    const Matrix m = cli::parse_csv_matrix("1, 2.5\n\n-3,4e-2\n", "m.csv");
    ASSERT_EQ(m.rows(), 2);
    ASSERT_EQ(m.cols(), 2);
    EXPECT_EQ(m(0, 1), 2.5);
    EXPECT_EQ(m(1, 1), 0.04);
}

TEST(Csv, ReportsFileAndLine)
{
    try {
        (void)cli::parse_csv_matrix("1,2\n3,4\n5\n", "x.csv");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("x.csv:3:"), std::string::npos) << e.what();
    }
    try {
        (void)cli::parse_csv_matrix("1,2\n3,abc\n", "x.csv");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("x.csv:2:"), std::string::npos) << e.what();
    }
    EXPECT_THROW((void)cli::parse_csv_matrix("1,nan\n", "x.csv"), InputError);
    EXPECT_THROW((void)cli::parse_csv_matrix("\n\n", "x.csv"), InputError);
}

TEST(Csv, VectorRoundTrip)
{
    Workspace ws("csv");
    const Vector v = vec({0.1, -2.0 / 3.0, 1e-300});
    cli::write_csv_vector(ws.dir() / "v.csv", v);
    EXPECT_TRUE(cli::read_csv_vector(ws.dir() / "v.csv") == v);
}

TEST(Manifest, ResolvesRelativePaths)
{
    const auto m = cli::parse_manifest(
        R"({"X":"x.csv","Z":["a.csv","/abs/b.csv"],"y":"y.csv","tol":{"rel_rank_tol":1e-8},"seed":4})",
        "/data/run", "m.json");
    EXPECT_EQ(m.x, std::filesystem::path("/data/run/x.csv"));
    EXPECT_EQ(m.z.at(1), std::filesystem::path("/abs/b.csv"));
    EXPECT_EQ(m.tol.rel_rank_tol, 1e-8);
    EXPECT_EQ(m.tol.spd_tol, Tolerance{}.spd_tol);
    EXPECT_EQ(m.seed, 4u);
}

TEST(Manifest, RejectsMalformed)
{
    EXPECT_THROW((void)cli::parse_manifest("{", ".", "m"), InputError);
    EXPECT_THROW((void)cli::parse_manifest(R"({"X":"x.csv"})", ".", "m"), InputError);
    EXPECT_THROW((void)cli::parse_manifest(R"({"X":"x","Z":["z"],"bogus":1})", ".", "m"),
                 InputError);
    EXPECT_THROW((void)cli::parse_manifest(R"({"X":"x","Z":["z"],"tol":{"spd_tol":0}})", ".", "m"),
                 InputError);
}

TEST(Commands, CheckMlExists)
{
    Workspace ws("cli");
    const auto r = cli::run_command("check-ml", tiny_manifest(ws, vec({0, 1, -1})), {});
    EXPECT_EQ(r.exit_code, 0);
    const auto j = parse(r);
    EXPECT_TRUE(j["certificate"]["exists"].get<bool>());
    EXPECT_NEAR(j["certificate"]["s_xz"].get<double>(), 2.0, 1e-12);
    EXPECT_EQ(j["tolerance"]["rel_rank_tol"].get<double>(), 1e-10);
}

TEST(Commands, CheckMlNonexistence)
{
    Workspace ws("cli");
    EXPECT_EQ(cli::run_command("check-ml", tiny_manifest(ws, vec({1, 1, 1})), {}).exit_code, 3);
}

TEST(Commands, CheckRemlReportsLiteralCondition)
{
    Workspace ws("cli");
    const auto r = cli::run_command("check-reml", tiny_manifest(ws, vec({1, 1, 1})), {});
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_TRUE(parse(r)["certificate"]["literal_reml_condition"].get<bool>());
}

TEST(Commands, MalformedCsvIsInputError)
{
    Workspace ws("cli");
    const auto manifest = tiny_manifest(ws, vec({0, 1, -1}));
    ws.write("tiny_z1.csv", "1\n0\nzero\n");
    const auto r = cli::run_command("check-ml", manifest, {});
    EXPECT_EQ(r.exit_code, 2);
    const std::string msg = parse(r)["error"]["message"];
    EXPECT_NE(msg.find("tiny_z1.csv:3:"), std::string::npos) << msg;
}

TEST(Commands, FitMlMatchesLibrary)
{
    Workspace ws("cli");
    const Vector y = vec({2, 3, 4, 6, 9, 8});
    const auto r = cli::run_command("fit", one_way_manifest(ws, y), {});
    ASSERT_EQ(r.exit_code, 0) << r.report;
    const auto j = parse(r);
    const auto lib = fit_ml(one_way_model(3, 2), y);
    EXPECT_EQ(j["estimate"]["sigma2_hat"][1].get<double>(), lib.sigma2_hat(1));
    EXPECT_TRUE(j["converged"].get<bool>());
}

TEST(Commands, FitRemlInterior)
{
    Workspace ws("cli");
    cli::RunOptions opts;
    opts.method = Method::REML;
    const auto r = cli::run_command("fit", one_way_manifest(ws, vec({2, 3, 4, 6, 9, 8})), opts);
    ASSERT_EQ(r.exit_code, 0);
    const auto j = parse(r);
    EXPECT_NEAR(j["estimate"]["sigma2_hat"][0].get<double>(), 1.0, 1e-4);
    EXPECT_TRUE(j["estimate"]["beta_hat"].is_null());
}

TEST(Commands, FitNonexistenceEmitsDecreasingTrace)
{
    Workspace ws("cli");
    const auto r = cli::run_command("fit", tiny_manifest(ws, vec({1, 0, 0})), {});
    EXPECT_EQ(r.exit_code, 3);
    const auto trace = parse(r)["witness"]["trace"];
    ASSERT_EQ(trace.size(), 4u);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        EXPECT_LT(trace[i]["value"].get<double>(), trace[i - 1]["value"].get<double>());
    }
}

TEST(Commands, IterationCapGivesNonConvergence)
{
    Workspace ws("cli");
    cli::RunOptions opts;
    opts.max_iters = 1;
    const auto r = cli::run_command("fit", one_way_manifest(ws, vec({2, 3, 4, 6, 9, 8})), opts);
    EXPECT_EQ(r.exit_code, 4);
    EXPECT_FALSE(parse(r)["converged"].get<bool>());
}

TEST(Commands, RemlWithRankDeficientDesignIsInputError)
{
    Workspace ws("cli");
    const Vector y = vec({2, 3, 4, 6, 9, 8});
    const auto manifest = ws.write_model("dup", Matrix::Ones(6, 2), {group_indicator(3, 2)}, &y);
    cli::RunOptions opts;
    opts.method = Method::REML;
    EXPECT_EQ(cli::run_command("fit", manifest, opts).exit_code, 2);
    EXPECT_EQ(cli::run_command("fit", manifest, {}).exit_code, 0);
}

TEST(Commands, DecomposeOneWay)
{
    Workspace ws("cli");
    const auto r = cli::run_command("decompose", one_way_manifest(ws, vec({1, 2, 3, 4, 5, 6})), {});
    ASSERT_EQ(r.exit_code, 0);
    const auto j = parse(r);
    EXPECT_EQ(j["q"].get<int>(), 3);
    EXPECT_NEAR(j["a_blocks"][0]["eigen_min"].get<double>(), 2.0, 1e-12);
    EXPECT_NEAR(j["a_blocks"][0]["eigen_max"].get<double>(), 2.0, 1e-12);
    EXPECT_LE(j["max_reconstruction_error"].get<double>(), 1e-9);
}

TEST(Commands, ProbeFamilies)
{
    Workspace ws("cli");
    const auto manifest = tiny_manifest(ws, vec({0, 1, -1}));
    for (auto family : {ProbeFamily::Kappa0Down, ProbeFamily::Kappa0Up, ProbeFamily::KappaUp,
                        ProbeFamily::BetaUp}) {
        cli::RunOptions opts;
        opts.family = family;
        const auto r = cli::run_command("probe", manifest, opts);
        EXPECT_EQ(r.exit_code, 0) << to_string(family) << r.report;
        EXPECT_EQ(parse(r)["sequence"].size(), 12u);
    }
    cli::RunOptions opts;
    opts.family = ProbeFamily::BetaUp;
    opts.method = Method::REML;
    EXPECT_EQ(cli::run_command("probe", manifest, opts).exit_code, 2);
    opts.method = Method::ML;
    EXPECT_EQ(cli::run_command("probe", tiny_manifest(ws, vec({1, 1, 1})), opts).exit_code, 3);
}

TEST(Commands, SimulateIsDeterministic)
{
    Workspace ws("cli");
    const auto manifest = one_way_manifest(ws, vec({1, 2, 3, 4, 5, 6}));
    cli::RunOptions opts;
    opts.sigma2 = vec({1.0, 2.0});
    opts.beta = vec({3.0});
    opts.seed = 9;
    opts.out = ws.dir() / "sim.csv";
    const auto a = cli::run_command("simulate", manifest, opts);
    const auto b = cli::run_command("simulate", manifest, opts);
    ASSERT_EQ(a.exit_code, 0) << a.report;
    EXPECT_EQ(a.report, b.report);
    const Vector y = cli::read_csv_vector(ws.dir() / "sim.csv");
    EXPECT_TRUE(y == simulate(one_way_model(3, 2), {vec({3.0}), vec({1.0, 2.0})}, 9));
    opts.sigma2.reset();
    EXPECT_EQ(cli::run_command("simulate", manifest, opts).exit_code, 2);
}

TEST(Commands, ToleranceOverrideIsReported)
{
    Workspace ws("cli");
    cli::RunOptions opts;
    opts.rel_rank_tol = 1e-6;
    const auto r = cli::run_command("check-ml", tiny_manifest(ws, vec({0, 1, -1})), opts);
    EXPECT_EQ(parse(r)["tolerance"]["rel_rank_tol"].get<double>(), 1e-6);
    EXPECT_EQ(parse(r)["certificate"]["tolerance"]["rel_rank_tol"].get<double>(), 1e-6);
}

TEST(Commands, UnknownVerbAndMissingManifest)
{
    Workspace ws("cli");
    EXPECT_EQ(cli::run_command("frobnicate", tiny_manifest(ws, vec({0, 1, -1})), {}).exit_code, 2);
    EXPECT_EQ(cli::run_command("check-ml", ws.dir() / "missing.json", {}).exit_code, 2);
}
