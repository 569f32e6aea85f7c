#include <chessprob/harness.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

using namespace chessprob;
namespace h = chessprob::harness;
namespace fs = std::filesystem;

namespace {

constexpr const char* kUnderpromotionFen = "1BK5/8/2kP4/8/2P3p1/2N5/8/8 w - - 0 1";
constexpr const char* kCheckingKeyFen = "8/8/1k1K4/8/1n6/8/8/1Q6 w - - 0 1";

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("chessprob_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<EpdEntry> entries(const std::string& text) {
    std::istringstream in(text);
    return read_epd(in);
}

// Values with exactly the requested sample mean and standard deviation.
std::vector<double> with_moments(std::size_t n, double mean, double sd, std::uint64_t seed) {
    Rng rng = make_stream({seed});
    std::vector<double> z(n);
    for (double& v : z)
        v = uniform01(rng);
    const auto s = stats::summarize(z);
    for (double& v : z)
        v = mean + sd * (v - s.mean) / s.sd;
    return z;
}

fs::path write_campaign(const fs::path& dir, Approach a, const std::vector<double>& scores,
                        std::optional<std::uint64_t> attempts) {
    std::string records;
    for (double x : scores)
        records += json{{"approach", std::string(to_string(a))}, {"scores", {{"rounds", {x, x, x}}}}}.dump() + "\n";
    h::write_file(dir / "records.jsonl", records);
    if (attempts)
        h::write_file(dir / "summary.json",
                      json{{"approach", std::string(to_string(a))}, {"attempts", *attempts}}.dump());
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CHESSPROB_CLI) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST(Epd, ReadsIdsAndFullFens) {
    const auto e = entries("# comment\n\n8/8/8/8/8/8/8/K6k w - - id \"kings\";\n" + std::string(kUnderpromotionFen) + "\n");
    ASSERT_EQ(e.size(), 2u);
    EXPECT_EQ(e[0].id, "kings");
    EXPECT_EQ(e[1].id, "line4");
    EXPECT_EQ(e[1].position.fen(), kUnderpromotionFen);
    EXPECT_THROW(entries("8/8/8/8/8/8/8/KK5k w - -\n"), TableError);
}

TEST(Compose, ManifestReplayIsByteIdentical) {
    h::ComposeArgs args;
    args.config.master_seed = 7;
    args.config.attempts = 400;
    args.config.filter = FilterSet::Set1;
    args.out_dir = scratch_dir("golden_a");
    std::ostringstream log;
    const auto run = h::run_compose(args, log);
    EXPECT_GT(run.report.successes, 0u);
    const auto replay = h::replay_compose(args.out_dir / "manifest.json", scratch_dir("golden_b"), 3, log);
    for (const char* f : {"records.jsonl", "scores.csv", "summary.txt", "summary.json"})
        EXPECT_EQ(h::read_file(args.out_dir / f), h::read_file(replay.dir / f)) << f;
    const json manifest = json::parse(h::read_file(args.out_dir / "manifest.json"));
    EXPECT_EQ(manifest.at("master_seed").get<std::uint64_t>(), 7u);
    EXPECT_EQ(manifest.at("version").get<std::string>(), h::kVersion);
    EXPECT_EQ(manifest.at("output_fnv1a").at("records").get<std::string>(),
              h::fnv1a_hex(h::read_file(args.out_dir / "records.jsonl")));
    EXPECT_NE(h::read_file(args.out_dir / "summary.txt").find("Mean Composing Efficiency"), std::string::npos);
}

TEST(Compose, FilterSoundness) {
    h::ComposeArgs args;
    args.config.master_seed = 8;
    args.config.attempts = 600;
    args.config.filter = FilterSet::Set3;
    args.out_dir = scratch_dir("set3");
    std::ostringstream log;
    const auto run = h::run_compose(args, log);
    for (const auto& rec : run.report.records)
        EXPECT_TRUE(audit(solve_composition(rec.composition.position, Stipulation{3})).set3_pass);
}

TEST(Compose, ExperienceNeedsCorpus) {
    h::ComposeArgs args;
    args.config.approach = Approach::Experience;
    args.out_dir = scratch_dir("nocorpus");
    std::ostringstream log;
    EXPECT_THROW(h::run_compose(args, log), ComposeError);
}

TEST(Cli, ComposeIsIdenticalAcrossWorkerCounts) {
    const fs::path a = scratch_dir("cli_a"), b = scratch_dir("cli_b");
    ASSERT_EQ(run_cli("compose --approach random --filter set1 --attempts 300 --seed 7 --workers 1 --out " +
                      a.string()), 0);
    ASSERT_EQ(run_cli("compose --approach random --filter set1 --attempts 300 --seed 7 --workers 8 --out " +
                      b.string()), 0);
    EXPECT_EQ(h::read_file(a / "records.jsonl"), h::read_file(b / "records.jsonl"));
    EXPECT_EQ(h::read_file(a / "scores.csv"), h::read_file(b / "scores.csv"));
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
    const fs::path dir = scratch_dir("cli_cfg");
    h::write_file(dir / "run.ini", "[compose]\nattempts = 50\nseed = 3\n");
    ASSERT_EQ(run_cli("--config " + (dir / "run.ini").string() + " compose --attempts 20 --out " +
                      (dir / "out").string()), 0);
    const json s = json::parse(h::read_file(dir / "out" / "summary.json"));
    EXPECT_EQ(s.at("attempts").get<int>(), 20);
    const json m = json::parse(h::read_file(dir / "out" / "manifest.json"));
    EXPECT_EQ(m.at("master_seed").get<int>(), 3);
}

TEST(Cli, BadInputs) {
    EXPECT_NE(run_cli("compose --filter set9"), 0);
    EXPECT_NE(run_cli("solve /nonexistent.epd"), 0);
    EXPECT_NE(run_cli("frobnicate"), 0);
}

TEST(Check, ExitCodes) {
    const fs::path dir = scratch_dir("check");
    // Set-3 compositions from a seeded run form the sound file.
    h::ComposeArgs args;
    args.config.master_seed = 12;
    args.config.attempts = 600;
    args.config.filter = FilterSet::Set3;
    args.out_dir = dir / "run";
    std::ostringstream log;
    const auto run = h::run_compose(args, log);
    ASSERT_FALSE(run.report.records.empty());
    std::string sound;
    for (const auto& rec : run.report.records)
        sound += rec.composition.position.fen() + "\n";
    h::write_file(dir / "sound.epd", sound);
    EXPECT_EQ(run_cli("check --set set3 " + (dir / "sound.epd").string()), 0);

    h::CheckArgs check;
    check.set = FilterSet::Set2;
    std::ostringstream out;
    EXPECT_EQ(h::cmd_check(entries(std::string(kCheckingKeyFen) + "\n"), check, out), h::CheckFailed);
    EXPECT_NE(out.str().find("FAIL set2"), std::string::npos);
    std::ostringstream unsolved;
    EXPECT_EQ(h::cmd_check(entries("8/8/8/3k4/8/8/8/K7 w - -\n"), check, unsolved), h::CheckFailed);
    check.json_output = true;
    check.set = FilterSet::Set1;
    std::ostringstream js;
    h::cmd_check(entries(std::string(kCheckingKeyFen) + "\n"), check, js);
    EXPECT_TRUE(json::parse(js.str()).contains("all_pass"));
}

TEST(Score, RepeatableAndRejectsUnsolved) {
    const auto e = entries(std::string(kUnderpromotionFen) + " id \"fig\";\n" + kCheckingKeyFen + "\n");
    h::ScoreArgs args;
    args.seed = 5;
    std::ostringstream a, b, err;
    ASSERT_EQ(h::cmd_score(e, args, a, err), h::Ok);
    ASSERT_EQ(h::cmd_score(e, args, b, err), h::Ok);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().rfind("id,r1,r2,r3,total,mean\nfig,", 0), 0u);
    std::istringstream back(a.str());
    EXPECT_EQ(parse_score_table(back).size(), 2u);
    std::ostringstream c;
    EXPECT_EQ(h::cmd_score(entries("8/8/8/3k4/8/8/8/K7 w - -\n"), args, c, err), h::BadInput);
    EXPECT_NE(err.str().find("line 1"), std::string::npos);
}

TEST(Correlate, DemoReportFields) {
    const fs::path src = CHESSPROB_SOURCE_DIR;
    std::ostringstream out;
    ASSERT_EQ(h::cmd_correlate(src / "data/demo_judges.csv", src / "data/demo_scores.csv", true, out), h::Ok);
    const json j = json::parse(out.str());
    for (const char* k : {"n", "rho_totals", "p_totals", "significant_totals_1pct", "rho_means", "p_means",
                          "significant_means_1pct", "judge_pearson_r"})
        EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_EQ(j.at("n").get<int>(), 145);
    std::ifstream jf(src / "data/demo_judges.csv"), sf(src / "data/demo_scores.csv");
    const auto rep = analyze_judges(parse_judge_table(jf), parse_score_table(sf));
    EXPECT_EQ(j.at("rho_totals").get<double>(), rep.totals.rho);
    EXPECT_EQ(j.at("judge_pearson_r").at("judges_1_2").get<double>(), rep.judge_r_12);
}

TEST(Experiment1, ReconstructsTheReportedTests) {
    const fs::path dir = scratch_dir("exp1");
    h::Experiment1Args args;
    // Pooled set statistics split over the two approaches would change the
    // pooled moments, so each set is one random-approach campaign here.
    args.inputs[0].push_back(write_campaign(dir / "s1", Approach::Random, with_moments(888, 2.205, 0.49, 1), 60000));
    args.inputs[1].push_back(write_campaign(dir / "s2", Approach::Random, with_moments(632, 2.272, 0.45, 2), 60000));
    args.inputs[2].push_back(write_campaign(dir / "s3", Approach::Random, with_moments(710, 2.152, 0.47, 3), std::nullopt));
    args.out_dir = dir / "out";
    std::ostringstream out;
    ASSERT_EQ(h::cmd_experiment1(args, out), h::Ok);
    const json rep = json::parse(h::read_file(args.out_dir / "experiment1.json"));
    const double t12 = rep.at("tests")[0].at("t").get<double>();
    const double t23 = rep.at("tests")[1].at("t").get<double>();
    EXPECT_NEAR(std::fabs(t12), 2.72, 0.1);
    EXPECT_NEAR(std::fabs(t23), 4.77, 0.05);
    EXPECT_EQ(rep.at("tests")[0].at("kind").get<std::string>(), "welch");
    EXPECT_EQ(rep.at("tests")[1].at("kind").get<std::string>(), "pooled");
    EXPECT_TRUE(rep.at("tests")[0].at("significant_1pct").get<bool>());
    EXPECT_TRUE(rep.at("tests")[1].at("significant_1pct").get<bool>());
}

TEST(Experiment1, IdenticalSetsGiveZeroT) {
    const fs::path dir = scratch_dir("exp1_same");
    const auto scores = with_moments(50, 2.2, 0.4, 9);
    h::Experiment1Args args;
    for (int s = 0; s < 3; ++s)
        args.inputs[s].push_back(
            write_campaign(dir / ("s" + std::to_string(s)), Approach::Random, scores, 1000));
    std::ostringstream out;
    ASSERT_EQ(h::cmd_experiment1(args, out), h::Ok);
    EXPECT_NE(out.str().find("t(98) = 0.00, p = 1.000000"), std::string::npos) << out.str();
}

TEST(Experiment1, TableRowLabels) {
    std::array<h::ExperimentSet, 3> sets;
    for (int s = 0; s < 3; ++s) {
        sets[s].conventions = 2 + s;
        h::Campaign rnd, exp;
        rnd.attempts = 60000;
        rnd.successes = 6;
        rnd.scores = {2.0, 2.1, 2.3};
        exp.approach = Approach::Experience;
        exp.attempts = 60000;
        exp.successes = 2;
        exp.scores = {1.9, 2.4};
        sets[s].campaigns = {rnd, exp};
    }
    const auto r = h::analyze_experiment1(sets);
    auto labels = [](const std::string& table) {
        std::vector<std::string> out;
        std::istringstream in(table);
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            if (line.find_first_not_of("-+ ") == std::string::npos)
                continue;
            out.push_back(line.substr(0, line.find("  ")));
        }
        return out;
    };
    EXPECT_EQ(labels(r.table1), h::table1_row_labels());
    EXPECT_EQ(labels(r.table2), h::table2_row_labels());
    EXPECT_NE(r.table1.find("0.01%"), std::string::npos);
    EXPECT_NE(r.table1.find("60,000"), std::string::npos);
    EXPECT_EQ(r.experience_vs_random.size(), 3u);
    const std::string text = h::render_experiment1(r);
    EXPECT_EQ(text.rfind("Table 1. Automatic composing results.\n", 0), 0u);
    EXPECT_NE(text.find("Table 2. Aesthetic scores of the computer-generated compositions.\n"), std::string::npos);
}

TEST(Experiment1, MissingSetIsAnError) {
    h::Experiment1Args args;
    std::ostringstream out;
    EXPECT_THROW(h::cmd_experiment1(args, out), std::runtime_error);
}

TEST(Experiment1, TooFewCompositionsIsReportedNotFatal) {
    const fs::path dir = scratch_dir("exp1_small");
    h::Experiment1Args args;
    args.inputs[0].push_back(write_campaign(dir / "s1", Approach::Random, {2.0, 2.4, 2.2}, 500));
    args.inputs[1].push_back(write_campaign(dir / "s2", Approach::Random, {2.1}, 500));
    args.inputs[2].push_back(write_campaign(dir / "s3", Approach::Random, {}, 500));
    args.out_dir = dir / "out";
    std::ostringstream out;
    ASSERT_EQ(h::cmd_experiment1(args, out), h::Ok);
    EXPECT_NE(out.str().find("Set 2 vs Set 3: too few compositions"), std::string::npos) << out.str();
    const json rep = json::parse(h::read_file(args.out_dir / "experiment1.json"));
    EXPECT_TRUE(rep.at("tests")[0].at("t").is_null());
}
