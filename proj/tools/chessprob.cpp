// chessprob: compose, solve, audit and score chess problems; correlate
// computed scores with judge tables; run the convention-count experiment.

#include <chessprob/harness.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace chessprob;
namespace h = chessprob::harness;

namespace {

FilterSet filter_from(const std::string& s) { return parse_filter_set(s); }

const std::map<std::string, FlightRule> kFlightRules{{"lost-square", FlightRule::LostSquare},
                                                      {"count", FlightRule::CountDecrease}};

void add_convention_flags(CLI::App* cmd, ConventionOptions& opts) {
    cmd->add_flag("--later-duals", opts.include_later_duals,
                  "count duals on White's third move as well as the second");
    cmd->add_option("--flight-rule", opts.flight_rule, "lost-square | count")
        ->transform(CLI::CheckedTransformer(kFlightRules, CLI::ignore_case));
}

std::vector<EpdEntry> read_inputs(const std::vector<std::string>& files) {
    std::vector<EpdEntry> all;
    for (const auto& f : files) {
        auto part = read_epd_file(f);
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chess problem composer and analysis harness"};
    app.set_config("--config", "", "key = value file; flags override it");
    app.set_version_flag("--version", h::kVersion);
    app.require_subcommand(1);

    // compose
    h::ComposeArgs compose;
    std::string approach = "random", filter = "none", compose_out, manifest;
    int mate_moves = 3;
    auto* c = app.add_subcommand("compose", "run a composing campaign");
    c->add_option("--approach", approach, "random | experience")->check(CLI::IsMember({"random", "experience"}));
    c->add_option("--filter", filter, "none | set1 | set2 | set3")->check(CLI::IsMember({"none", "set1", "set2", "set3"}));
    c->add_option("--attempts", compose.config.attempts, "composing attempts");
    c->add_option("--batch-size", compose.config.batch_size, "attempts per batch");
    c->add_option("--seed", compose.config.master_seed, "master seed");
    c->add_option("--min-pieces", compose.config.min_pieces);
    c->add_option("--max-pieces", compose.config.max_pieces);
    c->add_option("--mate-in", mate_moves, "stipulation, mate in N")->check(CLI::Range(1, 4));
    c->add_option("--corpus", compose.corpus, "EPD corpus for the experience approach")->check(CLI::ExistingFile);
    c->add_option("--weights", compose.weights, "aesthetic weight file")->check(CLI::ExistingFile);
    c->add_option("--workers", compose.workers, "worker threads")->check(CLI::PositiveNumber);
    c->add_option("--out", compose_out, "output directory");
    c->add_option("--manifest", manifest, "re-run the compose recorded in this manifest")->check(CLI::ExistingFile);
    add_convention_flags(c, compose.config.conventions);

    // solve
    std::vector<std::string> solve_files;
    int solve_moves = 3;
    auto* s = app.add_subcommand("solve", "solve positions, one JSON line each");
    s->add_option("files", solve_files, "EPD/FEN files")->required()->check(CLI::ExistingFile);
    s->add_option("--mate-in", solve_moves)->check(CLI::Range(1, 4));

    // check
    h::CheckArgs check;
    std::vector<std::string> check_files;
    std::string check_set = "set1";
    int check_moves = 3;
    auto* k = app.add_subcommand("check", "audit positions against a convention set");
    k->add_option("files", check_files, "EPD/FEN files")->required()->check(CLI::ExistingFile);
    k->add_option("--set", check_set, "set1 | set2 | set3")->check(CLI::IsMember({"none", "set1", "set2", "set3"}));
    k->add_option("--mate-in", check_moves)->check(CLI::Range(1, 4));
    k->add_flag("--json", check.json_output, "JSON instead of a text table");
    add_convention_flags(k, check.conventions);

    // score
    h::ScoreArgs score;
    std::vector<std::string> score_files;
    std::string score_out;
    int score_moves = 3;
    auto* sc = app.add_subcommand("score", "three aesthetic scoring rounds per position, as CSV");
    sc->add_option("files", score_files, "EPD/FEN files")->required()->check(CLI::ExistingFile);
    sc->add_option("--seed", score.seed, "master seed");
    sc->add_option("--mate-in", score_moves)->check(CLI::Range(1, 4));
    sc->add_option("--weights", score.weights)->check(CLI::ExistingFile);
    sc->add_option("--out", score_out, "CSV path (default: stdout)");

    // correlate
    std::string judges_csv, scores_csv, correlate_out;
    bool unrounded = false;
    auto* co = app.add_subcommand("correlate", "rank-correlate judge scores with computed scores");
    co->add_option("judges", judges_csv, "id,j1,j2,j3[,total]")->required()->check(CLI::ExistingFile);
    co->add_option("scores", scores_csv, "id,r1,r2,r3[,total,mean]")->required()->check(CLI::ExistingFile);
    co->add_flag("--unrounded", unrounded, "use computed values before one-decimal rounding");
    co->add_option("--out", correlate_out, "JSON path (default: stdout)");

    // experiment1
    h::Experiment1Args exp;
    std::vector<std::string> set_dirs[3];
    std::string exp_out;
    auto* e = app.add_subcommand("experiment1", "convention count vs aesthetic score");
    for (int i = 0; i < 3; ++i)
        e->add_option("--set" + std::to_string(i + 1), set_dirs[i], "compose output directories")
            ->check(CLI::ExistingDirectory);
    e->add_flag("--run", exp.run, "compose the six campaigns first");
    e->add_option("--attempts", exp.attempts, "attempts per campaign with --run");
    e->add_option("--seed", exp.seed);
    e->add_option("--corpus", exp.corpus)->check(CLI::ExistingFile);
    e->add_option("--weights", exp.weights)->check(CLI::ExistingFile);
    e->add_option("--workers", exp.workers)->check(CLI::PositiveNumber);
    e->add_option("--out", exp_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c) {
            const auto out = compose_out.empty() ? h::default_out_dir("compose") : h::fs::path(compose_out);
            if (!manifest.empty()) {
                h::replay_compose(manifest, out, compose.workers, std::cout);
                return h::Ok;
            }
            compose.config.approach = parse_approach(approach);
            compose.config.filter = filter_from(filter);
            compose.config.stipulation = Stipulation::mate_in(mate_moves);
            compose.out_dir = out;
            compose.config.validate();
            h::run_compose(compose, std::cout);
            return h::Ok;
        }
        if (*s)
            return h::cmd_solve(read_inputs(solve_files), Stipulation::mate_in(solve_moves), std::cout);
        if (*k) {
            check.set = filter_from(check_set);
            check.stipulation = Stipulation::mate_in(check_moves);
            return h::cmd_check(read_inputs(check_files), check, std::cout);
        }
        if (*sc) {
            score.stipulation = Stipulation::mate_in(score_moves);
            std::ostringstream csv;
            const int rc = h::cmd_score(read_inputs(score_files), score, csv, std::cerr);
            if (rc != h::Ok)
                return rc;
            if (score_out.empty())
                std::cout << csv.str();
            else
                h::write_file(score_out, csv.str());
            return h::Ok;
        }
        if (*co) {
            std::ostringstream report;
            h::cmd_correlate(judges_csv, scores_csv, !unrounded, report);
            if (correlate_out.empty())
                std::cout << report.str();
            else
                h::write_file(correlate_out, report.str());
            return h::Ok;
        }
        if (*e) {
            for (int i = 0; i < 3; ++i)
                for (const auto& d : set_dirs[i])
                    exp.inputs[i].push_back(d);
            exp.out_dir = exp_out.empty() && exp.run ? h::default_out_dir("experiment1") : h::fs::path(exp_out);
            return h::cmd_experiment1(exp, std::cout);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return h::BadInput;
    }
    return h::Ok;
}
