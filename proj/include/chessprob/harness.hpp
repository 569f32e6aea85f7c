// harness.hpp
// Command implementations behind the `chessprob` CLI: composing campaigns,
// solving, auditing, scoring, judge correlation and the convention-count
// experiment. Every command writes to caller-supplied streams/directories and
// returns an exit code, so tests drive them directly.

#pragma once

#include "aesthetics.hpp"
#include "composer.hpp"
#include "composition.hpp"
#include "conventions.hpp"
#include "io.hpp"
#include "judge.hpp"
#include "stats.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace chessprob::harness {

namespace fs = std::filesystem;

inline constexpr const char* kVersion = "chessprob 1.0.0";
inline constexpr const char* kOutDirEnv = "CHESSPROB_OUT_DIR";

enum ExitCode : int { Ok = 0, CheckFailed = 1, BadInput = 2 };

inline fs::path default_out_dir(const std::string& run_name) {
    const char* env = std::getenv(kOutDirEnv);
    return fs::path(env && *env ? env : "runs") / run_name;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
}

inline std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline AestheticWeights load_weights(const std::string& path) {
    return path.empty() ? AestheticWeights{} : AestheticWeights::load(path);
}

inline json weights_to_json(AestheticWeights w) {
    json j = json::object();
    for (auto& [name, ptr] : w.fields())
        j[name] = *ptr;
    return j;
}

inline AestheticWeights weights_from_json(const json& j) {
    AestheticWeights w;
    for (auto& [name, ptr] : w.fields())
        if (j.contains(name))
            *ptr = j.at(name).get<double>();
    return w;
}

inline PlacementModel load_placement_model(const std::string& corpus_path) {
    std::vector<Position> corpus;
    for (auto& e : read_epd_file(corpus_path))
        corpus.push_back(e.position);
    return PlacementModel::train(corpus);
}

// ---------------------------------------------------------------------------
// compose

struct ComposeArgs {
    ComposeConfig config;
    std::string corpus;  // required for the experience approach
    std::string weights; // empty: built-in defaults
    fs::path out_dir;
    int workers = 1;
};

inline json compose_config_to_json(const ComposeArgs& a) {
    const ComposeConfig& c = a.config;
    json j{{"approach", std::string(to_string(c.approach))},
           {"filter", std::string(to_string(c.filter))},
           {"min_pieces", c.min_pieces},
           {"max_pieces", c.max_pieces},
           {"master_seed", c.master_seed},
           {"attempts", c.attempts},
           {"batch_size", c.batch_size},
           {"stipulation", c.stipulation.moves},
           {"candidate_retries", c.candidate_retries},
           {"include_later_duals", c.conventions.include_later_duals},
           {"flight_rule", c.conventions.flight_rule == FlightRule::LostSquare ? "lost-square" : "count"},
           {"corpus", a.corpus},
           {"corpus_fnv1a", a.corpus.empty() ? std::string() : fnv1a_hex(read_file(a.corpus))},
           {"weights", weights_to_json(load_weights(a.weights))}};
    return j;
}

inline ComposeArgs compose_args_from_manifest(const json& manifest) {
    const json& c = manifest.at("config");
    ComposeArgs a;
    a.config.approach = parse_approach(c.at("approach").get<std::string>());
    a.config.filter = parse_filter_set(c.at("filter").get<std::string>());
    a.config.min_pieces = c.at("min_pieces").get<int>();
    a.config.max_pieces = c.at("max_pieces").get<int>();
    a.config.master_seed = c.at("master_seed").get<std::uint64_t>();
    a.config.attempts = c.at("attempts").get<std::uint64_t>();
    a.config.batch_size = c.at("batch_size").get<std::uint64_t>();
    a.config.stipulation = Stipulation::mate_in(c.at("stipulation").get<int>());
    a.config.candidate_retries = c.at("candidate_retries").get<int>();
    a.config.conventions.include_later_duals = c.at("include_later_duals").get<bool>();
    a.config.conventions.flight_rule =
        c.at("flight_rule").get<std::string>() == "count" ? FlightRule::CountDecrease : FlightRule::LostSquare;
    a.corpus = c.at("corpus").get<std::string>();
    if (!a.corpus.empty() && fnv1a_hex(read_file(a.corpus)) != c.at("corpus_fnv1a").get<std::string>())
        throw std::runtime_error("corpus " + a.corpus + " differs from the one recorded in the manifest");
    return a;
}

struct ComposeRun {
    BatchReport report;
    fs::path dir;
};

// Writes records.jsonl, scores.csv, summary.txt, summary.json and manifest.json.
inline ComposeRun run_compose(const ComposeArgs& args, std::ostream& log, const json* weights_override = nullptr) {
    const std::string started = utc_timestamp();
    std::optional<PlacementModel> model;
    if (args.config.approach == Approach::Experience) {
        if (args.corpus.empty())
            throw ComposeError("the experience approach needs --corpus");
        model = load_placement_model(args.corpus);
    }
    const AestheticWeights weights = weights_override ? weights_from_json(*weights_override) : load_weights(args.weights);
    const BaselineScorer scorer(weights);
    BatchReport report = run_batch(args.config, model ? &*model : nullptr, scorer, args.workers);

    std::string records, scores = ScoreCsvWriter::header();
    for (const CompositionRecord& rec : report.records) {
        records += to_json(rec).dump() + "\n";
        scores += ScoreCsvWriter::row("attempt" + std::to_string(rec.attempt), rec.scores);
    }
    const fs::path dir = args.out_dir;
    write_file(dir / "records.jsonl", records);
    write_file(dir / "scores.csv", scores);
    write_file(dir / "summary.txt", batch_summary_table(report));
    write_file(dir / "summary.json", batch_summary_json(report).dump(2) + "\n");

    json config = compose_config_to_json(args);
    if (weights_override)
        config["weights"] = *weights_override;
    json manifest{{"command", "compose"},
                  {"version", kVersion},
                  {"config", config},
                  {"master_seed", args.config.master_seed},
                  {"workers", args.workers},
                  {"started_utc", started},
                  {"finished_utc", utc_timestamp()},
                  {"outputs",
                   {{"records", "records.jsonl"},
                    {"scores", "scores.csv"},
                    {"summary_text", "summary.txt"},
                    {"summary_json", "summary.json"}}},
                  {"output_fnv1a", {{"records", fnv1a_hex(records)}, {"scores", fnv1a_hex(scores)}}},
                  {"summary", batch_summary_json(report)}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");

    log << batch_summary_table(report);
    return ComposeRun{std::move(report), dir};
}

// Re-runs a compose from its manifest into `out_dir`.
inline ComposeRun replay_compose(const fs::path& manifest_path, const fs::path& out_dir, int workers,
                                 std::ostream& log) {
    const json manifest = json::parse(read_file(manifest_path));
    ComposeArgs args = compose_args_from_manifest(manifest);
    args.out_dir = out_dir;
    args.workers = workers;
    const json weights = manifest.at("config").at("weights");
    return run_compose(args, log, &weights);
}

// ---------------------------------------------------------------------------
// solve / check / score

inline int cmd_solve(const std::vector<EpdEntry>& entries, Stipulation stip, std::ostream& out) {
    MateSolver solver;
    for (const EpdEntry& e : entries) {
        solver.clear_cache();
        const Composition c = solve_composition(e.position, stip, solver);
        json j{{"id", e.id}};
        for (const json solution = solution_to_json(c); auto& [k, v] : solution.items())
            j[k] = v;
        out << j.dump() << "\n";
    }
    return Ok;
}

struct CheckArgs {
    FilterSet set = FilterSet::Set1;
    Stipulation stipulation{3};
    ConventionOptions conventions{};
    bool json_output = false;
};

// Exit code is CheckFailed iff some position fails the requested set or has no solution.
inline int cmd_check(const std::vector<EpdEntry>& entries, const CheckArgs& args, std::ostream& out) {
    std::vector<std::pair<std::string, ConventionReport>> rows;
    json records = json::array();
    bool all_pass = true;
    MateSolver solver;
    for (const EpdEntry& e : entries) {
        solver.clear_cache();
        const Composition c = solve_composition(e.position, args.stipulation, solver);
        if (!c.solved()) {
            all_pass = false;
            ConventionReport empty;
            rows.emplace_back(e.id + " (unsolved)", empty);
            records.push_back({{"id", e.id}, {"solved", false}, {"pass", false}});
            continue;
        }
        const ConventionReport r = audit(c, args.conventions);
        const bool pass = passes(r, args.set);
        all_pass &= pass;
        rows.emplace_back(e.id, r);
        records.push_back({{"id", e.id},
                           {"solved", true},
                           {"shortest_mate", *c.shortest_mate},
                           {"pass", pass},
                           {"audit", to_json(r)}});
    }
    if (args.json_output)
        out << json{{"set", std::string(to_string(args.set))}, {"all_pass", all_pass}, {"positions", records}}.dump(2)
            << "\n";
    else
        out << audit_table(rows) << (all_pass ? "PASS " : "FAIL ") << to_string(args.set) << "\n";
    return all_pass ? Ok : CheckFailed;
}

struct ScoreArgs {
    std::uint64_t seed = 1;
    Stipulation stipulation{3};
    std::string weights;
};

inline int cmd_score(const std::vector<EpdEntry>& entries, const ScoreArgs& args, std::ostream& out,
                     std::ostream& err) {
    const BaselineScorer scorer(load_weights(args.weights));
    MateSolver solver;
    std::string csv = ScoreCsvWriter::header();
    for (const EpdEntry& e : entries) {
        solver.clear_cache();
        const Composition c = solve_composition(e.position, args.stipulation, solver);
        if (!c.solved()) {
            err << e.id << " (line " << e.line << "): no forced mate in " << args.stipulation.moves << "\n";
            return BadInput;
        }
        csv += ScoreCsvWriter::row(e.id, score_triple(scorer, c, derive_seed(args.seed, c.position.hash())));
    }
    out << csv;
    return Ok;
}

// ---------------------------------------------------------------------------
// correlate

inline int cmd_correlate(const fs::path& judges_csv, const fs::path& scores_csv, bool rounded, std::ostream& out) {
    std::ifstream jin(judges_csv), sin(scores_csv);
    if (!jin)
        throw std::runtime_error("cannot open " + judges_csv.string());
    if (!sin)
        throw std::runtime_error("cannot open " + scores_csv.string());
    std::vector<JudgeScoreRow> judges;
    std::vector<ComputedScoreRow> scores;
    try {
        judges = parse_judge_table(jin);
    } catch (const TableError& e) {
        throw std::runtime_error(judges_csv.string() + ": " + e.what());
    }
    try {
        scores = parse_score_table(sin);
    } catch (const TableError& e) {
        throw std::runtime_error(scores_csv.string() + ": " + e.what());
    }
    out << to_json(analyze_judges(judges, scores, rounded)).dump(2) << "\n";
    return Ok;
}

// ---------------------------------------------------------------------------
// experiment1: convention count vs aesthetic score

inline const std::vector<std::string>& table1_row_labels() {
    static const std::vector<std::string> labels = {"Composing Attempts", "Conventions Adhered",
                                                    "Successful Compositions", "Mean Composing Efficiency",
                                                    "Total Compositions"};
    return labels;
}

inline const std::vector<std::string>& table2_row_labels() {
    static const std::vector<std::string> labels = {"Conventions Adhered", "Mean Aesthetic Score",
                                                    "Standard Deviation", "Mean Aesthetic Score",
                                                    "Standard Deviation"};
    return labels;
}

struct Campaign {
    Approach approach = Approach::Random;
    std::optional<std::uint64_t> attempts;
    std::uint64_t successes = 0;
    std::vector<double> scores; // per composition: mean of its three rounds
};

// Reads a compose output directory (records.jsonl, optional summary.json).
inline Campaign load_campaign(const fs::path& dir) {
    Campaign c;
    bool approach_known = false;
    if (fs::exists(dir / "summary.json")) {
        const json s = json::parse(read_file(dir / "summary.json"));
        if (s.contains("attempts"))
            c.attempts = s.at("attempts").get<std::uint64_t>();
        if (s.contains("approach")) {
            c.approach = parse_approach(s.at("approach").get<std::string>());
            approach_known = true;
        }
    }
    std::istringstream lines(read_file(dir / "records.jsonl"));
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty())
            continue;
        const json rec = json::parse(line);
        if (!approach_known && rec.contains("approach")) {
            c.approach = parse_approach(rec.at("approach").get<std::string>());
            approach_known = true;
        }
        const auto rounds = rec.at("scores").at("rounds").get<std::vector<double>>();
        if (rounds.size() != 3)
            throw std::runtime_error(dir.string() + ": score record without three rounds");
        c.scores.push_back((rounds[0] + rounds[1] + rounds[2]) / 3.0);
    }
    c.successes = c.scores.size();
    return c;
}

struct ExperimentSet {
    int conventions = 0;
    std::vector<Campaign> campaigns;

    std::vector<double> pooled_scores() const {
        std::vector<double> all;
        for (const Campaign& c : campaigns)
            all.insert(all.end(), c.scores.begin(), c.scores.end());
        return all;
    }
    const Campaign* find(Approach a) const {
        for (const Campaign& c : campaigns)
            if (c.approach == a)
                return &c;
        return nullptr;
    }
};

struct Experiment1Result {
    std::array<ExperimentSet, 3> sets;
    std::optional<stats::StatsResult> set1_vs_set2; // unequal variances; empty if a sample is too small
    std::optional<stats::StatsResult> set2_vs_set3; // equal variances
    std::vector<std::pair<int, stats::StatsResult>> experience_vs_random;
    std::string table1;
    std::string table2;
    json report;
};

// Empty when a sample has fewer than two values or both have zero variance.
inline std::optional<stats::StatsResult> try_t_test(const std::vector<double>& a, const std::vector<double>& b,
                                                    stats::TestKind kind) {
    try {
        return stats::t_test(a, b, kind);
    } catch (const stats::StatsError&) {
        return std::nullopt;
    }
}

inline Experiment1Result analyze_experiment1(std::array<ExperimentSet, 3> sets) {
    Experiment1Result r;
    r.sets = std::move(sets);
    auto summary = [](const std::vector<double>& xs) { return stats::summarize(xs); };

    std::vector<std::string> header{""};
    for (int s = 0; s < 3; ++s)
        for (const char* a : {"Random", "Experience"})
            header.push_back("Set " + std::to_string(s + 1) + " " + a);

    std::vector<std::vector<std::string>> t1(5), t2(5);
    for (int i = 0; i < 5; ++i) {
        t1[i].push_back(table1_row_labels()[i]);
        t2[i].push_back(table2_row_labels()[i]);
    }
    json sets_json = json::array();
    for (int s = 0; s < 3; ++s) {
        const ExperimentSet& set = r.sets[s];
        const auto pooled = set.pooled_scores();
        json set_json{{"set", s + 1}, {"conventions_adhered", set.conventions}};
        json camps = json::array();
        for (Approach a : {Approach::Random, Approach::Experience}) {
            const Campaign* c = set.find(a);
            const bool first = a == Approach::Random;
            t1[0].push_back(c && c->attempts ? group_thousands(*c->attempts) : "-");
            t1[1].push_back(std::to_string(set.conventions));
            t1[2].push_back(c ? std::to_string(c->successes) : "-");
            t1[3].push_back(c && c->attempts && *c->attempts > 0 ? format_efficiency(c->successes, *c->attempts) : "-");
            t1[4].push_back(first ? std::to_string(pooled.size()) : "");
            t2[0].push_back(std::to_string(set.conventions));
            if (c && c->scores.size() >= 2) {
                const auto sm = summary(c->scores);
                t2[1].push_back(format_fixed(sm.mean, 3));
                t2[2].push_back(format_fixed(sm.sd, 3));
            } else {
                t2[1].push_back("-");
                t2[2].push_back("-");
            }
            if (first && pooled.size() >= 2) {
                const auto sm = summary(pooled);
                t2[3].push_back(format_fixed(sm.mean, 3));
                t2[4].push_back(format_fixed(sm.sd, 3));
            } else {
                t2[3].push_back(first ? "-" : "");
                t2[4].push_back(first ? "-" : "");
            }
            if (c) {
                json cj{{"approach", std::string(to_string(a))},
                        {"attempts", c->attempts ? json(*c->attempts) : json(nullptr)},
                        {"successes", c->successes}};
                if (c->attempts && *c->attempts > 0)
                    cj["efficiency_percent"] = format_efficiency(c->successes, *c->attempts);
                if (c->scores.size() >= 2) {
                    const auto sm = summary(c->scores);
                    cj["mean_aesthetic_score"] = sm.mean;
                    cj["standard_deviation"] = sm.sd;
                }
                camps.push_back(cj);
            }
        }
        set_json["campaigns"] = camps;
        set_json["total_compositions"] = pooled.size();
        if (pooled.size() >= 2) {
            const auto sm = summary(pooled);
            set_json["mean_aesthetic_score"] = sm.mean;
            set_json["standard_deviation"] = sm.sd;
        }
        sets_json.push_back(set_json);

        const Campaign* rnd = set.find(Approach::Random);
        const Campaign* exp = set.find(Approach::Experience);
        if (rnd && exp)
            if (auto t = try_t_test(exp->scores, rnd->scores, stats::TestKind::Welch))
                r.experience_vs_random.emplace_back(s + 1, *t);
    }

    r.set1_vs_set2 = try_t_test(r.sets[0].pooled_scores(), r.sets[1].pooled_scores(), stats::TestKind::Welch);
    r.set2_vs_set3 = try_t_test(r.sets[1].pooled_scores(), r.sets[2].pooled_scores(), stats::TestKind::Pooled);

    r.table1 = render_table(header, t1);
    r.table2 = render_table(header, t2);
    auto merged = [](json head, const json& tail) {
        head.update(tail);
        return head;
    };
    json tests = json::array();
    auto test_json = [&](const char* a, const char* b, const std::optional<stats::StatsResult>& t) {
        return t ? merged({{"a", a}, {"b", b}}, to_json(*t)) : json{{"a", a}, {"b", b}, {"t", nullptr}};
    };
    tests.push_back(test_json("set1", "set2", r.set1_vs_set2));
    tests.push_back(test_json("set2", "set3", r.set2_vs_set3));
    json approach_tests = json::array();
    for (const auto& [set, res] : r.experience_vs_random)
        approach_tests.push_back(merged({{"set", set}, {"a", "experience"}, {"b", "random"}}, to_json(res)));
    r.report = json{{"sets", sets_json}, {"tests", tests}, {"experience_vs_random", approach_tests}};
    return r;
}

inline std::string render_experiment1(const Experiment1Result& r) {
    auto test_line = [](const char* what, const std::optional<stats::StatsResult>& opt) {
        if (!opt)
            return std::string(what) + ": too few compositions for a t-test\n";
        const stats::StatsResult& t = *opt;
        return std::string(what) + ": " + stats::to_string(t.test_kind) + " t(" + format_fixed(t.df, 0) +
               ") = " + format_fixed(t.t, 2) + ", p = " + format_fixed(t.p_two_tailed, 6) +
               (stats::significance_at(0.01, t) ? " (significant at 1%)" : " (not significant at 1%)") + "\n";
    };
    std::string out = "Table 1. Automatic composing results.\n" + r.table1 +
                      "\nTable 2. Aesthetic scores of the computer-generated compositions.\n" + r.table2 + "\n";
    out += test_line("Set 1 vs Set 2", r.set1_vs_set2);
    out += test_line("Set 2 vs Set 3", r.set2_vs_set3);
    for (const auto& [set, t] : r.experience_vs_random)
        out += test_line(("Set " + std::to_string(set) + " experience vs random").c_str(), t);
    return out;
}

struct Experiment1Args {
    std::array<std::vector<fs::path>, 3> inputs; // compose output dirs per set
    bool run = false;                            // compose the six campaigns first
    std::uint64_t attempts = 1000;
    std::uint64_t seed = 1;
    std::string corpus;
    std::string weights;
    fs::path out_dir;
    int workers = 1;
};

inline int cmd_experiment1(const Experiment1Args& args, std::ostream& out) {
    std::array<ExperimentSet, 3> sets;
    const std::array<FilterSet, 3> filters{FilterSet::Set1, FilterSet::Set2, FilterSet::Set3};
    for (int s = 0; s < 3; ++s) {
        sets[s].conventions = conventions_adhered(filters[s]);
        std::vector<fs::path> dirs = args.inputs[s];
        if (args.run) {
            for (Approach a : {Approach::Random, Approach::Experience}) {
                ComposeArgs ca;
                ca.config.approach = a;
                ca.config.filter = filters[s];
                ca.config.attempts = args.attempts;
                ca.config.master_seed = derive_seed(args.seed, static_cast<std::uint64_t>(2 * s + (a == Approach::Experience)));
                ca.corpus = args.corpus;
                ca.weights = args.weights;
                ca.workers = args.workers;
                ca.out_dir = args.out_dir / ("set" + std::to_string(s + 1) + "-" + std::string(to_string(a)));
                std::ostringstream log;
                run_compose(ca, log);
                dirs.push_back(ca.out_dir);
            }
        }
        if (dirs.empty())
            throw std::runtime_error("experiment1: no input for set " + std::to_string(s + 1));
        for (const fs::path& d : dirs)
            sets[s].campaigns.push_back(load_campaign(d));
    }
    const Experiment1Result r = analyze_experiment1(std::move(sets));
    const std::string text = render_experiment1(r);
    out << text;
    if (!args.out_dir.empty()) {
        write_file(args.out_dir / "experiment1.txt", text);
        write_file(args.out_dir / "experiment1.json", r.report.dump(2) + "\n");
    }
    return Ok;
}

} // namespace chessprob::harness
