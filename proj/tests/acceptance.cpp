// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "common.hpp"
#include "oracle/mailbox.hpp"

#include <chessprob/harness.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

using namespace chessprob;
namespace h = chessprob::harness;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, int d = 4) { return format_fixed(v, d); }

// ---- brute-force formulas shared by criteria 7 and 10

std::vector<double> brute_ranks(const std::vector<double>& v) {
    std::vector<double> r;
    for (double a : v) {
        double less = 0, eq = 0;
        for (double b : v) {
            less += b < a;
            eq += b == a;
        }
        r.push_back(1 + less + (eq - 1) / 2);
    }
    return r;
}

double brute_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = x.size();
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

double brute_spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return brute_pearson(brute_ranks(x), brute_ranks(y));
}

double brute_mean(const std::vector<double>& x) {
    double s = 0;
    for (double v : x)
        s += v;
    return s / x.size();
}

double brute_var(const std::vector<double>& x) {
    const double m = brute_mean(x);
    double s = 0;
    for (double v : x)
        s += (v - m) * (v - m);
    return s / (x.size() - 1);
}

// ---- compose runs shared by criteria 6 and 9

BatchReport compose_run(FilterSet f, std::uint64_t attempts) {
    ComposeConfig cfg;
    cfg.master_seed = 2024;
    cfg.attempts = attempts;
    cfg.filter = f;
    return run_batch(cfg, nullptr, BaselineScorer{});
}

const BatchReport& unfiltered_run() {
    static const BatchReport r = compose_run(FilterSet::None, 10000);
    return r;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CHESSPROB_CLI) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// ---------------------------------------------------------------------------

Outcome efficiency_arithmetic() {
    Outcome o;
    const std::pair<std::uint64_t, const char*> rows[] = {
        {429, "1.43%"}, {459, "1.53%"}, {303, "1.01%"}, {329, "1.10%"}};
    for (const auto& [succ, want] : rows) {
        const std::string got = format_efficiency(succ, 30000);
        o.require(got == want, std::to_string(succ) + "/30000 gave " + got);
    }
    return o;
}

Outcome score_totaling() {
    Outcome o;
    const auto a = ScoreTriple::from_rounds({1.679, 1.699, 1.639});
    const auto b = ScoreTriple::from_rounds({1.753, 1.753, 1.773});
    o.require(format_fixed(a.total, 1) == "5.0", "computer row 1 total " + format_fixed(a.total, 1));
    o.require(format_fixed(b.total, 1) == "5.3", "computer row 2 total " + format_fixed(b.total, 1));
    std::istringstream in("id,j1,j2,j3\n1,2,2.5,3\n2,3.5,4,3.5\n");
    const auto j = parse_judge_table(in);
    o.require(j.size() == 2 && j[0].total == 7.5 && j[1].total == 11.0, "judge totals");
    return o;
}

Outcome t_reconstruction() {
    Outcome o;
    const auto pooled = stats::t_test_from_summary(2.272, 0.45, 632, 2.152, 0.47, 710, stats::TestKind::Pooled);
    const auto welch = stats::t_test_from_summary(2.205, 0.49, 888, 2.272, 0.45, 632, stats::TestKind::Welch);
    o.require(std::fabs(std::fabs(pooled.t) - 4.77) <= 0.05, "pooled |t| " + fmt(pooled.t));
    o.require(std::fabs(welch.t) >= 2.62 && std::fabs(welch.t) <= 2.86, "welch |t| " + fmt(welch.t));
    o.require(stats::significance_at(0.01, pooled), "pooled not significant");
    o.require(stats::significance_at(0.01, welch), "welch not significant");
    o.note("pooled t(" + fmt(pooled.df, 0) + ") = " + fmt(pooled.t, 3) + ", welch t(" + fmt(welch.df, 1) +
           ") = " + fmt(welch.t, 3));
    return o;
}

Outcome solver_oracle() {
    Outcome o;
    Rng rng = make_stream({4});
    MateSolver solver;
    int mismatches = 0, with_keys = 0, positions = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = testutil::random_small_position(rng, 8);
        const auto ob = oracle::Board::from_fen(p.fen());
        // Mate in 2 on every position, mate in 3 on a sample.
        for (int n : {2, 3}) {
            if (n == 3 && i % 4 != 0)
                continue;
            solver.clear_cache();
            const auto keys = testutil::uci_list(solver.find_all_keys(p, Stipulation{n}));
            mismatches += keys != oracle::mate_keys(ob, n);
            with_keys += !keys.empty();
            ++positions;
        }
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    o.note(std::to_string(positions) + " searches, " + std::to_string(with_keys) + " with keys");
    return o;
}

Outcome perft_oracle() {
    Outcome o;
    for (const auto& c : testutil::perft_suite()) {
        const auto p = Position::from_fen(c.fen);
        const auto ob = oracle::Board::from_fen(c.fen);
        for (int d = 1; d <= 4; ++d) {
            const auto got = perft(p, d), want = oracle::perft(ob, d);
            o.require(got == want, std::string(c.fen) + " d" + std::to_string(d) + ": " + std::to_string(got) +
                                       " vs " + std::to_string(want));
        }
    }
    return o;
}

Outcome filter_soundness() {
    Outcome o;
    std::vector<std::pair<FilterSet, const BatchReport*>> runs;
    const BatchReport set1 = compose_run(FilterSet::Set1, 10000);
    const BatchReport set3 = compose_run(FilterSet::Set3, 10000);
    runs = {{FilterSet::None, &unfiltered_run()}, {FilterSet::Set1, &set1}, {FilterSet::Set3, &set3}};
    MateSolver solver;
    for (const auto& [f, r] : runs) {
        std::size_t failed = 0;
        for (const auto& rec : r->records) {
            solver.clear_cache();
            const Composition c = solve_composition(rec.composition.position, Stipulation{3}, solver);
            failed += !c.solved() || *c.shortest_mate != 3 || !passes(audit(c), f);
        }
        o.require(failed == 0, std::string(to_string(f)) + ": " + std::to_string(failed) + " fail re-audit");
        o.note(std::string(to_string(f)) + " " + r->efficiency_text() + " (" + std::to_string(r->successes) + ")");
    }
    o.require(unfiltered_run().successes > set1.successes && set1.successes > set3.successes,
              "efficiency not strictly decreasing");
    return o;
}

Outcome stats_oracle() {
    Outcome o;
    Rng rng = make_stream({7});
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 5 + uniform_index(rng, 16);
        std::vector<double> x(n), y(n);
        for (std::size_t k = 0; k < n; ++k) {
            // Coarse values on some vectors so that ties occur.
            x[k] = i % 3 == 0 ? static_cast<double>(uniform_index(rng, 6)) : uniform01(rng) * 4;
            y[k] = i % 3 == 0 ? static_cast<double>(uniform_index(rng, 6)) : uniform01(rng) * 4;
        }
        if (brute_var(x) == 0 || brute_var(y) == 0)
            continue;
        worst = std::max(worst, std::fabs(stats::spearman(x, y) - brute_spearman(x, y)));
        worst = std::max(worst, std::fabs(stats::pearson(x, y) - brute_pearson(x, y)));
        const auto w = stats::t_test(x, y, stats::TestKind::Welch);
        const double wt = (brute_mean(x) - brute_mean(y)) / std::sqrt(brute_var(x) / n + brute_var(y) / n);
        const auto p = stats::t_test(x, y, stats::TestKind::Pooled);
        const double sp = ((n - 1) * brute_var(x) + (n - 1) * brute_var(y)) / (2 * n - 2);
        const double pt = (brute_mean(x) - brute_mean(y)) / std::sqrt(sp * 2.0 / n);
        worst = std::max({worst, std::fabs(w.t - wt), std::fabs(p.t - pt)});
    }
    std::ostringstream dev;
    dev << std::scientific << std::setprecision(2) << worst;
    o.require(worst <= 1e-9, "max deviation " + dev.str());
    const std::vector<double> a{3, 1, 4, 1.5, 9, 2.6}, rev{-3, -1, -4, -1.5, -9, -2.6};
    o.require(stats::spearman(a, a) == 1.0, "rho(identity) != 1");
    o.require(stats::spearman(a, rev) == -1.0, "rho(reverse) != -1");
    o.note("max deviation " + dev.str());
    return o;
}

Outcome determinism() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "chessprob_acceptance";
    fs::remove_all(root);
    const std::string base = "compose --approach random --filter set1 --attempts 1500 --seed 99 ";
    const fs::path a = root / "a", b = root / "b", c = root / "c";
    o.require(run_cli(base + "--workers 1 --out " + a.string()) == 0, "compose run a failed");
    o.require(run_cli(base + "--workers 1 --out " + b.string()) == 0, "compose run b failed");
    o.require(run_cli(base + "--workers 4 --out " + c.string()) == 0, "compose run c failed");
    for (const char* f : {"records.jsonl", "scores.csv", "summary.txt", "summary.json"}) {
        const std::string ref = h::read_file(a / f);
        o.require(ref == h::read_file(b / f), std::string(f) + " differs between repeated runs");
        o.require(ref == h::read_file(c / f), std::string(f) + " differs between worker counts");
    }
    std::string epd;
    for (const auto& rec : unfiltered_run().records) {
        epd += rec.composition.position.fen() + " id \"a" + std::to_string(rec.attempt) + "\";\n";
        if (epd.size() > 4000)
            break;
    }
    h::write_file(root / "in.epd", epd);
    const std::string score = "score --seed 5 " + (root / "in.epd").string() + " --out ";
    o.require(run_cli(score + (root / "s1.csv").string()) == 0, "score run 1 failed");
    o.require(run_cli(score + (root / "s2.csv").string()) == 0, "score run 2 failed");
    o.require(h::read_file(root / "s1.csv") == h::read_file(root / "s2.csv"), "score output differs");
    fs::remove_all(root);
    return o;
}

Outcome aesthetics_contract() {
    Outcome o;
    const BaselineScorer scorer;
    std::size_t out_of_range = 0, non_additive = 0;
    double worst_spread = 0;
    const auto& records = unfiltered_run().records;
    for (const auto& rec : records) {
        double lo = 5, hi = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const AestheticScore s = scorer.score(rec.composition, seed);
            lo = std::min(lo, s.value);
            hi = std::max(hi, s.value);
            out_of_range += s.value < 0 || s.value > 5;
            non_additive += s.value != std::clamp(s.terms_sum() + s.jitter, 0.0, 5.0);
        }
        worst_spread = std::max(worst_spread, hi - lo);
    }
    o.require(!records.empty(), "empty corpus");
    o.require(worst_spread <= 0.1, "spread " + fmt(worst_spread));
    o.require(out_of_range == 0, std::to_string(out_of_range) + " values outside [0,5]");
    o.require(non_additive == 0, std::to_string(non_additive) + " non-additive breakdowns");
    o.note(std::to_string(records.size()) + " compositions, max spread " + fmt(worst_spread));
    return o;
}

Outcome judge_analysis() {
    Outcome o;
    const std::string dir = std::string(CHESSPROB_SOURCE_DIR) + "/data/";
    std::ostringstream report;
    h::cmd_correlate(dir + "demo_judges.csv", dir + "demo_scores.csv", true, report);
    const json r = json::parse(report.str());

    std::ifstream jf(dir + "demo_judges.csv"), sf(dir + "demo_scores.csv");
    const auto judges = parse_judge_table(jf);
    const auto computed = parse_score_table(sf);
    std::map<std::string, ComputedScoreRow> by_id;
    for (const auto& c : computed)
        by_id[c.id] = c;
    std::vector<double> jt, jm, ct, cm;
    std::array<std::vector<double>, 3> cols;
    for (const auto& j : judges) {
        const auto& c = by_id.at(j.id);
        const double js = j.scores[0] + j.scores[1] + j.scores[2];
        const double cs = c.rounds[0] + c.rounds[1] + c.rounds[2];
        jt.push_back(js);
        jm.push_back(js / 3);
        ct.push_back(std::floor(cs * 10 + 0.5 + 1e-9) / 10);
        cm.push_back(std::floor(cs / 3 * 10 + 0.5 + 1e-9) / 10);
        for (int k = 0; k < 3; ++k)
            cols[k].push_back(j.scores[k]);
    }
    o.require(r.at("n").get<std::size_t>() == 145 && judges.size() == 145, "expected 145 rows");
    o.require(std::fabs(r.at("rho_totals").get<double>() - brute_spearman(jt, ct)) <= 1e-9, "totals rho");
    o.require(std::fabs(r.at("rho_means").get<double>() - brute_spearman(jm, cm)) <= 1e-9, "means rho");
    const json& pr = r.at("judge_pearson_r");
    o.require(std::fabs(pr.at("judges_1_2").get<double>() - brute_pearson(cols[0], cols[1])) <= 1e-9, "r12");
    o.require(std::fabs(pr.at("judges_2_3").get<double>() - brute_pearson(cols[1], cols[2])) <= 1e-9, "r23");
    o.require(std::fabs(pr.at("judges_1_3").get<double>() - brute_pearson(cols[0], cols[2])) <= 1e-9, "r13");
    o.note("rho totals " + fmt(r.at("rho_totals").get<double>()) + ", means " +
           fmt(r.at("rho_means").get<double>()) + "; judge r 1-2 " + fmt(pr.at("judges_1_2").get<double>(), 3) +
           ", 2-3 " + fmt(pr.at("judges_2_3").get<double>(), 3) + ", 1-3 " +
           fmt(pr.at("judges_1_3").get<double>(), 3));
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"efficiency arithmetic", efficiency_arithmetic},
        {"score totaling", score_totaling},
        {"t reconstruction from summaries", t_reconstruction},
        {"solver vs exhaustive enumerator", solver_oracle},
        {"perft vs independent generator", perft_oracle},
        {"filter soundness", filter_soundness},
        {"statistics vs brute force", stats_oracle},
        {"determinism", determinism},
        {"aesthetics contract", aesthetics_contract},
        {"judge analysis end to end", judge_analysis},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " ["
                  << format_fixed(secs, 1) << "s]" << (o.detail.empty() ? "" : ": " + o.detail) << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
