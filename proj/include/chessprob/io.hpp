// io.hpp
// File formats: EPD/FEN-per-line input, JSON-lines records, score CSV and
// fixed-width text tables.

#pragma once

#include "aesthetics.hpp"
#include "board.hpp"
#include "composer.hpp"
#include "composition.hpp"
#include "conventions.hpp"
#include "judge.hpp"
#include "san.hpp"
#include "stats.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chessprob {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// EPD / FEN input

struct EpdEntry {
    std::string id;
    Position position;
    int line = 0;
};

// One position per line: a 4-field EPD (optionally followed by operations
// such as `id "name";`) or a full 6-field FEN. Blank lines and lines
// starting with '#' are skipped. Entries without an id get "line<N>".
inline std::vector<EpdEntry> read_epd(std::istream& in) {
    std::vector<EpdEntry> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed[0] == '#')
            continue;
        const auto fields = chessprob::detail::split_fields(trimmed);
        if (fields.size() < 4)
            throw TableError(lineno, "expected at least 4 FEN fields");
        std::string fen;
        std::size_t used = 4;
        int counter = 0;
        if (fields.size() >= 6 && chessprob::detail::parse_counter(fields[4], counter) &&
            chessprob::detail::parse_counter(fields[5], counter))
            used = 6;
        for (std::size_t i = 0; i < used; ++i)
            fen += (i ? " " : "") + std::string(fields[i]);

        EpdEntry e{"line" + std::to_string(lineno), Position::initial(), lineno};
        try {
            e.position = Position::from_fen(fen);
        } catch (const PositionError& err) {
            throw TableError(lineno, err.what());
        }
        // Operations: look for `id "..."`.
        const std::size_t ops_at =
            static_cast<std::size_t>(fields[used - 1].data() - trimmed.data()) + fields[used - 1].size();
        const std::string ops = trimmed.substr(ops_at);
        if (auto pos = ops.find("id "); pos != std::string::npos) {
            const auto q1 = ops.find('"', pos);
            const auto q2 = q1 == std::string::npos ? q1 : ops.find('"', q1 + 1);
            if (q2 != std::string::npos)
                e.id = ops.substr(q1 + 1, q2 - q1 - 1);
        }
        out.push_back(std::move(e));
    }
    return out;
}

inline std::vector<EpdEntry> read_epd_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    try {
        return read_epd(in);
    } catch (const TableError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// JSON

inline json solution_to_json(const Composition& c) {
    json j;
    j["fen"] = c.position.fen();
    j["stipulation"] = c.stipulation.moves;
    json keys = json::array();
    for (const Move& k : c.keys)
        keys.push_back(to_san(c.position, k));
    j["keys"] = keys;
    j["key"] = c.keys.empty() ? json(nullptr) : json(to_san(c.position, c.keys.front()));
    j["shortest_mate"] = c.shortest_mate ? json(*c.shortest_mate) : json(nullptr);
    j["main_line"] = c.solved() ? json(c.main_line_san()) : json(nullptr);
    json defenses = json::array();
    if (c.tree)
        for (const Defense& d : c.tree->key.defenses)
            defenses.push_back({{"defense", d.san}, {"continuations", d.continuations.size()}});
    j["defenses"] = defenses;
    return j;
}

inline json to_json(const ConventionReport& r) {
    json details = json::array();
    for (const DualDetail& d : r.dual_details)
        details.push_back({{"line", d.line}, {"white_move", d.white_move}, {"continuations", d.continuations}});
    return json{{"cooked", r.cooked},
                {"has_duals", r.has_duals},
                {"duals_evaluated", r.duals_evaluated},
                {"key_is_check", r.key_is_check},
                {"key_is_capture", r.key_is_capture},
                {"key_restricts_king", r.key_restricts_king},
                {"keys_found", r.keys_found},
                {"dual_details", details},
                {"set1_pass", r.set1_pass},
                {"set2_pass", r.set2_pass},
                {"set3_pass", r.set3_pass}};
}

inline json to_json(const AestheticScore& s) {
    json terms = json::object();
    for (const FeatureTerm& t : s.feature_breakdown)
        terms[t.name] = t.value;
    return json{{"value", s.value}, {"seed", s.seed_used}, {"jitter", s.jitter}, {"features", terms}};
}

inline json to_json(const ScoreTriple& t) {
    json rounds = json::array();
    for (const auto& r : t.rounds)
        rounds.push_back(r.value);
    json detail = json::array();
    for (const auto& r : t.rounds)
        detail.push_back(to_json(r));
    return json{{"rounds", rounds}, {"total", t.total}, {"mean", t.mean}, {"round_detail", detail}};
}

inline json to_json(const CompositionRecord& rec) {
    json j;
    j["attempt"] = rec.attempt;
    j["approach"] = std::string(to_string(rec.approach));
    j["filter"] = std::string(to_string(rec.filter));
    for (const json solution = solution_to_json(rec.composition); auto& [k, v] : solution.items())
        j[k] = v;
    j["audit"] = to_json(rec.report);
    j["scores"] = to_json(rec.scores);
    return j;
}

inline json to_json(const stats::StatsResult& r) {
    return json{{"kind", stats::to_string(r.test_kind)},
                {"t", r.t},
                {"df", r.df},
                {"p_two_tailed", r.p_two_tailed},
                {"significant_1pct", stats::significance_at(0.01, r)}};
}

inline json to_json(const stats::CorrelationReport& c) {
    return json{{"n", c.n}, {"spearman_rho", c.rho}, {"pearson_r", c.r}, {"p_two_tailed", c.p_value},
                {"significant_1pct", c.significant_at_1pct}};
}

inline json to_json(const JudgeAnalysisReport& r) {
    return json{{"n", r.n},
                {"computed_rounded_to_one_decimal", r.rounded},
                {"rho_totals", r.totals.rho},
                {"p_totals", r.totals.p_value},
                {"significant_totals_1pct", r.totals.significant_at_1pct},
                {"rho_means", r.means.rho},
                {"p_means", r.means.p_value},
                {"significant_means_1pct", r.means.significant_at_1pct},
                {"judge_pearson_r",
                 {{"judges_1_2", r.judge_r_12}, {"judges_2_3", r.judge_r_23}, {"judges_1_3", r.judge_r_13}}}};
}

// ---------------------------------------------------------------------------
// Text output

inline std::string format_fixed(double v, int decimals) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(decimals) << v;
    return os.str();
}

// "30000" -> "30,000"
inline std::string group_thousands(std::uint64_t v) {
    std::string s = std::to_string(v);
    for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3)
        s.insert(static_cast<std::size_t>(i), ",");
    return s;
}

// Left-aligned first column, right-aligned value columns.
inline std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size(), 0);
    auto measure = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size() && i < width.size(); ++i)
            width[i] = std::max(width[i], r[i].size());
    };
    measure(header);
    for (const auto& r : rows)
        measure(r);
    auto line = [&](const std::vector<std::string>& r) {
        std::string out;
        for (std::size_t i = 0; i < width.size(); ++i) {
            const std::string cell = i < r.size() ? r[i] : "";
            const std::string pad(width[i] - cell.size(), ' ');
            out += i == 0 ? cell + pad : "  " + pad + cell;
        }
        while (!out.empty() && out.back() == ' ')
            out.pop_back();
        return out + "\n";
    };
    std::string out = line(header);
    for (const auto& r : rows)
        out += line(r);
    return out;
}

// Table-1-shaped summary of a single composing run.
inline std::string batch_summary_table(const BatchReport& r) {
    const std::string column =
        std::string(to_string(r.config.approach)) + " / " + std::string(to_string(r.config.filter));
    return render_table({"", column}, {{"Composing Attempts", group_thousands(r.attempts)},
                                       {"Conventions Adhered", std::to_string(conventions_adhered(r.config.filter))},
                                       {"Successful Compositions", std::to_string(r.successes)},
                                       {"Mean Composing Efficiency", r.efficiency_text()}});
}

inline json batch_summary_json(const BatchReport& r) {
    json batches = json::array();
    for (const BatchStat& b : r.batches)
        batches.push_back({{"attempts", b.attempts}, {"successes", b.successes}});
    json misses = json::object();
    for (std::size_t i = 1; i < r.misses.size(); ++i)
        misses[std::string(to_string(static_cast<MissReason>(i)))] = r.misses[i];
    return json{{"approach", std::string(to_string(r.config.approach))},
                {"filter", std::string(to_string(r.config.filter))},
                {"conventions_adhered", conventions_adhered(r.config.filter)},
                {"attempts", r.attempts},
                {"successes", r.successes},
                {"efficiency_percent", r.efficiency_text()},
                {"batches", batches},
                {"misses", misses}};
}

// Score CSV (id,r1,r2,r3,total,mean). Totals are computed from the printed
// round values so that the file is self-consistent on re-read.
struct ScoreCsvWriter {
    static std::string header() { return "id,r1,r2,r3,total,mean\n"; }

    static std::string row(const std::string& id, const ScoreTriple& t) {
        std::array<std::string, 3> printed;
        std::array<double, 3> values{};
        for (int i = 0; i < 3; ++i) {
            printed[i] = format_fixed(t.rounds[i].value, 6);
            values[i] = std::stod(printed[i]);
        }
        const ScoreTriple shown = ScoreTriple::from_rounds(values);
        return id + "," + printed[0] + "," + printed[1] + "," + printed[2] + "," + format_fixed(shown.total, 1) +
               "," + format_fixed(shown.mean, 1) + "\n";
    }
};

inline std::string audit_table(const std::vector<std::pair<std::string, ConventionReport>>& rows) {
    auto yn = [](bool b) { return std::string(b ? "yes" : "no"); };
    std::vector<std::vector<std::string>> body;
    std::vector<std::string> keys{"keys"};
    for (const auto& [id, r] : rows) {
        std::string k;
        for (const auto& san : r.keys_found)
            k += (k.empty() ? "" : " ") + san;
        keys.push_back(k);
        body.push_back({id, yn(r.cooked), r.duals_evaluated ? yn(r.has_duals) : "-", yn(r.key_is_check),
                        yn(r.key_is_capture), yn(r.key_restricts_king), r.set1_pass ? "pass" : "fail",
                        r.set2_pass ? "pass" : "fail", r.set3_pass ? "pass" : "fail"});
    }
    // Key lists vary in length, so they go last, left-aligned.
    std::istringstream table(
        render_table({"id", "cooked", "duals", "check", "capture", "flight", "set1", "set2", "set3"}, body));
    std::string out, line;
    for (std::size_t i = 0; std::getline(table, line); ++i)
        out += line + "  " + keys[i] + "\n";
    return out;
}

} // namespace chessprob
