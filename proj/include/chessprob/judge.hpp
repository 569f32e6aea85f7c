// judge.hpp
// Human judge score tables (three judges, 0..4 in half points), computed
// score tables, and their rank correlation.

#pragma once

#include "aesthetics.hpp"
#include "stats.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chessprob {

class TableError : public std::runtime_error {
public:
    TableError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct JudgeScoreRow {
    std::string id;
    std::array<double, 3> scores{};
    double total = 0;
    double mean = 0;
    // Some judge gave 0: "worthless or completely anticipated".
    bool has_zero_score = false;
};

// Meaning of a single judge score on the album scale.
inline std::string_view album_scale_meaning(double score) {
    if (score >= 4) return "Outstanding: must be in the Album";
    if (score >= 3) return "Very good: ought to be in the Album";
    if (score >= 2) return "Good: could be in the Album";
    if (score >= 1) return "Mediocre: ought not to be in the Album";
    if (score > 0) return "between worthless and mediocre";
    return "Worthless or completely anticipated: must not be in the Album";
}

struct ComputedScoreRow {
    std::string id;
    std::array<double, 3> rounds{};
    double total = 0; // round1 of the sum
    double mean = 0;  // round1 of the average
    double raw_total() const { return rounds[0] + rounds[1] + rounds[2]; }
    double raw_mean() const { return raw_total() / 3.0; }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

inline double parse_number(const std::string& text, int line, const char* what) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
        throw TableError(line, std::string("bad ") + what + " '" + text + "'");
    return v;
}

inline std::vector<std::vector<std::string>> read_csv(std::istream& in, const std::vector<std::string>& required,
                                                      const std::vector<std::string>& optional,
                                                      std::vector<int>& line_numbers) {
    std::string line;
    int lineno = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty())
            header = split_csv(line);
    }
    if (header.empty())
        throw TableError(0, "empty table");
    std::vector<std::string> expected = required;
    const bool with_optional = header.size() == required.size() + optional.size();
    if (with_optional)
        expected.insert(expected.end(), optional.begin(), optional.end());
    if (header != expected) {
        std::string want;
        for (const auto& h : required)
            want += (want.empty() ? "" : ",") + h;
        throw TableError(lineno, "expected header " + want);
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw TableError(lineno, "expected " + std::to_string(header.size()) + " columns");
        rows.push_back(std::move(cells));
        line_numbers.push_back(lineno);
    }
    return rows;
}

} // namespace detail

// CSV with header id,j1,j2,j3 and an optional total column that is checked.
inline std::vector<JudgeScoreRow> parse_judge_table(std::istream& in) {
    std::vector<int> lines;
    const auto rows = detail::read_csv(in, {"id", "j1", "j2", "j3"}, {"total"}, lines);
    std::vector<JudgeScoreRow> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& cells = rows[i];
        const int line = lines[i];
        JudgeScoreRow row;
        row.id = cells[0];
        if (row.id.empty())
            throw TableError(line, "empty composition id");
        if (!seen.insert(row.id).second)
            throw TableError(line, "duplicate composition id '" + row.id + "'");
        for (int j = 0; j < 3; ++j) {
            const double s = detail::parse_number(cells[1 + j], line, "judge score");
            const double twice = s * 2.0;
            if (s < 0 || s > 4 || std::fabs(twice - std::round(twice)) > 1e-9)
                throw TableError(line, "judge score " + cells[1 + j] + " is not on the 0..4 half-point grid");
            row.scores[j] = s;
            row.has_zero_score |= s == 0;
        }
        row.total = row.scores[0] + row.scores[1] + row.scores[2];
        row.mean = row.total / 3.0;
        if (cells.size() == 5) {
            const double given = detail::parse_number(cells[4], line, "total");
            if (std::fabs(given - row.total) > 1e-9)
                throw TableError(line, "total " + cells[4] + " does not match the judge scores");
        }
        out.push_back(row);
    }
    return out;
}

// CSV with header id,r1,r2,r3 and optional total,mean columns that are checked.
inline std::vector<ComputedScoreRow> parse_score_table(std::istream& in) {
    std::vector<int> lines;
    const auto rows = detail::read_csv(in, {"id", "r1", "r2", "r3"}, {"total", "mean"}, lines);
    std::vector<ComputedScoreRow> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& cells = rows[i];
        const int line = lines[i];
        ComputedScoreRow row;
        row.id = cells[0];
        if (!seen.insert(row.id).second)
            throw TableError(line, "duplicate composition id '" + row.id + "'");
        for (int r = 0; r < 3; ++r) {
            row.rounds[r] = detail::parse_number(cells[1 + r], line, "round score");
            if (row.rounds[r] < 0)
                throw TableError(line, "negative round score");
        }
        row.total = round1(row.raw_total());
        row.mean = round1(row.raw_mean());
        if (cells.size() == 6) {
            if (std::fabs(detail::parse_number(cells[4], line, "total") - row.total) > 1e-9 ||
                std::fabs(detail::parse_number(cells[5], line, "mean") - row.mean) > 1e-9)
                throw TableError(line, "total/mean columns do not match the rounds");
        }
        out.push_back(row);
    }
    return out;
}

enum class CorrelateMode { Totals, Means };

struct JudgeAnalysisReport {
    std::size_t n = 0;
    bool rounded = true; // computed values rounded to one decimal first
    stats::CorrelationReport totals;
    stats::CorrelationReport means;
    double judge_r_12 = 0;
    double judge_r_23 = 0;
    double judge_r_13 = 0;
};

struct MatchedColumns {
    std::vector<double> judge, computed;
};

inline MatchedColumns match_columns(const std::vector<JudgeScoreRow>& judges,
                                    const std::vector<ComputedScoreRow>& computed, CorrelateMode mode,
                                    bool rounded = true) {
    std::map<std::string, const ComputedScoreRow*> by_id;
    for (const auto& c : computed)
        by_id[c.id] = &c;
    std::vector<std::string> orphans;
    std::set<std::string> judge_ids;
    MatchedColumns out;
    for (const auto& j : judges) {
        judge_ids.insert(j.id);
        auto it = by_id.find(j.id);
        if (it == by_id.end()) {
            orphans.push_back(j.id);
            continue;
        }
        const ComputedScoreRow& c = *it->second;
        if (mode == CorrelateMode::Totals) {
            out.judge.push_back(j.total);
            out.computed.push_back(rounded ? c.total : c.raw_total());
        } else {
            out.judge.push_back(j.mean);
            out.computed.push_back(rounded ? c.mean : c.raw_mean());
        }
    }
    for (const auto& c : computed)
        if (!judge_ids.count(c.id))
            orphans.push_back(c.id);
    if (!orphans.empty()) {
        std::string list;
        for (const auto& o : orphans)
            list += (list.empty() ? "" : ", ") + o;
        throw TableError(0, "ids present in only one table: " + list);
    }
    return out;
}

inline stats::CorrelationReport correlate(const std::vector<JudgeScoreRow>& judges,
                                          const std::vector<ComputedScoreRow>& computed, CorrelateMode mode,
                                          bool rounded = true) {
    const auto cols = match_columns(judges, computed, mode, rounded);
    return stats::correlate(cols.judge, cols.computed);
}

inline JudgeAnalysisReport analyze_judges(const std::vector<JudgeScoreRow>& judges,
                                          const std::vector<ComputedScoreRow>& computed, bool rounded = true) {
    JudgeAnalysisReport r;
    r.rounded = rounded;
    r.totals = correlate(judges, computed, CorrelateMode::Totals, rounded);
    r.means = correlate(judges, computed, CorrelateMode::Means, rounded);
    r.n = r.totals.n;
    std::array<std::vector<double>, 3> cols;
    for (const auto& j : judges)
        for (int k = 0; k < 3; ++k)
            cols[k].push_back(j.scores[k]);
    r.judge_r_12 = stats::pearson(cols[0], cols[1]);
    r.judge_r_23 = stats::pearson(cols[1], cols[2]);
    r.judge_r_13 = stats::pearson(cols[0], cols[2]);
    return r;
}

} // namespace chessprob
