// composer.hpp
// Automatic composition of directmate problems by generate-and-test:
// place pieces at random ("random") or from a square-frequency model learned
// from a corpus ("experience"), keep positions that are exact mates in N, and
// filter them through a convention set.

#pragma once

#include "aesthetics.hpp"
#include "board.hpp"
#include "composition.hpp"
#include "conventions.hpp"
#include "rng.hpp"
#include "solver.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace chessprob {

class ComposeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Per (color, piece kind) probability mass over the 64 squares.
class PlacementModel {
public:
    static PlacementModel uniform() {
        PlacementModel m;
        for (auto& by_type : m.mass_)
            for (auto& channel : by_type)
                channel.fill(1.0 / 64.0);
        return m;
    }

    // Add-`smoothing` square frequencies per channel, normalized.
    static PlacementModel train(std::span<const Position> corpus, double smoothing = 1.0) {
        if (corpus.empty())
            throw ComposeError("placement model needs a non-empty corpus");
        if (!(smoothing > 0))
            throw ComposeError("smoothing constant must be positive");
        std::array<std::array<std::array<double, 64>, 6>, 2> counts{};
        for (const Position& p : corpus)
            for (int s = 0; s < 64; ++s)
                if (auto piece = p.piece_at(static_cast<Square>(s)))
                    counts[index(piece->color)][index(piece->type)][s] += 1.0;
        PlacementModel m;
        m.corpus_size_ = corpus.size();
        m.smoothing_ = smoothing;
        for (int c = 0; c < 2; ++c)
            for (int t = 0; t < 6; ++t) {
                double total = 0;
                for (int s = 0; s < 64; ++s)
                    total += counts[c][t][s] + smoothing;
                for (int s = 0; s < 64; ++s)
                    m.mass_[c][t][s] = (counts[c][t][s] + smoothing) / total;
            }
        return m;
    }

    const std::array<double, 64>& channel(Color c, PieceType t) const { return mass_[index(c)][index(t)]; }
    std::size_t corpus_size() const { return corpus_size_; }
    double smoothing() const { return smoothing_; }

private:
    std::array<std::array<std::array<double, 64>, 6>, 2> mass_{};
    std::size_t corpus_size_ = 0;
    double smoothing_ = 0;
};

enum class Approach { Random, Experience };

inline std::string_view to_string(Approach a) { return a == Approach::Random ? "random" : "experience"; }

inline Approach parse_approach(std::string_view text) {
    if (text == "random") return Approach::Random;
    if (text == "experience") return Approach::Experience;
    throw ComposeError("unknown approach '" + std::string(text) + "'");
}

struct ComposeConfig {
    Approach approach = Approach::Random;
    FilterSet filter = FilterSet::None;
    int min_pieces = 4;  // non-king pieces
    int max_pieces = 12;
    std::uint64_t master_seed = 1;
    std::uint64_t attempts = 1000;
    std::uint64_t batch_size = 1000;
    Stipulation stipulation{3};
    ConventionOptions conventions{};
    int candidate_retries = 50;

    void validate() const {
        if (min_pieces < 2 || max_pieces > 24 || min_pieces > max_pieces)
            throw ComposeError("piece count range must satisfy 2 <= min <= max <= 24");
        if (attempts < 1)
            throw ComposeError("attempts must be at least 1");
        if (batch_size < 1)
            throw ComposeError("batch size must be at least 1");
        Stipulation::mate_in(stipulation.moves);
    }
};

// ---------------------------------------------------------------------------
// Candidate generation

namespace detail {

inline bool white_has_preponderance(const std::vector<Piece>& pieces) {
    int majors = 0, minors = 0;
    for (const Piece& p : pieces) {
        if (p.color != Color::White)
            continue;
        if (p.type == PieceType::Queen || p.type == PieceType::Rook)
            ++majors;
        if (p.type == PieceType::Knight || p.type == PieceType::Bishop)
            ++minors;
    }
    return majors >= 1 || minors >= 2;
}

inline std::vector<Piece> pick_pieces(Rng& rng, int count) {
    // Relative frequencies of non-king units; White gets about 60% of them.
    static constexpr std::array<double, 5> kTypeWeights = {0.34, 0.16, 0.16, 0.17, 0.17};
    std::vector<Piece> out;
    std::array<int, 2> pawns{}, total{};
    while (static_cast<int>(out.size()) < count) {
        const Color c = uniform01(rng) < 0.6 ? Color::White : Color::Black;
        const auto t = static_cast<PieceType>(weighted_index(rng, kTypeWeights));
        if (total[index(c)] >= 15 || (t == PieceType::Pawn && pawns[index(c)] >= 8))
            continue;
        ++total[index(c)];
        if (t == PieceType::Pawn)
            ++pawns[index(c)];
        out.push_back(Piece{t, c});
    }
    return out;
}

inline std::optional<Square> sample_square(Rng& rng, Approach approach, const PlacementModel* model, Piece piece,
                                           const BoardSetup& setup) {
    for (int tries = 0; tries < 1000; ++tries) {
        Square s;
        if (approach == Approach::Experience && model)
            s = static_cast<Square>(weighted_index(rng, model->channel(piece.color, piece.type)));
        else
            s = static_cast<Square>(uniform_index(rng, 64));
        if (setup.squares[s])
            continue;
        if (piece.type == PieceType::Pawn && (rank_of(s) == 0 || rank_of(s) == 7))
            continue;
        return s;
    }
    return std::nullopt;
}

} // namespace detail

// A legal White-to-move position, or nullopt after `candidate_retries`
// rejected placements (the attempt then counts as a miss).
inline std::optional<Position> generate_candidate(const ComposeConfig& cfg, const PlacementModel* model, Rng& rng) {
    if (cfg.min_pieces < 0 || cfg.min_pieces > cfg.max_pieces || cfg.max_pieces > 24)
        throw ComposeError("bad piece count range");
    if (cfg.approach == Approach::Experience && !model)
        throw ComposeError("experience approach needs a placement model");
    for (int attempt = 0; attempt < cfg.candidate_retries; ++attempt) {
        const int count =
            cfg.min_pieces + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(cfg.max_pieces - cfg.min_pieces + 1)));
        const std::vector<Piece> pieces = detail::pick_pieces(rng, count);
        if (count >= 2 && !detail::white_has_preponderance(pieces))
            continue;

        BoardSetup setup;
        const Piece wk{PieceType::King, Color::White}, bk{PieceType::King, Color::Black};
        const auto wks = detail::sample_square(rng, cfg.approach, model, wk, setup);
        if (!wks)
            continue;
        setup.squares[*wks] = wk;
        const auto bks = detail::sample_square(rng, cfg.approach, model, bk, setup);
        if (!bks || (king_attacks(*wks) & bit(*bks)))
            continue;
        setup.squares[*bks] = bk;

        bool placed = true;
        for (const Piece& p : pieces) {
            const auto s = detail::sample_square(rng, cfg.approach, model, p, setup);
            if (!s) {
                placed = false;
                break;
            }
            setup.squares[*s] = p;
        }
        if (!placed || Position::check_setup(setup))
            continue;
        return Position::from_setup(setup);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Attempts and batches

enum class MissReason { None, NoCandidate, NoMate, ShortMate, Filter };

inline std::string_view to_string(MissReason r) {
    switch (r) {
    case MissReason::None: return "none";
    case MissReason::NoCandidate: return "no-candidate";
    case MissReason::NoMate: return "no-mate";
    case MissReason::ShortMate: return "short-mate";
    case MissReason::Filter: return "filter";
    }
    return "none";
}

struct CompositionRecord {
    std::uint64_t attempt = 0;
    Approach approach = Approach::Random;
    FilterSet filter = FilterSet::None;
    Composition composition;
    ConventionReport report;
    ScoreTriple scores;
};

struct AttemptResult {
    std::uint64_t index = 0;
    MissReason miss = MissReason::None;
    std::optional<CompositionRecord> record;
};

inline constexpr std::uint64_t kCandidateStreamTag = 0x63616e646964ULL;
inline constexpr std::uint64_t kScoreStreamTag = 0x73636f7265ULL;

inline AttemptResult attempt(const ComposeConfig& cfg, const PlacementModel* model, const Scorer& scorer,
                             std::uint64_t attempt_index) {
    AttemptResult out{attempt_index, MissReason::None, std::nullopt};
    Rng rng = make_stream({cfg.master_seed, attempt_index, kCandidateStreamTag});
    const auto candidate = generate_candidate(cfg, model, rng);
    if (!candidate) {
        out.miss = MissReason::NoCandidate;
        return out;
    }
    MateSolver solver;
    const auto shortest = solver.shortest_forced_mate(*candidate, cfg.stipulation);
    if (!shortest) {
        out.miss = MissReason::NoMate;
        return out;
    }
    if (*shortest != cfg.stipulation.moves) {
        out.miss = MissReason::ShortMate;
        return out;
    }
    Composition c = solve_composition(*candidate, cfg.stipulation, solver);
    ConventionReport report = audit(c, cfg.conventions);
    if (!passes(report, cfg.filter)) {
        out.miss = MissReason::Filter;
        return out;
    }
    CompositionRecord rec{attempt_index, cfg.approach, cfg.filter, std::move(c), std::move(report), {}};
    rec.scores = score_triple(scorer, rec.composition,
                              derive_seed(cfg.master_seed ^ kScoreStreamTag, attempt_index));
    out.record = std::move(rec);
    return out;
}

struct BatchStat {
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;
};

// Efficiency in hundredths of a percent, rounded half up.
inline std::uint64_t efficiency_basis_points(std::uint64_t successes, std::uint64_t attempts) {
    if (attempts == 0)
        throw ComposeError("efficiency of zero attempts");
    return (successes * 20000 + attempts) / (2 * attempts);
}

inline std::string format_efficiency(std::uint64_t successes, std::uint64_t attempts) {
    const std::uint64_t bp = efficiency_basis_points(successes, attempts);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%llu.%02llu%%", static_cast<unsigned long long>(bp / 100),
                  static_cast<unsigned long long>(bp % 100));
    return buf;
}

struct BatchReport {
    ComposeConfig config;
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;
    std::vector<BatchStat> batches;
    std::array<std::uint64_t, 5> misses{}; // indexed by MissReason
    std::vector<CompositionRecord> records; // ordered by attempt index

    double efficiency() const { return attempts ? 100.0 * static_cast<double>(successes) / attempts : 0.0; }
    std::string efficiency_text() const { return format_efficiency(successes, attempts); }
};

// Runs cfg.attempts attempts on `workers` threads. Attempt i draws only from
// the stream (master_seed, i), so the report does not depend on `workers`.
inline BatchReport run_batch(const ComposeConfig& cfg, const PlacementModel* model, const Scorer& scorer,
                             int workers = 1) {
    cfg.validate();
    if (cfg.approach == Approach::Experience && !model)
        throw ComposeError("experience approach needs a placement model");
    std::vector<AttemptResult> results(cfg.attempts);
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t i = next++; i < cfg.attempts; i = next++)
            results[i] = attempt(cfg, model, scorer, i);
    };
    workers = std::max(1, workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }

    BatchReport report;
    report.config = cfg;
    report.attempts = cfg.attempts;
    for (std::uint64_t i = 0; i < cfg.attempts; ++i) {
        if (i % cfg.batch_size == 0)
            report.batches.push_back({});
        ++report.batches.back().attempts;
        ++report.misses[static_cast<std::size_t>(results[i].miss)];
        if (results[i].record) {
            ++report.successes;
            ++report.batches.back().successes;
            report.records.push_back(std::move(*results[i].record));
        }
    }
    return report;
}

} // namespace chessprob
