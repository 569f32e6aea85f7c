// aesthetics.hpp
// Pluggable stochastic aesthetic scoring of solved compositions on [0, 5],
// and the three-round totaling protocol.
//
// The baseline scorer sums independently testable feature terms over the
// main line and adds a seeded uniform jitter in [0, jitter). Weights are
// read from a key=value file so the scorer can be retuned without
// recompiling; any other model can be plugged in through `Scorer`.

#pragma once

#include "board.hpp"
#include "composition.hpp"
#include "rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chessprob {

class AestheticsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kMaxAestheticScore = 5.0;

// Half-up rounding to one decimal. The epsilon absorbs binary
// representation error so that e.g. 0.15 rounds up like 2.25 does.
inline double round1(double x) { return std::floor(x * 10.0 + 0.5 + 1e-9) / 10.0; }

struct AestheticWeights {
    double base = 1.0;
    double sacrifice_per_pawn = 0.15;
    double sacrifice_cap = 1.2;
    double economy = 0.8;
    double sparsity = 0.6;
    double quiet_key = 0.3;
    double underpromotion = 0.5;
    double pin = 0.2;
    double fork = 0.2;
    double discovered_check = 0.3;
    double jitter = 0.1;

    std::vector<std::pair<std::string, double*>> fields() {
        return {{"base", &base},
                {"sacrifice_per_pawn", &sacrifice_per_pawn},
                {"sacrifice_cap", &sacrifice_cap},
                {"economy", &economy},
                {"sparsity", &sparsity},
                {"quiet_key", &quiet_key},
                {"underpromotion", &underpromotion},
                {"pin", &pin},
                {"fork", &fork},
                {"discovered_check", &discovered_check},
                {"jitter", &jitter}};
    }

    // key = value lines; '#' starts a comment. Unknown keys are errors.
    static AestheticWeights parse(std::istream& in) {
        AestheticWeights w;
        auto fields = w.fields();
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            const auto eq = line.find('=');
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            if (eq == std::string::npos)
                throw AestheticsError("weights line " + std::to_string(lineno) + ": expected key = value");
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                const auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; });
            if (it == fields.end())
                throw AestheticsError("weights line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            try {
                std::size_t used = 0;
                *it->second = std::stod(value, &used);
                if (used != value.size())
                    throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw AestheticsError("weights line " + std::to_string(lineno) + ": bad number '" + value + "'");
            }
        }
        if (w.jitter < 0 || w.jitter > 0.1)
            throw AestheticsError("jitter must lie in [0, 0.1]");
        return w;
    }

    static AestheticWeights load(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw AestheticsError("cannot open weights file " + path);
        return parse(in);
    }
};

struct FeatureTerm {
    std::string name;
    double value = 0;
};

struct AestheticScore {
    double value = 0;
    std::uint64_t seed_used = 0;
    std::vector<FeatureTerm> feature_breakdown;
    double jitter = 0;

    double terms_sum() const {
        double s = 0;
        for (const FeatureTerm& t : feature_breakdown)
            s += t.value;
        return s;
    }
};

struct ScoreTriple {
    std::array<AestheticScore, 3> rounds;
    double total = 0;
    double mean = 0;

    static ScoreTriple from_rounds(const std::array<double, 3>& values) {
        ScoreTriple t;
        for (int i = 0; i < 3; ++i)
            t.rounds[i].value = values[i];
        t.finalize();
        return t;
    }

    void finalize() {
        const double sum = rounds[0].value + rounds[1].value + rounds[2].value;
        total = round1(sum);
        mean = round1(sum / 3.0);
    }

    // Unrounded mean of the three rounds.
    double raw_mean() const { return (rounds[0].value + rounds[1].value + rounds[2].value) / 3.0; }
};

// ---------------------------------------------------------------------------
// Feature detectors over a main line

namespace features {

inline int material_value(PieceType t) {
    switch (t) {
    case PieceType::Pawn: return 1;
    case PieceType::Knight: return 3;
    case PieceType::Bishop: return 3;
    case PieceType::Rook: return 5;
    case PieceType::Queen: return 9;
    default: return 0;
    }
}

// Material (in pawns) White hands over: pieces moved to a square where Black
// captures them on the next move, net of what the White move itself took.
inline int sacrificed_material(const Position& start, const std::vector<Move>& line) {
    int offered = 0;
    Position p = start;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const Move& m = line[i];
        const bool white = p.side_to_move() == Color::White;
        const auto victim = p.piece_at(m.is_en_passant() ? static_cast<Square>(m.to - 8) : m.to);
        const Position next = p.after(m);
        if (white && i + 1 < line.size() && line[i + 1].to == m.to) {
            const int given = material_value(next.piece_at(m.to)->type);
            const int taken = victim ? material_value(victim->type) : 0;
            offered += std::max(0, given - taken);
        }
        p = next;
    }
    return offered;
}

// Fraction of White units (king included) that attack the Black king's field
// in the final position.
inline double mate_participation(const Position& final_pos) {
    const Square bk = final_pos.king_square(Color::Black);
    const Bitboard field = king_attacks(bk) | bit(bk);
    const Bitboard occ = final_pos.occupancy();
    int total = 0, active = 0;
    Bitboard white = final_pos.pieces(Color::White);
    while (white) {
        const Square s = pop_lsb(white);
        ++total;
        if (piece_attacks(*final_pos.piece_at(s), s, occ) & field)
            ++active;
    }
    return total ? static_cast<double>(active) / total : 0.0;
}

// Black non-king pieces absolutely pinned to their king by White sliders.
inline Bitboard pinned_black(const Position& p) {
    const Square k = p.king_square(Color::Black);
    const Bitboard occ = p.occupancy();
    Bitboard pinned = 0;
    Bitboard sliders = ((p.pieces(Color::White, PieceType::Bishop) | p.pieces(Color::White, PieceType::Queen)) &
                        bishop_attacks(k, 0)) |
                       ((p.pieces(Color::White, PieceType::Rook) | p.pieces(Color::White, PieceType::Queen)) &
                        rook_attacks(k, 0));
    while (sliders) {
        const Square s = pop_lsb(sliders);
        const Bitboard blockers = between(s, k) & occ;
        if (popcount(blockers) == 1 && (blockers & p.pieces(Color::Black)))
            pinned |= blockers;
    }
    return pinned;
}

inline bool has_pin(const Position& start, const std::vector<Move>& line) {
    Position p = start;
    for (const Move& m : line) {
        const bool white = p.side_to_move() == Color::White;
        const Bitboard before = pinned_black(p);
        p = p.after(m);
        if (white && (pinned_black(p) & ~before))
            return true;
    }
    return false;
}

// The moved White piece attacks two or more Black units worth at least a
// minor piece (the king counts).
inline bool has_fork(const Position& start, const std::vector<Move>& line) {
    Position p = start;
    for (const Move& m : line) {
        const bool white = p.side_to_move() == Color::White;
        p = p.after(m);
        if (!white)
            continue;
        const Bitboard att = piece_attacks(*p.piece_at(m.to), m.to, p.occupancy());
        const Bitboard targets =
            p.pieces(Color::Black) & ~p.pieces(Color::Black, PieceType::Pawn);
        if (popcount(att & targets) >= 2)
            return true;
    }
    return false;
}

// Check delivered by a White unit other than the one that moved.
inline bool has_discovered_check(const Position& start, const std::vector<Move>& line) {
    Position p = start;
    for (const Move& m : line) {
        const bool white = p.side_to_move() == Color::White;
        p = p.after(m);
        if (!white || !p.in_check())
            continue;
        const Bitboard checkers = p.attackers_to(p.king_square(Color::Black), Color::White, p.occupancy());
        if (checkers & ~bit(m.to))
            return true;
    }
    return false;
}

inline bool has_underpromotion(const Position& start, const std::vector<Move>& line) {
    Position p = start;
    for (const Move& m : line) {
        if (p.side_to_move() == Color::White && m.promotion != PieceType::None && m.promotion != PieceType::Queen)
            return true;
        p = p.after(m);
    }
    return false;
}

} // namespace features

// ---------------------------------------------------------------------------

class Scorer {
public:
    virtual ~Scorer() = default;
    virtual AestheticScore score(const Composition& c, std::uint64_t seed) const = 0;
};

class BaselineScorer final : public Scorer {
public:
    explicit BaselineScorer(AestheticWeights w = {}) : w_(w) {}

    const AestheticWeights& weights() const { return w_; }

    AestheticScore score(const Composition& c, std::uint64_t seed) const override {
        if (!c.solved() || c.main_line.empty())
            throw AestheticsError("cannot score an unsolved composition");
        const std::vector<Move>& line = c.main_line;
        Position final_pos = c.position;
        for (const Move& m : line)
            final_pos = final_pos.after(m);

        AestheticScore s;
        s.seed_used = seed;
        auto add = [&](const char* name, double v) { s.feature_breakdown.push_back({name, v}); };

        add("base", w_.base);
        add("sacrifice",
            std::min(w_.sacrifice_cap, w_.sacrifice_per_pawn * features::sacrificed_material(c.position, line)));
        add("economy", w_.economy * features::mate_participation(final_pos));
        add("sparsity", w_.sparsity * std::clamp((32.0 - c.position.piece_count()) / 30.0, 0.0, 1.0));
        const Move key = *find_legal(c.position, line.front());
        add("quiet_key", (!key.is_check() && !key.is_capture()) ? w_.quiet_key : 0.0);
        add("underpromotion", features::has_underpromotion(c.position, line) ? w_.underpromotion : 0.0);
        add("pin", features::has_pin(c.position, line) ? w_.pin : 0.0);
        add("fork", features::has_fork(c.position, line) ? w_.fork : 0.0);
        add("discovered_check", features::has_discovered_check(c.position, line) ? w_.discovered_check : 0.0);

        Rng rng = make_stream({seed, c.position.hash(), 0x6a6974746572ULL});
        s.jitter = w_.jitter * uniform01(rng);
        s.value = std::clamp(s.terms_sum() + s.jitter, 0.0, kMaxAestheticScore);
        return s;
    }

private:
    AestheticWeights w_;
};

inline ScoreTriple score_triple(const Scorer& scorer, const Composition& c, std::uint64_t master_seed) {
    ScoreTriple t;
    for (int i = 0; i < 3; ++i)
        t.rounds[i] = scorer.score(c, derive_seed(master_seed, static_cast<std::uint64_t>(i)));
    t.finalize();
    return t;
}

} // namespace chessprob
