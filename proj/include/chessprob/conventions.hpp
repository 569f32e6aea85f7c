// conventions.hpp
// Composition convention checks (cooks, duals, checking key, capturing key,
// flight-taking key) and the filter sets built from them.

#pragma once

#include "board.hpp"
#include "composition.hpp"
#include "san.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chessprob {

class ConventionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class FlightRule {
    LostSquare,    // restricts iff some pre-key flight disappears
    CountDecrease, // restricts iff the number of flights drops
};

struct ConventionOptions {
    // Count duals on White moves after the second (e.g. the mating move) too.
    bool include_later_duals = false;
    FlightRule flight_rule = FlightRule::LostSquare;
};

struct DualDetail {
    std::vector<std::string> line; // SAN moves from the first Black defense onward
    int white_move = 2;            // which White move the count refers to
    int continuations = 0;
};

struct DualCheck {
    bool has_duals = false;
    std::vector<DualDetail> details;
};

struct CookCheck {
    bool cooked = false;
    std::vector<Move> keys;
};

struct KeyMoveCheck {
    bool is_check = false;
    bool is_capture = false;
    bool restricts_king = false;
    Bitboard flights_before = 0;
    Bitboard flights_after = 0;
};

struct ConventionReport {
    bool cooked = false;
    bool has_duals = false;
    bool duals_evaluated = false; // false for cooked compositions
    bool key_is_check = false;
    bool key_is_capture = false;
    bool key_restricts_king = false;
    std::vector<std::string> keys_found;
    std::vector<DualDetail> dual_details;
    bool set1_pass = false;
    bool set2_pass = false;
    bool set3_pass = false;
};

enum class FilterSet { None, Set1, Set2, Set3 };

inline std::string_view to_string(FilterSet f) {
    switch (f) {
    case FilterSet::None: return "none";
    case FilterSet::Set1: return "set1";
    case FilterSet::Set2: return "set2";
    case FilterSet::Set3: return "set3";
    }
    return "none";
}

inline FilterSet parse_filter_set(std::string_view text) {
    if (text == "none") return FilterSet::None;
    if (text == "set1") return FilterSet::Set1;
    if (text == "set2") return FilterSet::Set2;
    if (text == "set3") return FilterSet::Set3;
    throw std::invalid_argument("unknown filter set '" + std::string(text) + "'");
}

inline int conventions_adhered(FilterSet f) {
    switch (f) {
    case FilterSet::None: return 0;
    case FilterSet::Set1: return 2;
    case FilterSet::Set2: return 3;
    case FilterSet::Set3: return 4;
    }
    return 0;
}

inline bool passes(const ConventionReport& r, FilterSet f) {
    switch (f) {
    case FilterSet::None: return true;
    case FilterSet::Set1: return r.set1_pass;
    case FilterSet::Set2: return r.set2_pass;
    case FilterSet::Set3: return r.set3_pass;
    }
    return false;
}

// ---------------------------------------------------------------------------

inline CookCheck check_cooked(const Composition& c) {
    if (!c.solved())
        throw ConventionError("check_cooked: composition has no solution");
    return CookCheck{c.keys.size() >= 2, c.keys};
}

namespace detail {

inline void collect_duals(const Continuation& c, int white_move, std::vector<std::string>& prefix,
                          std::vector<DualDetail>& out) {
    for (const Defense& d : c.defenses) {
        prefix.push_back(d.san);
        out.push_back(DualDetail{prefix, white_move, static_cast<int>(d.continuations.size())});
        for (const Continuation& next : d.continuations) {
            if (next.mates)
                continue;
            prefix.push_back(next.san);
            collect_duals(next, white_move + 1, prefix, out);
            prefix.pop_back();
        }
        prefix.pop_back();
    }
}

} // namespace detail

inline DualCheck check_duals(const Composition& c, const ConventionOptions& opt = {}) {
    if (!c.solved())
        throw ConventionError("check_duals: composition has no solution");
    if (c.keys.size() != 1)
        throw ConventionError("check_duals: composition is cooked; run check_cooked first");
    DualCheck out;
    std::vector<std::string> prefix;
    detail::collect_duals(c.tree->key, 2, prefix, out.details);
    for (const DualDetail& d : out.details)
        if (d.continuations >= 2 && (d.white_move == 2 || opt.include_later_duals))
            out.has_duals = true;
    return out;
}

// Flight squares of the Black king in the diagram, read as if Black were to move.
inline Bitboard diagram_flights(const Position& p) {
    BoardSetup swapped = p.setup();
    swapped.side_to_move = Color::Black;
    swapped.en_passant = NO_SQUARE;
    if (Position::check_setup(swapped))
        return king_flight_squares(p, Color::Black);
    const Position view = Position::from_setup(swapped);
    const Square k = view.king_square(Color::Black);
    Bitboard flights = 0;
    for (const Move& m : legal_moves(view))
        if (m.from == k && !m.is_castle())
            flights |= bit(m.to);
    return flights;
}

inline Bitboard flights_after(const Position& after_key) {
    const Square k = after_key.king_square(Color::Black);
    Bitboard flights = 0;
    for (const Move& m : legal_moves(after_key))
        if (m.from == k && !m.is_castle())
            flights |= bit(m.to);
    return flights;
}

inline KeyMoveCheck check_key_move(const Position& p, const Move& key, const ConventionOptions& opt = {}) {
    const auto legal = find_legal(p, key);
    if (!legal)
        throw ConventionError("check_key_move: " + uci(key) + " is not legal");
    KeyMoveCheck out;
    out.is_check = legal->is_check();
    out.is_capture = legal->is_capture();
    out.flights_before = diagram_flights(p);
    out.flights_after = flights_after(p.after(*legal));
    if (opt.flight_rule == FlightRule::LostSquare)
        out.restricts_king = (out.flights_before & ~out.flights_after) != 0;
    else
        out.restricts_king = popcount(out.flights_after) < popcount(out.flights_before);
    return out;
}

inline KeyMoveCheck check_key_move(const Composition& c, const ConventionOptions& opt = {}) {
    if (!c.solved())
        throw ConventionError("check_key_move: composition has no solution");
    if (c.keys.size() != 1)
        throw ConventionError("check_key_move: composition has " + std::to_string(c.keys.size()) + " keys");
    return check_key_move(c.position, c.keys.front(), opt);
}

inline void apply_set_formulas(ConventionReport& r) {
    r.set1_pass = !r.cooked && !r.has_duals;
    r.set2_pass = !r.key_is_check && !r.key_is_capture && !r.key_restricts_king;
    r.set3_pass = !r.cooked && !r.has_duals && !r.key_is_check && !r.key_is_capture;
}

// Cooked compositions have no single key: key-move flags are raised if any
// key trips them, and duals are not evaluated.
inline ConventionReport audit(const Composition& c, const ConventionOptions& opt = {}) {
    const CookCheck cook = check_cooked(c);
    ConventionReport r;
    r.cooked = cook.cooked;
    for (const Move& k : cook.keys)
        r.keys_found.push_back(to_san(c.position, k));
    if (!r.cooked) {
        const DualCheck duals = check_duals(c, opt);
        r.has_duals = duals.has_duals;
        r.dual_details = duals.details;
        r.duals_evaluated = true;
    }
    for (const Move& k : cook.keys) {
        const KeyMoveCheck km = check_key_move(c.position, k, opt);
        r.key_is_check |= km.is_check;
        r.key_is_capture |= km.is_capture;
        r.key_restricts_king |= km.restricts_king;
    }
    apply_set_formulas(r);
    return r;
}

} // namespace chessprob
