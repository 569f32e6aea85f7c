// san.hpp
// Standard algebraic notation: rendering, parsing and numbered move lines
// ("1. Na4 g3 2. d7 g2 3. d8=N#").

#pragma once

#include "board.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chessprob {

class SanError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string san_body(const Position& p, const Move& m, const MoveList& legal) {
    if (m.is_castle())
        return m.to > m.from ? "O-O" : "O-O-O";

    const Piece mover = *p.piece_at(m.from);
    std::string s;
    if (mover.type == PieceType::Pawn) {
        if (m.is_capture()) {
            s += static_cast<char>('a' + file_of(m.from));
            s += 'x';
        }
        s += square_name(m.to);
        if (m.promotion != PieceType::None) {
            s += '=';
            s += static_cast<char>(piece_char(m.promotion) - 'a' + 'A');
        }
        return s;
    }

    s += static_cast<char>(piece_char(mover.type) - 'a' + 'A');
    bool ambiguous = false, same_file = false, same_rank = false;
    for (const Move& o : legal) {
        if (o.to != m.to || o.from == m.from || p.piece_at(o.from)->type != mover.type)
            continue;
        ambiguous = true;
        same_file |= file_of(o.from) == file_of(m.from);
        same_rank |= rank_of(o.from) == rank_of(m.from);
    }
    if (ambiguous) {
        if (!same_file)
            s += static_cast<char>('a' + file_of(m.from));
        else if (!same_rank)
            s += static_cast<char>('1' + rank_of(m.from));
        else
            s += square_name(m.from);
    }
    if (m.is_capture())
        s += 'x';
    s += square_name(m.to);
    return s;
}

inline std::string_view strip_annotations(std::string_view text) {
    while (!text.empty() && (text.back() == '+' || text.back() == '#' || text.back() == '!' || text.back() == '?'))
        text.remove_suffix(1);
    return text;
}

} // namespace detail

// SAN of a legal move, with '+' or '#' suffix.
inline std::string to_san(const Position& p, const Move& bare) {
    const MoveList legal = legal_moves(p);
    const Move* found = nullptr;
    for (const Move& m : legal)
        if (m == bare)
            found = &m;
    if (!found)
        throw SanError("illegal move " + uci(bare) + " in " + p.fen());
    std::string s = detail::san_body(p, *found, legal);
    const Position next = p.after(*found);
    if (next.in_check())
        s += has_legal_move(next) ? '+' : '#';
    return s;
}

inline Move parse_san(const Position& p, std::string_view text) {
    std::string wanted(detail::strip_annotations(text));
    for (char& c : wanted)
        if (c == '0')
            c = 'O';
    // "d8N" is a common variant of "d8=N".
    if (wanted.size() >= 3 && std::string_view("QRBN").find(wanted.back()) != std::string_view::npos &&
        wanted[wanted.size() - 2] >= '1' && wanted[wanted.size() - 2] <= '8')
        wanted.insert(wanted.size() - 1, "=");

    const MoveList legal = legal_moves(p);
    const Move* match = nullptr;
    for (const Move& m : legal) {
        if (detail::san_body(p, m, legal) != wanted)
            continue;
        if (match)
            throw SanError("ambiguous SAN '" + std::string(text) + "'");
        match = &m;
    }
    if (!match)
        throw SanError("no legal move matches '" + std::string(text) + "' in " + p.fen());
    return *match;
}

// SAN list for a sequence of moves played from `p`.
inline std::vector<std::string> to_san_list(Position p, std::span<const Move> moves) {
    std::vector<std::string> out;
    out.reserve(moves.size());
    for (const Move& m : moves) {
        out.push_back(to_san(p, m));
        p = p.after(m);
    }
    return out;
}

// Numbered line in the style "1. Na4 g3 2. d7 g2 3. d8=N#".
inline std::string render_line(const Position& start, std::span<const Move> moves) {
    const auto sans = to_san_list(start, moves);
    std::string out;
    // Problems are numbered from 1 regardless of the counters in the FEN.
    int number = 1;
    bool white = start.side_to_move() == Color::White;
    for (std::size_t i = 0; i < sans.size(); ++i) {
        if (!out.empty())
            out += ' ';
        if (white) {
            out += std::to_string(number) + ". ";
        } else if (i == 0) {
            out += std::to_string(number) + "... ";
        }
        out += sans[i];
        if (!white)
            ++number;
        white = !white;
    }
    return out;
}

// Parses a numbered or bare SAN line back into moves.
inline std::vector<Move> parse_line(Position p, std::string_view line) {
    std::vector<Move> moves;
    for (std::string_view tok : detail::split_fields(line)) {
        if (!tok.empty() && tok[0] >= '1' && tok[0] <= '9' && tok.back() == '.')
            continue;
        if (auto dot = tok.find_last_of('.'); dot != std::string_view::npos)
            tok = tok.substr(dot + 1);
        if (tok.empty())
            continue;
        const Move m = parse_san(p, tok);
        moves.push_back(m);
        p = p.after(m);
    }
    return moves;
}

} // namespace chessprob
