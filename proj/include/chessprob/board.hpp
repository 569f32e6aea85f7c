// board.hpp
// Legal chess positions: bitboard representation, FEN, move generation,
// make/unmake and terminal-state detection.

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chessprob {

using Bitboard = std::uint64_t;

enum class Color : std::uint8_t { White, Black };

constexpr Color operator~(Color c) { return c == Color::White ? Color::Black : Color::White; }
constexpr int index(Color c) { return static_cast<int>(c); }

enum class PieceType : std::uint8_t { Pawn, Knight, Bishop, Rook, Queen, King, None };

constexpr int index(PieceType t) { return static_cast<int>(t); }

struct Piece {
    PieceType type = PieceType::None;
    Color color = Color::White;

    constexpr bool operator==(const Piece&) const = default;
};

// a1 = 0, b1 = 1, ..., h8 = 63
enum Square : int {
    A1, B1, C1, D1, E1, F1, G1, H1,
    A2, B2, C2, D2, E2, F2, G2, H2,
    A3, B3, C3, D3, E3, F3, G3, H3,
    A4, B4, C4, D4, E4, F4, G4, H4,
    A5, B5, C5, D5, E5, F5, G5, H5,
    A6, B6, C6, D6, E6, F6, G6, H6,
    A7, B7, C7, D7, E7, F7, G7, H7,
    A8, B8, C8, D8, E8, F8, G8, H8,
    NO_SQUARE
};

constexpr Square make_square(int file, int rank) { return static_cast<Square>(rank * 8 + file); }
constexpr int file_of(Square s) { return s & 7; }
constexpr int rank_of(Square s) { return s >> 3; }
constexpr Bitboard bit(Square s) { return Bitboard{1} << s; }

inline std::string square_name(Square s) {
    return {static_cast<char>('a' + file_of(s)), static_cast<char>('1' + rank_of(s))};
}

inline std::optional<Square> parse_square(std::string_view text) {
    if (text.size() != 2 || text[0] < 'a' || text[0] > 'h' || text[1] < '1' || text[1] > '8')
        return std::nullopt;
    return make_square(text[0] - 'a', text[1] - '1');
}

constexpr int popcount(Bitboard b) { return std::popcount(b); }
constexpr Square lsb(Bitboard b) { return static_cast<Square>(std::countr_zero(b)); }
constexpr Square msb(Bitboard b) { return static_cast<Square>(63 - std::countl_zero(b)); }

inline Square pop_lsb(Bitboard& b) {
    Square s = lsb(b);
    b &= b - 1;
    return s;
}

constexpr char piece_char(PieceType t) {
    constexpr std::string_view chars = "pnbrqk";
    return t == PieceType::None ? '?' : chars[index(t)];
}

constexpr char piece_char(Piece p) {
    char c = piece_char(p.type);
    return p.color == Color::White ? static_cast<char>(c - 'a' + 'A') : c;
}

constexpr std::optional<Piece> piece_from_char(char c) {
    switch (c) {
    case 'P': return Piece{PieceType::Pawn, Color::White};
    case 'N': return Piece{PieceType::Knight, Color::White};
    case 'B': return Piece{PieceType::Bishop, Color::White};
    case 'R': return Piece{PieceType::Rook, Color::White};
    case 'Q': return Piece{PieceType::Queen, Color::White};
    case 'K': return Piece{PieceType::King, Color::White};
    case 'p': return Piece{PieceType::Pawn, Color::Black};
    case 'n': return Piece{PieceType::Knight, Color::Black};
    case 'b': return Piece{PieceType::Bishop, Color::Black};
    case 'r': return Piece{PieceType::Rook, Color::Black};
    case 'q': return Piece{PieceType::Queen, Color::Black};
    case 'k': return Piece{PieceType::King, Color::Black};
    default: return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Errors

enum class PositionErrorCode {
    FenSyntax,
    KingCount,
    PawnOnBackRank,
    OpponentInCheck,
    TooManyPieces,
    BadCastlingRights,
    BadEnPassant,
};

inline const char* to_string(PositionErrorCode code) {
    switch (code) {
    case PositionErrorCode::FenSyntax: return "fen-syntax";
    case PositionErrorCode::KingCount: return "king-count";
    case PositionErrorCode::PawnOnBackRank: return "pawn-on-back-rank";
    case PositionErrorCode::OpponentInCheck: return "opponent-in-check";
    case PositionErrorCode::TooManyPieces: return "too-many-pieces";
    case PositionErrorCode::BadCastlingRights: return "bad-castling-rights";
    case PositionErrorCode::BadEnPassant: return "bad-en-passant";
    }
    return "unknown";
}

class PositionError : public std::runtime_error {
public:
    PositionError(PositionErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    PositionErrorCode code() const noexcept { return code_; }

private:
    PositionErrorCode code_;
};

// ---------------------------------------------------------------------------
// Moves

namespace move_flags {
inline constexpr std::uint8_t Capture = 1;
inline constexpr std::uint8_t Check = 2;
inline constexpr std::uint8_t Castle = 4;
inline constexpr std::uint8_t EnPassant = 8;
inline constexpr std::uint8_t DoublePush = 16;
} // namespace move_flags

struct Move {
    Square from = NO_SQUARE;
    Square to = NO_SQUARE;
    PieceType promotion = PieceType::None;
    std::uint8_t flags = 0;

    bool is_capture() const { return flags & move_flags::Capture; }
    bool is_check() const { return flags & move_flags::Check; }
    bool is_castle() const { return flags & move_flags::Castle; }
    bool is_en_passant() const { return flags & move_flags::EnPassant; }

    // Flags are derived data; identity is (from, to, promotion).
    bool operator==(const Move& o) const {
        return from == o.from && to == o.to && promotion == o.promotion;
    }
};

inline std::string uci(const Move& m) {
    std::string s = square_name(m.from) + square_name(m.to);
    if (m.promotion != PieceType::None)
        s += piece_char(m.promotion);
    return s;
}

// Fixed-capacity move buffer; 218 is the known maximum of legal moves.
class MoveList {
public:
    void push_back(const Move& m) { moves_[size_++] = m; }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    const Move& operator[](std::size_t i) const { return moves_[i]; }
    Move& operator[](std::size_t i) { return moves_[i]; }
    const Move* begin() const { return moves_.data(); }
    const Move* end() const { return moves_.data() + size_; }
    Move* begin() { return moves_.data(); }
    Move* end() { return moves_.data() + size_; }
    std::vector<Move> to_vector() const { return {begin(), end()}; }

private:
    std::array<Move, 256> moves_{};
    std::size_t size_ = 0;
};

// ---------------------------------------------------------------------------
// Attack tables

namespace detail {

constexpr Bitboard step_attacks(int sq, std::initializer_list<std::pair<int, int>> deltas) {
    Bitboard b = 0;
    int f = sq & 7, r = sq >> 3;
    for (auto [df, dr] : deltas) {
        int nf = f + df, nr = r + dr;
        if (nf >= 0 && nf < 8 && nr >= 0 && nr < 8)
            b |= Bitboard{1} << (nr * 8 + nf);
    }
    return b;
}

inline constexpr auto kKnightAttacks = [] {
    std::array<Bitboard, 64> t{};
    for (int s = 0; s < 64; ++s)
        t[s] = step_attacks(s, {{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}});
    return t;
}();

inline constexpr auto kKingAttacks = [] {
    std::array<Bitboard, 64> t{};
    for (int s = 0; s < 64; ++s)
        t[s] = step_attacks(s, {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}});
    return t;
}();

inline constexpr auto kPawnAttacks = [] {
    std::array<std::array<Bitboard, 64>, 2> t{};
    for (int s = 0; s < 64; ++s) {
        t[0][s] = step_attacks(s, {{-1, 1}, {1, 1}});
        t[1][s] = step_attacks(s, {{-1, -1}, {1, -1}});
    }
    return t;
}();

// Directions 0..3 increase the square index (N, E, NE, NW); 4..7 decrease it.
inline constexpr std::array<std::pair<int, int>, 8> kDirections = {{
    {0, 1}, {1, 0}, {1, 1}, {-1, 1}, {0, -1}, {-1, 0}, {-1, -1}, {1, -1},
}};

inline constexpr auto kRays = [] {
    std::array<std::array<Bitboard, 64>, 8> t{};
    for (int d = 0; d < 8; ++d)
        for (int s = 0; s < 64; ++s) {
            Bitboard b = 0;
            int f = (s & 7) + kDirections[d].first, r = (s >> 3) + kDirections[d].second;
            while (f >= 0 && f < 8 && r >= 0 && r < 8) {
                b |= Bitboard{1} << (r * 8 + f);
                f += kDirections[d].first;
                r += kDirections[d].second;
            }
            t[d][s] = b;
        }
    return t;
}();

inline Bitboard ray_attacks(int dir, Square s, Bitboard occ) {
    Bitboard ray = kRays[dir][s];
    Bitboard blockers = ray & occ;
    if (!blockers)
        return ray;
    Square first = dir < 4 ? lsb(blockers) : msb(blockers);
    return ray ^ kRays[dir][first];
}

// Squares strictly between two aligned squares (empty if not aligned).
inline constexpr auto kBetween = [] {
    std::array<std::array<Bitboard, 64>, 64> t{};
    for (int a = 0; a < 64; ++a)
        for (int d = 0; d < 8; ++d) {
            Bitboard path = 0;
            int f = (a & 7) + kDirections[d].first, r = (a >> 3) + kDirections[d].second;
            while (f >= 0 && f < 8 && r >= 0 && r < 8) {
                int b = r * 8 + f;
                t[a][b] = path;
                path |= Bitboard{1} << b;
                f += kDirections[d].first;
                r += kDirections[d].second;
            }
        }
    return t;
}();

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct ZobristKeys {
    std::array<std::array<std::uint64_t, 64>, 12> piece{};
    std::array<std::uint64_t, 16> castling{};
    std::array<std::uint64_t, 8> ep_file{};
    std::uint64_t side = 0;
};

inline constexpr ZobristKeys kZobrist = [] {
    ZobristKeys z{};
    std::uint64_t state = 0x5eed'c0ffee'1234ULL;
    for (auto& row : z.piece)
        for (auto& k : row)
            k = splitmix64(state);
    for (auto& k : z.castling)
        k = splitmix64(state);
    for (auto& k : z.ep_file)
        k = splitmix64(state);
    z.side = splitmix64(state);
    return z;
}();

constexpr int piece_index(Piece p) { return index(p.color) * 6 + index(p.type); }

} // namespace detail

inline Bitboard knight_attacks(Square s) { return detail::kKnightAttacks[s]; }
inline Bitboard king_attacks(Square s) { return detail::kKingAttacks[s]; }
inline Bitboard pawn_attacks(Color c, Square s) { return detail::kPawnAttacks[index(c)][s]; }

inline Bitboard bishop_attacks(Square s, Bitboard occ) {
    return detail::ray_attacks(2, s, occ) | detail::ray_attacks(3, s, occ) |
           detail::ray_attacks(6, s, occ) | detail::ray_attacks(7, s, occ);
}

inline Bitboard rook_attacks(Square s, Bitboard occ) {
    return detail::ray_attacks(0, s, occ) | detail::ray_attacks(1, s, occ) |
           detail::ray_attacks(4, s, occ) | detail::ray_attacks(5, s, occ);
}

inline Bitboard queen_attacks(Square s, Bitboard occ) {
    return bishop_attacks(s, occ) | rook_attacks(s, occ);
}

inline Bitboard between(Square a, Square b) { return detail::kBetween[a][b]; }

inline Bitboard piece_attacks(Piece p, Square s, Bitboard occ) {
    switch (p.type) {
    case PieceType::Pawn: return pawn_attacks(p.color, s);
    case PieceType::Knight: return knight_attacks(s);
    case PieceType::Bishop: return bishop_attacks(s, occ);
    case PieceType::Rook: return rook_attacks(s, occ);
    case PieceType::Queen: return queen_attacks(s, occ);
    case PieceType::King: return king_attacks(s);
    case PieceType::None: break;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Position

namespace castling {
inline constexpr std::uint8_t WhiteKingside = 1;
inline constexpr std::uint8_t WhiteQueenside = 2;
inline constexpr std::uint8_t BlackKingside = 4;
inline constexpr std::uint8_t BlackQueenside = 8;
} // namespace castling

// Plain description of a position prior to validation.
struct BoardSetup {
    std::array<std::optional<Piece>, 64> squares{};
    Color side_to_move = Color::White;
    std::uint8_t castling_rights = 0;
    Square en_passant = NO_SQUARE;
    int halfmove_clock = 0;
    int fullmove_number = 1;
};

struct UndoInfo {
    std::optional<Piece> captured;
    std::uint8_t castling_rights = 0;
    Square en_passant = NO_SQUARE;
    int halfmove_clock = 0;
    std::uint64_t hash = 0;
};

class Position {
public:
    static Position from_setup(const BoardSetup& setup);
    static Position from_fen(std::string_view fen);
    static Position initial() {
        return from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
    }

    // Validation without constructing; nullopt when every invariant holds.
    static std::optional<PositionErrorCode> check_setup(const BoardSetup& setup, std::string* detail = nullptr);

    std::string fen() const;
    BoardSetup setup() const;

    std::optional<Piece> piece_at(Square s) const {
        if (board_[s] < 0)
            return std::nullopt;
        return Piece{static_cast<PieceType>(board_[s] % 6), static_cast<Color>(board_[s] / 6)};
    }
    Bitboard pieces(Color c, PieceType t) const { return by_piece_[index(c) * 6 + index(t)]; }
    Bitboard pieces(Color c) const { return by_color_[index(c)]; }
    Bitboard occupancy() const { return by_color_[0] | by_color_[1]; }
    Color side_to_move() const { return side_; }
    std::uint8_t castling_rights() const { return castling_; }
    Square en_passant() const { return ep_; }
    int halfmove_clock() const { return halfmove_; }
    int fullmove_number() const { return fullmove_; }
    std::uint64_t hash() const { return hash_; }
    Square king_square(Color c) const { return lsb(pieces(c, PieceType::King)); }
    int piece_count() const { return popcount(occupancy()); }

    Bitboard attackers_to(Square s, Color by, Bitboard occ) const {
        const int o = index(by) * 6;
        return (pawn_attacks(~by, s) & by_piece_[o + 0]) |
               (knight_attacks(s) & by_piece_[o + 1]) |
               (bishop_attacks(s, occ) & (by_piece_[o + 2] | by_piece_[o + 4])) |
               (rook_attacks(s, occ) & (by_piece_[o + 3] | by_piece_[o + 4])) |
               (king_attacks(s) & by_piece_[o + 5]);
    }
    bool is_attacked(Square s, Color by) const { return attackers_to(s, by, occupancy()) != 0; }
    bool in_check(Color c) const { return is_attacked(king_square(c), ~c); }
    bool in_check() const { return in_check(side_); }

    // Every square attacked by `by` given occupancy `occ`.
    Bitboard attack_map(Color by, Bitboard occ) const;

    UndoInfo do_move(const Move& m);
    void undo_move(const Move& m, const UndoInfo& undo);
    Position after(const Move& m) const {
        Position next = *this;
        next.do_move(m);
        return next;
    }

    bool operator==(const Position& o) const {
        return board_ == o.board_ && side_ == o.side_ && castling_ == o.castling_ && ep_ == o.ep_ &&
               halfmove_ == o.halfmove_ && fullmove_ == o.fullmove_ && hash_ == o.hash_;
    }

private:
    Position() { board_.fill(-1); }

    void put(Square s, Piece p) {
        const int pi = detail::piece_index(p);
        board_[s] = static_cast<std::int8_t>(pi);
        by_piece_[pi] |= bit(s);
        by_color_[index(p.color)] |= bit(s);
        hash_ ^= detail::kZobrist.piece[pi][s];
    }
    void remove(Square s) {
        const int pi = board_[s];
        board_[s] = -1;
        by_piece_[pi] &= ~bit(s);
        by_color_[pi / 6] &= ~bit(s);
        hash_ ^= detail::kZobrist.piece[pi][s];
    }
    std::uint64_t state_hash() const {
        std::uint64_t h = detail::kZobrist.castling[castling_];
        if (ep_ != NO_SQUARE)
            h ^= detail::kZobrist.ep_file[file_of(ep_)];
        if (side_ == Color::Black)
            h ^= detail::kZobrist.side;
        return h;
    }

    std::array<std::int8_t, 64> board_{};
    std::array<Bitboard, 12> by_piece_{};
    std::array<Bitboard, 2> by_color_{};
    Color side_ = Color::White;
    std::uint8_t castling_ = 0;
    Square ep_ = NO_SQUARE;
    int halfmove_ = 0;
    int fullmove_ = 1;
    std::uint64_t hash_ = 0;
};

// ---------------------------------------------------------------------------
// Position implementation

inline std::optional<PositionErrorCode> Position::check_setup(const BoardSetup& s, std::string* detail) {
    auto fail = [&](PositionErrorCode code, std::string msg) {
        if (detail)
            *detail = std::move(msg);
        return std::optional<PositionErrorCode>(code);
    };
    std::array<int, 2> kings{}, pawns{}, total{};
    for (int sq = 0; sq < 64; ++sq) {
        if (!s.squares[sq])
            continue;
        const Piece p = *s.squares[sq];
        if (p.type == PieceType::None)
            return fail(PositionErrorCode::FenSyntax, "empty piece kind on " + square_name(static_cast<Square>(sq)));
        ++total[index(p.color)];
        if (p.type == PieceType::King)
            ++kings[index(p.color)];
        if (p.type == PieceType::Pawn) {
            ++pawns[index(p.color)];
            if (rank_of(static_cast<Square>(sq)) == 0 || rank_of(static_cast<Square>(sq)) == 7)
                return fail(PositionErrorCode::PawnOnBackRank, "pawn on " + square_name(static_cast<Square>(sq)));
        }
    }
    if (kings[0] != 1 || kings[1] != 1)
        return fail(PositionErrorCode::KingCount, "need exactly one king per color");
    if (total[0] > 16 || total[1] > 16 || pawns[0] > 8 || pawns[1] > 8)
        return fail(PositionErrorCode::TooManyPieces, "more than 16 pieces or 8 pawns for one color");

    auto at = [&](Square sq, Piece p) { return s.squares[sq] && *s.squares[sq] == p; };
    const Piece wk{PieceType::King, Color::White}, bk{PieceType::King, Color::Black};
    const Piece wr{PieceType::Rook, Color::White}, br{PieceType::Rook, Color::Black};
    if (((s.castling_rights & castling::WhiteKingside) && !(at(E1, wk) && at(H1, wr))) ||
        ((s.castling_rights & castling::WhiteQueenside) && !(at(E1, wk) && at(A1, wr))) ||
        ((s.castling_rights & castling::BlackKingside) && !(at(E8, bk) && at(H8, br))) ||
        ((s.castling_rights & castling::BlackQueenside) && !(at(E8, bk) && at(A8, br))))
        return fail(PositionErrorCode::BadCastlingRights, "castling right without king and rook at home");

    if (s.en_passant != NO_SQUARE) {
        const bool white = s.side_to_move == Color::White;
        const int rank = rank_of(s.en_passant);
        const int dir = white ? -8 : 8;
        const Square pawn_sq = static_cast<Square>(s.en_passant + dir);
        const Square origin = static_cast<Square>(s.en_passant - dir);
        if (rank != (white ? 5 : 2) || s.squares[s.en_passant] || s.squares[origin] ||
            !at(pawn_sq, Piece{PieceType::Pawn, white ? Color::Black : Color::White}))
            return fail(PositionErrorCode::BadEnPassant, "inconsistent en passant target");
    }

    // Side not to move must not be in check.
    Position p;
    for (int sq = 0; sq < 64; ++sq)
        if (s.squares[sq])
            p.put(static_cast<Square>(sq), *s.squares[sq]);
    if (p.in_check(~s.side_to_move))
        return fail(PositionErrorCode::OpponentInCheck, "side not to move is in check");
    return std::nullopt;
}

inline Position Position::from_setup(const BoardSetup& s) {
    std::string detail;
    if (auto err = check_setup(s, &detail))
        throw PositionError(*err, detail);
    Position p;
    for (int sq = 0; sq < 64; ++sq)
        if (s.squares[sq])
            p.put(static_cast<Square>(sq), *s.squares[sq]);
    p.side_ = s.side_to_move;
    p.castling_ = s.castling_rights;
    p.ep_ = s.en_passant;
    p.halfmove_ = s.halfmove_clock;
    p.fullmove_ = s.fullmove_number;
    p.hash_ ^= p.state_hash();
    return p;
}

inline BoardSetup Position::setup() const {
    BoardSetup s;
    for (int sq = 0; sq < 64; ++sq)
        s.squares[sq] = piece_at(static_cast<Square>(sq));
    s.side_to_move = side_;
    s.castling_rights = castling_;
    s.en_passant = ep_;
    s.halfmove_clock = halfmove_;
    s.fullmove_number = fullmove_;
    return s;
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != '\t')
            ++j;
        if (j > i)
            out.push_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

inline bool parse_counter(std::string_view text, int& out) {
    if (text.empty() || text.size() > 9)
        return false;
    int v = 0;
    for (char c : text) {
        if (c < '0' || c > '9')
            return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

} // namespace detail

// Accepts six-field FEN and four-field (EPD-style) FEN.
inline Position Position::from_fen(std::string_view fen) {
    auto syntax = [&](const std::string& why) {
        return PositionError(PositionErrorCode::FenSyntax, why + " in \"" + std::string(fen) + "\"");
    };
    const auto fields = detail::split_fields(fen);
    if (fields.size() != 4 && fields.size() != 6)
        throw syntax("expected 4 or 6 fields");

    BoardSetup s;
    int rank = 7, file = 0;
    for (char c : fields[0]) {
        if (c == '/') {
            if (file != 8 || rank == 0)
                throw syntax("bad rank length");
            --rank;
            file = 0;
        } else if (c >= '1' && c <= '8') {
            file += c - '0';
            if (file > 8)
                throw syntax("rank overflow");
        } else if (auto p = piece_from_char(c)) {
            if (file >= 8)
                throw syntax("rank overflow");
            s.squares[make_square(file, rank)] = *p;
            ++file;
        } else {
            throw syntax(std::string("unexpected character '") + c + "'");
        }
    }
    if (rank != 0 || file != 8)
        throw syntax("board must have 8 ranks of 8 files");

    if (fields[1] == "w")
        s.side_to_move = Color::White;
    else if (fields[1] == "b")
        s.side_to_move = Color::Black;
    else
        throw syntax("bad side to move");

    if (fields[2] != "-") {
        for (char c : fields[2]) {
            std::uint8_t flag = 0;
            switch (c) {
            case 'K': flag = castling::WhiteKingside; break;
            case 'Q': flag = castling::WhiteQueenside; break;
            case 'k': flag = castling::BlackKingside; break;
            case 'q': flag = castling::BlackQueenside; break;
            default: throw syntax("bad castling field");
            }
            if (s.castling_rights & flag)
                throw syntax("repeated castling flag");
            s.castling_rights |= flag;
        }
    }

    if (fields[3] != "-") {
        auto sq = parse_square(fields[3]);
        if (!sq)
            throw syntax("bad en passant field");
        s.en_passant = *sq;
    }

    if (fields.size() == 6) {
        if (!detail::parse_counter(fields[4], s.halfmove_clock) ||
            !detail::parse_counter(fields[5], s.fullmove_number) || s.fullmove_number < 1)
            throw syntax("bad move counters");
    }
    return from_setup(s);
}

inline std::string Position::fen() const {
    std::string out;
    for (int rank = 7; rank >= 0; --rank) {
        int empty = 0;
        for (int file = 0; file < 8; ++file) {
            auto p = piece_at(make_square(file, rank));
            if (!p) {
                ++empty;
                continue;
            }
            if (empty)
                out += static_cast<char>('0' + empty);
            empty = 0;
            out += piece_char(*p);
        }
        if (empty)
            out += static_cast<char>('0' + empty);
        if (rank)
            out += '/';
    }
    out += side_ == Color::White ? " w " : " b ";
    if (!castling_)
        out += '-';
    if (castling_ & castling::WhiteKingside) out += 'K';
    if (castling_ & castling::WhiteQueenside) out += 'Q';
    if (castling_ & castling::BlackKingside) out += 'k';
    if (castling_ & castling::BlackQueenside) out += 'q';
    out += ' ';
    out += ep_ == NO_SQUARE ? std::string("-") : square_name(ep_);
    out += ' ' + std::to_string(halfmove_) + ' ' + std::to_string(fullmove_);
    return out;
}

inline Bitboard Position::attack_map(Color by, Bitboard occ) const {
    Bitboard att = 0;
    for (int t = 0; t < 6; ++t) {
        Bitboard b = by_piece_[index(by) * 6 + t];
        while (b) {
            Square s = pop_lsb(b);
            att |= piece_attacks(Piece{static_cast<PieceType>(t), by}, s, occ);
        }
    }
    return att;
}

namespace detail {

// Castling rights that survive a move touching the square.
inline constexpr auto kCastlingMask = [] {
    std::array<std::uint8_t, 64> m{};
    m.fill(0xF);
    m[E1] = static_cast<std::uint8_t>(~(castling::WhiteKingside | castling::WhiteQueenside) & 0xF);
    m[H1] = static_cast<std::uint8_t>(~castling::WhiteKingside & 0xF);
    m[A1] = static_cast<std::uint8_t>(~castling::WhiteQueenside & 0xF);
    m[E8] = static_cast<std::uint8_t>(~(castling::BlackKingside | castling::BlackQueenside) & 0xF);
    m[H8] = static_cast<std::uint8_t>(~castling::BlackKingside & 0xF);
    m[A8] = static_cast<std::uint8_t>(~castling::BlackQueenside & 0xF);
    return m;
}();

} // namespace detail

inline UndoInfo Position::do_move(const Move& m) {
    UndoInfo undo{std::nullopt, castling_, ep_, halfmove_, hash_};
    hash_ ^= state_hash();

    const Piece mover = *piece_at(m.from);
    const Color us = side_, them = ~side_;

    if (m.is_en_passant()) {
        const Square victim = static_cast<Square>(us == Color::White ? m.to - 8 : m.to + 8);
        undo.captured = piece_at(victim);
        remove(victim);
    } else if (board_[m.to] >= 0) {
        undo.captured = piece_at(m.to);
        remove(m.to);
    }

    remove(m.from);
    put(m.to, m.promotion != PieceType::None ? Piece{m.promotion, us} : mover);

    if (m.is_castle()) {
        const bool kingside = m.to > m.from;
        const Square rook_from = static_cast<Square>(kingside ? m.from + 3 : m.from - 4);
        const Square rook_to = static_cast<Square>(kingside ? m.from + 1 : m.from - 1);
        remove(rook_from);
        put(rook_to, Piece{PieceType::Rook, us});
    }

    castling_ &= detail::kCastlingMask[m.from] & detail::kCastlingMask[m.to];
    ep_ = NO_SQUARE;
    if (mover.type == PieceType::Pawn && (m.to - m.from == 16 || m.from - m.to == 16)) {
        const Square target = static_cast<Square>((m.from + m.to) / 2);
        // Only record targets that an enemy pawn could actually use.
        if (pawn_attacks(us, target) & pieces(them, PieceType::Pawn))
            ep_ = target;
    }
    halfmove_ = (mover.type == PieceType::Pawn || undo.captured) ? 0 : halfmove_ + 1;
    if (us == Color::Black)
        ++fullmove_;
    side_ = them;
    hash_ ^= state_hash();
    return undo;
}

inline void Position::undo_move(const Move& m, const UndoInfo& undo) {
    side_ = ~side_;
    const Color us = side_;
    if (us == Color::Black)
        --fullmove_;

    if (m.is_castle()) {
        const bool kingside = m.to > m.from;
        const Square rook_from = static_cast<Square>(kingside ? m.from + 3 : m.from - 4);
        const Square rook_to = static_cast<Square>(kingside ? m.from + 1 : m.from - 1);
        remove(rook_to);
        put(rook_from, Piece{PieceType::Rook, us});
    }

    const Piece moved = *piece_at(m.to);
    remove(m.to);
    put(m.from, m.promotion != PieceType::None ? Piece{PieceType::Pawn, us} : moved);

    if (undo.captured) {
        const Square victim = m.is_en_passant()
                                  ? static_cast<Square>(us == Color::White ? m.to - 8 : m.to + 8)
                                  : m.to;
        put(victim, *undo.captured);
    }
    castling_ = undo.castling_rights;
    ep_ = undo.en_passant;
    halfmove_ = undo.halfmove_clock;
    hash_ = undo.hash;
}

// ---------------------------------------------------------------------------
// Move generation

namespace detail {

inline void add_pawn_moves(MoveList& out, Square from, Square to, std::uint8_t flags) {
    if (rank_of(to) == 0 || rank_of(to) == 7) {
        for (PieceType t : {PieceType::Queen, PieceType::Rook, PieceType::Bishop, PieceType::Knight})
            out.push_back(Move{from, to, t, flags});
    } else {
        out.push_back(Move{from, to, PieceType::None, flags});
    }
}

inline void pseudo_legal_moves(const Position& p, MoveList& out) {
    const Color us = p.side_to_move(), them = ~us;
    const Bitboard own = p.pieces(us), enemy = p.pieces(them), occ = own | enemy;

    Bitboard pawns = p.pieces(us, PieceType::Pawn);
    const int fwd = us == Color::White ? 8 : -8;
    const int start_rank = us == Color::White ? 1 : 6;
    while (pawns) {
        const Square s = pop_lsb(pawns);
        const Square one = static_cast<Square>(s + fwd);
        if (!(occ & bit(one))) {
            add_pawn_moves(out, s, one, 0);
            const Square two = static_cast<Square>(s + 2 * fwd);
            if (rank_of(s) == start_rank && !(occ & bit(two)))
                out.push_back(Move{s, two, PieceType::None, move_flags::DoublePush});
        }
        Bitboard caps = pawn_attacks(us, s) & enemy;
        while (caps)
            add_pawn_moves(out, s, pop_lsb(caps), move_flags::Capture);
        if (p.en_passant() != NO_SQUARE && (pawn_attacks(us, s) & bit(p.en_passant())))
            out.push_back(Move{s, p.en_passant(), PieceType::None,
                               static_cast<std::uint8_t>(move_flags::Capture | move_flags::EnPassant)});
    }

    for (PieceType t : {PieceType::Knight, PieceType::Bishop, PieceType::Rook, PieceType::Queen, PieceType::King}) {
        Bitboard b = p.pieces(us, t);
        while (b) {
            const Square s = pop_lsb(b);
            Bitboard targets = piece_attacks(Piece{t, us}, s, occ) & ~own;
            while (targets) {
                const Square to = pop_lsb(targets);
                out.push_back(Move{s, to, PieceType::None,
                                   (enemy & bit(to)) ? move_flags::Capture : std::uint8_t{0}});
            }
        }
    }

    // Castling: king and rook at home (guaranteed by rights), path empty, king path unattacked.
    const std::uint8_t rights = p.castling_rights();
    if (us == Color::White && (rights & (castling::WhiteKingside | castling::WhiteQueenside))) {
        if ((rights & castling::WhiteKingside) && !(occ & (bit(F1) | bit(G1))) && !p.is_attacked(E1, them) &&
            !p.is_attacked(F1, them) && !p.is_attacked(G1, them))
            out.push_back(Move{E1, G1, PieceType::None, move_flags::Castle});
        if ((rights & castling::WhiteQueenside) && !(occ & (bit(B1) | bit(C1) | bit(D1))) &&
            !p.is_attacked(E1, them) && !p.is_attacked(D1, them) && !p.is_attacked(C1, them))
            out.push_back(Move{E1, C1, PieceType::None, move_flags::Castle});
    } else if (us == Color::Black && (rights & (castling::BlackKingside | castling::BlackQueenside))) {
        if ((rights & castling::BlackKingside) && !(occ & (bit(F8) | bit(G8))) && !p.is_attacked(E8, them) &&
            !p.is_attacked(F8, them) && !p.is_attacked(G8, them))
            out.push_back(Move{E8, G8, PieceType::None, move_flags::Castle});
        if ((rights & castling::BlackQueenside) && !(occ & (bit(B8) | bit(C8) | bit(D8))) &&
            !p.is_attacked(E8, them) && !p.is_attacked(D8, them) && !p.is_attacked(C8, them))
            out.push_back(Move{E8, C8, PieceType::None, move_flags::Castle});
    }
}

} // namespace detail

// All legal moves; the Check flag is set on moves that give check.
inline MoveList legal_moves(const Position& p) {
    MoveList pseudo, out;
    detail::pseudo_legal_moves(p, pseudo);
    const Color us = p.side_to_move();
    for (Move m : pseudo) {
        const Position next = p.after(m);
        if (next.in_check(us))
            continue;
        if (next.in_check(~us))
            m.flags |= move_flags::Check;
        out.push_back(m);
    }
    return out;
}

inline bool has_legal_move(const Position& p) {
    MoveList pseudo;
    detail::pseudo_legal_moves(p, pseudo);
    const Color us = p.side_to_move();
    // King moves last in the pseudo list; try them first since they are the likeliest escapes.
    for (std::size_t i = pseudo.size(); i-- > 0;)
        if (!p.after(pseudo[i]).in_check(us))
            return true;
    return false;
}

inline bool is_checkmate(const Position& p) { return p.in_check() && !has_legal_move(p); }
inline bool is_stalemate(const Position& p) { return !p.in_check() && !has_legal_move(p); }
inline bool gives_check(const Position& p, const Move& m) { return p.after(m).in_check(~p.side_to_move()); }

inline std::uint64_t perft(Position& p, int depth) {
    if (depth == 0)
        return 1;
    const MoveList moves = legal_moves(p);
    if (depth == 1)
        return moves.size();
    std::uint64_t nodes = 0;
    for (const Move& m : moves) {
        const UndoInfo undo = p.do_move(m);
        nodes += perft(p, depth - 1);
        p.undo_move(m, undo);
    }
    return nodes;
}

inline std::uint64_t perft(const Position& p, int depth) {
    Position copy = p;
    return perft(copy, depth);
}

// Fills in derived flags for a bare (from, to, promotion) move if it is legal.
inline std::optional<Move> find_legal(const Position& p, const Move& bare) {
    for (const Move& m : legal_moves(p))
        if (m == bare)
            return m;
    return std::nullopt;
}

// Squares the king of color `c` could step to if it were c's turn.
// Computed from the attack map with the king lifted, so it is meaningful
// even where the side-swapped position would be illegal.
inline Bitboard king_flight_squares(const Position& p, Color c) {
    const Square k = p.king_square(c);
    const Bitboard occ = p.occupancy() & ~bit(k);
    return king_attacks(k) & ~p.pieces(c) & ~p.attack_map(~c, occ);
}

} // namespace chessprob
