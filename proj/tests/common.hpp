// Shared helpers for the test binaries.
#pragma once

#include <chessprob/board.hpp>
#include <chessprob/composer.hpp>

#include <string>
#include <vector>

namespace testutil {

// Standard perft suite with node counts for depths 1..4.
struct PerftCase {
    const char* fen;
    std::uint64_t nodes[4];
};

inline const std::vector<PerftCase>& perft_suite() {
    static const std::vector<PerftCase> suite = {
        {"rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1", {20, 400, 8902, 197281}},
        {"r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1", {48, 2039, 97862, 4085603}},
        {"8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1", {14, 191, 2812, 43238}},
        {"r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1", {6, 264, 9467, 422333}},
        {"rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8", {44, 1486, 62379, 2103487}},
        {"r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10", {46, 2079, 89890, 3894594}},
    };
    return suite;
}

// Random legal White-to-move position with at most `max_pieces` men in total,
// White holding 1..4 extra units and Black 0..2.
inline chessprob::Position random_small_position(chessprob::Rng& rng, int max_pieces = 8) {
    using namespace chessprob;
    static constexpr PieceType kTypes[] = {PieceType::Pawn, PieceType::Knight, PieceType::Bishop, PieceType::Rook,
                                           PieceType::Queen};
    while (true) {
        BoardSetup s;
        auto place = [&](Piece p) {
            while (true) {
                const auto sq = static_cast<Square>(uniform_index(rng, 64));
                if (s.squares[sq])
                    continue;
                if (p.type == PieceType::Pawn && (rank_of(sq) == 0 || rank_of(sq) == 7))
                    continue;
                s.squares[sq] = p;
                return;
            }
        };
        place({PieceType::King, Color::White});
        place({PieceType::King, Color::Black});
        const int white = 1 + static_cast<int>(uniform_index(rng, 4));
        const int black = static_cast<int>(uniform_index(rng, 3));
        if (2 + white + black > max_pieces)
            continue;
        for (int i = 0; i < white; ++i)
            place({kTypes[uniform_index(rng, 5)], Color::White});
        for (int i = 0; i < black; ++i)
            place({kTypes[uniform_index(rng, 5)], Color::Black});
        if (Position::check_setup(s))
            continue;
        return Position::from_setup(s);
    }
}

inline std::vector<std::string> uci_list(const std::vector<chessprob::Move>& moves) {
    std::vector<std::string> out;
    for (const auto& m : moves)
        out.push_back(chessprob::uci(m));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace testutil
